#ifndef DURATELESS_RNG_HPP
#define DURATELESS_RNG_HPP

#include <cstdint>
#include <random>

namespace durateless {

/** Random stream type used throughout the library. All randomness is drawn
 *  through the helpers below so that results are byte-stable for a given
 *  seed (std::mt19937_64 output is fully specified; the standard
 *  distributions are not, so they are never used).
 */
using RandomStream = std::mt19937_64;

/** One step of the splitmix64 mixer. */
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/** Derive a child seed from a base seed and up to two stream labels.
 *  Used for per-trial / per-(generation, individual) streams: growing one
 *  label never re-randomizes streams derived with other labels.
 */
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t s = base;
  std::uint64_t h = splitmix64(s);
  s ^= a + 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(s);
  s ^= b + 0xd1b54a32d192ed03ULL;
  h ^= splitmix64(s);
  return h;
}

inline RandomStream make_stream(std::uint64_t seed) { return RandomStream(seed); }

/** Uniform real in [0, 1) with 53 random bits. */
inline double uniform01(RandomStream& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/** Unbiased uniform integer in [0, n). Requires n >= 1. */
inline std::uint64_t uniform_below(RandomStream& g, std::uint64_t n) {
  // rejection sampling over the top of the 64-bit range
  const std::uint64_t limit = n * (UINT64_MAX / n);
  std::uint64_t x;
  do {
    x = g();
  } while (x >= limit);
  return x % n;
}

}  // namespace durateless

#endif
