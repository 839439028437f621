#ifndef DURATELESS_CODEC_HPP
#define DURATELESS_CODEC_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "durateless/ensemble.hpp"
#include "durateless/errors.hpp"
#include "durateless/rng.hpp"

namespace durateless {

/** Payload of one symbol. Tests use single bits; any byte value works, the
 *  decoder only XORs.
 */
using Symbol = std::uint8_t;

/** One received output symbol: neighbor indices into each source block
 *  (disjoint, duplicate-free) and the XOR of the neighbor payloads.
 *  The kind is derivable: only source-1 neighbors = forwarded-1, only
 *  source-2 neighbors = forwarded-2, both = combined.
 */
struct CheckNode {
  std::vector<std::int32_t> s1;
  std::vector<std::int32_t> s2;
  Symbol value = 0;

  bool forwarded1() const { return !s1.empty() && s2.empty(); }
  bool forwarded2() const { return s1.empty() && !s2.empty(); }
  bool combined() const { return !s1.empty() && !s2.empty(); }
  int total_degree() const { return static_cast<int>(s1.size() + s2.size()); }
};

/** Bipartite decoding graph over the two source blocks. */
struct DecoderGraph {
  long long n1 = 0;
  long long n2 = 0;
  std::vector<CheckNode> checks;
  std::vector<std::uint8_t> recovered1, recovered2;  // flags, false -> true only
  std::vector<Symbol> decoded1, decoded2;            // valid where recovered

  DecoderGraph(long long n1_, long long n2_)
      : n1(n1_),
        n2(n2_),
        recovered1(static_cast<std::size_t>(n1_), 0),
        recovered2(static_cast<std::size_t>(n2_), 0),
        decoded1(static_cast<std::size_t>(n1_), 0),
        decoded2(static_cast<std::size_t>(n2_), 0) {
    if (n1_ < 0 || n2_ < 0) throw InvalidParameterError("graph: negative block length");
  }

  void validate() const {
    for (const auto& c : checks) {
      if (c.s1.empty() && c.s2.empty())
        throw InvalidParameterError("graph: check node with no neighbors");
      for (auto i : c.s1)
        if (i < 0 || i >= n1) throw InvalidParameterError("graph: source-1 index out of range");
      for (auto i : c.s2)
        if (i < 0 || i >= n2) throw InvalidParameterError("graph: source-2 index out of range");
      auto has_dup = [](std::vector<std::int32_t> v) {
        std::sort(v.begin(), v.end());
        return std::adjacent_find(v.begin(), v.end()) != v.end();
      };
      if (has_dup(c.s1) || has_dup(c.s2))
        throw InvalidParameterError("graph: duplicate neighbor in check node");
    }
  }
};

/** Draw a uniformly random d-subset of {0..block_len-1} with d sampled from
 *  dist. Neighbors are drawn without replacement (Floyd's algorithm) and
 *  returned sorted.
 */
template <typename Scalar>
std::vector<std::int32_t> encode_symbol(long long block_len,
                                        const DegreeDistributionT<Scalar>& dist,
                                        RandomStream& rng) {
  if (dist.max_degree() > block_len)
    throw DegreeExceedsBlockError("encode: max degree " + std::to_string(dist.max_degree()) +
                                  " exceeds block length " + std::to_string(block_len));
  const int d = dist.sample(rng);
  std::vector<std::int32_t> picked;
  picked.reserve(static_cast<std::size_t>(d));
  for (long long j = block_len - d; j < block_len; ++j) {
    const auto t = static_cast<std::int32_t>(uniform_below(rng, static_cast<std::uint64_t>(j + 1)));
    if (std::find(picked.begin(), picked.end(), t) != picked.end())
      picked.push_back(static_cast<std::int32_t>(j));
    else
      picked.push_back(t);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

/** Produce one relay output: a fresh source-1 symbol with probability p1, a
 *  fresh source-2 symbol with p2, or the combination of one fresh symbol
 *  from each source with p3. The value field is left zero; payload XOR
 *  happens where payloads are known.
 */
template <typename Scalar>
CheckNode relay_step(const CodeEnsembleT<Scalar>& e, RandomStream& rng) {
  CheckNode node;
  const double u = uniform01(rng);
  if (u < e.p1) {
    node.s1 = encode_symbol(e.block1(), e.omega, rng);
  } else if (u < e.p1 + e.p2) {
    node.s2 = encode_symbol(e.block2(), e.phi, rng);
  } else {
    node.s1 = encode_symbol(e.block1(), e.omega, rng);
    node.s2 = encode_symbol(e.block2(), e.phi, rng);
  }
  return node;
}

/** Generate the graph seen by the destination: round((1+rho)*gamma*k)
 *  relay outputs with values XORed from the true payloads.
 */
template <typename Scalar>
DecoderGraph generate_received(const CodeEnsembleT<Scalar>& e, std::span<const Symbol> payloads1,
                               std::span<const Symbol> payloads2, RandomStream& rng) {
  if (static_cast<long long>(payloads1.size()) != e.block1() ||
      static_cast<long long>(payloads2.size()) != e.block2())
    throw InvalidParameterError("generate_received: payload lengths must match block lengths");
  DecoderGraph g(e.block1(), e.block2());
  const long long n = e.received_count();
  g.checks.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    CheckNode node = relay_step(e, rng);
    Symbol v = 0;
    for (auto idx : node.s1) v = static_cast<Symbol>(v ^ payloads1[static_cast<std::size_t>(idx)]);
    for (auto idx : node.s2) v = static_cast<Symbol>(v ^ payloads2[static_cast<std::size_t>(idx)]);
    node.value = v;
    g.checks.push_back(std::move(node));
  }
  return g;
}

/** Iterative peeling: repeatedly take a check with exactly one unrecovered
 *  neighbor and resolve that neighbor by XOR, until no such check remains.
 *  Ripple kept as a FIFO of releasable checks with per-check unknown
 *  counters; total work is linear in the number of edges, and the final
 *  recovered set does not depend on processing order. If `trace` is given,
 *  one CSV line per peeling step (check id, block, symbol) is written.
 */
inline void peel_decode(DecoderGraph& g, std::ostream* trace = nullptr) {
  const auto nchecks = g.checks.size();
  std::vector<int> unknown(nchecks, 0);
  std::vector<Symbol> residual(nchecks, 0);
  // variable -> incident checks
  std::vector<std::vector<std::int32_t>> adj1(static_cast<std::size_t>(g.n1));
  std::vector<std::vector<std::int32_t>> adj2(static_cast<std::size_t>(g.n2));
  std::deque<std::int32_t> ripple;
  if (trace) *trace << "check,block,symbol\n";
  for (std::size_t ci = 0; ci < nchecks; ++ci) {
    const auto& c = g.checks[ci];
    Symbol r = c.value;
    int u = 0;
    for (auto i : c.s1) {
      adj1[static_cast<std::size_t>(i)].push_back(static_cast<std::int32_t>(ci));
      if (g.recovered1[static_cast<std::size_t>(i)])
        r = static_cast<Symbol>(r ^ g.decoded1[static_cast<std::size_t>(i)]);
      else
        ++u;
    }
    for (auto i : c.s2) {
      adj2[static_cast<std::size_t>(i)].push_back(static_cast<std::int32_t>(ci));
      if (g.recovered2[static_cast<std::size_t>(i)])
        r = static_cast<Symbol>(r ^ g.decoded2[static_cast<std::size_t>(i)]);
      else
        ++u;
    }
    unknown[ci] = u;
    residual[ci] = r;
    if (u == 1) ripple.push_back(static_cast<std::int32_t>(ci));
  }

  auto release = [&](int block, std::int32_t sym, Symbol value, std::int32_t from_check) {
    auto& recovered = block == 1 ? g.recovered1 : g.recovered2;
    auto& decoded = block == 1 ? g.decoded1 : g.decoded2;
    recovered[static_cast<std::size_t>(sym)] = 1;
    decoded[static_cast<std::size_t>(sym)] = value;
    if (trace) *trace << from_check << ',' << block << ',' << sym << '\n';
    const auto& incident = block == 1 ? adj1[static_cast<std::size_t>(sym)]
                                      : adj2[static_cast<std::size_t>(sym)];
    for (auto cj : incident) {
      residual[static_cast<std::size_t>(cj)] =
          static_cast<Symbol>(residual[static_cast<std::size_t>(cj)] ^ value);
      if (--unknown[static_cast<std::size_t>(cj)] == 1)
        ripple.push_back(cj);
    }
  };

  while (!ripple.empty()) {
    const auto ci = ripple.front();
    ripple.pop_front();
    if (unknown[static_cast<std::size_t>(ci)] != 1) continue;  // released meanwhile
    const auto& c = g.checks[static_cast<std::size_t>(ci)];
    int block = 0;
    std::int32_t sym = -1;
    for (auto i : c.s1)
      if (!g.recovered1[static_cast<std::size_t>(i)]) {
        block = 1;
        sym = i;
        break;
      }
    if (block == 0)
      for (auto i : c.s2)
        if (!g.recovered2[static_cast<std::size_t>(i)]) {
          block = 2;
          sym = i;
          break;
        }
    release(block, sym, residual[static_cast<std::size_t>(ci)], ci);
  }
}

/** Residual error fractions after decoding: unrecovered count over block
 *  length, per source.
 */
inline std::pair<double, double> empirical_ber(const DecoderGraph& g) {
  auto frac_missing = [](const std::vector<std::uint8_t>& flags) {
    if (flags.empty()) return 0.0;
    std::size_t miss = 0;
    for (auto f : flags) miss += f ? 0 : 1;
    return static_cast<double>(miss) / static_cast<double>(flags.size());
  };
  return {frac_missing(g.recovered1), frac_missing(g.recovered2)};
}

/** JSON adjacency form for regression fixtures. */
inline nlohmann::json graph_to_json(const DecoderGraph& g) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : g.checks)
    checks.push_back({{"s1", c.s1}, {"s2", c.s2}, {"value", static_cast<int>(c.value)}});
  return {{"n1", g.n1}, {"n2", g.n2}, {"checks", std::move(checks)}};
}

inline DecoderGraph graph_from_json(const nlohmann::json& j) {
  DecoderGraph g(j.at("n1").get<long long>(), j.at("n2").get<long long>());
  for (const auto& cj : j.at("checks")) {
    CheckNode c;
    c.s1 = cj.at("s1").get<std::vector<std::int32_t>>();
    c.s2 = cj.at("s2").get<std::vector<std::int32_t>>();
    c.value = static_cast<Symbol>(cj.at("value").get<int>());
    g.checks.push_back(std::move(c));
  }
  g.validate();
  return g;
}

}  // namespace durateless

#endif
