#ifndef DURATELESS_ENSEMBLE_HPP
#define DURATELESS_ENSEMBLE_HPP

#include <cmath>
#include <string>

#include "durateless/degree.hpp"
#include "durateless/errors.hpp"

namespace durateless {

/** Round half away from zero; block and symbol counts in the code
 *  definition are treated as exact by the analysis.
 */
inline long long round_half_up(double x) { return static_cast<long long>(std::floor(x + 0.5)); }

/** Full parameter set of a two-source code with a combining relay:
 *  source 1 encodes a block of round(rho*k) symbols with distribution
 *  omega, source 2 encodes k symbols with phi, and the relay forwards a
 *  source-1 symbol with probability p1, a source-2 symbol with p2, and the
 *  XOR of one fresh symbol from each source with p3 = 1 - p1 - p2. The
 *  destination decodes once round((1+rho)*gamma*k) symbols have arrived.
 */
template <typename Scalar>
struct CodeEnsembleT {
  double rho;    // block-length ratio, 0 < rho <= 1
  long long k;   // source-2 block length
  DegreeDistributionT<Scalar> omega;
  DegreeDistributionT<Scalar> phi;
  double p1;
  double p2;
  double p3;
  double gamma;  // reception overhead, >= 0

  CodeEnsembleT(double rho_, long long k_, DegreeDistributionT<Scalar> omega_,
                DegreeDistributionT<Scalar> phi_, double p1_, double p2_, double p3_,
                double gamma_)
      : rho(rho_),
        k(k_),
        omega(std::move(omega_)),
        phi(std::move(phi_)),
        p1(p1_),
        p2(p2_),
        p3(p3_),
        gamma(gamma_) {
    validate();
  }

  /** Source-1 block length, round(rho * k). */
  long long block1() const { return round_half_up(rho * static_cast<double>(k)); }

  /** Source-2 block length. */
  long long block2() const { return k; }

  /** Number of symbols collected at the destination, round((1+rho)*gamma*k). */
  long long received_count() const {
    return round_half_up((1.0 + rho) * gamma * static_cast<double>(k));
  }

  CodeEnsembleT with_gamma(double new_gamma) const {
    return CodeEnsembleT(rho, k, omega, phi, p1, p2, p3, new_gamma);
  }

  void validate() const {
    if (!(rho > 0.0 && rho <= 1.0))
      throw InvalidParameterError("ensemble: rho must satisfy 0 < rho <= 1, got " +
                                  std::to_string(rho));
    if (k < 1) throw InvalidParameterError("ensemble: k must be positive");
    if (block1() < 1)
      throw InvalidParameterError("ensemble: rho*k rounds to a non-positive block length");
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
      throw InvalidParameterError("ensemble: gamma must be finite and >= 0");
    for (double p : {p1, p2, p3})
      if (!(p >= 0.0 && p <= 1.0))
        throw InvalidParameterError("ensemble: relay probabilities must lie in [0, 1]");
    if (std::abs(p1 + p2 + p3 - 1.0) > 1e-12)
      throw InvalidParameterError("ensemble: p1 + p2 + p3 must equal 1 within 1e-12, got " +
                                  std::to_string(p1 + p2 + p3));
    if (omega.max_degree() > block1())
      throw DegreeExceedsBlockError("ensemble: max degree of omega (" +
                                    std::to_string(omega.max_degree()) +
                                    ") exceeds source-1 block length " +
                                    std::to_string(block1()));
    if (phi.max_degree() > block2())
      throw DegreeExceedsBlockError("ensemble: max degree of phi (" +
                                    std::to_string(phi.max_degree()) +
                                    ") exceeds source-2 block length " + std::to_string(k));
  }
};

using CodeEnsemble = CodeEnsembleT<double>;

}  // namespace durateless

#endif
