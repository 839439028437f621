#ifndef DURATELESS_ANALYSIS_HPP
#define DURATELESS_ANALYSIS_HPP

#include <Eigen/Core>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "durateless/degree.hpp"
#include "durateless/ensemble.hpp"
#include "durateless/io.hpp"

namespace durateless {

/** Evaluate sum_i coeffs[i] * x^i by Horner's rule. */
template <typename Scalar>
Scalar polyval(const Eigen::Array<Scalar, Eigen::Dynamic, 1>& coeffs, Scalar x) {
  Scalar acc(0);
  for (Eigen::Index i = coeffs.size() - 1; i >= 0; --i) acc = acc * x + coeffs[i];
  return acc;
}

/** Precomputed coefficients of the two-source recovery recursion.
 *
 *  beta1/beta2 are the edge-perspective vectors of omega/phi (index i is
 *  the probability of i further same-side neighbors). beta3/beta4 are the
 *  node-perspective cross vectors (the mass vectors of phi and omega; a
 *  combined check has at least one neighbor on the far side). alpha1/alpha2
 *  are the Poisson means of the variable-node degree on each side, and
 *  pp1..pp4 reweight the check mixture seen from each side:
 *  pp1 = p1/(1-p2), pp3 = p3/(1-p2), pp2 = p2/(1-p1), pp4 = p3/(1-p1).
 *
 *  If p2 = 1 (resp. p1 = 1) no check references source 1 (resp. 2); the
 *  pp quotients degenerate to 0/0 and the starved flag pins that source's
 *  recursion at 1 while the other runs standalone.
 */
template <typename Scalar>
struct AndOrCoefficientsT {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  Array beta1, beta2;  // edge perspective, index 0..B-1
  Array beta3, beta4;  // node perspective, index 0 <-> degree 1
  Scalar alpha1{}, alpha2{};
  Scalar pp1{}, pp2{}, pp3{}, pp4{};
  bool starved1 = false;
  bool starved2 = false;
};

using AndOrCoefficients = AndOrCoefficientsT<double>;

/** Iterate pair of the recursion: y1/y2 are the probabilities that a
 *  randomly chosen source-1/source-2 symbol is still unrecovered.
 */
template <typename Scalar>
struct FixedPointStateT {
  Scalar y1{1}, y2{1};
  int iterations = 0;
  bool converged = false;
};

using FixedPointState = FixedPointStateT<double>;

template <typename Scalar>
AndOrCoefficientsT<Scalar> build_coefficients(const CodeEnsembleT<Scalar>& e) {
  AndOrCoefficientsT<Scalar> c;
  c.beta1 = edge_perspective(e.omega);
  c.beta2 = edge_perspective(e.phi);
  c.beta3 = e.phi.probs();
  c.beta4 = e.omega.probs();
  const Scalar mu1 = mean_degree(e.omega);
  const Scalar mu2 = mean_degree(e.phi);
  c.alpha1 = Scalar((1.0 - e.p2) * e.gamma * (1.0 + e.rho) / e.rho) * mu1;
  c.alpha2 = Scalar((1.0 - e.p1) * e.gamma * (1.0 + e.rho)) * mu2;
  c.starved1 = (1.0 - e.p2 <= 0.0);
  c.starved2 = (1.0 - e.p1 <= 0.0);
  if (!c.starved1) {
    c.pp1 = Scalar(e.p1 / (1.0 - e.p2));
    c.pp3 = Scalar(e.p3 / (1.0 - e.p2));
  }
  if (!c.starved2) {
    c.pp2 = Scalar(e.p2 / (1.0 - e.p1));
    c.pp4 = Scalar(e.p3 / (1.0 - e.p1));
  }
  return c;
}

/** One step of the recursion. The cross term is the factorized form of the
 *  Cauchy double sum: the joint sum over (same-side residual degree, far
 *  side degree) of a combined check splits exactly into the product of the
 *  two marginal series, reducing the step from O(B^2) to O(B).
 */
template <typename Scalar>
FixedPointStateT<Scalar> iterate_once(const AndOrCoefficientsT<Scalar>& c,
                                      const FixedPointStateT<Scalar>& s) {
  using std::exp;
  FixedPointStateT<Scalar> next = s;
  const Scalar x1 = Scalar(1) - s.y1;
  const Scalar x2 = Scalar(1) - s.y2;
  // S = edge-perspective series on a side; T = node-perspective far-side
  // series of a combined check (no constant term: at least one neighbor).
  const Scalar S1 = polyval(c.beta1, x1);
  const Scalar S2 = polyval(c.beta2, x2);
  const Scalar T1 = x1 * polyval(c.beta4, x1);
  const Scalar T2 = x2 * polyval(c.beta3, x2);
  next.y1 = c.starved1 ? Scalar(1) : exp(-c.alpha1 * (c.pp1 * S1 + c.pp3 * S1 * T2));
  next.y2 = c.starved2 ? Scalar(1) : exp(-c.alpha2 * (c.pp2 * S2 + c.pp4 * S2 * T1));
  next.iterations = s.iterations + 1;
  return next;
}

/** Result of the fixed-point iteration; ber1/ber2 are the asymptotic
 *  residual error rates of the two sources.
 */
template <typename Scalar>
struct AnalysisResultT {
  Scalar ber1{}, ber2{};
  int iterations = 0;
  bool converged = false;
};

using AnalysisResult = AnalysisResultT<double>;

/** Iterate the recursion from y = (1, 1), i.e. nothing recovered, until the
 *  largest iterate change drops below tol or max_iter is reached. The
 *  sequence is non-increasing in both coordinates, so the limit is the
 *  largest fixed point; a max_iter exit is flagged, not thrown, and the
 *  last iterate (an upper bound on the true error rates) is still returned.
 */
template <typename Scalar>
AnalysisResultT<Scalar> fixed_point(const AndOrCoefficientsT<Scalar>& c, double tol = 1e-10,
                                    int max_iter = 10000) {
  if (!(tol > 0)) throw InvalidParameterError("fixed_point: tol must be > 0");
  using std::abs;
  using std::max;
  FixedPointStateT<Scalar> state;
  AnalysisResultT<Scalar> out;
  while (state.iterations < max_iter) {
    const FixedPointStateT<Scalar> next = iterate_once(c, state);
    const Scalar delta = max(abs(next.y1 - state.y1), abs(next.y2 - state.y2));
    state = next;
    if (delta < Scalar(tol)) {
      state.converged = true;
      break;
    }
  }
  out.ber1 = state.y1;
  out.ber2 = state.y2;
  out.iterations = state.iterations;
  out.converged = state.converged;
  return out;
}

template <typename Scalar>
AnalysisResultT<Scalar> fixed_point(const CodeEnsembleT<Scalar>& e, double tol = 1e-10,
                                    int max_iter = 10000) {
  return fixed_point(build_coefficients(e), tol, max_iter);
}

/** One row of a gamma sweep. */
struct CurvePoint {
  double gamma{}, ber1{}, ber2{};
  int iterations = 0;
  bool converged = false;
};

/** Evaluate the fixed point across a grid of overheads. */
template <typename Scalar>
std::vector<CurvePoint> ber_curve(const CodeEnsembleT<Scalar>& e,
                                  const std::vector<double>& gamma_grid, double tol = 1e-10,
                                  int max_iter = 10000) {
  std::vector<CurvePoint> rows;
  rows.reserve(gamma_grid.size());
  for (double g : gamma_grid) {
    if (!(g > 0.0))
      throw InvalidParameterError("ber_curve: gamma grid entries must be > 0");
    const auto r = fixed_point(e.with_gamma(g), tol, max_iter);
    rows.push_back({g, static_cast<double>(r.ber1), static_cast<double>(r.ber2), r.iterations,
                    r.converged});
  }
  return rows;
}

/** Render a gamma sweep as CSV. */
inline std::string curve_csv(const std::vector<CurvePoint>& rows) {
  std::ostringstream out;
  out << "gamma,ber1,ber2,iterations,converged\n";
  for (const auto& r : rows)
    out << csv_double(r.gamma) << ',' << csv_double(r.ber1) << ',' << csv_double(r.ber2) << ','
        << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
  return out.str();
}

}  // namespace durateless

#endif
