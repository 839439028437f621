#ifndef DURATELESS_DEGREE_HPP
#define DURATELESS_DEGREE_HPP

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "durateless/errors.hpp"
#include "durateless/rng.hpp"

namespace durateless {

/** Probability distribution over check-node degrees 1..B, stored densely.
 *
 *  Construction normalizes the raw weights to sum to one (published
 *  distributions are often printed rounded, so their raw sums drift from
 *  one). Interior zero-mass degrees are kept; trailing zeros are trimmed so
 *  that B is the highest degree carrying mass. Immutable after
 *  construction and safe to share across threads.
 */
template <typename Scalar>
class DegreeDistributionT {
public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  /** Normalize raw nonnegative weights; raw[i] is the weight of degree i+1. */
  explicit DegreeDistributionT(const Array& raw) {
    if (raw.size() < 1) throw AllZeroError("degree distribution: no weights given");
    if (!raw.isFinite().all()) throw NonFiniteError("degree distribution: non-finite weight");
    if ((raw < Scalar(0)).any()) throw NegativeWeightError("degree distribution: negative weight");
    Eigen::Index last = -1;
    for (Eigen::Index i = 0; i < raw.size(); ++i)
      if (raw[i] > Scalar(0)) last = i;
    if (last < 0) throw AllZeroError("degree distribution: no positive weight");
    probs_ = raw.head(last + 1);
    const Scalar total = probs_.sum();
    // skip the division when the input is already normalized to rounding
    // accuracy, so save/load round-trips reproduce the stored vector bitwise
    if (std::abs(static_cast<double>(total) - 1.0) > 1e-11) probs_ /= total;
    cumulative_.resize(probs_.size());
    Scalar acc(0);
    for (Eigen::Index i = 0; i < probs_.size(); ++i) {
      acc += probs_[i];
      cumulative_[i] = acc;
    }
    cumulative_[probs_.size() - 1] = Scalar(1);  // guard against rounding in the tail
  }

  /** Convenience: build from a {degree: weight} map. */
  static DegreeDistributionT from_map(const std::map<int, Scalar>& weights) {
    if (weights.empty()) throw AllZeroError("degree distribution: no weights given");
    int max_deg = 0;
    for (const auto& [deg, w] : weights) {
      if (deg < 1) throw InvalidParameterError("degree distribution: degree < 1");
      max_deg = std::max(max_deg, deg);
      (void)w;
    }
    Array raw = Array::Zero(max_deg);
    for (const auto& [deg, w] : weights) raw[deg - 1] = w;
    return DegreeDistributionT(raw);
  }

  /** Highest degree with positive mass. */
  int max_degree() const { return static_cast<int>(probs_.size()); }

  /** Probability of degree d (zero outside 1..B). */
  Scalar prob(int degree) const {
    if (degree < 1 || degree > max_degree()) return Scalar(0);
    return probs_[degree - 1];
  }

  /** Dense mass vector; entry i holds the probability of degree i+1. */
  const Array& probs() const { return probs_; }

  /** Draw a degree by inverse-CDF binary search, O(log B). */
  int sample(RandomStream& rng) const {
    const Scalar u = static_cast<Scalar>(uniform01(rng));
    const Scalar* begin = cumulative_.data();
    const Scalar* end = begin + cumulative_.size();
    const Scalar* it = std::upper_bound(begin, end, u);
    if (it == end) --it;
    return static_cast<int>(it - begin) + 1;
  }

  friend bool operator==(const DegreeDistributionT& a, const DegreeDistributionT& b) {
    return a.probs_.size() == b.probs_.size() && (a.probs_ == b.probs_).all();
  }

private:
  Array probs_;       // index i <-> degree i+1
  Array cumulative_;  // inclusive prefix sums of probs_
};

using DegreeDistribution = DegreeDistributionT<double>;

/** Build a distribution from raw weights indexed by degree (degree 1 first). */
template <typename Scalar>
DegreeDistributionT<Scalar> new_distribution(
    const typename DegreeDistributionT<Scalar>::Array& raw) {
  return DegreeDistributionT<Scalar>(raw);
}

inline DegreeDistribution new_distribution(const std::vector<double>& raw) {
  return DegreeDistribution(Eigen::Map<const Eigen::ArrayXd>(raw.data(),
                                                             static_cast<Eigen::Index>(raw.size())));
}

/** Average degree, mu = sum_i i * p_i. */
template <typename Scalar>
Scalar mean_degree(const DegreeDistributionT<Scalar>& d) {
  const auto& p = d.probs();
  const auto degrees =
      Eigen::Array<Scalar, Eigen::Dynamic, 1>::LinSpaced(p.size(), Scalar(1),
                                                         static_cast<Scalar>(p.size()));
  return (p * degrees).sum();
}

/** Edge-perspective coefficients beta, indexed 0..B-1:
 *  beta_i = (i+1) p_{i+1} / mu, the probability that a uniformly random
 *  edge attaches to a check with i further neighbors on this side.
 */
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> edge_perspective(const DegreeDistributionT<Scalar>& d) {
  const auto& p = d.probs();
  const auto degrees =
      Eigen::Array<Scalar, Eigen::Dynamic, 1>::LinSpaced(p.size(), Scalar(1),
                                                         static_cast<Scalar>(p.size()));
  return (p * degrees) / mean_degree(d);
}

/** Distribution of the sum of two independent draws, one from each input.
 *  Mass at degree d is sum_j a_j b_{d-j}; the support is 2..Ba+Bb.
 */
template <typename Scalar>
DegreeDistributionT<Scalar> convolve(const DegreeDistributionT<Scalar>& a,
                                     const DegreeDistributionT<Scalar>& b) {
  const auto& pa = a.probs();
  const auto& pb = b.probs();
  typename DegreeDistributionT<Scalar>::Array out =
      DegreeDistributionT<Scalar>::Array::Zero(pa.size() + pb.size());
  for (Eigen::Index i = 0; i < pa.size(); ++i)
    for (Eigen::Index j = 0; j < pb.size(); ++j)
      out[i + j + 1] += pa[i] * pb[j];  // degrees (i+1) + (j+1)
  return DegreeDistributionT<Scalar>(out);
}

/** Draw a degree from d using rng. */
template <typename Scalar>
int sample_degree(const DegreeDistributionT<Scalar>& d, RandomStream& rng) {
  return d.sample(rng);
}

/** Robust-soliton distribution for block length k with the usual (c, delta)
 *  parameters: normalized sum of the ideal-soliton component and the spike
 *  component. Single-source baseline utility.
 */
template <typename Scalar = double>
DegreeDistributionT<Scalar> robust_soliton(int k, double c, double delta) {
  if (k < 2) throw InvalidParameterError("robust_soliton: k must be >= 2");
  if (!(c > 0.0)) throw InvalidParameterError("robust_soliton: c must be > 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw InvalidParameterError("robust_soliton: delta must be in (0, 1)");
  const double R = c * std::log(static_cast<double>(k) / delta) * std::sqrt(static_cast<double>(k));
  // spike at round(k / R), clamped into the support
  const int spike = static_cast<int>(
      std::min<long long>(k, std::max<long long>(1, std::llround(static_cast<double>(k) / R))));
  typename DegreeDistributionT<Scalar>::Array raw =
      DegreeDistributionT<Scalar>::Array::Zero(k);
  raw[0] = Scalar(1.0 / k);
  for (int i = 2; i <= k; ++i) raw[i - 1] = Scalar(1.0 / (static_cast<double>(i) * (i - 1)));
  for (int i = 1; i < spike; ++i) raw[i - 1] += Scalar(R / (static_cast<double>(i) * k));
  raw[spike - 1] += Scalar(std::max(0.0, R * std::log(R / delta) / k));
  return DegreeDistributionT<Scalar>(raw);
}

/** Serialize as a JSON map {"degree": weight}. Zero-mass degrees are
 *  omitted; weights are written exactly (shortest round-trip form), so
 *  save/load reproduces the distribution bit for bit.
 */
inline nlohmann::json to_json(const DegreeDistribution& d) {
  nlohmann::json j = nlohmann::json::object();
  for (int deg = 1; deg <= d.max_degree(); ++deg)
    if (d.prob(deg) > 0.0) j[std::to_string(deg)] = d.prob(deg);
  return j;
}

/** Parse a JSON map from degree (integer or string key) to weight. */
inline DegreeDistribution distribution_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.empty())
    throw InvalidParameterError("degree distribution JSON: expected a non-empty map");
  std::map<int, double> weights;
  for (const auto& [key, value] : j.items()) {
    std::size_t pos = 0;
    int deg = 0;
    try {
      deg = std::stoi(key, &pos);
    } catch (const std::exception&) {
      throw InvalidParameterError("degree distribution JSON: bad degree key '" + key + "'");
    }
    if (pos != key.size() || deg < 1)
      throw InvalidParameterError("degree distribution JSON: bad degree key '" + key + "'");
    if (!value.is_number())
      throw InvalidParameterError("degree distribution JSON: weight for degree " + key +
                                  " is not a number");
    weights[deg] = value.get<double>();
  }
  return DegreeDistribution::from_map(weights);
}

}  // namespace durateless

#endif
