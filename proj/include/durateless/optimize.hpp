#ifndef DURATELESS_OPTIMIZE_HPP
#define DURATELESS_OPTIMIZE_HPP

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "durateless/analysis.hpp"
#include "durateless/ensemble.hpp"
#include "durateless/errors.hpp"
#include "durateless/io.hpp"
#include "durateless/parallel.hpp"
#include "durateless/rng.hpp"

namespace durateless {

/** Decision vector of the design search: raw degree weights for each source
 *  plus the two free relay probabilities. All genes live in [0, 1]; repair
 *  maps any such vector onto a feasible code.
 */
struct Genome {
  Eigen::ArrayXd omega_weights;
  Eigen::ArrayXd phi_weights;
  double p1_raw = 0;
  double p2_raw = 0;

  Eigen::Index dimension() const { return omega_weights.size() + phi_weights.size() + 2; }

  Eigen::ArrayXd flatten() const {
    Eigen::ArrayXd x(dimension());
    x.head(omega_weights.size()) = omega_weights;
    x.segment(omega_weights.size(), phi_weights.size()) = phi_weights;
    x[dimension() - 2] = p1_raw;
    x[dimension() - 1] = p2_raw;
    return x;
  }

  static Genome unflatten(const Eigen::ArrayXd& x, Eigen::Index b1, Eigen::Index b2) {
    Genome g;
    g.omega_weights = x.head(b1);
    g.phi_weights = x.segment(b1, b2);
    g.p1_raw = x[b1 + b2];
    g.p2_raw = x[b1 + b2 + 1];
    return g;
  }
};

/** Fixed problem constants of one design run. The asymptotic objectives do
 *  not involve k; it only bounds the admissible degrees and is carried into
 *  exported parameter sets for later simulation.
 */
struct DesignProblem {
  double rho = 1.0;
  long long k = 2000;
  double gamma = 1.05;
  int B1 = 100;
  int B2 = 100;

  void validate() const {
    if (!(rho > 0.0 && rho <= 1.0)) throw InvalidParameterError("problem: 0 < rho <= 1 required");
    if (!(gamma > 0.0)) throw InvalidParameterError("problem: gamma must be > 0");
    if (B1 < 1 || B2 < 1) throw InvalidParameterError("problem: B1, B2 must be >= 1");
    if (k < 1) throw InvalidParameterError("problem: k must be positive");
  }
};

/** Clip negatives, renormalize each weight block, and scale (p1, p2) onto
 *  the simplex when they overshoot. Idempotent up to rounding.
 */
inline Genome repair(Genome g) {
  g.omega_weights = g.omega_weights.max(0.0);
  g.phi_weights = g.phi_weights.max(0.0);
  const double so = g.omega_weights.sum();
  const double sp = g.phi_weights.sum();
  if (!(so > 0.0)) throw AllZeroError("genome: omega weight block has no positive mass");
  if (!(sp > 0.0)) throw AllZeroError("genome: phi weight block has no positive mass");
  g.omega_weights /= so;
  g.phi_weights /= sp;
  g.p1_raw = std::max(0.0, g.p1_raw);
  g.p2_raw = std::max(0.0, g.p2_raw);
  const double ps = g.p1_raw + g.p2_raw;
  if (ps > 1.0) {
    g.p1_raw /= ps;
    g.p2_raw /= ps;
  }
  return g;
}

/** Decode a repaired genome into a code ensemble with p3 = 1 - p1 - p2. */
inline CodeEnsemble decode_genome(const Genome& g, const DesignProblem& problem) {
  const double p3 = std::max(0.0, 1.0 - g.p1_raw - g.p2_raw);
  return CodeEnsemble(problem.rho, problem.k, DegreeDistribution(g.omega_weights),
                      DegreeDistribution(g.phi_weights), g.p1_raw, g.p2_raw, p3, problem.gamma);
}

inline CodeEnsemble repair_and_decode(const Genome& g, const DesignProblem& problem) {
  return decode_genome(repair(g), problem);
}

/** An evaluated design: repaired genome, objective values, and the
 *  protection ratio eta = ber2 / ber1 (flagged infinite when ber1 = 0).
 */
struct DesignPoint {
  Genome genome;
  double ber1 = 1.0;
  double ber2 = 1.0;
  double eta = 1.0;
  bool eta_infinite = false;
  bool converged = true;
};

inline DesignPoint evaluate(const Genome& g, const DesignProblem& problem) {
  DesignPoint p;
  p.genome = repair(g);
  const CodeEnsemble e = decode_genome(p.genome, problem);
  const AnalysisResult r = fixed_point(e);
  p.ber1 = r.ber1;
  p.ber2 = r.ber2;
  p.converged = r.converged;
  if (p.ber1 > 0.0) {
    p.eta = p.ber2 / p.ber1;
  } else {
    p.eta = std::numeric_limits<double>::infinity();
    p.eta_infinite = true;
  }
  return p;
}

/** a dominates b: no worse in both objectives, better in at least one. */
inline bool dominates(double a1, double a2, double b1, double b2) {
  return a1 <= b1 && a2 <= b2 && (a1 < b1 || a2 < b2);
}

/** Fast non-dominated sort over 2-objective points; returns fronts as index
 *  lists, best front first.
 */
inline std::vector<std::vector<std::size_t>> nondominated_sort(
    const std::vector<std::pair<double, double>>& objectives) {
  const std::size_t n = objectives.size();
  if (n == 0) throw InvalidParameterError("nondominated_sort: empty input");
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<int> count(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (dominates(objectives[i].first, objectives[i].second, objectives[j].first,
                    objectives[j].second)) {
        dominated[i].push_back(j);
      } else if (dominates(objectives[j].first, objectives[j].second, objectives[i].first,
                           objectives[i].second)) {
        ++count[i];
      }
    }
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i)
    if (count[i] == 0) current.push_back(i);
  while (!current.empty()) {
    fronts.push_back(current);
    std::vector<std::size_t> next;
    for (auto i : current)
      for (auto j : dominated[i])
        if (--count[j] == 0) next.push_back(j);
    std::sort(next.begin(), next.end());
    current = std::move(next);
  }
  return fronts;
}

/** Crowding distance of a non-dominated front; boundary points per
 *  objective are infinite, interior points sum normalized neighbor gaps.
 */
inline std::vector<double> crowding_distance(
    const std::vector<std::pair<double, double>>& front) {
  const std::size_t n = front.size();
  std::vector<double> dist(n, 0.0);
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    return dist;
  }
  for (int obj = 0; obj < 2; ++obj) {
    auto value = [&](std::size_t i) { return obj == 0 ? front[i].first : front[i].second; };
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return value(a) != value(b) ? value(a) < value(b) : a < b;
    });
    const double span = value(order.back()) - value(order.front());
    dist[order.front()] = std::numeric_limits<double>::infinity();
    dist[order.back()] = std::numeric_limits<double>::infinity();
    if (span <= 0.0) continue;
    for (std::size_t r = 1; r + 1 < n; ++r)
      dist[order[r]] += (value(order[r + 1]) - value(order[r - 1])) / span;
  }
  return dist;
}

/** Non-dominated set kept sorted by ber1 ascending (hence ber2 strictly
 *  descending). Inserting a dominated or duplicate point is a no-op.
 */
class ParetoFront {
public:
  bool insert(DesignPoint p) {
    auto pos = std::lower_bound(points_.begin(), points_.end(), p,
                                [](const DesignPoint& a, const DesignPoint& b) {
                                  return a.ber1 != b.ber1 ? a.ber1 < b.ber1 : a.ber2 < b.ber2;
                                });
    if (pos != points_.begin()) {
      const auto& pred = *(pos - 1);
      if (pred.ber2 <= p.ber2) return false;  // dominated (or equal)
    }
    if (pos != points_.end() && pos->ber1 == p.ber1 && pos->ber2 == p.ber2) return false;
    auto last = pos;
    while (last != points_.end() && last->ber2 >= p.ber2) ++last;  // now dominated by p
    if (last != pos) {
      *pos = std::move(p);
      points_.erase(pos + 1, last);
    } else {
      points_.insert(pos, std::move(p));
    }
    return true;
  }

  const std::vector<DesignPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

private:
  std::vector<DesignPoint> points_;  // ber1 strictly ascending, ber2 strictly descending
};

/** Dominated hypervolume of a front against a reference point (default the
 *  worst corner (1, 1)).
 */
inline double hypervolume(const ParetoFront& front, double ref1 = 1.0, double ref2 = 1.0) {
  double hv = 0.0;
  double prev2 = ref2;
  for (const auto& p : front.points()) {
    if (p.ber1 >= ref1) break;
    const double height = prev2 - std::min(prev2, p.ber2);
    hv += (ref1 - p.ber1) * height;
    prev2 = std::min(prev2, p.ber2);
  }
  return hv;
}

/** Pick the front point whose protection ratio is closest to target_eta in
 *  log space; ties break toward smaller ber1.
 */
inline const DesignPoint& select_by_eta(const ParetoFront& front, double target_eta) {
  if (front.empty()) throw EmptyFrontError("select_by_eta: empty front");
  if (!(target_eta > 0.0)) throw InvalidParameterError("select_by_eta: target eta must be > 0");
  // log ratio with zero-BER guards: a exactly-zero BER pushes the ratio to
  // the corresponding extreme; a both-zero point counts as balanced.
  auto log_eta = [](const DesignPoint& p) {
    constexpr double tiny = 1e-300;
    return std::log(std::max(p.ber2, tiny)) - std::log(std::max(p.ber1, tiny));
  };
  const double target = std::log(target_eta);
  const DesignPoint* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& p : front.points()) {
    const double d = std::abs(log_eta(p) - target);
    if (d < best_dist || (d == best_dist && best && p.ber1 < best->ber1)) {
      best = &p;
      best_dist = d;
    }
  }
  return *best;
}

/** Evolutionary search settings. Defaults follow common NSGA-II practice:
 *  SBX index 15, polynomial-mutation index 20, per-gene mutation rate
 *  1/dimension, crossover probability 0.9.
 */
struct GaConfig {
  int population = 100;
  int generations = 200;
  std::uint64_t seed = 1;
  double crossover_prob = 0.9;
  double sbx_eta = 15.0;
  double mutation_eta = 20.0;
  double mutation_prob = 0.0;  // <= 0 means 1/dimension
  int threads = 0;

  void validate() const {
    if (population < 4 || population % 2 != 0)
      throw InvalidParameterError("config: population must be even and >= 4");
    if (generations < 0) throw InvalidParameterError("config: generations must be >= 0");
    if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0))
      throw InvalidParameterError("config: crossover_prob must lie in [0, 1]");
    if (!(sbx_eta > 0.0) || !(mutation_eta > 0.0))
      throw InvalidParameterError("config: distribution indices must be > 0");
  }
};

namespace detail {

// bounded simulated binary crossover on [0,1] genes
inline void sbx_crossover(Eigen::ArrayXd& a, Eigen::ArrayXd& b, double eta, RandomStream& rng) {
  constexpr double eps = 1e-14;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (uniform01(rng) > 0.5) continue;
    double y1 = a[i], y2 = b[i];
    if (std::abs(y1 - y2) <= eps) continue;
    if (y1 > y2) std::swap(y1, y2);
    const double u = uniform01(rng);
    auto spread = [&](double beta_bound) {
      const double alpha = 2.0 - std::pow(beta_bound, -(eta + 1.0));
      if (u <= 1.0 / alpha) return std::pow(u * alpha, 1.0 / (eta + 1.0));
      return std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
    };
    const double lower = 0.0, upper = 1.0;
    const double beta1 = 1.0 + 2.0 * (y1 - lower) / (y2 - y1);
    const double beta2 = 1.0 + 2.0 * (upper - y2) / (y2 - y1);
    double c1 = 0.5 * (y1 + y2 - spread(beta1) * (y2 - y1));
    double c2 = 0.5 * (y1 + y2 + spread(beta2) * (y2 - y1));
    c1 = std::clamp(c1, lower, upper);
    c2 = std::clamp(c2, lower, upper);
    if (uniform01(rng) <= 0.5) std::swap(c1, c2);
    a[i] = c1;
    b[i] = c2;
  }
}

// bounded polynomial mutation on [0,1] genes
inline void polynomial_mutation(Eigen::ArrayXd& x, double prob, double eta, RandomStream& rng) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (uniform01(rng) >= prob) continue;
    const double y = x[i];
    const double lower = 0.0, upper = 1.0;
    const double d1 = (y - lower) / (upper - lower);
    const double d2 = (upper - y) / (upper - lower);
    const double u = uniform01(rng);
    const double mpow = 1.0 / (eta + 1.0);
    double deltaq;
    if (u <= 0.5) {
      const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
      deltaq = std::pow(val, mpow) - 1.0;
    } else {
      const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
      deltaq = 1.0 - std::pow(val, mpow);
    }
    x[i] = std::clamp(y + deltaq * (upper - lower), lower, upper);
  }
}

struct Individual {
  Genome genome;
  double f1 = 1.0, f2 = 1.0;
  bool converged = true;
  int rank = 0;
  double crowding = 0.0;
};

// crowded-comparison: lower rank wins, then larger crowding, then index
inline std::size_t tournament(const std::vector<Individual>& pop, RandomStream& rng) {
  const std::size_t a = uniform_below(rng, pop.size());
  const std::size_t b = uniform_below(rng, pop.size());
  if (pop[a].rank != pop[b].rank) return pop[a].rank < pop[b].rank ? a : b;
  if (pop[a].crowding != pop[b].crowding) return pop[a].crowding > pop[b].crowding ? a : b;
  return std::min(a, b);
}

inline void assign_rank_and_crowding(std::vector<Individual>& pop) {
  std::vector<std::pair<double, double>> objectives;
  objectives.reserve(pop.size());
  for (const auto& ind : pop) objectives.emplace_back(ind.f1, ind.f2);
  const auto fronts = nondominated_sort(objectives);
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    std::vector<std::pair<double, double>> sub;
    sub.reserve(fronts[r].size());
    for (auto i : fronts[r]) sub.emplace_back(pop[i].f1, pop[i].f2);
    const auto dist = crowding_distance(sub);
    for (std::size_t j = 0; j < fronts[r].size(); ++j) {
      pop[fronts[r][j]].rank = static_cast<int>(r);
      pop[fronts[r][j]].crowding = dist[j];
    }
  }
}

}  // namespace detail

/** Outcome of one evolutionary run: the accumulated non-dominated archive
 *  of every evaluated design, plus the archive hypervolume recorded after
 *  the initial population and after each generation.
 */
struct EvolveResult {
  ParetoFront front;
  std::vector<double> hypervolume_history;
  long long evaluations = 0;
};

/** NSGA-II over (omega weights, phi weights, p1, p2): binary tournament on
 *  (rank, crowding), SBX crossover, polynomial mutation, repair, fixed-point
 *  evaluation, elitist (mu+lambda) environmental selection. Deterministic
 *  for a fixed seed: every stream is derived from (seed, generation, slot),
 *  and evaluation itself consumes no randomness.
 */
inline EvolveResult evolve(const DesignProblem& problem, const GaConfig& config) {
  problem.validate();
  config.validate();
  const Eigen::Index b1 = problem.B1;
  const Eigen::Index b2 = problem.B2;
  const Eigen::Index dim = b1 + b2 + 2;
  const double pm = config.mutation_prob > 0.0 ? config.mutation_prob
                                               : 1.0 / static_cast<double>(dim);
  const std::size_t n = static_cast<std::size_t>(config.population);

  EvolveResult result;
  std::vector<detail::Individual> pop(n);

  auto evaluate_range = [&](std::vector<detail::Individual>& inds) {
    parallel_for(inds.size(), config.threads, [&](std::size_t i) {
      const DesignPoint p = evaluate(inds[i].genome, problem);
      inds[i].genome = p.genome;  // keep the repaired genome
      inds[i].f1 = p.ber1;
      inds[i].f2 = p.ber2;
      inds[i].converged = p.converged;
    });
    result.evaluations += static_cast<long long>(inds.size());
    for (auto& ind : inds) {
      DesignPoint p;
      p.genome = ind.genome;
      p.ber1 = ind.f1;
      p.ber2 = ind.f2;
      p.converged = ind.converged;
      if (p.ber1 > 0.0) {
        p.eta = p.ber2 / p.ber1;
      } else {
        p.eta = std::numeric_limits<double>::infinity();
        p.eta_infinite = true;
      }
      result.front.insert(std::move(p));
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng = make_stream(derive_seed(config.seed, 0, i));
    Eigen::ArrayXd x(dim);
    for (Eigen::Index j = 0; j < dim; ++j) x[j] = uniform01(rng);
    pop[i].genome = repair(Genome::unflatten(x, b1, b2));
  }
  evaluate_range(pop);
  detail::assign_rank_and_crowding(pop);
  result.hypervolume_history.push_back(hypervolume(result.front));

  for (int gen = 1; gen <= config.generations; ++gen) {
    std::vector<detail::Individual> offspring;
    offspring.reserve(n);
    for (std::size_t pair = 0; pair < n / 2; ++pair) {
      RandomStream rng =
          make_stream(derive_seed(config.seed, static_cast<std::uint64_t>(gen), pair + 1));
      const auto& pa = pop[detail::tournament(pop, rng)];
      const auto& pb = pop[detail::tournament(pop, rng)];
      Eigen::ArrayXd xa = pa.genome.flatten();
      Eigen::ArrayXd xb = pb.genome.flatten();
      if (uniform01(rng) <= config.crossover_prob)
        detail::sbx_crossover(xa, xb, config.sbx_eta, rng);
      detail::polynomial_mutation(xa, pm, config.mutation_eta, rng);
      detail::polynomial_mutation(xb, pm, config.mutation_eta, rng);
      detail::Individual ca, cb;
      ca.genome = repair(Genome::unflatten(xa, b1, b2));
      cb.genome = repair(Genome::unflatten(xb, b1, b2));
      offspring.push_back(std::move(ca));
      offspring.push_back(std::move(cb));
    }
    evaluate_range(offspring);

    // (mu + lambda) elitist selection on the combined population
    std::vector<detail::Individual> merged;
    merged.reserve(pop.size() + offspring.size());
    for (auto& ind : pop) merged.push_back(std::move(ind));
    for (auto& ind : offspring) merged.push_back(std::move(ind));
    std::vector<std::pair<double, double>> objectives;
    objectives.reserve(merged.size());
    for (const auto& ind : merged) objectives.emplace_back(ind.f1, ind.f2);
    const auto fronts = nondominated_sort(objectives);
    std::vector<detail::Individual> next;
    next.reserve(n);
    for (const auto& front : fronts) {
      if (next.size() == n) break;
      std::vector<std::pair<double, double>> sub;
      sub.reserve(front.size());
      for (auto i : front) sub.emplace_back(merged[i].f1, merged[i].f2);
      const auto dist = crowding_distance(sub);
      if (next.size() + front.size() <= n) {
        for (std::size_t j = 0; j < front.size(); ++j) {
          merged[front[j]].crowding = dist[j];
          next.push_back(std::move(merged[front[j]]));
        }
      } else {
        std::vector<std::size_t> order(front.size());
        for (std::size_t j = 0; j < front.size(); ++j) order[j] = j;
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
          return dist[x] != dist[y] ? dist[x] > dist[y] : front[x] < front[y];
        });
        for (std::size_t r = 0; next.size() < n; ++r) {
          merged[front[order[r]]].crowding = dist[order[r]];
          next.push_back(std::move(merged[front[order[r]]]));
        }
      }
    }
    pop = std::move(next);
    detail::assign_rank_and_crowding(pop);
    result.hypervolume_history.push_back(hypervolume(result.front));
  }
  return result;
}

/** Render a front as CSV, best ber1 first. */
inline std::string front_csv(const ParetoFront& front) {
  std::ostringstream out;
  out << "ber1,ber2,eta\n";
  for (const auto& p : front.points())
    out << csv_double(p.ber1) << ',' << csv_double(p.ber2) << ',' << csv_double(p.eta) << '\n';
  return out.str();
}

}  // namespace durateless

#endif
