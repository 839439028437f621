#ifndef DURATELESS_SIM_HPP
#define DURATELESS_SIM_HPP

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "durateless/analysis.hpp"
#include "durateless/codec.hpp"
#include "durateless/ensemble.hpp"
#include "durateless/io.hpp"
#include "durateless/parallel.hpp"
#include "durateless/rng.hpp"

namespace durateless {

/** Aggregated Monte Carlo estimate for one (ensemble, k, gamma) point.
 *  Means average per-trial symbol-error fractions; stderr is the sample
 *  standard error across trials.
 */
struct TrialBatchResult {
  CodeEnsemble ensemble;
  long long k = 0;
  int trials = 0;
  double ber1_mean = 0, ber2_mean = 0;
  double ber1_stderr = 0, ber2_stderr = 0;
  std::uint64_t seed = 0;
};

/** Run repeated encode/relay/decode trials with random payloads.
 *
 *  Trial t draws its stream from derive_seed(seed, t), so results are
 *  reproducible bit for bit and independent of the worker count, and
 *  growing `trials` extends a batch without re-randomizing earlier trials.
 */
inline TrialBatchResult run_trials(const CodeEnsemble& e, long long k, int trials,
                                   std::uint64_t seed, int threads = 0) {
  if (trials < 1) throw InvalidParameterError("run_trials: trials must be >= 1");
  // re-instantiate at the simulated block length; validates max degrees
  const CodeEnsemble sim_ensemble(e.rho, k, e.omega, e.phi, e.p1, e.p2, e.p3, e.gamma);
  std::vector<double> b1(static_cast<std::size_t>(trials));
  std::vector<double> b2(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    RandomStream rng = make_stream(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<Symbol> payloads1(static_cast<std::size_t>(sim_ensemble.block1()));
    std::vector<Symbol> payloads2(static_cast<std::size_t>(sim_ensemble.block2()));
    for (auto& s : payloads1) s = static_cast<Symbol>(rng() & 1u);
    for (auto& s : payloads2) s = static_cast<Symbol>(rng() & 1u);
    DecoderGraph g = generate_received(sim_ensemble, payloads1, payloads2, rng);
    peel_decode(g);
#ifndef NDEBUG
    for (std::size_t i = 0; i < payloads1.size(); ++i)
      if (g.recovered1[i]) assert(g.decoded1[i] == payloads1[i]);
    for (std::size_t i = 0; i < payloads2.size(); ++i)
      if (g.recovered2[i]) assert(g.decoded2[i] == payloads2[i]);
#endif
    const auto [e1, e2] = empirical_ber(g);
    b1[t] = e1;
    b2[t] = e2;
  });
  TrialBatchResult out{sim_ensemble, k, trials, 0, 0, 0, 0, seed};
  auto mean_of = [](const std::vector<double>& xs) {
    double acc = 0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
  };
  auto stderr_of = [](const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1) /
                     static_cast<double>(xs.size()));
  };
  out.ber1_mean = mean_of(b1);
  out.ber2_mean = mean_of(b2);
  out.ber1_stderr = stderr_of(b1, out.ber1_mean);
  out.ber2_stderr = stderr_of(b2, out.ber2_mean);
  return out;
}

/** Run a batch per overhead in the grid. Rows come back sorted by gamma;
 *  each point's seed derives from (seed, bits of gamma), so a point's
 *  result does not depend on which grid it was part of.
 */
inline std::vector<TrialBatchResult> sweep_gamma(const CodeEnsemble& e, long long k,
                                                 std::vector<double> gamma_grid, int trials,
                                                 std::uint64_t seed, int threads = 0) {
  for (double g : gamma_grid)
    if (!(g > 0.0)) throw InvalidParameterError("sweep_gamma: grid entries must be > 0");
  std::sort(gamma_grid.begin(), gamma_grid.end());
  std::vector<TrialBatchResult> rows;
  rows.reserve(gamma_grid.size());
  for (double g : gamma_grid)
    rows.push_back(run_trials(e.with_gamma(g), k, trials,
                              derive_seed(seed, std::bit_cast<std::uint64_t>(g)), threads));
  return rows;
}

/** One analysis-vs-simulation comparison row. A source is flagged only when
 *  its analytical BER exceeds 1e-3; a flagged source passes iff
 *  |empirical - analytical| <= max(3 * stderr, 0.25 * analytical).
 */
struct ComparisonRow {
  double gamma = 0;
  long long k = 0;
  int trials = 0;
  double ber1_mean = 0, ber1_stderr = 0, ber2_mean = 0, ber2_stderr = 0;
  double analytical_ber1 = 0, analytical_ber2 = 0;
  double z1 = 0, z2 = 0;
  bool flagged1 = false, flagged2 = false;
  bool pass1 = true, pass2 = true;
};

inline ComparisonRow compare_with_analysis(const TrialBatchResult& batch) {
  const AnalysisResult a = fixed_point(batch.ensemble);
  ComparisonRow row;
  row.gamma = batch.ensemble.gamma;
  row.k = batch.k;
  row.trials = batch.trials;
  row.ber1_mean = batch.ber1_mean;
  row.ber1_stderr = batch.ber1_stderr;
  row.ber2_mean = batch.ber2_mean;
  row.ber2_stderr = batch.ber2_stderr;
  row.analytical_ber1 = a.ber1;
  row.analytical_ber2 = a.ber2;
  auto zscore = [](double emp, double anal, double se) {
    const double diff = emp - anal;
    if (diff == 0.0) return 0.0;
    if (se > 0.0) return diff / se;
    return diff > 0 ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
  };
  row.z1 = zscore(batch.ber1_mean, a.ber1, batch.ber1_stderr);
  row.z2 = zscore(batch.ber2_mean, a.ber2, batch.ber2_stderr);
  row.flagged1 = a.ber1 > 1e-3;
  row.flagged2 = a.ber2 > 1e-3;
  if (row.flagged1)
    row.pass1 = std::abs(batch.ber1_mean - a.ber1) <=
                std::max(3.0 * batch.ber1_stderr, 0.25 * a.ber1);
  if (row.flagged2)
    row.pass2 = std::abs(batch.ber2_mean - a.ber2) <=
                std::max(3.0 * batch.ber2_stderr, 0.25 * a.ber2);
  return row;
}

/** Render comparison rows as CSV. Unflagged sources report "na" in their
 *  pass column.
 */
inline std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "gamma,k,trials,ber1_mean,ber1_stderr,ber2_mean,ber2_stderr,"
         "analytical_ber1,analytical_ber2,pass1,pass2\n";
  for (const auto& r : rows) {
    out << csv_double(r.gamma) << ',' << r.k << ',' << r.trials << ','
        << csv_double(r.ber1_mean) << ',' << csv_double(r.ber1_stderr) << ','
        << csv_double(r.ber2_mean) << ',' << csv_double(r.ber2_stderr) << ','
        << csv_double(r.analytical_ber1) << ',' << csv_double(r.analytical_ber2) << ','
        << (r.flagged1 ? (r.pass1 ? "1" : "0") : "na") << ','
        << (r.flagged2 ? (r.pass2 ? "1" : "0") : "na") << '\n';
  }
  return out.str();
}

}  // namespace durateless

#endif
