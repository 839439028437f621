#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "durateless/optimize.hpp"
#include "durateless/spec_io.hpp"
#include "support/oracles.hpp"

using namespace durateless;

namespace {

Genome make_genome(std::vector<double> ow, std::vector<double> pw, double p1, double p2) {
  Genome g;
  g.omega_weights = Eigen::Map<Eigen::ArrayXd>(ow.data(), static_cast<Eigen::Index>(ow.size()));
  g.phi_weights = Eigen::Map<Eigen::ArrayXd>(pw.data(), static_cast<Eigen::Index>(pw.size()));
  g.p1_raw = p1;
  g.p2_raw = p2;
  return g;
}

DesignPoint point(double b1, double b2) {
  DesignPoint p;
  p.ber1 = b1;
  p.ber2 = b2;
  p.eta = b1 > 0 ? b2 / b1 : std::numeric_limits<double>::infinity();
  return p;
}

}  // namespace

TEST_CASE("repair clips, renormalizes, and projects the relay pair") {
  const auto uniform = repair(make_genome({1, 1, 1, 1}, {2, 2}, 0.2, 0.3));
  for (int i = 0; i < 4; ++i) CHECK(uniform.omega_weights[i] == doctest::Approx(0.25));
  CHECK(uniform.p1_raw == doctest::Approx(0.2));

  const auto scaled = repair(make_genome({1}, {1}, 0.8, 0.4));
  CHECK(scaled.p1_raw == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(scaled.p2_raw == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  const auto negatives = repair(make_genome({-1.0, 2.0}, {1.0}, 0.5, 0.1));
  CHECK(negatives.omega_weights[0] == 0.0);
  CHECK(negatives.omega_weights[1] == doctest::Approx(1.0));

  CHECK_THROWS_AS(repair(make_genome({-1.0, -2.0}, {1.0}, 0.5, 0.1)), AllZeroError);
}

TEST_CASE("repair is idempotent") {
  RandomStream rng = make_stream(17);
  for (int rep = 0; rep < 50; ++rep) {
    Genome g;
    g.omega_weights = Eigen::ArrayXd::NullaryExpr(8, [&]() { return 2.0 * uniform01(rng) - 0.5; });
    g.phi_weights = Eigen::ArrayXd::NullaryExpr(6, [&]() { return 2.0 * uniform01(rng) - 0.5; });
    g.p1_raw = 1.5 * uniform01(rng);
    g.p2_raw = 1.5 * uniform01(rng);
    if ((g.omega_weights > 0.0).count() == 0) g.omega_weights[0] = 0.3;
    if ((g.phi_weights > 0.0).count() == 0) g.phi_weights[0] = 0.3;
    const Genome once = repair(g);
    const Genome twice = repair(once);
    CHECK((once.omega_weights - twice.omega_weights).abs().maxCoeff() < 1e-12);
    CHECK((once.phi_weights - twice.phi_weights).abs().maxCoeff() < 1e-12);
    CHECK(std::abs(once.p1_raw - twice.p1_raw) < 1e-12);
    CHECK(std::abs(once.p2_raw - twice.p2_raw) < 1e-12);
  }
}

TEST_CASE("decode produces a feasible ensemble; evaluate yields BERs in [0,1]") {
  DesignProblem problem;
  problem.B1 = 4;
  problem.B2 = 4;
  problem.k = 100;
  const auto e = repair_and_decode(make_genome({0, 1, 0, 1}, {1, 0, 0, 1}, 0.8, 0.4), problem);
  CHECK(e.p3 == doctest::Approx(0.0));
  CHECK(e.p1 + e.p2 + e.p3 == doctest::Approx(1.0));

  // the all-degree-1 EEP genome reproduces the closed form
  const auto pt = evaluate(make_genome({1, 0, 0, 0}, {1, 0, 0, 0}, 0.5, 0.5), problem);
  CHECK(pt.ber1 == doctest::Approx(std::exp(-1.05)).epsilon(1e-9));
  CHECK(pt.ber2 == doctest::Approx(std::exp(-1.05)).epsilon(1e-9));
  CHECK(pt.eta == doctest::Approx(1.0).epsilon(1e-9));

  RandomStream rng = make_stream(23);
  for (int rep = 0; rep < 20; ++rep) {
    Genome g;
    g.omega_weights = Eigen::ArrayXd::NullaryExpr(4, [&]() { return uniform01(rng); });
    g.phi_weights = Eigen::ArrayXd::NullaryExpr(4, [&]() { return uniform01(rng); });
    g.omega_weights[0] += 0.01;
    g.phi_weights[0] += 0.01;
    g.p1_raw = uniform01(rng);
    g.p2_raw = uniform01(rng);
    const auto p = evaluate(g, problem);
    CHECK(p.ber1 >= 0.0);
    CHECK(p.ber1 <= 1.0);
    CHECK(p.ber2 >= 0.0);
    CHECK(p.ber2 <= 1.0);
  }
}

TEST_CASE("nondominated_sort: examples and brute-force oracle") {
  const auto strict = nondominated_sort({{0.1, 0.1}, {0.2, 0.2}});
  REQUIRE(strict.size() == 2);
  CHECK(strict[0] == std::vector<std::size_t>{0});
  CHECK(strict[1] == std::vector<std::size_t>{1});

  const auto anti = nondominated_sort({{0.1, 0.3}, {0.3, 0.1}});
  REQUIRE(anti.size() == 1);
  CHECK(anti[0].size() == 2);

  RandomStream rng = make_stream(314);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 50; ++i) pts.emplace_back(uniform01(rng), uniform01(rng));
    auto fronts = nondominated_sort(pts);
    auto expected = oracles::brute_force_fronts(pts);
    REQUIRE(fronts.size() == expected.size());
    for (std::size_t f = 0; f < fronts.size(); ++f) {
      std::sort(fronts[f].begin(), fronts[f].end());
      std::sort(expected[f].begin(), expected[f].end());
      CHECK(fronts[f] == expected[f]);
    }
  }
  CHECK_THROWS_AS(nondominated_sort({}), InvalidParameterError);
}

TEST_CASE("crowding distance: examples and reference transcription") {
  const auto two = crowding_distance({{0.1, 0.9}, {0.9, 0.1}});
  CHECK(std::isinf(two[0]));
  CHECK(std::isinf(two[1]));

  // three evenly spaced collinear points: middle gets 1 per objective
  const auto three = crowding_distance({{0.0, 1.0}, {0.5, 0.5}, {1.0, 0.0}});
  CHECK(std::isinf(three[0]));
  CHECK(three[1] == doctest::Approx(2.0));
  CHECK(std::isinf(three[2]));

  RandomStream rng = make_stream(2020);
  std::vector<std::pair<double, double>> front;
  double x = 0.0;
  for (int i = 0; i < 10; ++i) {
    x += 0.01 + uniform01(rng) * 0.1;
    front.emplace_back(x, 1.0 - x);
  }
  const auto got = crowding_distance(front);
  const auto want = oracles::reference_crowding(front);
  for (std::size_t i = 0; i < front.size(); ++i) {
    if (std::isinf(want[i]))
      CHECK(std::isinf(got[i]));
    else
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("ParetoFront keeps a clean non-dominated set") {
  ParetoFront front;
  CHECK(front.insert(point(0.5, 0.5)));
  CHECK_FALSE(front.insert(point(0.6, 0.6)));   // dominated
  CHECK_FALSE(front.insert(point(0.5, 0.5)));   // duplicate
  CHECK(front.insert(point(0.2, 0.8)));
  CHECK(front.insert(point(0.3, 0.6)));
  CHECK(front.insert(point(0.1, 0.9)));
  CHECK(front.insert(point(0.25, 0.55)));       // dominates (0.3, 0.6)
  std::vector<std::pair<double, double>> objectives;
  for (const auto& p : front.points()) objectives.emplace_back(p.ber1, p.ber2);
  CHECK(oracles::pairwise_nondominated(objectives));
  for (std::size_t i = 1; i < objectives.size(); ++i) {
    CHECK(objectives[i].first > objectives[i - 1].first);
    CHECK(objectives[i].second < objectives[i - 1].second);
  }

  RandomStream rng = make_stream(606);
  ParetoFront random_front;
  for (int i = 0; i < 500; ++i) random_front.insert(point(uniform01(rng), uniform01(rng)));
  objectives.clear();
  for (const auto& p : random_front.points()) objectives.emplace_back(p.ber1, p.ber2);
  CHECK(oracles::pairwise_nondominated(objectives));
}

TEST_CASE("hypervolume against hand-computed rectangles") {
  ParetoFront front;
  CHECK(hypervolume(front) == 0.0);
  front.insert(point(0.5, 0.5));
  CHECK(hypervolume(front) == doctest::Approx(0.25));
  front.insert(point(0.2, 0.8));
  front.insert(point(0.6, 0.3));
  // horizontal strips: 0.8*0.2 + 0.5*0.3 + 0.4*0.2
  CHECK(hypervolume(front) == doctest::Approx(0.39));
}

TEST_CASE("select_by_eta picks the log-closest point") {
  ParetoFront front;
  front.insert(point(0.3, 0.3));     // eta 1
  front.insert(point(0.05, 0.5));    // eta 10
  front.insert(point(0.008, 0.8));   // eta 100
  CHECK(select_by_eta(front, 10.0).eta == doctest::Approx(10.0));
  CHECK(select_by_eta(front, 1.0).eta == doctest::Approx(1.0));

  // equal log distance: |log(10/2)| = |log(50/10)|; the tie-break takes the
  // smaller ber1, which on a valid front is the higher-eta point
  ParetoFront tie;
  tie.insert(point(0.1, 0.2));   // eta 2
  tie.insert(point(0.01, 0.5));  // eta 50
  const auto& picked = select_by_eta(tie, 10.0);
  CHECK(picked.ber1 == doctest::Approx(0.01));
  CHECK(picked.eta == doctest::Approx(50.0));

  ParetoFront empty;
  CHECK_THROWS_AS(select_by_eta(empty, 10.0), EmptyFrontError);
  CHECK_THROWS_AS(select_by_eta(tie, 0.0), InvalidParameterError);
}

TEST_CASE("evolve: zero generations returns the non-dominated initial set") {
  DesignProblem problem;
  problem.B1 = 5;
  problem.B2 = 5;
  problem.k = 200;
  GaConfig config;
  config.population = 12;
  config.generations = 0;
  config.seed = 9;
  const auto result = evolve(problem, config);
  CHECK(result.evaluations == 12);
  CHECK(result.hypervolume_history.size() == 1);
  CHECK(result.front.size() >= 1);
  std::vector<std::pair<double, double>> objectives;
  for (const auto& p : result.front.points()) objectives.emplace_back(p.ber1, p.ber2);
  CHECK(oracles::pairwise_nondominated(objectives));
}

TEST_CASE("evolve: deterministic under a fixed seed") {
  DesignProblem problem;
  problem.B1 = 6;
  problem.B2 = 6;
  problem.k = 200;
  GaConfig config;
  config.population = 10;
  config.generations = 5;
  config.seed = 77;
  const auto a = evolve(problem, config);
  const auto b = evolve(problem, config);
  CHECK(front_csv(a.front) == front_csv(b.front));
  CHECK(a.hypervolume_history == b.hypervolume_history);
}

TEST_CASE("evolve: archive hypervolume never decreases") {
  DesignProblem problem;
  problem.B1 = 8;
  problem.B2 = 8;
  problem.k = 200;
  GaConfig config;
  config.population = 16;
  config.generations = 25;
  config.seed = 4;
  const auto result = evolve(problem, config);
  REQUIRE(result.hypervolume_history.size() == 26);
  for (std::size_t i = 1; i < result.hypervolume_history.size(); ++i)
    CHECK(result.hypervolume_history[i] >= result.hypervolume_history[i - 1]);
  // progress over the random initialization
  CHECK(result.hypervolume_history.back() > result.hypervolume_history.front());
}

TEST_CASE("evaluate agrees with the analysis path on the published genome") {
  const std::map<int, double> omega_raw = {
      {1, 0.039}, {2, 0.492}, {3, 0.094},  {4, 0.09},  {5, 0.096},  {6, 0.002},
      {7, 0.055}, {8, 0.019}, {9, 0.033},  {10, 0.014}, {20, 0.004}, {27, 0.006},
      {31, 0.005}, {43, 0.005}, {78, 0.005}, {86, 0.005}, {95, 0.014}, {100, 0.007}};
  const std::map<int, double> phi_raw = {
      {1, 0.072}, {2, 0.48},  {3, 0.055},  {4, 0.051}, {5, 0.063},  {6, 0.059},
      {7, 0.037}, {8, 0.026}, {9, 0.025},  {10, 0.036}, {15, 0.005}, {28, 0.003},
      {37, 0.005}, {44, 0.002}, {70, 0.002}, {77, 0.002}, {83, 0.003}, {93, 0.004},
      {95, 0.052}, {97, 0.002}};
  Genome g;
  g.omega_weights = Eigen::ArrayXd::Zero(100);
  g.phi_weights = Eigen::ArrayXd::Zero(100);
  for (const auto& [d, w] : omega_raw) g.omega_weights[d - 1] = w;
  for (const auto& [d, w] : phi_raw) g.phi_weights[d - 1] = w;
  g.p1_raw = 0.4822;
  g.p2_raw = 0.1173;
  DesignProblem problem;
  problem.k = 2000;
  const auto p = evaluate(g, problem);
  const auto direct = fixed_point(CodeEnsemble(
      1.0, 2000, DegreeDistribution::from_map(omega_raw), DegreeDistribution::from_map(phi_raw),
      0.4822, 0.1173, 0.4005, 1.05));
  CHECK(p.ber1 == doctest::Approx(direct.ber1).epsilon(1e-12));
  CHECK(p.ber2 == doctest::Approx(direct.ber2).epsilon(1e-12));
  CHECK(p.ber1 < p.ber2);
}

TEST_CASE("genome dimension matches the decision-variable count") {
  Genome g;
  g.omega_weights = Eigen::ArrayXd::Ones(100);
  g.phi_weights = Eigen::ArrayXd::Ones(100);
  CHECK(g.dimension() == 202);
  const auto x = g.flatten();
  CHECK(x.size() == 202);
  const auto back = Genome::unflatten(x, 100, 100);
  CHECK((back.omega_weights == g.omega_weights).all());
}

TEST_CASE("evolved fronts cover or beat the balanced (EEP) region") {
  DesignProblem problem;
  problem.B1 = 10;
  problem.B2 = 10;
  problem.k = 400;
  GaConfig config;
  config.population = 40;
  config.generations = 100;
  config.seed = 52;
  const auto result = evolve(problem, config);
  // pass if the front holds a balanced point outright, or a point that
  // dominates the all-degree-1 EEP anchor at the same overhead
  const double anchor = std::exp(-problem.gamma);
  bool covered = false;
  for (const auto& p : result.front.points()) {
    if (!p.eta_infinite && p.eta >= 0.5 && p.eta <= 2.0) covered = true;
    if (p.ber1 <= anchor && p.ber2 <= anchor) covered = true;
  }
  CHECK(covered);
}

TEST_CASE("config validation") {
  DesignProblem problem;
  GaConfig config;
  config.population = 7;
  CHECK_THROWS_AS(evolve(problem, config), InvalidParameterError);
  config.population = 8;
  config.crossover_prob = 1.5;
  CHECK_THROWS_AS(evolve(problem, config), InvalidParameterError);
  problem.rho = 0.0;
  config.crossover_prob = 0.9;
  CHECK_THROWS_AS(evolve(problem, config), InvalidParameterError);
}

TEST_CASE("front params JSON round trip preserves selections") {
  DesignProblem problem;
  problem.B1 = 5;
  problem.B2 = 5;
  problem.k = 300;
  GaConfig config;
  config.population = 10;
  config.generations = 8;
  config.seed = 15;
  const auto result = evolve(problem, config);
  const auto j = front_to_params_json(result.front, problem);
  const auto parsed = front_from_params_json(j);
  CHECK(parsed.front.size() == result.front.size());
  for (std::size_t i = 0; i < result.front.size(); ++i) {
    CHECK(parsed.front.points()[i].ber1 == result.front.points()[i].ber1);
    CHECK(parsed.front.points()[i].ber2 == result.front.points()[i].ber2);
  }
  // a selected point re-decodes into the same ensemble parameters
  const auto& pick = select_by_eta(parsed.front, 2.0);
  const auto e = decode_genome(pick.genome, parsed.problem);
  const auto r = fixed_point(e);
  CHECK(r.ber1 == doctest::Approx(pick.ber1).epsilon(1e-9));
  CHECK(r.ber2 == doctest::Approx(pick.ber2).epsilon(1e-9));
}
