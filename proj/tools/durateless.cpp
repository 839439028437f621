// Command-line front end: analyze an ensemble spec, simulate it, design new
// codes with the evolutionary optimizer, and select designs by protection
// ratio. Exit codes: 0 success, 1 I/O failure, 2 validation failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "durateless/analysis.hpp"
#include "durateless/errors.hpp"
#include "durateless/io.hpp"
#include "durateless/optimize.hpp"
#include "durateless/sim.hpp"
#include "durateless/spec_io.hpp"
#include "durateless/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw durateless::InvalidParameterError("gamma grid: cannot parse '" + item + "'");
    }
    if (pos != item.size())
      throw durateless::InvalidParameterError("gamma grid: cannot parse '" + item + "'");
    grid.push_back(v);
  }
  if (grid.empty()) throw durateless::InvalidParameterError("gamma grid: empty");
  return grid;
}

nlohmann::json load_json_file(const std::string& path) {
  const std::string text = durateless::read_file(path);  // IoError if unreadable
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw durateless::InvalidParameterError(path + ": invalid JSON: " + e.what());
  }
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty())
    std::cout << content;
  else
    durateless::atomic_write_file(out_path, content);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"durateless: two-source relay rateless codes - analysis, simulation, design"};
  app.require_subcommand(1);
  std::ostringstream version;
  version << "durateless " << durateless::kVersion << " (spec format "
          << durateless::kSpecFormatVersion << ", params format "
          << durateless::kParamsFormatVersion << ", csv format "
          << durateless::kCsvFormatVersion << ")";
  app.set_version_flag("--version", version.str());

  int threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (default: DURATELESS_THREADS or all cores)");

  // --- analyze ---
  auto* analyze = app.add_subcommand("analyze", "Asymptotic BER fixed points over a gamma grid");
  std::string an_spec, an_grid, an_out;
  analyze->add_option("spec", an_spec, "Ensemble spec JSON")->required();
  analyze->add_option("--gamma-grid", an_grid, "Comma-separated overheads (default: spec gamma)");
  analyze->add_option("--out", an_out, "Output CSV path (default: stdout)");

  // --- simulate ---
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo trials and analysis comparison");
  std::string si_spec, si_grid, si_out;
  long long si_k = 0;
  int si_trials = 200;
  std::uint64_t si_seed = 1;
  simulate->add_option("spec", si_spec, "Ensemble spec JSON")->required();
  simulate->add_option("--k", si_k, "Source-2 block length (default: spec k or 2000)");
  simulate->add_option("--trials", si_trials, "Trials per gamma point");
  simulate->add_option("--seed", si_seed, "Base seed");
  simulate->add_option("--gamma-grid", si_grid, "Comma-separated overheads (default: spec gamma)");
  simulate->add_option("--out", si_out, "Output CSV path (default: stdout)");

  // --- optimize ---
  auto* optimize = app.add_subcommand("optimize", "Evolve a Pareto front of code designs");
  double op_rho = 1.0, op_gamma = 1.05;
  int op_b1 = 100, op_b2 = 100, op_pop = 100, op_gens = 200;
  std::uint64_t op_seed = 1;
  double op_cx = 0.9, op_sbx = 15.0, op_meta = 20.0, op_mprob = 0.0;
  std::string op_config, op_front, op_params;
  optimize->add_option("--config", op_config, "JSON config file (flags override)");
  optimize->add_option("--rho", op_rho, "Block-length ratio");
  optimize->add_option("--gamma", op_gamma, "Design overhead");
  optimize->add_option("--B1", op_b1, "Max degree, source 1");
  optimize->add_option("--B2", op_b2, "Max degree, source 2");
  optimize->add_option("--pop", op_pop, "Population size (even)");
  optimize->add_option("--gens", op_gens, "Generations");
  optimize->add_option("--seed", op_seed, "Seed");
  optimize->add_option("--crossover-prob", op_cx, "SBX crossover probability");
  optimize->add_option("--sbx-eta", op_sbx, "SBX distribution index");
  optimize->add_option("--mutation-eta", op_meta, "Polynomial mutation index");
  optimize->add_option("--mutation-prob", op_mprob, "Per-gene mutation rate (default 1/dim)");
  optimize->add_option("--out-front", op_front, "Front CSV output path")->required();
  optimize->add_option("--out-params", op_params, "Full parameter JSON output path")->required();

  // --- design ---
  auto* design = app.add_subcommand("design", "Select a front point by target protection ratio");
  std::string de_front;
  double de_eta = 1.0;
  design->add_option("--front", de_front, "Params JSON from optimize")->required();
  design->add_option("--eta", de_eta, "Target eta = ber2/ber1")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (*analyze) {
      const auto spec = load_json_file(an_spec);
      const durateless::CodeEnsemble e = durateless::ensemble_from_spec_json(spec);
      const auto grid = an_grid.empty() ? std::vector<double>{e.gamma} : parse_grid(an_grid);
      const auto rows = durateless::ber_curve(e, grid);
      emit(durateless::curve_csv(rows), an_out);
    } else if (*simulate) {
      const auto spec = load_json_file(si_spec);
      std::optional<long long> k_override;
      if (simulate->count("--k") > 0) k_override = si_k;
      const durateless::CodeEnsemble e = durateless::ensemble_from_spec_json(spec, k_override);
      const auto grid = si_grid.empty() ? std::vector<double>{e.gamma} : parse_grid(si_grid);
      const auto batches = durateless::sweep_gamma(e, e.k, grid, si_trials, si_seed, threads);
      std::vector<durateless::ComparisonRow> rows;
      rows.reserve(batches.size());
      for (const auto& b : batches) rows.push_back(durateless::compare_with_analysis(b));
      emit(durateless::comparison_csv(rows), si_out);
    } else if (*optimize) {
      durateless::DesignProblem problem;
      durateless::GaConfig config;
      if (!op_config.empty()) {
        // config file fills anything not given explicitly on the command line
        const auto cj = load_json_file(op_config);
        auto fill = [&](const char* flag, const char* key, auto& var) {
          if (optimize->count(flag) == 0 && cj.contains(key)) cj.at(key).get_to(var);
        };
        fill("--rho", "rho", op_rho);
        fill("--gamma", "gamma", op_gamma);
        fill("--B1", "B1", op_b1);
        fill("--B2", "B2", op_b2);
        fill("--pop", "population", op_pop);
        fill("--gens", "generations", op_gens);
        fill("--seed", "seed", op_seed);
        fill("--crossover-prob", "crossover_prob", op_cx);
        fill("--sbx-eta", "sbx_eta", op_sbx);
        fill("--mutation-eta", "mutation_eta", op_meta);
        fill("--mutation-prob", "mutation_prob", op_mprob);
      }
      problem.rho = op_rho;
      problem.gamma = op_gamma;
      problem.B1 = op_b1;
      problem.B2 = op_b2;
      problem.k = durateless::default_block_length(op_rho, op_b1, op_b2);
      config.population = op_pop;
      config.generations = op_gens;
      config.seed = op_seed;
      config.crossover_prob = op_cx;
      config.sbx_eta = op_sbx;
      config.mutation_eta = op_meta;
      config.mutation_prob = op_mprob;
      config.threads = threads;
      const durateless::EvolveResult result = durateless::evolve(problem, config);
      durateless::atomic_write_file(op_front, durateless::front_csv(result.front));
      durateless::atomic_write_file(
          op_params, durateless::front_to_params_json(result.front, problem).dump(2) + "\n");
    } else if (*design) {
      const auto pj = load_json_file(de_front);
      const durateless::FrontParams params = durateless::front_from_params_json(pj);
      if (!(de_eta > 0.0))
        throw durateless::InvalidParameterError("design: --eta must be > 0");
      const durateless::DesignPoint& pick = durateless::select_by_eta(params.front, de_eta);
      const durateless::CodeEnsemble e = durateless::decode_genome(pick.genome, params.problem);
      std::cout << durateless::ensemble_to_spec_json(e).dump(2) << "\n";
    }
  } catch (const durateless::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const durateless::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
