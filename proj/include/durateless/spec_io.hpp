#ifndef DURATELESS_SPEC_IO_HPP
#define DURATELESS_SPEC_IO_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <json.hpp>

#include "durateless/degree.hpp"
#include "durateless/ensemble.hpp"
#include "durateless/errors.hpp"
#include "durateless/optimize.hpp"

namespace durateless {

/** Smallest simulation-friendly block length compatible with the degree
 *  caps: k >= B2 and round(rho*k) >= B1, but at least 2000.
 */
inline long long default_block_length(double rho, int max_deg_omega, int max_deg_phi) {
  long long k = std::max<long long>(2000, max_deg_phi);
  const long long need1 =
      static_cast<long long>(std::ceil(static_cast<double>(max_deg_omega) / rho));
  return std::max(k, need1);
}

/** Parse an ensemble spec document: {rho, gamma, p1, p2, omega, phi, k?}.
 *  p3 is derived as 1 - p1 - p2; an explicit k is honored, otherwise a
 *  default block length is chosen. Every constraint violation surfaces as a
 *  ValidationError naming the offending field.
 */
inline CodeEnsemble ensemble_from_spec_json(const nlohmann::json& j,
                                            std::optional<long long> k_override = {}) {
  if (!j.is_object()) throw InvalidParameterError("spec: expected a JSON object");
  for (const char* field : {"rho", "gamma", "p1", "p2", "omega", "phi"})
    if (!j.contains(field))
      throw InvalidParameterError(std::string("spec: missing field '") + field + "'");
  const double rho = j.at("rho").get<double>();
  const double gamma = j.at("gamma").get<double>();
  const double p1 = j.at("p1").get<double>();
  const double p2 = j.at("p2").get<double>();
  if (!(p1 >= 0.0) || !(p2 >= 0.0))
    throw InvalidParameterError("spec: p1 and p2 must be nonnegative");
  if (p1 + p2 > 1.0 + 1e-9)
    throw InvalidParameterError("spec: p1 + p2 exceeds 1 (got " + std::to_string(p1 + p2) + ")");
  const double p3 = std::max(0.0, 1.0 - p1 - p2);
  DegreeDistribution omega = distribution_from_json(j.at("omega"));
  DegreeDistribution phi = distribution_from_json(j.at("phi"));
  long long k;
  if (k_override) {
    k = *k_override;
  } else if (j.contains("k")) {
    k = j.at("k").get<long long>();
  } else {
    k = default_block_length(rho, omega.max_degree(), phi.max_degree());
  }
  return CodeEnsemble(rho, k, std::move(omega), std::move(phi), p1, p2, p3, gamma);
}

/** Serialize an ensemble back to the spec document form. */
inline nlohmann::json ensemble_to_spec_json(const CodeEnsemble& e, bool include_k = true) {
  nlohmann::json j{{"rho", e.rho},   {"gamma", e.gamma},         {"p1", e.p1},
                   {"p2", e.p2},     {"omega", to_json(e.omega)}, {"phi", to_json(e.phi)}};
  if (include_k) j["k"] = e.k;
  return j;
}

constexpr int kParamsFormatVersion = 1;

/** Serialize a design front with full per-point parameters, so any point
 *  can be re-instantiated as an ensemble spec later.
 */
inline nlohmann::json front_to_params_json(const ParetoFront& front,
                                           const DesignProblem& problem) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : front.points()) {
    const CodeEnsemble e = decode_genome(p.genome, problem);
    nlohmann::json entry{{"ber1", p.ber1},
                         {"ber2", p.ber2},
                         {"converged", p.converged},
                         {"p1", e.p1},
                         {"p2", e.p2},
                         {"p3", e.p3},
                         {"omega", to_json(e.omega)},
                         {"phi", to_json(e.phi)}};
    if (!p.eta_infinite) entry["eta"] = p.eta;
    points.push_back(std::move(entry));
  }
  return {{"format_version", kParamsFormatVersion},
          {"problem",
           {{"rho", problem.rho},
            {"gamma", problem.gamma},
            {"B1", problem.B1},
            {"B2", problem.B2},
            {"k", problem.k}}},
          {"points", std::move(points)}};
}

/** Parsed contents of a params document. */
struct FrontParams {
  DesignProblem problem;
  ParetoFront front;
};

inline FrontParams front_from_params_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("points") || !j.contains("problem"))
    throw InvalidParameterError("params: expected {format_version, problem, points}");
  if (j.value("format_version", 0) != kParamsFormatVersion)
    throw InvalidParameterError("params: unsupported format_version");
  FrontParams out;
  const auto& pj = j.at("problem");
  out.problem.rho = pj.at("rho").get<double>();
  out.problem.gamma = pj.at("gamma").get<double>();
  out.problem.B1 = pj.at("B1").get<int>();
  out.problem.B2 = pj.at("B2").get<int>();
  out.problem.k = pj.at("k").get<long long>();
  out.problem.validate();
  for (const auto& entry : j.at("points")) {
    DesignPoint p;
    p.ber1 = entry.at("ber1").get<double>();
    p.ber2 = entry.at("ber2").get<double>();
    p.converged = entry.value("converged", true);
    if (p.ber1 > 0.0) {
      p.eta = p.ber2 / p.ber1;
    } else {
      p.eta = std::numeric_limits<double>::infinity();
      p.eta_infinite = true;
    }
    const DegreeDistribution omega = distribution_from_json(entry.at("omega"));
    const DegreeDistribution phi = distribution_from_json(entry.at("phi"));
    p.genome.omega_weights = omega.probs();
    p.genome.phi_weights = phi.probs();
    p.genome.p1_raw = entry.at("p1").get<double>();
    p.genome.p2_raw = entry.at("p2").get<double>();
    out.front.insert(std::move(p));
  }
  return out;
}

}  // namespace durateless

#endif
