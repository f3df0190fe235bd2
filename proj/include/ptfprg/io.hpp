#pragma once

// JSON forms of the library's value types.
//
// Polynomial:  { "num_vars": int, "terms": [ { "exps": [int...], "coef": float } ] }
// PTF:         the polynomial object plus "kind": "ptf"
// Generator:   plan inputs (n, d, k, epsilon, ell_cap) plus every derived
//              field; reading a config re-plans from the inputs.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ptfprg/design.hpp"
#include "ptfprg/error.hpp"
#include "ptfprg/generator.hpp"
#include "ptfprg/polynomial.hpp"
#include "ptfprg/ptf.hpp"

namespace ptfprg {

using json = nlohmann::json;

inline json to_json(const SparsePolynomial& p) {
  json terms = json::array();
  for (const auto& [exps, coef] : p.terms()) terms.push_back({{"exps", exps}, {"coef", coef}});
  return {{"num_vars", p.num_vars()}, {"terms", terms}};
}

inline SparsePolynomial polynomial_from_json(const json& j) {
  try {
    const auto n = j.at("num_vars").get<std::size_t>();
    std::vector<std::pair<Exponents, double>> terms;
    for (const auto& t : j.at("terms")) {
      terms.emplace_back(t.at("exps").get<Exponents>(), t.at("coef").get<double>());
    }
    return SparsePolynomial(n, terms);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("malformed polynomial JSON: ") + e.what());
  }
}

inline json to_json(const PTF& f) {
  json j = to_json(f.poly());
  j["kind"] = "ptf";
  return j;
}

inline PTF ptf_from_json(const json& j) {
  if (j.value("kind", std::string{}) != "ptf") throw ParameterError("PTF JSON must carry \"kind\": \"ptf\"");
  return PTF(polynomial_from_json(j));
}

inline json to_json(const DesignSampler& s) {
  return {{"q", s.q()},
          {"K", s.independence()},
          {"n", s.dimension()},
          {"nodes", s.quadrature().nodes()},
          {"weights", s.quadrature().weights()},
          {"thresholds", s.thresholds()},
          {"tv_bound", s.tv_bound()},
          {"seed_bits", seed_bits(s)},
          {"stream_bits", s.stream_bits()}};
}

inline json to_json(const SeedAccounting& a) {
  return {{"ell", a.ell},
          {"K", a.independence},
          {"symbol_bits", a.symbol_bits},
          {"block_bits", a.block_bits},
          {"design_seed_bits", a.design_seed_bits},
          {"total_seed_bits", a.total_bits},
          {"log2_n_over_eps_times_ell", a.log_n_over_eps_times_ell},
          {"log2_n_over_eps", a.log_n_over_eps}};
}

inline json to_json(const GeneratorConfig& c) {
  json j = {{"n", c.n},
            {"d", c.d},
            {"k", c.k},
            {"epsilon", c.epsilon},
            {"delta", c.delta},
            {"ell", c.ell},
            {"ell_formula", c.ell_formula},
            {"ell_cap", c.ell_cap ? json(*c.ell_cap) : json(nullptr)},
            {"truncated", c.truncated()},
            {"design_order", c.design_order},
            {"M", c.points},
            {"tv_budget", c.tv_budget},
            {"blend_weights", c.weights.w},
            {"seed_offsets", c.seed_offsets},
            {"sampler", to_json(c.sampler)},
            {"seed_accounting", to_json(seed_accounting(c))}};
  return j;
}

inline GeneratorConfig config_from_json(const json& j) {
  try {
    std::optional<std::size_t> cap;
    if (j.contains("ell_cap") && !j.at("ell_cap").is_null()) cap = j.at("ell_cap").get<std::size_t>();
    return plan(j.at("n").get<std::size_t>(), j.at("d").get<unsigned>(), j.at("k").get<unsigned>(),
                j.at("epsilon").get<double>(), cap);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("malformed generator config JSON: ") + e.what());
  }
}

}  // namespace ptfprg
