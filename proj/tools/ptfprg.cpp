// ptfprg command line front end.
//
// Exit codes: 0 all checks passed, 1 some check failed, 2 bad input.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ptfprg/experiment.hpp"

namespace {

using ptfprg::json;

struct Common {
  std::string config;
  std::string out;
  std::string seed;
  std::optional<std::uint64_t> samples;
  unsigned jobs = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON file path or inline JSON document");
  cmd->add_option("--out", c.out, "output path (CSV; JSONL log written to <out>.jsonl)");
  cmd->add_option("--seed", c.seed, "master key as hex");
  cmd->add_option("--samples", c.samples, "sample count override");
  cmd->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
}

json load_config(const std::string& arg) {
  if (arg.empty()) return json::object();
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') return json::parse(arg);
  std::ifstream f(arg);
  if (!f) throw ptfprg::ParameterError("cannot read config file " + arg);
  return json::parse(f);
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
  } else {
    ptfprg::write_file(out, text);
  }
}

int run_experiment(const std::string& kind, const Common& c) {
  json doc = load_config(c.config);
  doc["experiment"] = kind;
  if (!c.seed.empty()) doc["seed"] = c.seed;
  if (c.samples) doc["samples"] = *c.samples;
  auto spec = ptfprg::ExperimentSpec::from_json(doc);
  spec.jobs = c.jobs;
  spec.out = c.out;
  const auto result = ptfprg::run_experiment(spec);
  if (c.out.empty()) std::cout << result.csv;
  return result.all_pass ? 0 : 1;
}

ptfprg::GeneratorConfig generator_config(const json& doc) {
  const json& g = doc.contains("generator") ? doc.at("generator") : doc;
  return ptfprg::config_from_json(g);
}

int run_plan(const Common& c) {
  const json doc = load_config(c.config);
  emit(c.out, ptfprg::to_json(generator_config(doc)).dump(2) + "\n");
  return 0;
}

int run_sample(const Common& c, const std::string& raw) {
  const json doc = load_config(c.config);
  const auto config = generator_config(doc);
  if (!raw.empty()) {
    emit(c.out, ptfprg::sample_jsonl_raw(config, ptfprg::BitStream::from_hex(raw)));
    return 0;
  }
  std::uint64_t key = 0;
  if (!c.seed.empty()) {
    key = ptfprg::parse_hex_key(c.seed);
  } else if (doc.contains("seed")) {
    key = ptfprg::parse_hex_key(doc.at("seed").get<std::string>());
  }
  const std::uint64_t count = c.samples.value_or(doc.value("samples", std::uint64_t{10}));
  emit(c.out, ptfprg::sample_jsonl(config, key, count, c.jobs));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudorandom generator for Gaussian polynomial threshold functions"};
  app.require_subcommand(1);

  Common plan_opts, sample_opts, moments_opts, fool_opts, check_opts;
  std::string raw;

  auto* plan = app.add_subcommand("plan", "print the generator configuration and seed accounting");
  add_common(plan, plan_opts);
  auto* sample = app.add_subcommand("sample", "emit generator samples as JSONL");
  add_common(sample, sample_opts);
  sample->add_option("--raw", raw, "explicit master bitstream as hex; emits one sample");
  auto* moments = app.add_subcommand("moments", "verify design moments");
  add_common(moments, moments_opts);
  auto* fool = app.add_subcommand("fool", "fooling gap experiments");
  add_common(fool, fool_opts);
  auto* check = app.add_subcommand("check", "verification suites");
  check->require_subcommand(1);
  std::string check_kind;
  for (const char* name : {"cw", "tail", "deriv", "prop4"}) {
    auto* sub = check->add_subcommand(name);
    add_common(sub, check_opts);
    sub->callback([&check_kind, name] { check_kind = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*plan) return run_plan(plan_opts);
    if (*sample) return run_sample(sample_opts, raw);
    if (*moments) return run_experiment("moments", moments_opts);
    if (*fool) return run_experiment("fool", fool_opts);
    if (*check) return run_experiment(check_kind, check_opts);
  } catch (const json::exception& e) {
    std::cerr << "error: bad JSON: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
