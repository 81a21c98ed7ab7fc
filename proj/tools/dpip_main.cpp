#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dpip/cli.hpp"
#include "dpip/config.hpp"
#include "json.hpp"

namespace {

// Config-file values override built-in defaults; flags override both.
void apply_experiment_file(const std::string& path,
                           dpip::ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  if (j.contains("protocol")) cfg.protocol = j["protocol"].get<std::string>();
  if (j.contains("prover")) cfg.prover = j["prover"].get<std::string>();
  if (j.contains("dist")) cfg.dist = j["dist"].get<std::string>();
  if (j.contains("n")) cfg.n = j["n"].get<std::size_t>();
  if (j.contains("sigma")) cfg.sigma = j["sigma"].get<double>();
  if (j.contains("eps")) cfg.eps = j["eps"].get<double>();
  if (j.contains("delta")) cfg.delta = j["delta"].get<double>();
  if (j.contains("s")) cfg.s = j["s"].get<std::size_t>();
  if (j.contains("trials")) cfg.trials = j["trials"].get<std::size_t>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("jobs")) cfg.jobs = j["jobs"].get<unsigned>();
  if (j.contains("out")) cfg.output_path = j["out"].get<std::string>();
  if (j.contains("transcripts")) {
    cfg.transcript_path = j["transcripts"].get<std::string>();
  }
}

void add_experiment_flags(CLI::App* cmd, dpip::ExperimentConfig& cfg,
                          bool with_protocol) {
  if (with_protocol) {
    cmd->add_option("--protocol", cfg.protocol,
                    "protocol name (independence, tagged-retrieval-private, "
                    "tagged-retrieval-nonprivate, argument, replicable-am)");
  }
  cmd->add_option("--prover", cfg.prover, "prover strategy name");
  cmd->add_option("--dist", cfg.dist,
                  "instance distribution (uniform, point-mass, two-level, "
                  "correlated-bits, product-skew)");
  cmd->add_option("--n", cfg.n, "domain size");
  cmd->add_option("--sigma", cfg.sigma, "proximity parameter");
  cmd->add_option("--eps", cfg.eps, "privacy parameter epsilon");
  cmd->add_option("--delta", cfg.delta, "privacy parameter delta");
  cmd->add_option("--s", cfg.s, "sample size override (0 = calibrated)");
  cmd->add_option("--trials", cfg.trials, "Monte Carlo trials");
  cmd->add_option("--seed", cfg.seed,
                  "base seed; every run is replayable from it");
  cmd->add_option("--jobs", cfg.jobs, "parallel trial workers");
  cmd->add_option("--out", cfg.output_path, "CSV output path (appended)");
  cmd->add_option("--transcripts", cfg.transcript_path,
                  "JSON-lines transcript of the first trial");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dpip: verifier/prover toolkit for differentially private "
      "distribution-property protocols"};
  app.require_subcommand(1);

  std::string desk_config_path;
  app.add_option("--desk-config", desk_config_path,
                 "JSON file overriding the calibrated desk constants");

  dpip::ExperimentConfig run_cfg;
  std::string run_file;
  auto* run = app.add_subcommand("run", "run a protocol experiment");
  run->add_option("--config", run_file,
                  "JSON experiment config (flags override file values, "
                  "file overrides defaults)");
  add_experiment_flags(run, run_cfg, true);

  // Protocol-specific shortcuts share the run machinery.
  dpip::ExperimentConfig indep_cfg;
  indep_cfg.protocol = "independence";
  auto* indep = app.add_subcommand("independence",
                                   "run the marginal-message protocol");
  add_experiment_flags(indep, indep_cfg, false);

  dpip::ExperimentConfig tagged_cfg;
  tagged_cfg.protocol = "tagged-retrieval-private";
  bool tagged_private = true;
  bool tagged_nonprivate = false;
  auto* tagged = app.add_subcommand("tagged-retrieval",
                                    "run a tagged-sample retrieval protocol");
  tagged->add_flag("--private", tagged_private, "private variant (default)");
  tagged->add_flag("--nonprivate", tagged_nonprivate, "non-private variant");
  add_experiment_flags(tagged, tagged_cfg, false);

  dpip::ExperimentConfig arg_cfg;
  arg_cfg.protocol = "argument";
  auto* arg_cmd = app.add_subcommand(
      "argument", "run the committed-oracle argument protocol");
  add_experiment_flags(arg_cmd, arg_cfg, false);

  dpip::ReplicableAmConfig ram_cfg;
  auto* ram = app.add_subcommand(
      "replicable-am",
      "run the toy private-coin fixture and its public-coin conversion");
  ram->add_option("--n", ram_cfg.n, "domain size");
  ram->add_option("--sigma", ram_cfg.sigma, "proximity parameter");
  ram->add_option("--trials", ram_cfg.trials, "Monte Carlo trials");
  ram->add_option("--seed", ram_cfg.seed, "base seed");

  dpip::CalibrateConfig cal_cfg;
  auto* cal = app.add_subcommand("calibrate",
                                 "sweep sample sizes or rebuild the "
                                 "identity-threshold table");
  cal->add_option("--kind", cal_cfg.kind, "retrieval or identity");
  bool cal_nonprivate = false;
  cal->add_flag("--nonprivate", cal_nonprivate,
                "sweep the non-private retrieval variant");
  cal->add_option("--n", cal_cfg.n, "domain size");
  cal->add_option("--sigma", cal_cfg.sigma, "proximity parameter");
  cal->add_option("--eps", cal_cfg.eps, "epsilon");
  cal->add_option("--delta", cal_cfg.delta, "delta");
  cal->add_option("--target", cal_cfg.target, "honest acceptance target");
  cal->add_option("--trials", cal_cfg.trials, "trials per grid point");
  cal->add_option("--max-s", cal_cfg.max_s, "sweep cap");
  cal->add_option("--seed", cal_cfg.seed, "base seed");
  cal->add_option("--out", cal_cfg.output_path, "output path");

  dpip::AuditConfig audit_cfg;
  std::string audit_eps = "0.5";
  auto* audit = app.add_subcommand(
      "audit", "empirical adjacent-dataset audit of the generic wrapper");
  audit->add_option("--eps", audit_eps, "epsilon, or 'inf' to skip");
  audit->add_option("--n", audit_cfg.n, "domain size of the fixture");
  audit->add_option("--sigma", audit_cfg.sigma, "fixture proximity");
  audit->add_option("--pairs", audit_cfg.pairs, "adjacent pairs audited");
  audit->add_option("--trials", audit_cfg.trials, "trials per pair");
  audit->add_option("--seed", audit_cfg.seed, "base seed");
  audit->add_flag("--leaky", audit_cfg.leaky,
                  "test mode: audit a known-leaky wrapper instead");
  audit->add_option("--out", audit_cfg.output_path, "JSON-lines output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!desk_config_path.empty()) dpip::load_desk_config(desk_config_path);

    if (run->parsed()) {
      if (!run_file.empty()) {
        dpip::ExperimentConfig from_file;
        apply_experiment_file(run_file, from_file);
        // Flags override file values override defaults: any field that was
        // moved off its default by a flag wins over the file.
        dpip::ExperimentConfig merged = from_file;
        const dpip::ExperimentConfig defaults;
        if (run_cfg.protocol != defaults.protocol) merged.protocol = run_cfg.protocol;
        if (run_cfg.prover != defaults.prover) merged.prover = run_cfg.prover;
        if (run_cfg.dist != defaults.dist) merged.dist = run_cfg.dist;
        if (run_cfg.n != defaults.n) merged.n = run_cfg.n;
        if (run_cfg.sigma != defaults.sigma) merged.sigma = run_cfg.sigma;
        if (run_cfg.eps != defaults.eps) merged.eps = run_cfg.eps;
        if (run_cfg.delta != defaults.delta) merged.delta = run_cfg.delta;
        if (run_cfg.s != defaults.s) merged.s = run_cfg.s;
        if (run_cfg.trials != defaults.trials) merged.trials = run_cfg.trials;
        if (run_cfg.seed != defaults.seed) merged.seed = run_cfg.seed;
        if (run_cfg.jobs != defaults.jobs) merged.jobs = run_cfg.jobs;
        if (!run_cfg.output_path.empty()) merged.output_path = run_cfg.output_path;
        if (!run_cfg.transcript_path.empty()) {
          merged.transcript_path = run_cfg.transcript_path;
        }
        return dpip::cmd_run(merged, std::cout, std::cerr);
      }
      return dpip::cmd_run(run_cfg, std::cout, std::cerr);
    }
    if (indep->parsed()) return dpip::cmd_run(indep_cfg, std::cout, std::cerr);
    if (tagged->parsed()) {
      if (tagged_nonprivate) {
        tagged_cfg.protocol = "tagged-retrieval-nonprivate";
      }
      return dpip::cmd_run(tagged_cfg, std::cout, std::cerr);
    }
    if (arg_cmd->parsed()) return dpip::cmd_run(arg_cfg, std::cout, std::cerr);
    if (ram->parsed()) {
      return dpip::cmd_replicable_am(ram_cfg, std::cout, std::cerr);
    }
    if (cal->parsed()) {
      cal_cfg.private_variant = !cal_nonprivate;
      return dpip::cmd_calibrate(cal_cfg, std::cout, std::cerr);
    }
    if (audit->parsed()) {
      if (audit_eps == "inf" || audit_eps == "infinity") {
        audit_cfg.eps_infinite = true;
      } else {
        audit_cfg.eps = std::stod(audit_eps);
      }
      return dpip::cmd_audit(audit_cfg, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 2;
}
