#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace dpip {

/// Experiment description shared by the CLI subcommands. Flags override
/// config-file values override these defaults.
struct ExperimentConfig {
  std::string protocol = "independence";
  std::string prover = "honest";
  std::string dist = "uniform";
  std::size_t n = 256;
  double sigma = 0.3;
  double eps = 1.0;
  double delta = 1e-4;
  std::size_t s = 0;  // 0: use the calibrated schedule
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::string output_path;      // CSV, appended
  std::string transcript_path;  // JSON lines of the first trial
};

// Exit codes: 0 ok, 1 assertion/acceptance failure, 2 usage error.
int cmd_run(const ExperimentConfig& config, std::ostream& out,
            std::ostream& err);

struct CalibrateConfig {
  std::string kind = "retrieval";  // "retrieval" or "identity"
  bool private_variant = true;
  std::size_t n = 256;
  double sigma = 0.3;
  double eps = 1.0;
  double delta = 1e-4;
  double target = 0.75;
  std::size_t trials = 400;
  std::size_t max_s = 4096;
  std::uint64_t seed = 7;
  std::string output_path;
};

int cmd_calibrate(const CalibrateConfig& config, std::ostream& out,
                  std::ostream& err);

struct AuditConfig {
  double eps = 0.5;
  std::size_t n = 16;
  double sigma = 0.5;
  std::size_t pairs = 20;
  std::size_t trials = 100000;
  std::uint64_t seed = 11;
  bool leaky = false;  // test mode: known-leaky wrapper variant
  bool eps_infinite = false;
  std::string output_path;  // JSON lines
};

int cmd_audit(const AuditConfig& config, std::ostream& out, std::ostream& err);

struct ReplicableAmConfig {
  std::size_t n = 16;
  double sigma = 0.3;
  std::size_t trials = 2000;
  std::uint64_t seed = 3;
};

/// Runs the toy fixture end to end and prints the four acceptance rates
/// (private/AM x close/far) plus the measured replicability.
int cmd_replicable_am(const ReplicableAmConfig& config, std::ostream& out,
                      std::ostream& err);

}  // namespace dpip
