#include <sstream>

#include "doctest.h"
#include "dpip/cli.hpp"

using namespace dpip;

TEST_CASE("cmd_run rejects unknown names with a usage error") {
  std::ostringstream out, err;
  ExperimentConfig cfg;
  cfg.protocol = "no-such-protocol";
  CHECK(cmd_run(cfg, out, err) == 2);
  CHECK(err.str().find("registry") != std::string::npos);

  std::ostringstream out2, err2;
  ExperimentConfig cfg2;
  cfg2.protocol = "independence";
  cfg2.n = 16;
  cfg2.prover = "no-such-prover";
  CHECK(cmd_run(cfg2, out2, err2) == 2);
  CHECK(err2.str().find("honest") != std::string::npos);
}

TEST_CASE("cmd_run is reproducible from its seed") {
  ExperimentConfig cfg;
  cfg.protocol = "independence";
  cfg.n = 16;
  cfg.sigma = 0.4;
  cfg.trials = 50;
  cfg.seed = 77;
  std::ostringstream out_a, out_b, err;
  CHECK(cmd_run(cfg, out_a, err) == 0);
  CHECK(cmd_run(cfg, out_b, err) == 0);
  CHECK(out_a.str() == out_b.str());
  CHECK(out_a.str().find("schema_version=1") != std::string::npos);
  CHECK(out_a.str().find("seed=77") != std::string::npos);
}

TEST_CASE("cmd_calibrate sweeps sample sizes") {
  CalibrateConfig cfg;
  cfg.n = 64;
  cfg.sigma = 0.3;
  cfg.trials = 60;
  cfg.max_s = 256;
  std::ostringstream out, err;
  CHECK(cmd_calibrate(cfg, out, err) == 0);
  CHECK(out.str().find("tagged-retrieval-private") != std::string::npos);
}

TEST_CASE("cmd_audit flags only the leaky variant") {
  AuditConfig cfg;
  cfg.n = 16;
  cfg.sigma = 0.5;
  cfg.pairs = 2;
  cfg.trials = 15000;
  SUBCASE("epsilon infinity skips") {
    AuditConfig skip = cfg;
    skip.eps_infinite = true;
    std::ostringstream out, err;
    CHECK(cmd_audit(skip, out, err) == 0);
    CHECK(out.str().find("skipped") != std::string::npos);
  }
  SUBCASE("wrapper passes, leaky flags") {
    std::ostringstream out, err;
    CHECK(cmd_audit(cfg, out, err) == 0);
    CHECK(out.str().find("violations=0/2") != std::string::npos);
    AuditConfig leaky = cfg;
    leaky.leaky = true;
    std::ostringstream out2, err2;
    CHECK(cmd_audit(leaky, out2, err2) == 0);
    CHECK(out2.str().find("violations=2/2") != std::string::npos);
  }
}

TEST_CASE("cmd_replicable_am prints the four rates") {
  ReplicableAmConfig cfg;
  cfg.trials = 300;
  std::ostringstream out, err;
  CHECK(cmd_replicable_am(cfg, out, err) == 0);
  CHECK(out.str().find("private_close=") != std::string::npos);
  CHECK(out.str().find("private_far=") != std::string::npos);
  CHECK(out.str().find("am_close=") != std::string::npos);
  CHECK(out.str().find("am_far=") != std::string::npos);
  CHECK(out.str().find("rho_hat=") != std::string::npos);
}
