#include "dpip/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "dpip/argument.hpp"
#include "dpip/config.hpp"
#include "dpip/dp.hpp"
#include "dpip/identity.hpp"
#include "dpip/independence.hpp"
#include "dpip/replicable_am.hpp"
#include "dpip/stats.hpp"
#include "dpip/tagged_retrieval.hpp"

namespace dpip {

namespace {

constexpr const char* kProtocolRegistry =
    "independence, tagged-retrieval-private, tagged-retrieval-nonprivate, "
    "argument, replicable-am";

Distribution make_instance(const std::string& dist, std::size_t n) {
  if (dist == "uniform") return Distribution::uniform(n);
  if (dist == "point-mass") return Distribution::point_mass(n, 0);
  if (dist == "two-level") {
    // Half the mass on the first eighth of the domain.
    std::vector<double> pmf(n);
    const std::size_t heavy = std::max<std::size_t>(1, n / 8);
    for (std::size_t i = 0; i < n; ++i) {
      pmf[i] = i < heavy ? 0.5 / static_cast<double>(heavy)
                         : 0.5 / static_cast<double>(n - heavy);
    }
    return Distribution(std::move(pmf));
  }
  if (dist == "correlated-bits") {
    // Equal mass on the all-zeros and all-ones corners of the hypercube.
    std::vector<double> pmf(n, 0.0);
    pmf.front() = 0.5;
    pmf.back() = 0.5;
    return Distribution(std::move(pmf));
  }
  if (dist == "product-skew") {
    // Product of alternating Bern(0.3)/Bern(0.6) marginals over log2(n)
    // boolean attributes (n must be a power of two).
    std::size_t d = 0;
    while ((std::size_t{1} << d) < n) ++d;
    if ((std::size_t{1} << d) != n) {
      throw std::invalid_argument("product-skew requires power-of-two n");
    }
    std::vector<std::vector<double>> blocks;
    for (std::size_t i = 0; i < d; ++i) {
      const double p1 = i % 2 == 0 ? 0.3 : 0.6;
      blocks.push_back({1.0 - p1, p1});
    }
    return product_from_marginals(
        Marginals(std::move(blocks)),
        ProductDomain(std::vector<std::size_t>(d, 2)));
  }
  throw std::invalid_argument(
      "unknown dist '" + dist +
      "' (registry: uniform, point-mass, two-level, correlated-bits, "
      "product-skew)");
}

ProductDomain boolean_domain(std::size_t n) {
  std::size_t d = 0;
  while ((std::size_t{1} << d) < n) ++d;
  if ((std::size_t{1} << d) != n) {
    throw std::invalid_argument("independence runs need power-of-two n");
  }
  return ProductDomain(std::vector<std::size_t>(std::max<std::size_t>(d, 1),
                                                2));
}

std::unique_ptr<ProverStrategy> make_prover(const ExperimentConfig& cfg,
                                            const RetrievalParams* retrieval) {
  const std::string& name = cfg.prover;
  if (cfg.protocol == "independence") {
    if (name == "honest") return make_honest_marginal_strategy();
    auto pool = make_marginal_adversary_pool();
    for (auto& strategy : pool) {
      if (strategy->name() == name) return std::move(strategy);
    }
    std::string registry = "honest";
    for (const auto& strategy : make_marginal_adversary_pool()) {
      registry += ", " + strategy->name();
    }
    throw std::invalid_argument("unknown prover '" + name +
                                "' (registry: " + registry + ")");
  }
  if (cfg.protocol == "tagged-retrieval-private" ||
      cfg.protocol == "tagged-retrieval-nonprivate") {
    if (name == "honest") return make_honest_tag_strategy(*retrieval);
    auto pool = make_tag_adversary_pool(*retrieval);
    for (auto& strategy : pool) {
      if (strategy->name() == name) return std::move(strategy);
    }
    std::string registry = "honest";
    for (const auto& strategy : make_tag_adversary_pool(*retrieval)) {
      registry += ", " + strategy->name();
    }
    throw std::invalid_argument("unknown prover '" + name +
                                "' (registry: " + registry + ")");
  }
  if (cfg.protocol == "argument") {
    if (name == "honest") return make_honest_argument_strategy();
    if (name == "far-commit") {
      // Commit to a distribution 2*sigma away from uniform in TV: zero the
      // tail carrying that much mass and pile it onto the first quarter.
      const std::size_t n = cfg.n;
      const auto zeroed = static_cast<std::size_t>(std::llround(
          std::min(0.9, 2.0 * cfg.sigma) * static_cast<double>(n)));
      const double moved =
          static_cast<double>(zeroed) / static_cast<double>(n);
      std::vector<double> pmf(n, 1.0 / static_cast<double>(n));
      const std::size_t quarter = std::max<std::size_t>(1, n / 4);
      for (std::size_t i = 0; i < zeroed; ++i) pmf[n - 1 - i] = 0.0;
      for (std::size_t i = 0; i < quarter; ++i) {
        pmf[i] += moved / static_cast<double>(quarter);
      }
      return make_fixed_commit_strategy(Distribution(std::move(pmf)));
    }
    if (name == "equivocate") {
      return make_equivocating_strategy(
          Distribution::uniform(cfg.n),
          make_instance("two-level", cfg.n), 1.0);
    }
    throw std::invalid_argument(
        "unknown prover '" + name +
        "' (registry: honest, far-commit, equivocate)");
  }
  if (cfg.protocol == "replicable-am") {
    auto toy = toy_private_protocol(cfg.n, cfg.sigma);
    if (name == "honest") return make_honest_am_strategy(std::move(toy));
    auto pool = make_am_adversary_pool(std::move(toy));
    for (auto& strategy : pool) {
      if (strategy->name() == name) return std::move(strategy);
    }
    std::string registry = "honest";
    for (const auto& strategy :
         make_am_adversary_pool(toy_private_protocol(cfg.n, cfg.sigma))) {
      registry += ", " + strategy->name();
    }
    throw std::invalid_argument("unknown prover '" + name +
                                "' (registry: " + registry + ")");
  }
  throw std::invalid_argument("unknown protocol '" + cfg.protocol +
                              "' (registry: " + kProtocolRegistry + ")");
}

void write_csv_row(const std::string& path, const ResultRow& row,
                   std::ostream& out) {
  const std::string line = to_csv(row);
  out << line << '\n';
  if (path.empty()) return;
  const bool exists = static_cast<bool>(std::ifstream(path));
  std::ofstream file(path, std::ios::app);
  if (!file) throw std::runtime_error("cannot write output file: " + path);
  if (!exists) file << csv_header() << '\n';
  file << line << '\n';
}

}  // namespace

int cmd_run(const ExperimentConfig& config, std::ostream& out,
            std::ostream& err) {
  try {
    const Distribution d = make_instance(config.dist, config.n);
    std::unique_ptr<Protocol> protocol;
    RetrievalParams retrieval;
    std::size_t effective_s = config.s;

    if (config.protocol == "independence") {
      protocol = std::make_unique<IndependenceProtocol>(
          boolean_domain(config.n), config.sigma, config.eps);
      effective_s =
          static_cast<const IndependenceProtocol&>(*protocol).sample_size();
    } else if (config.protocol == "tagged-retrieval-private") {
      retrieval =
          desk_params_private(config.eps, config.delta, config.sigma,
                              config.n);
      if (config.s != 0) {
        retrieval = derive_params(config.eps, config.delta, config.sigma,
                                  config.s, config.n);
        const RetrievalCalibration cal =
            desk_config().retrieval_calibration(true, config.n, config.sigma,
                                                config.eps, config.delta);
        retrieval.band_scale = cal.band_scale;
        retrieval.pair_noise_allowance = cal.pair_noise_allowance;
        retrieval.triple_noise_allowance = cal.triple_noise_allowance;
      }
      effective_s = retrieval.s;
      protocol = std::make_unique<TaggedRetrievalProtocol>(retrieval);
    } else if (config.protocol == "tagged-retrieval-nonprivate") {
      retrieval = desk_params_nonprivate(config.sigma, config.n);
      if (config.s != 0) {
        const double band = retrieval.band_scale;
        retrieval = derive_params_nonprivate(config.sigma, config.s, config.n);
        retrieval.band_scale = band;
      }
      effective_s = retrieval.s;
      protocol = std::make_unique<TaggedRetrievalProtocol>(retrieval);
    } else if (config.protocol == "argument") {
      auto options = desk_argument_options(config.n, config.sigma, config.eps);
      effective_s = options.identity_sample_size;
      protocol = std::make_unique<ArgumentProtocol>(std::move(options));
    } else if (config.protocol == "replicable-am") {
      protocol = std::make_unique<ReplicableAmProtocol>(
          toy_private_protocol(config.n, config.sigma));
      effective_s = 60;
    } else {
      err << "unknown protocol '" << config.protocol
          << "' (registry: " << kProtocolRegistry << ")\n";
      return 2;
    }

    auto prover = make_prover(
        config, config.protocol.rfind("tagged-", 0) == 0 ? &retrieval
                                                         : nullptr);

    if (!config.transcript_path.empty()) {
      NoiseSource rng = NoiseSource(config.seed).split(0);
      const Transcript t = run_protocol(*protocol, *prover, d, rng);
      std::ofstream file(config.transcript_path);
      if (!file) {
        err << "cannot write transcript file: " << config.transcript_path
            << "\n";
        return 2;
      }
      file << t.to_json_lines();
    }

    const AcceptanceEstimate est = estimate_acceptance(
        *protocol, *prover, d, config.trials, config.seed, config.jobs);
    ResultRow row{protocol->name(), config.n,      config.sigma,
                  config.eps,       config.delta,  effective_s,
                  config.trials,    est.rate,      est.ci_low,
                  est.ci_high,      config.seed};
    out << csv_header() << '\n';
    write_csv_row(config.output_path, row, out);
    out << "seed=" << config.seed << "\n";
    return 0;
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return 1;
  }
}

int cmd_calibrate(const CalibrateConfig& config, std::ostream& out,
                  std::ostream& err) {
  try {
    if (config.kind == "identity") {
      // Regenerates the identity-threshold table over the desk grid.
      for (const std::size_t n : {16ul, 64ul, 256ul}) {
        for (const double sigma : {0.3, 0.4, 0.5}) {
          const std::size_t s = identity_sample_size(n, sigma);
          identity_threshold(n, sigma, s);
          two_sample_threshold(
              n, s, std::max<std::size_t>(
                 256, s / desk_config().argument_opening_divisor));
        }
      }
      const std::string table = calibration_table_csv();
      out << table;
      if (!config.output_path.empty()) {
        std::ofstream file(config.output_path);
        if (!file) {
          err << "cannot write " << config.output_path << "\n";
          return 2;
        }
        file << table;
      }
      return 0;
    }
    if (config.kind != "retrieval") {
      err << "unknown calibration kind '" << config.kind
          << "' (registry: retrieval, identity)\n";
      return 2;
    }

    out << "protocol,n,sigma,eps,delta,s,rate,feasible\n";
    const Distribution d = Distribution::uniform(config.n);
    for (std::size_t s = 16; s <= config.max_s; s *= 2) {
      RetrievalParams params;
      try {
        if (config.private_variant) {
          params = derive_params(config.eps, config.delta, config.sigma, s,
                                 config.n);
          const RetrievalCalibration cal = desk_config().retrieval_calibration(
              true, config.n, config.sigma, config.eps, config.delta);
          params.band_scale = cal.band_scale;
          params.pair_noise_allowance = cal.pair_noise_allowance;
          params.triple_noise_allowance = cal.triple_noise_allowance;
        } else {
          params = derive_params_nonprivate(config.sigma, s, config.n);
          params.band_scale = desk_config()
                                  .retrieval_calibration(false, config.n,
                                                         config.sigma, 0, 0)
                                  .band_scale;
        }
      } catch (const std::invalid_argument&) {
        continue;  // infeasible regime at this s
      }
      TaggedRetrievalProtocol protocol(params);
      auto honest = make_honest_tag_strategy(params);
      const AcceptanceEstimate est = estimate_acceptance(
          protocol, *honest, d, config.trials, config.seed);
      out << protocol.name() << ',' << config.n << ',' << config.sigma << ','
          << config.eps << ',' << config.delta << ',' << s << ',' << est.rate
          << ',' << (est.rate >= config.target ? "yes" : "no") << '\n';
      if (est.rate >= config.target) return 0;
    }
    out << "infeasible: no s <= " << config.max_s << " reaches target "
        << config.target << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return 1;
  }
}

namespace {

// Adjacent dataset pair whose swap crosses the inner tester's decision
// boundary, so a leak-prone mechanism actually changes its output law.
std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>
make_boundary_pair(const Distribution& q, double sigma, std::size_t total_size,
                   std::size_t block_size, NoiseSource& rng) {
  const double threshold =
      identity_threshold(q.domain_size(), sigma, block_size);
  const std::size_t n = q.domain_size();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<std::int64_t> x = q.sample_many(total_size, rng);
    // Work inside the first block; push its statistic just under the
    // threshold by targeted swaps, then find one more swap that crosses.
    std::span<std::int64_t> block(x.data(), block_size);
    auto stat = [&] {
      return empirical_tv_statistic(block, q);
    };
    std::vector<std::size_t> counts(n, 0);
    for (std::int64_t v : block) ++counts[static_cast<std::size_t>(v)];
    auto surplus = [&](std::size_t v) {
      return static_cast<double>(counts[v]) /
                 static_cast<double>(block_size) >
             q.mass(v);
    };
    // Move samples from deficit elements onto surplus elements: each such
    // swap raises the statistic by 1/block_size.
    for (int step = 0; step < 200; ++step) {
      const double current = stat();
      if (current <= threshold &&
          threshold - current <= 1.5 / static_cast<double>(block_size)) {
        // One more raising swap crosses the boundary.
        for (std::size_t i = 0; i < block_size; ++i) {
          const auto from = static_cast<std::size_t>(block[i]);
          if (surplus(from)) continue;
          for (std::size_t to = 0; to < n; ++to) {
            if (!surplus(to)) continue;
            std::vector<std::int64_t> y = x;
            y[i] = static_cast<std::int64_t>(to);
            const std::span<std::int64_t> yblock(y.data(), block_size);
            if ((empirical_tv_statistic(yblock, q) > threshold) !=
                (current > threshold)) {
              return {std::move(x), std::move(y)};
            }
          }
        }
        break;  // no single crossing swap; redraw
      }
      if (current > threshold) break;  // started above; redraw
      // Raising swap, keeping the statistic under the threshold.
      bool moved = false;
      for (std::size_t i = 0; i < block_size && !moved; ++i) {
        const auto from = static_cast<std::size_t>(block[i]);
        if (surplus(from)) continue;
        for (std::size_t to = 0; to < n; ++to) {
          if (!surplus(to) || to == from) continue;
          --counts[from];
          ++counts[to];
          block[i] = static_cast<std::int64_t>(to);
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
  }
  throw std::runtime_error("could not construct a boundary pair");
}

}  // namespace

int cmd_audit(const AuditConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.eps_infinite) {
      out << "audit skipped: epsilon is infinite (no bound to check)\n";
      return 0;
    }
    const Distribution q = Distribution::uniform(config.n);
    const std::size_t s = identity_sample_size(config.n, config.sigma);
    TesterSpec inner;
    inner.sample_size = s;
    inner.decide = [&q, sigma = config.sigma](
                       std::span<const std::int64_t> block, NoiseSource&) {
      return identity_test_nonprivate(block, q, sigma);
    };

    // The audited mechanism: the generic wrapper, or (in test mode) a
    // deliberately leaky variant with no subsampling and no output flip.
    TesterSpec mechanism_spec =
        config.leaky ? inner : privatize_tester(inner, config.eps);
    const std::size_t dataset_size =
        config.leaky ? inner.sample_size : mechanism_spec.sample_size;
    DecisionMechanism mechanism =
        [spec = mechanism_spec.decide](const std::vector<std::int64_t>& data,
                                       NoiseSource& rng) {
          return spec(data, rng);
        };

    NoiseSource rng(config.seed);
    const PrivacyParams params{config.eps, 0.0};
    std::ofstream file;
    if (!config.output_path.empty()) {
      file.open(config.output_path);
      if (!file) {
        err << "cannot write " << config.output_path << "\n";
        return 2;
      }
    }
    std::size_t violations = 0;
    for (std::size_t p = 0; p < config.pairs; ++p) {
      NoiseSource pair_rng = rng.split(p);
      const auto [x, x_prime] =
          make_boundary_pair(q, config.sigma, dataset_size, s, pair_rng);
      NoiseSource audit_rng = rng.split(1000 + p);
      const AuditReport report = audit_dp_decision(
          mechanism, x, x_prime, params, config.trials, audit_rng);
      violations += report.violated ? 1 : 0;
      out << report.to_json() << '\n';
      if (file) file << report.to_json() << '\n';
    }
    out << "violations=" << violations << "/" << config.pairs << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return 1;
  }
}

int cmd_replicable_am(const ReplicableAmConfig& config, std::ostream& out,
                      std::ostream& err) {
  try {
    const auto [yes, far] = toy_instances(config.n, config.sigma);
    PrivateCoinProtocol toy = toy_private_protocol(config.n, config.sigma);

    NoiseSource rng(config.seed);
    std::size_t yes_accepts = 0, far_accepts = 0;
    for (std::size_t t = 0; t < config.trials; ++t) {
      NoiseSource trial = rng.split(t);
      yes_accepts += run_private_protocol(toy, yes, trial) ? 1 : 0;
      NoiseSource trial_far = rng.split(config.trials + t);
      far_accepts += run_private_protocol(toy, far, trial_far) ? 1 : 0;
    }

    NoiseSource rep_rng = rng.split(1 << 20);
    const ReplicabilityEstimate rho = measure_replicability(
        toy.message_alg, yes, toy.message_alg.sample_size,
        std::max<std::size_t>(config.trials, 1000), rep_rng);

    ReplicableAmProtocol am(toy_private_protocol(config.n, config.sigma));
    auto honest = make_honest_am_strategy(
        toy_private_protocol(config.n, config.sigma));
    const AcceptanceEstimate am_yes = estimate_acceptance(
        am, *honest, yes, config.trials, config.seed + 1);
    const auto pool =
        make_am_adversary_pool(toy_private_protocol(config.n, config.sigma));
    const AdversaryResult am_far = best_adversary_acceptance(
        am, pool, far, config.trials, config.seed + 2);

    const double n_trials = static_cast<double>(config.trials);
    out << "private_close="
        << static_cast<double>(yes_accepts) / n_trials
        << " private_far=" << static_cast<double>(far_accepts) / n_trials
        << " am_close=" << am_yes.rate << " am_far=" << am_far.best.rate
        << " (best adversary: " << am_far.best_name << ")"
        << " rho_hat=" << rho.rho_hat << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return 1;
  }
}

}  // namespace dpip
