#include "edmshrink/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "edmshrink/edm_core.hpp"
#include "edmshrink/errors.hpp"
#include "edmshrink/shrinkage.hpp"

namespace edmshrink {

std::string_view to_string(LambdaChoice::Kind kind) {
  switch (kind) {
    case LambdaChoice::Kind::lambda: return "lambda";
    case LambdaChoice::Kind::sigma: return "sigma";
    case LambdaChoice::Kind::automatic: return "auto";
  }
  return "auto";
}

void SimConfig::validate() const {
  if (reps < 1) throw DomainError("reps must be >= 1");
  if (rank_r < 1) throw DomainError("rank must be >= 1");
  if (threads < 1) throw DomainError("threads must be >= 1");
  if (lambda_or_sigma.kind != LambdaChoice::Kind::automatic &&
      !(lambda_or_sigma.value >= 0.0 && std::isfinite(lambda_or_sigma.value)))
    throw DomainError("lambda / sigma must be finite and >= 0");
  noise.validate();
  dykstra.validate();
}

double resolve_lambda(const SimConfig& cfg, const SymHollowMatrix<double>& d) {
  const long n = static_cast<long>(d.n());
  switch (cfg.lambda_or_sigma.kind) {
    case LambdaChoice::Kind::lambda: return cfg.lambda_or_sigma.value;
    case LambdaChoice::Kind::sigma: return default_lambda(n, cfg.lambda_or_sigma.value);
    case LambdaChoice::Kind::automatic: break;
  }
  if (cfg.noise.kind == NoiseKind::gaussian) return default_lambda(n, std::sqrt(cfg.noise.sigma2));
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
  const double mean_d = d.matrix().sum() / pairs;
  return default_lambda(n, std::sqrt(mean_d));
}

ReplicateResult run_replicate(const EdmMatrix<double>& d, const SimConfig& cfg, double lambda,
                              int replicate) {
  ReplicateResult out;
  out.replicate = replicate;
  const auto x = add_noise(d.base(), cfg.noise, cfg.seed, static_cast<std::uint64_t>(replicate));
  try {
    const auto fit = distance_shrinkage(x, lambda, cfg.dykstra);
    out.shrinkage_stress = kruskal_stress(fit.d_hat.base(), d.base());
    out.diagnostics = fit.diagnostics;
  } catch (const NotConverged& e) {
    out.diagnostics = e.diagnostics();
  }
  const auto mds = classical_mds(x, cfg.rank_r);
  out.mds_stress = kruskal_stress(mds.d_hat_r.base(), d.base());
  return out;
}

namespace {

MethodSummary aggregate(const std::vector<double>& values) {
  MethodSummary s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    const double var = ss / static_cast<double>(values.size() - 1);
    s.se = std::sqrt(var / static_cast<double>(values.size()));
  }
  return s;
}

}  // namespace

void summarize(StressReport& report) {
  std::vector<double> shrink;
  std::vector<double> mds;
  report.converged = 0;
  report.not_converged = 0;
  for (const auto& r : report.replicates) {
    if (!r.shrinkage_stress) {
      ++report.not_converged;
      continue;
    }
    ++report.converged;
    shrink.push_back(*r.shrinkage_stress);
    mds.push_back(r.mds_stress);
  }
  report.shrinkage = aggregate(shrink);
  report.classical_mds = aggregate(mds);
}

StressReport run_experiment(const EdmMatrix<double>& d, const SimConfig& cfg) {
  cfg.validate();
  if (cfg.rank_r > d.n() - 1) throw DomainError("rank must be <= n-1");

  StressReport report;
  report.n = static_cast<long>(d.n());
  report.reps = cfg.reps;
  report.seed = cfg.seed;
  report.noise = cfg.noise;
  report.lambda_source = cfg.lambda_or_sigma.kind;
  report.lambda = resolve_lambda(cfg, d.base());
  report.eta = report.lambda / (2.0 * static_cast<double>(report.n));
  report.rank_r = cfg.rank_r;
  report.dykstra = cfg.dykstra;
  report.replicates.resize(static_cast<std::size_t>(cfg.reps));

  const int workers = std::min(cfg.threads, cfg.reps);
  if (workers <= 1) {
    for (int r = 0; r < cfg.reps; ++r)
      report.replicates[static_cast<std::size_t>(r)] = run_replicate(d, cfg, report.lambda, r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int r = next++; r < cfg.reps; r = next++)
            report.replicates[static_cast<std::size_t>(r)] =
                run_replicate(d, cfg, report.lambda, r);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  summarize(report);
  return report;
}

StressReport run_experiment(const Matrix<double>& coords, const SimConfig& cfg) {
  return run_experiment(edm_from_coords(coords), cfg);
}

}  // namespace edmshrink
