#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "edmshrink/cone_projection.hpp"
#include "edmshrink/noise.hpp"
#include "edmshrink/types.hpp"

namespace edmshrink {

/// How the shrinkage parameter of each replicate is chosen.
struct LambdaChoice {
  enum class Kind {
    lambda,     ///< use `value` as lambda directly
    sigma,      ///< lambda = default_lambda(n, value)
    automatic,  ///< sigma taken from the noise model (see resolve_lambda)
  };
  Kind kind = Kind::automatic;
  double value = 0.0;

  static LambdaChoice fixed(double lambda) { return {Kind::lambda, lambda}; }
  static LambdaChoice from_sigma(double sigma) { return {Kind::sigma, sigma}; }
};

std::string_view to_string(LambdaChoice::Kind kind);

struct SimConfig {
  int reps = 100;
  std::uint64_t seed = 0;
  NoiseModel noise;
  LambdaChoice lambda_or_sigma;
  int rank_r = 3;
  DykstraConfig dykstra;
  int threads = 1;  ///< replicates run concurrently; results do not depend on it

  void validate() const;
};

/// Lambda used for every replicate of an experiment on `d`. Automatic choice:
/// gaussian noise uses sigma = sqrt(sigma2); gamma noise has per-pair variance
/// d_ij, so sigma = sqrt(mean off-diagonal d_ij).
double resolve_lambda(const SimConfig& cfg, const SymHollowMatrix<double>& d);

struct ReplicateResult {
  int replicate = 0;
  /// Empty when the projection did not converge.
  std::optional<double> shrinkage_stress;
  double mds_stress = 0.0;
  ProjectionDiagnostics diagnostics;
};

struct MethodSummary {
  double mean = 0.0;
  double se = 0.0;  ///< sample standard deviation / sqrt(count); 0 when count < 2
  int count = 0;    ///< replicates entering the aggregate
};

struct StressReport {
  // Configuration echo.
  long n = 0;
  int reps = 0;
  std::uint64_t seed = 0;
  NoiseModel noise;
  LambdaChoice::Kind lambda_source = LambdaChoice::Kind::automatic;
  double lambda = 0.0;
  double eta = 0.0;
  int rank_r = 3;
  DykstraConfig dykstra;

  std::vector<ReplicateResult> replicates;  ///< in replicate order
  MethodSummary shrinkage;
  MethodSummary classical_mds;
  int converged = 0;
  int not_converged = 0;
};

/// One replicate: noise with stream (cfg.seed, replicate), shrinkage fit at
/// `lambda`, rank-r classical scaling, and both Kruskal stresses against `d`.
ReplicateResult run_replicate(const EdmMatrix<double>& d, const SimConfig& cfg, double lambda,
                              int replicate);

/// Aggregates over replicates whose projection converged; both methods use the
/// same replicate set so their means are paired.
void summarize(StressReport& report);

StressReport run_experiment(const EdmMatrix<double>& d, const SimConfig& cfg);

/// Coordinates are turned into the true EDM first.
StressReport run_experiment(const Matrix<double>& coords, const SimConfig& cfg);

enum class ReportFormat { csv, json };

ReportFormat parse_report_format(std::string_view name);

/// JSON: config echo, per-method aggregates and per-replicate stresses (null
/// when excluded), diagnostics. CSV: header method,replicate,stress,cycles,converged
/// then one row per (method, replicate). Doubles round-trip exactly.
void report_write(const StressReport& report, const std::filesystem::path& path,
                  ReportFormat format);

std::string report_to_json(const StressReport& report);
std::string report_to_csv(const StressReport& report);

/// Inverse of report_to_json.
StressReport report_from_json(std::string_view text);
StressReport read_report_json(const std::filesystem::path& path);

}  // namespace edmshrink
