// Command-line front end. All distance matrices are SQUARED distances.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "edmshrink/cone_projection.hpp"
#include "edmshrink/edm_core.hpp"
#include "edmshrink/errors.hpp"
#include "edmshrink/experiment.hpp"
#include "edmshrink/geometry.hpp"
#include "edmshrink/io.hpp"
#include "edmshrink/shrinkage.hpp"

namespace {

using namespace edmshrink;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNotConverged = 3;

constexpr const char* kEmbeddingHeader = "squared-distance convention; centered coordinates";

struct DykstraFlags {
  double tol = DykstraConfig{}.tol;
  int max_cycles = DykstraConfig{}.max_cycles;

  void add(CLI::App* cmd) {
    cmd->add_option("--tol", tol, "relative Dykstra step tolerance")->capture_default_str();
    cmd->add_option("--max-cycles", max_cycles, "Dykstra cycle budget")->capture_default_str();
  }
  DykstraConfig config() const {
    DykstraConfig cfg;
    cfg.tol = tol;
    cfg.max_cycles = max_cycles;
    return cfg;
  }
};

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto field = text.substr(start, comma == std::string::npos ? std::string::npos
                                                                     : comma - start);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw InputError("--lambda-grid: cannot parse '" + field + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double lambda_from(std::optional<double> lambda, std::optional<double> sigma, long n) {
  if (lambda) return *lambda;
  if (sigma) return default_lambda(n, *sigma);
  throw InputError("one of --lambda or --sigma is required");
}

void print_matrix(const Matrix<double>& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      std::printf("%s%s", j ? "," : "", io::format_double(m(i, j)).c_str());
    std::printf("\n");
  }
}

void print_diagnostics(const ProjectionDiagnostics& d) {
  std::fprintf(stderr, "cycles %d, delta %.3g, C1 residual %.3g, C2 residual %.3g\n", d.cycles,
               d.delta_last, d.c1_residual, d.c2_residual);
}

struct EstimateArgs {
  std::string input;
  std::optional<double> lambda;
  std::optional<double> sigma;
  std::string lambda_grid;
  std::optional<int> rank;
  std::string out;
  std::string kernel_out;
  std::string embedding_out;
  std::string truncated_out;
  DykstraFlags dykstra;
};

int run_estimate(const EstimateArgs& a) {
  const auto x = io::read_distance_csv(a.input);
  const long n = static_cast<long>(x.n());
  const auto cfg = a.dykstra.config();

  if (!a.lambda_grid.empty()) {
    std::printf("lambda,eta,embed_dim,objective,cycles,stress_vs_input\n");
    int status = kExitOk;
    for (double lambda : parse_grid(a.lambda_grid)) {
      try {
        const auto fit = distance_shrinkage(x, lambda, cfg);
        std::printf("%s,%s,%d,%s,%d,%s\n", io::format_double(lambda).c_str(),
                    io::format_double(fit.eta).c_str(), fit.d_hat.embed_dim(),
                    io::format_double(objective_value(fit.d_hat, x, lambda)).c_str(),
                    fit.diagnostics.cycles,
                    io::format_double(kruskal_stress(fit.d_hat.base(), x)).c_str());
      } catch (const NotConverged& e) {
        std::printf("%s,,,,%d,\n", io::format_double(lambda).c_str(), e.diagnostics().cycles);
        status = kExitNotConverged;
      }
    }
    return status;
  }

  const double lambda = lambda_from(a.lambda, a.sigma, n);
  const auto fit = distance_shrinkage(x, lambda, cfg);
  print_diagnostics(fit.diagnostics);
  std::fprintf(stderr, "lambda %.6g, eta %.6g, embedding dimension %d\n", lambda, fit.eta,
               fit.d_hat.embed_dim());

  if (!a.out.empty())
    io::write_csv_matrix(a.out, fit.d_hat.matrix(), "estimated squared-distance matrix");
  else
    print_matrix(fit.d_hat.matrix());
  if (!a.kernel_out.empty())
    io::write_csv_matrix(a.kernel_out, fit.k_hat.matrix(), "minimum-trace kernel -JDJ/2");
  if (a.rank) {
    const auto trunc = truncate_rank(fit, *a.rank);
    if (!a.embedding_out.empty())
      io::write_csv_matrix(a.embedding_out, trunc.embedding.coords(), kEmbeddingHeader);
    if (!a.truncated_out.empty())
      io::write_csv_matrix(a.truncated_out, trunc.d_hat_r.matrix(),
                           "rank-truncated squared-distance matrix");
  } else if (!a.embedding_out.empty() || !a.truncated_out.empty()) {
    throw InputError("--embedding-out and --truncated-out need --rank");
  }
  return kExitOk;
}

struct SimulateArgs {
  std::string input;
  std::string format = "csv";
  long helix = 0;
  std::string noise = "gaussian";
  double sigma2 = 0.0;
  std::optional<double> lambda;
  std::optional<double> sigma;
  int reps = 100;
  std::uint64_t seed = 0;
  int rank = 3;
  int threads = 1;
  std::string out;
  std::string out_format = "json";
  DykstraFlags dykstra;
};

int run_simulate(const SimulateArgs& a) {
  if (a.input.empty() == (a.helix == 0))
    throw InputError("give exactly one of --input or --helix");
  const Matrix<double> coords = a.input.empty()
                                    ? synthetic_helix(a.helix)
                                    : io::load_coords(a.input, io::parse_coord_format(a.format));
  SimConfig cfg;
  cfg.reps = a.reps;
  cfg.seed = a.seed;
  cfg.noise = {parse_noise_kind(a.noise), a.sigma2};
  if (a.lambda)
    cfg.lambda_or_sigma = LambdaChoice::fixed(*a.lambda);
  else if (a.sigma)
    cfg.lambda_or_sigma = LambdaChoice::from_sigma(*a.sigma);
  cfg.rank_r = a.rank;
  cfg.threads = a.threads;
  cfg.dykstra = a.dykstra.config();

  const auto report = run_experiment(coords, cfg);
  const auto format = parse_report_format(a.out_format);
  if (a.out.empty())
    std::cout << (format == ReportFormat::json ? report_to_json(report) : report_to_csv(report));
  else
    report_write(report, a.out, format);
  std::fprintf(stderr,
               "n %ld, lambda %.6g: shrinkage %.4g (se %.2g), classical MDS %.4g (se %.2g), "
               "%d/%d converged\n",
               report.n, report.lambda, report.shrinkage.mean, report.shrinkage.se,
               report.classical_mds.mean, report.classical_mds.se, report.converged, report.reps);
  return kExitOk;
}

struct MdsArgs {
  std::string input;
  int rank = 3;
  std::string out;
  std::string embedding_out;
};

int run_mds(const MdsArgs& a) {
  const auto x = io::read_distance_csv(a.input);
  const auto fit = classical_mds(x, a.rank);
  if (!a.out.empty())
    io::write_csv_matrix(a.out, fit.d_hat_r.matrix(), "classical scaling squared-distance matrix");
  if (!a.embedding_out.empty())
    io::write_csv_matrix(a.embedding_out, fit.embedding.coords(), kEmbeddingHeader);
  std::fprintf(stderr, "embedding dimension %d\n", fit.d_hat_r.embed_dim());
  return kExitOk;
}

struct Dim3Args {
  std::string input;
  std::vector<double> entries;
};

int run_dim3(const Dim3Args& a) {
  SymHollowMatrix<double> x = SymHollowMatrix<double>::zero(3);
  if (!a.input.empty()) {
    x = io::read_distance_csv(a.input);
  } else {
    if (a.entries.size() != 3) throw InputError("dim3 needs --input or --x x12 x13 x23");
    Matrix<double> m = Matrix<double>::Zero(3, 3);
    m(0, 1) = a.entries[0];
    m(0, 2) = a.entries[1];
    m(1, 2) = a.entries[2];
    x = SymHollowMatrix<double>::from_upper(m);
  }
  const auto r = analyze_dim3(x);
  std::printf("delta_x %s\nalpha1 %s\nalpha2 %s\ndim %d\neta_to_dim1 %s\neta_to_dim0 %s\n",
              io::format_double(r.delta_x).c_str(), io::format_double(r.alpha1).c_str(),
              io::format_double(r.alpha2).c_str(), r.dim, io::format_double(r.eta_to_dim1).c_str(),
              io::format_double(r.eta_to_dim0).c_str());
  return kExitOk;
}

struct ConvertArgs {
  std::string input;
  std::string out;
};

int run_convert(const ConvertArgs& a) {
  const auto s = io::read_csv_matrix(a.input);
  if (s.rows() != s.cols()) throw InputError("similarity matrix must be square");
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > io::kLoadTol)
    throw InputError("similarity matrix is not symmetric");
  const Matrix<double> sym = 0.5 * (s + s.transpose());
  const auto x = similarity_to_dissimilarity(sym);
  if (a.out.empty())
    print_matrix(x.matrix());
  else
    io::write_csv_matrix(a.out, x.matrix(), "dissimilarities s_ii + s_jj - 2 s_ij");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distance-shrinkage estimation of squared-distance matrices"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "shrink and project a squared-distance matrix");
  estimate->add_option("--input", est.input, "n x n squared-distance CSV")->required();
  auto* lambda_opt = estimate->add_option("--lambda", est.lambda, "shrinkage parameter");
  auto* sigma_opt =
      estimate->add_option("--sigma", est.sigma, "noise sd; lambda = 4 sigma (sqrt(n) + 1)");
  auto* grid_opt =
      estimate->add_option("--lambda-grid", est.lambda_grid, "comma-separated lambdas to sweep");
  lambda_opt->excludes(sigma_opt)->excludes(grid_opt);
  sigma_opt->excludes(grid_opt);
  estimate->add_option("--rank", est.rank, "rank for truncation and embedding");
  estimate->add_option("--out", est.out, "estimated squared-distance matrix (CSV)");
  estimate->add_option("--kernel-out", est.kernel_out, "fitted kernel (CSV)");
  estimate->add_option("--embedding-out", est.embedding_out, "n x rank coordinates (CSV)");
  estimate->add_option("--truncated-out", est.truncated_out, "rank-truncated matrix (CSV)");
  est.dykstra.add(estimate);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "replicated noisy-distance experiment");
  auto* input_opt = simulate->add_option("--input", sim.input, "coordinate file");
  simulate->add_option("--format", sim.format, "csv | xyz | pdb")->capture_default_str();
  simulate->add_option("--helix", sim.helix, "synthetic helix with this many points")
      ->excludes(input_opt);
  simulate->add_option("--noise", sim.noise, "gaussian | gamma")->capture_default_str();
  simulate->add_option("--sigma2", sim.sigma2, "gaussian noise variance")->capture_default_str();
  auto* sim_lambda = simulate->add_option("--lambda", sim.lambda, "fixed shrinkage parameter");
  simulate->add_option("--sigma", sim.sigma, "sd used for the default lambda")
      ->excludes(sim_lambda);
  simulate->add_option("--reps", sim.reps, "replicates")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "64-bit seed")->capture_default_str();
  simulate->add_option("--rank", sim.rank, "classical scaling rank")->capture_default_str();
  simulate->add_option("--threads", sim.threads, "replicates run concurrently")
      ->capture_default_str();
  simulate->add_option("--out", sim.out, "report path (stdout if omitted)");
  simulate->add_option("--out-format", sim.out_format, "csv | json")->capture_default_str();
  sim.dykstra.add(simulate);

  MdsArgs mds;
  auto* mds_cmd = app.add_subcommand("mds", "classical scaling baseline");
  mds_cmd->add_option("--input", mds.input, "n x n squared-distance CSV")->required();
  mds_cmd->add_option("--rank", mds.rank, "target dimension")->capture_default_str();
  mds_cmd->add_option("--out", mds.out, "implied squared-distance matrix (CSV)");
  mds_cmd->add_option("--embedding-out", mds.embedding_out, "n x rank coordinates (CSV)");

  Dim3Args dim3;
  auto* dim3_cmd = app.add_subcommand("dim3", "closed-form analysis of a 3 x 3 matrix");
  auto* dim3_input = dim3_cmd->add_option("--input", dim3.input, "3 x 3 squared-distance CSV");
  dim3_cmd->add_option("--x", dim3.entries, "x12 x13 x23")->expected(3)->excludes(dim3_input);

  ConvertArgs conv;
  auto* convert = app.add_subcommand("convert", "similarity to dissimilarity");
  convert->add_option("--input", conv.input, "symmetric similarity CSV")->required();
  convert->add_option("--out", conv.out, "dissimilarity CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*estimate) return run_estimate(est);
    if (*simulate) return run_simulate(sim);
    if (*mds_cmd) return run_mds(mds);
    if (*dim3_cmd) return run_dim3(dim3);
    if (*convert) return run_convert(conv);
  } catch (const NotConverged& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNotConverged;
  } catch (const InputError& e) {
    if (e.line() > 0)
      std::fprintf(stderr, "input error (line %zu): %s\n", e.line(), e.what());
    else
      std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return kExitOk;
}
