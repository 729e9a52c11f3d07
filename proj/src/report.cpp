#include <fstream>
#include <sstream>

#include <json.hpp>

#include "edmshrink/errors.hpp"
#include "edmshrink/experiment.hpp"
#include "edmshrink/io.hpp"

namespace edmshrink {

using nlohmann::json;

namespace {

json summary_json(const MethodSummary& s) {
  return {{"mean", s.mean}, {"se", s.se}, {"count", s.count}};
}

MethodSummary summary_from(const json& j) {
  return {j.at("mean").get<double>(), j.at("se").get<double>(), j.at("count").get<int>()};
}

LambdaChoice::Kind lambda_kind_from(const std::string& name) {
  if (name == "lambda") return LambdaChoice::Kind::lambda;
  if (name == "sigma") return LambdaChoice::Kind::sigma;
  if (name == "auto") return LambdaChoice::Kind::automatic;
  throw InputError("report: unknown lambda source '" + name + "'");
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw InputError("unknown report format '" + std::string(name) + "'");
}

std::string report_to_json(const StressReport& r) {
  json shrink_values = json::array();
  json mds_values = json::array();
  json cycles = json::array();
  json converged = json::array();
  json delta = json::array();
  json c1 = json::array();
  json c2 = json::array();
  for (const auto& rep : r.replicates) {
    shrink_values.push_back(rep.shrinkage_stress ? json(*rep.shrinkage_stress) : json(nullptr));
    mds_values.push_back(rep.mds_stress);
    cycles.push_back(rep.diagnostics.cycles);
    converged.push_back(rep.diagnostics.converged);
    delta.push_back(rep.diagnostics.delta_last);
    c1.push_back(rep.diagnostics.c1_residual);
    c2.push_back(rep.diagnostics.c2_residual);
  }

  json doc;
  doc["config"] = {
      {"n", r.n},
      {"reps", r.reps},
      {"seed", r.seed},
      {"noise", {{"kind", std::string(to_string(r.noise.kind))}, {"sigma2", r.noise.sigma2}}},
      {"lambda_source", std::string(to_string(r.lambda_source))},
      {"lambda", r.lambda},
      {"eta", r.eta},
      {"rank", r.rank_r},
      {"dykstra",
       {{"tol", r.dykstra.tol}, {"max_cycles", r.dykstra.max_cycles},
        {"feas_tol", r.dykstra.feas_tol}}},
      {"units", "squared distances"},
  };
  json shrink = summary_json(r.shrinkage);
  shrink["stress"] = std::move(shrink_values);
  json mds = summary_json(r.classical_mds);
  mds["stress"] = std::move(mds_values);
  doc["methods"] = {{"shrinkage", std::move(shrink)}, {"classical_mds", std::move(mds)}};
  doc["diagnostics"] = {
      {"converged", r.converged},       {"not_converged", r.not_converged},
      {"cycles", std::move(cycles)},    {"replicate_converged", std::move(converged)},
      {"delta_last", std::move(delta)}, {"c1_residual", std::move(c1)},
      {"c2_residual", std::move(c2)},
  };
  return doc.dump(2) + "\n";
}

std::string report_to_csv(const StressReport& r) {
  std::ostringstream os;
  os << "method,replicate,stress,cycles,converged\n";
  for (const auto& rep : r.replicates) {
    os << "shrinkage," << rep.replicate << ','
       << (rep.shrinkage_stress ? io::format_double(*rep.shrinkage_stress) : std::string())
       << ',' << rep.diagnostics.cycles << ',' << (rep.diagnostics.converged ? "true" : "false")
       << '\n';
  }
  for (const auto& rep : r.replicates)
    os << "classical_mds," << rep.replicate << ',' << io::format_double(rep.mds_stress)
       << ",0,true\n";
  return os.str();
}

void report_write(const StressReport& report, const std::filesystem::path& path,
                  ReportFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << (format == ReportFormat::json ? report_to_json(report) : report_to_csv(report));
  out.flush();
  if (!out) throw Error("write failed for " + path.string());
}

StressReport report_from_json(std::string_view text) {
  StressReport r;
  try {
    const json doc = json::parse(text);
    const json& cfg = doc.at("config");
    r.n = cfg.at("n").get<long>();
    r.reps = cfg.at("reps").get<int>();
    r.seed = cfg.at("seed").get<std::uint64_t>();
    r.noise.kind = parse_noise_kind(cfg.at("noise").at("kind").get<std::string>());
    r.noise.sigma2 = cfg.at("noise").at("sigma2").get<double>();
    r.lambda_source = lambda_kind_from(cfg.at("lambda_source").get<std::string>());
    r.lambda = cfg.at("lambda").get<double>();
    r.eta = cfg.at("eta").get<double>();
    r.rank_r = cfg.at("rank").get<int>();
    r.dykstra.tol = cfg.at("dykstra").at("tol").get<double>();
    r.dykstra.max_cycles = cfg.at("dykstra").at("max_cycles").get<int>();
    r.dykstra.feas_tol = cfg.at("dykstra").at("feas_tol").get<double>();

    const json& methods = doc.at("methods");
    r.shrinkage = summary_from(methods.at("shrinkage"));
    r.classical_mds = summary_from(methods.at("classical_mds"));
    const json& diag = doc.at("diagnostics");
    r.converged = diag.at("converged").get<int>();
    r.not_converged = diag.at("not_converged").get<int>();

    const json& shrink = methods.at("shrinkage").at("stress");
    const json& mds = methods.at("classical_mds").at("stress");
    for (std::size_t i = 0; i < shrink.size(); ++i) {
      ReplicateResult rep;
      rep.replicate = static_cast<int>(i);
      if (!shrink.at(i).is_null()) rep.shrinkage_stress = shrink.at(i).get<double>();
      rep.mds_stress = mds.at(i).get<double>();
      rep.diagnostics.cycles = diag.at("cycles").at(i).get<int>();
      rep.diagnostics.converged = diag.at("replicate_converged").at(i).get<bool>();
      rep.diagnostics.delta_last = diag.at("delta_last").at(i).get<double>();
      rep.diagnostics.c1_residual = diag.at("c1_residual").at(i).get<double>();
      rep.diagnostics.c2_residual = diag.at("c2_residual").at(i).get<double>();
      r.replicates.push_back(rep);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
  return r;
}

StressReport read_report_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return report_from_json(buf.str());
}

}  // namespace edmshrink
