#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssde/analysis.hpp"
#include "ssde/engine.hpp"
#include "ssde/localtime.hpp"
#include "ssde/model_io.hpp"
#include "ssde/verify.hpp"
#include "ssde/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitTestFailure = 3;

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// write-to-temp, rename-on-success: no partial outputs on error paths
void write_atomic(const std::string& path, const std::string& data) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << data;
    if (!out) throw std::runtime_error("short write to '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Manifest {
  std::string subcommand;
  json config = json::object();
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::uint64_t>> inputs;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  void write(const std::string& out_dir) const {
    json j;
    j["tool_version"] = ssde::kVersion;
    j["subcommand"] = subcommand;
    j["config"] = config;
    j["seed"] = seed;
    json ins = json::array();
    for (const auto& [path, digest] : inputs) {
      char hex[20];
      std::snprintf(hex, sizeof hex, "%016" PRIx64, digest);
      ins.push_back({{"path", path}, {"fnv1a64", hex}});
    }
    j["inputs"] = ins;
    j["outputs"] = outputs;
    j["wall_clock_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - t0)
            .count();
    write_atomic(out_dir + "/manifest.json", j.dump(2) + "\n");
  }
};

ssde::ModelOrPlan load_model(const std::string& path, Manifest& manifest,
                             ssde::ValidationReport& report) {
  const std::string bytes = read_file(path);
  manifest.inputs.emplace_back(path, fnv1a64(bytes));
  std::string dir = ".";
  const auto slash = path.find_last_of('/');
  if (slash != std::string::npos) dir = path.substr(0, slash);
  return ssde::parse_model(bytes, &report, dir);
}

int report_validation_failure(const ssde::ValidationReport& report) {
  for (const auto& f : report.findings)
    if (f.severity == ssde::Severity::error)
      std::cerr << "error [" << f.code << "] " << f.message << "\n";
  return kExitInputError;
}

json verdict_to_json(const ssde::Verdict& v) {
  json applied = json::array();
  for (const auto& r : v.applied_results)
    applied.push_back({{"tag", r.tag}, {"trace", r.trace}});
  return json{{"existence", ssde::to_string(v.existence)},
              {"uniqueness", ssde::to_string(v.uniqueness)},
              {"boundary_at_zero", ssde::to_string(v.boundary_at_zero)},
              {"state_space",
               {{"lo", v.state_space.lo},
                {"hi", v.state_space.hi},
                {"lo_closed", v.state_space.lo_closed},
                {"hi_closed", v.state_space.hi_closed}}},
              {"unknown", v.unknown()},
              {"applied_results", applied}};
}

json findings_to_json(const ssde::ValidationReport& rep) {
  json arr = json::array();
  for (const auto& f : rep.findings)
    arr.push_back({{"severity",
                    f.severity == ssde::Severity::error ? "error" : "warn"},
                   {"code", f.code},
                   {"message", f.message},
                   {"location", std::isfinite(f.location)
                                    ? json(f.location)
                                    : json(nullptr)}});
  return arr;
}

struct GridSpec {
  double lo = 0.0, hi = 1.0;
  long n = 0;
};

GridSpec parse_grid(const std::string& s) {
  GridSpec g;
  char colon1 = 0, colon2 = 0;
  std::istringstream is(s);
  if (!(is >> g.lo >> colon1 >> g.hi >> colon2 >> g.n) || colon1 != ':' ||
      colon2 != ':' || g.n < 2)
    throw std::runtime_error("bad --grid, expected lo:hi:n");
  return g;
}

int cmd_classify(const std::string& model_path, const std::string& out_dir,
                 const std::string& grid_arg, bool with_scale,
                 double reference_arg, bool has_reference) {
  Manifest manifest;
  manifest.subcommand = with_scale ? "scale" : "classify";
  ssde::ValidationReport report;
  const ssde::ModelOrPlan parsed = load_model(model_path, manifest, report);
  manifest.config["model"] = model_path;

  json out;
  out["validation"] = findings_to_json(report);
  if (!report.ok()) {
    write_atomic(out_dir + "/report.json", out.dump(2) + "\n");
    manifest.outputs.push_back("report.json");
    manifest.write(out_dir);
    return report_validation_failure(report);
  }

  const ssde::GeneralizedSde* sde = std::get_if<ssde::GeneralizedSde>(&parsed);
  std::optional<ssde::PastingPlan> plan;
  ssde::GeneralizedSde assembled;
  if (!sde) {
    plan = std::get<ssde::PastingPlan>(parsed);
    assembled = ssde::pasted_sde(*plan, plan->regime_minus.x0);
    sde = &assembled;
  }

  const ssde::EsClassification es = ssde::classify_es(*sde);
  out["classification"] = {{"case", ssde::to_string(es.es_case)},
                           {"n_sigma", es.n_sigma},
                           {"e_sigma", es.e_sigma},
                           {"notes", es.notes}};

  const ssde::Verdict verdict = ssde::wellposedness_verdict(*sde, plan);
  out["verdict"] = verdict_to_json(verdict);

  if (with_scale) {
    const GridSpec grid = parse_grid(grid_arg);
    double reference = has_reference ? reference_arg : sde->x0;
    if (!has_reference)
      for (double bp : sde->coeffs.breakpoints)
        if (sde->state_space.interior_contains(bp)) {
          reference = bp;
          break;
        }
    try {
      ssde::GeneralizedSde plain = *sde;
      plain.sticky.points.clear();
      const ssde::ScaleTransform scale = ssde::build_scale(plain, reference);
      json samples = json::array();
      for (long i = 0; i < grid.n; ++i) {
        const double x =
            grid.lo + (grid.hi - grid.lo) * i / double(grid.n - 1);
        samples.push_back({{"x", x}, {"S", scale.value(x)}});
      }
      out["scale"] = {{"case", ssde::to_string(scale.scale_case())},
                      {"reference", scale.reference()},
                      {"S0", std::isfinite(scale.lower_limit())
                                 ? json(scale.lower_limit())
                                 : json("-inf")},
                      {"Sinf", std::isfinite(scale.upper_limit())
                                   ? json(scale.upper_limit())
                                   : json("inf")},
                      {"fallback_limits", scale.used_fallback_limits()},
                      {"samples", samples},
                      {"notes", scale.notes()}};
    } catch (const std::domain_error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitInputError;
    }
  }

  write_atomic(out_dir + "/report.json", out.dump(2) + "\n");
  manifest.outputs.push_back("report.json");
  manifest.write(out_dir);
  return verdict.unknown() ? kExitUnknown : kExitOk;
}

const char* regime_word(std::int8_t r) {
  return r < 0 ? "minus" : (r > 0 ? "plus" : "single");
}

int cmd_simulate(const std::string& model_path, const std::string& out_dir,
                 const ssde::SimConfig& cfg, std::uint64_t seed,
                 bool want_plan) {
  Manifest manifest;
  manifest.subcommand = want_plan ? "paste" : "simulate";
  manifest.seed = seed;
  ssde::ValidationReport report;
  const ssde::ModelOrPlan parsed = load_model(model_path, manifest, report);
  manifest.config = {{"model", model_path},
                     {"dt", cfg.dt},
                     {"horizon", cfg.horizon},
                     {"paths", cfg.n_paths},
                     {"scheme", ssde::to_string(cfg.scheme)},
                     {"bridge_correction", cfg.bridge_correction}};
  if (!report.ok()) return report_validation_failure(report);

  const ssde::NoiseSource noise(seed, 1);
  std::string csv = "path_id,t,x,regime\n";
  json switch_records = json::array();

  const auto append_path = [&](const ssde::Path& p) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      csv += std::to_string(p.path_id);
      csv += ',';
      csv += format_double(p.times[k]);
      csv += ',';
      csv += format_double(p.values[k]);
      csv += ',';
      csv += regime_word(p.regime[k]);
      csv += '\n';
    }
    for (const auto& s : p.switches)
      switch_records.push_back(
          {{"path_id", p.path_id}, {"time", s.time}, {"level", s.level}});
  };

  if (want_plan) {
    const ssde::PastingPlan* plan = std::get_if<ssde::PastingPlan>(&parsed);
    if (!plan) {
      std::cerr << "error: paste needs a model file with a [pasting] table\n";
      return kExitInputError;
    }
    ssde::SimConfig paste_cfg = cfg;
    paste_cfg.bridge_correction = true;
    for (long i = 0; i < cfg.n_paths; ++i)
      append_path(ssde::paste_simulate(*plan, plan->regime_minus.x0,
                                       paste_cfg, noise, i));
  } else {
    const ssde::GeneralizedSde* sde =
        std::get_if<ssde::GeneralizedSde>(&parsed);
    if (!sde) {
      std::cerr << "error: simulate needs a plain model (use paste for "
                   "pasting plans)\n";
      return kExitInputError;
    }
    for (long i = 0; i < cfg.n_paths; ++i)
      append_path(ssde::simulate(*sde, cfg, noise, i));
  }

  write_atomic(out_dir + "/paths.csv", csv);
  manifest.outputs.push_back("paths.csv");
  json sidecar = {{"config", manifest.config},
                  {"seed", seed},
                  {"switches", switch_records}};
  write_atomic(out_dir + "/paths.json", sidecar.dump(2) + "\n");
  manifest.outputs.push_back("paths.json");
  manifest.write(out_dir);
  return kExitOk;
}

int cmd_localtime(const std::string& in_csv, const std::string& out_dir,
                  double level, double bandwidth, const std::string& kind,
                  const std::string& estimator, long path_id) {
  Manifest manifest;
  manifest.subcommand = "localtime";
  const std::string bytes = read_file(in_csv);
  manifest.inputs.emplace_back(in_csv, fnv1a64(bytes));
  manifest.config = {{"in", in_csv},         {"level", level},
                     {"bandwidth", bandwidth}, {"kind", kind},
                     {"estimator", estimator}, {"path_id", path_id}};

  ssde::Path path;
  std::istringstream lines(bytes);
  std::string line;
  bool header = true;
  while (std::getline(lines, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string pid, t, x;
    std::getline(fields, pid, ',');
    std::getline(fields, t, ',');
    std::getline(fields, x, ',');
    if (std::atol(pid.c_str()) != path_id) continue;
    path.times.push_back(std::atof(t.c_str()));
    path.values.push_back(std::atof(x.c_str()));
  }
  if (path.size() < 2) {
    std::cerr << "error: path " << path_id << " not found or too short\n";
    return kExitInputError;
  }
  path.regime.assign(path.size(), 0);

  ssde::LocalTimeCurve curve;
  if (estimator == "tanaka") {
    curve = ssde::tanaka_local_time(path, level);
  } else {
    const auto sigma_one = [](double) { return 1.0; };
    const ssde::LocalTimeKind k = kind == "right"
                                      ? ssde::LocalTimeKind::right
                                      : ssde::LocalTimeKind::symmetric;
    curve = ssde::estimate_local_time(path, level, k, bandwidth, sigma_one);
  }
  if (!curve.warning.empty())
    std::cerr << "warning: " << curve.warning << "\n";

  std::string csv = "t,L\n";
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    csv += format_double(curve.times[i]);
    csv += ',';
    csv += format_double(curve.values[i]);
    csv += '\n';
  }
  write_atomic(out_dir + "/localtime.csv", csv);
  manifest.outputs.push_back("localtime.csv");
  manifest.write(out_dir);
  return kExitOk;
}

int cmd_verify(const std::string& model_path, const std::string& out_dir,
               const std::string& suite, std::uint64_t seed) {
  Manifest manifest;
  manifest.subcommand = "verify";
  manifest.seed = seed;
  ssde::ValidationReport report;
  const ssde::ModelOrPlan parsed = load_model(model_path, manifest, report);
  manifest.config = {{"model", model_path}, {"suite", suite}};
  if (!report.ok()) return report_validation_failure(report);

  const ssde::GeneralizedSde* sde = std::get_if<ssde::GeneralizedSde>(&parsed);
  const ssde::PastingPlan* plan = std::get_if<ssde::PastingPlan>(&parsed);
  const auto reports = ssde::run_suite(suite, sde, plan, seed);

  write_atomic(out_dir + "/reports.json",
               ssde::reports_to_json(reports) + "\n");
  manifest.outputs.push_back("reports.json");
  manifest.write(out_dir);

  bool all_pass = true;
  for (const auto& r : reports) {
    std::cerr << (r.pass ? "PASS " : "FAIL ") << r.name << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kExitOk : kExitTestFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"well-posedness analysis and simulation of one-dimensional "
               "generalized SDEs with singular coefficients"};
  app.require_subcommand(1);

  std::string model_path, out_dir = ".", grid_arg = "0.1:10:33";
  std::string suite = "all", scheme_name = "euler";
  std::string in_csv, kind = "symmetric", estimator = "window";
  double level = 0.0, bandwidth = 0.0, reference = 0.0;
  long path_id = 0;
  std::uint64_t seed = 12345;
  ssde::SimConfig cfg;

  auto* classify = app.add_subcommand("classify", "well-posedness report");
  classify->add_option("--model", model_path)->required();
  classify->add_option("--out", out_dir);

  auto* scale = app.add_subcommand("scale", "scale function report");
  scale->add_option("--model", model_path)->required();
  scale->add_option("--grid", grid_arg);
  auto* ref_opt = scale->add_option("--reference", reference);
  scale->add_option("--out", out_dir);

  const auto add_sim_options = [&](CLI::App* cmd) {
    cmd->add_option("--model", model_path)->required();
    cmd->add_option("--dt", cfg.dt);
    cmd->add_option("--horizon", cfg.horizon);
    cmd->add_option("--paths", cfg.n_paths);
    cmd->add_option("--seed", seed);
    cmd->add_option("--scheme", scheme_name)
        ->check(CLI::IsMember({"euler", "square_root_safe", "scale_space"}));
    cmd->add_option("--out", out_dir);
  };
  auto* simulate = app.add_subcommand("simulate", "simulate sample paths");
  add_sim_options(simulate);
  simulate->add_flag("--bridge", cfg.bridge_correction,
                     "Brownian-bridge hit correction");
  auto* paste = app.add_subcommand("paste", "simulate a pasting plan");
  add_sim_options(paste);

  auto* localtime = app.add_subcommand("localtime", "local time from a CSV");
  localtime->add_option("--in", in_csv)->required();
  localtime->add_option("--level", level)->required();
  localtime->add_option("--bandwidth", bandwidth);
  localtime->add_option("--kind", kind)
      ->check(CLI::IsMember({"symmetric", "right"}));
  localtime->add_option("--estimator", estimator)
      ->check(CLI::IsMember({"window", "tanaka"}));
  localtime->add_option("--path-id", path_id);
  localtime->add_option("--out", out_dir);
  localtime->add_option("--dt-hint", cfg.dt,
                        "grid step used for the default bandwidth");

  auto* verify = app.add_subcommand("verify", "statistical test suites");
  verify->add_option("--suite", suite)
      ->check(CLI::IsMember({"all", "zero_occupation", "sticky", "skew",
                             "comparison", "pasting", "boundary"}));
  verify->add_option("--model", model_path)->required();
  verify->add_option("--seed", seed);
  verify->add_option("--out", out_dir);

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify->parsed())
      return cmd_classify(model_path, out_dir, grid_arg, false, 0.0, false);
    if (scale->parsed())
      return cmd_classify(model_path, out_dir, grid_arg, true, reference,
                          ref_opt->count() > 0);
    if (simulate->parsed() || paste->parsed()) {
      cfg.scheme = scheme_name == "square_root_safe"
                       ? ssde::Scheme::square_root_safe
                       : (scheme_name == "scale_space"
                              ? ssde::Scheme::scale_space
                              : ssde::Scheme::euler);
      return cmd_simulate(model_path, out_dir, cfg, seed, paste->parsed());
    }
    if (localtime->parsed()) {
      if (bandwidth <= 0.0) bandwidth = ssde::default_bandwidth(cfg.dt);
      return cmd_localtime(in_csv, out_dir, level, bandwidth, kind, estimator,
                           path_id);
    }
    if (verify->parsed()) return cmd_verify(model_path, out_dir, suite, seed);
  } catch (const ssde::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
