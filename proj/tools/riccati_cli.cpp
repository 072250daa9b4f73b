#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "json_io.hpp"

using namespace riccati;
using io::Json;

namespace {

enum ExitCode { kOk = 0, kParse = 1, kDegenerate = 2, kReject = 3, kIntegration = 4 };

// ---------------------------------------------------------------------------------------------
// Logging, level from RICCATI_LOG (off, error, warn, info, debug).

enum class Level { Off, Error, Warn, Info, Debug };

Level log_level() {
  static const Level level = [] {
    const char* env = std::getenv("RICCATI_LOG");
    const std::string s = env ? env : "warn";
    if (s == "off") return Level::Off;
    if (s == "error") return Level::Error;
    if (s == "info") return Level::Info;
    if (s == "debug") return Level::Debug;
    return Level::Warn;
  }();
  return level;
}

void log(Level level, const std::string& msg) {
  static const char* names[] = {"", "error", "warn", "info", "debug"};
  if (level <= log_level() && level != Level::Off)
    std::cerr << "[riccati " << names[static_cast<int>(level)] << "] " << msg << "\n";
}

// ---------------------------------------------------------------------------------------------

struct JobOptions {
  double tol_eigen = 1e-8;
  double tol_int = 1e-9;
  double tol_fit = 1e-7;
  std::uint64_t seed = 0;
  std::string target = "cp2";
  std::optional<int> n;
  bool auto_generators = false;
  std::optional<std::string> base;
  std::optional<double> clearance;
};

struct Outcome {
  int code = kOk;
  Json report;
};

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError: return kParse;
    case ErrorKind::NotRiccati: return kReject;
    case ErrorKind::IntegrationFailure:
    case ErrorKind::PoleOnPath:
    case ErrorKind::RoutingFailure:
    case ErrorKind::BranchCutHit: return kIntegration;
    default: return kDegenerate;
  }
}

LiftOptions lift_options(const JobOptions& o) {
  LiftOptions l;
  l.tol = o.tol_int;
  l.seed = o.seed;
  return l;
}

Outcome run_classify(const Json& in, const JobOptions& o) {
  const AutClassification c = classify(ProjMap(io::matrix_from_json(in)), o.tol_eigen);
  if (c.near_threshold) log(Level::Warn, "eigenvalue clustering is close to the tolerance");
  return {kOk, io::classification_report(c)};
}

Outcome run_check(const Json& in, const JobOptions& o) {
  const PolyVectorField X = io::field_from_json(in.contains("field") ? in.at("field") : in);
  Outcome out;
  if (o.target == "cp2") {
    const auto r = check_riccati_cp2(X);
    out.report = io::cp2_report(X, r);
    out.code = r.accepted() ? kOk : kReject;
  } else if (o.target == "cn") {
    const int n = o.n.value_or(static_cast<int>(X.dimension()) - 1);
    const auto r = check_riccati_cn(X, n);
    out.report = io::cn_report(X, n, r);
    out.code = r.accepted() ? kOk : kReject;
  } else {
    throw Error(ErrorKind::ParseError, "target must be 'cp2' or 'cn'");
  }
  if (out.code == kReject) log(Level::Info, "field rejected: " + out.report["rejection"]["violation"].get<std::string>());
  return out;
}

Outcome run_holonomy(const Json& in, const JobOptions& o) {
  const PolyVectorField X = io::field_from_json(in.contains("field") ? in.at("field") : in);
  if (o.auto_generators) {
    if (!o.base) throw Error(ErrorKind::ParseError, "--auto-generators needs --base re,im");
    const Complex b = io::parse_complex_text(*o.base);
    GeneratorOptions g;
    g.lift = lift_options(o);
    g.clearance = o.clearance;
    const auto gens = holonomy_generators(X, b, g);
    Outcome out{kOk, io::generators_report(b, gens)};
    for (const auto& gen : gens)
      if (gen.holonomy.residual > o.tol_fit) out.code = kIntegration;
    log(Level::Info, std::to_string(gens.size()) + " generators");
    return out;
  }
  if (!in.contains("loop")) throw Error(ErrorKind::ParseError, "holonomy input needs 'field' and 'loop'");
  const HolonomyResult h = numeric_holonomy(X, io::loop_from_json(in.at("loop")), lift_options(o));
  log(Level::Debug, "steps " + std::to_string(h.stats.steps) + ", chart switches " + std::to_string(h.stats.chart_switches));
  return {h.residual > o.tol_fit ? kIntegration : kOk, io::holonomy_report(h)};
}

Outcome run_synthesize(const Json& in, const JobOptions& o) {
  const Json& list = in.is_object() ? in.at("generators") : in;
  if (!list.is_array() || list.empty()) throw Error(ErrorKind::ParseError, "generators must be a non-empty array");
  std::vector<ProjMap> gens;
  for (const auto& g : list) {
    const Matrix3c m = io::matrix_from_json(g);
    try {
      gens.emplace_back(m);
    } catch (const Error& e) {
      throw Error(ErrorKind::UnclassifiableGenerator, e.what());
    }
  }
  SynthesisOptions s;
  s.lift = lift_options(o);
  s.tol_eigen = o.tol_eigen;
  const SynthesisReport r = verify_synthesis(gens, s);
  return {r.passed ? kOk : kReject, io::synthesis_report(r)};
}

Outcome run_job(const std::string& command, const Json& in, const JobOptions& o);

// Batch runner: {"jobs": [{"command", "input", "options"?}]}.
Outcome run_report(const Json& in, const JobOptions& base) {
  const Json& jobs = in.is_object() && in.contains("jobs") ? in.at("jobs") : in;
  if (!jobs.is_array()) throw Error(ErrorKind::ParseError, "report input needs a 'jobs' array");
  Json results = Json::array();
  int worst = kOk;
  for (const auto& job : jobs) {
    const std::string command = job.at("command").get<std::string>();
    if (command == "report") throw Error(ErrorKind::ParseError, "report jobs cannot nest");
    JobOptions o = base;
    if (job.contains("options")) {
      const Json& opt = job.at("options");
      o.tol_eigen = opt.value("tol_eigen", o.tol_eigen);
      o.tol_int = opt.value("tol_int", o.tol_int);
      o.tol_fit = opt.value("tol_fit", o.tol_fit);
      o.seed = opt.value("seed", o.seed);
      o.target = opt.value("target", o.target);
      if (opt.contains("n")) o.n = opt.at("n").get<int>();
      o.auto_generators = opt.value("auto_generators", o.auto_generators);
      if (opt.contains("base")) o.base = opt.at("base").get<std::string>();
    }
    const Outcome r = run_job(command, job.at("input"), o);
    results.push_back({{"command", command}, {"exit_code", r.code}, {"report", r.report}});
    worst = std::max(worst, r.code);
  }
  return {worst, {{"schema_version", io::kSchemaVersion}, {"kind", "batch"}, {"exit_code", worst}, {"results", results}}};
}

Outcome run_job(const std::string& command, const Json& in, const JobOptions& o) {
  try {
    if (command == "classify") return run_classify(in, o);
    if (command == "check") return run_check(in, o);
    if (command == "holonomy") return run_holonomy(in, o);
    if (command == "synthesize") return run_synthesize(in, o);
    if (command == "report") return run_report(in, o);
    throw Error(ErrorKind::ParseError, "unknown command '" + command + "'");
  } catch (const Error& e) {
    log(Level::Error, e.what());
    return {exit_code_for(e.kind()), io::error_report(command, e.kind(), e.what())};
  } catch (const Json::exception& e) {
    log(Level::Error, e.what());
    return {kParse, io::error_report(command, ErrorKind::ParseError, e.what())};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riccati foliations: classification, normal forms, holonomy and synthesis"};
  app.require_subcommand(1);

  std::string input, output;
  JobOptions opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", input, "input JSON file ('-' for stdin)")->required();
    sub->add_option("--output", output, "output JSON file (stdout when omitted)");
    sub->add_option("--tol-eigen", opts.tol_eigen, "eigenvalue clustering tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--tol-int", opts.tol_int, "integrator tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--tol-fit", opts.tol_fit, "largest accepted projective fit residual")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opts.seed, "seed for sampled points");
  };

  CLI::App* classify_cmd = app.add_subcommand("classify", "classify a projective automorphism");
  CLI::App* check_cmd = app.add_subcommand("check", "check a field against the Riccati normal forms");
  CLI::App* holonomy_cmd = app.add_subcommand("holonomy", "numeric holonomy along a loop or of all generators");
  CLI::App* synth_cmd = app.add_subcommand("synthesize", "verify the synthesis of a list of generators");
  CLI::App* report_cmd = app.add_subcommand("report", "run a batch of jobs into one report");
  for (CLI::App* sub : {classify_cmd, check_cmd, holonomy_cmd, synth_cmd, report_cmd}) add_common(sub);
  check_cmd->add_option("--target", opts.target, "cp2 or cn")->check(CLI::IsMember({"cp2", "cn"}));
  check_cmd->add_option("--n", opts.n, "fiber dimension for the cn target");
  holonomy_cmd->add_flag("--auto-generators", opts.auto_generators, "lift one loop per invariant fiber");
  holonomy_cmd->add_option("--base", opts.base, "base point 're,im' for --auto-generators");
  holonomy_cmd->add_option("--clearance", opts.clearance, "distance kept from invariant fibers")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kParse;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  Outcome outcome;
  std::string text;
  if (input == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream f(input);
    if (!f) {
      log(Level::Error, "cannot open " + input);
      outcome = {kParse, io::error_report(command, ErrorKind::ParseError, "cannot open " + input)};
    } else {
      text.assign(std::istreambuf_iterator<char>(f), {});
    }
  }
  if (outcome.report.is_null()) {
    Json in;
    try {
      in = Json::parse(text);
      outcome = run_job(command, in, opts);
    } catch (const Json::parse_error& e) {
      log(Level::Error, e.what());
      outcome = {kParse, io::error_report(command, ErrorKind::ParseError, e.what())};
    }
  }

  const std::string out = io::dump(outcome.report);
  if (output.empty()) {
    std::cout << out;
  } else {
    std::ofstream f(output);
    if (!f) {
      log(Level::Error, "cannot write " + output);
      return kParse;
    }
    f << out;
  }
  return outcome.code;
}
