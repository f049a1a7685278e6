#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "gmsphere/version.hpp"
#include "report.hpp"

namespace gmsphere {

namespace {

using report::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  double s_tilde = 0.5, t_tilde = 0.5;
  double s = 0.0, t = 0.0;
  int samples = 200;
  int starts = 64;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out;
  std::string csv;
  double tol_zero = kDefaultZTol;
  std::string point;
  double spike = 0.0;
  double delta = 0.0;
  std::vector<double> grid{0.25, 0.5, 0.75};
  std::string fault;

  MetricParams metric() const {
    if (s > 0.0 || t > 0.0) {
      if (!(s > 0.0 && t > 0.0)) throw UsageError("--s and --t must be given together");
      return MetricParams::from_contraction(s, t);
    }
    return MetricParams::make(s_tilde, t_tilde);
  }

  std::uint64_t seed_or(std::uint64_t fallback) const { return seed.value_or(fallback); }

  std::uint64_t required_seed(const std::string& cmd) const {
    if (!seed) throw UsageError(cmd + " requires --seed");
    return *seed;
  }

  // Workers and output paths do not affect results and are left out.
  json echo(const std::string& cmd) const {
    const MetricParams m = metric();
    json j = {{"s_tilde", m.s_tilde}, {"t_tilde", m.t_tilde}, {"starts", starts},
              {"tol_zero", tol_zero}};
    if (cmd == "scan" || cmd == "sweep" || cmd == "verify") j["samples"] = samples;
    if (cmd == "scan") {
      j["spike"] = spike;
      j["delta"] = delta;
    }
    if (cmd == "sweep") j["grid"] = grid;
    if (!point.empty()) j["point"] = point;
    if (!fault.empty()) j["fault"] = fault;
    return j;
  }
};

GroupElement named_z2_sample() {
  // a = i/sqrt2 rotates by pi; n = (sqrt3/2) i + (1/2) j makes angle pi/3 with Ad(a^-1) n.
  const double r = 1.0 / std::sqrt(2.0);
  const Quaternion a(0.0, r, 0.0, 0.0);
  const Quaternion n(0.0, std::sqrt(3.0) / 2.0, 0.5, 0.0);
  return group_from_first_row(a, a * n);
}

GroupElement resolve_point(const std::string& arg) {
  if (arg.empty()) throw UsageError("--point is required");
  if (arg == "identity") return GroupElement::identity();
  if (arg == "diag-i-1") return GroupElement::diag(Quaternion::i(), Quaternion::one());
  if (arg == "z2-sample") return named_z2_sample();
  std::string text = arg;
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    std::ifstream in(arg);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return parse_group_element(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--point: ") + e.what());
  }
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot write " + path);
      stream_ = &file_;
    }
  }
  void line(const json& j) { *stream_ << j.dump() << '\n'; }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

int cmd_verify(const RunConfig& c, std::ostream& out) {
  VerifyOptions opt;
  opt.metric = c.metric();
  opt.seed = c.seed_or(42);
  opt.samples = c.samples;
  opt.starts = c.starts;
  opt.workers = c.workers;
  opt.tol_zero = c.tol_zero;
  if (!c.fault.empty() && c.fault != "w-sign") throw UsageError("unknown fault " + c.fault);
  Output o(c.out, out);
  fault::set_flip_w_condition(c.fault == "w-sign");
  VerifyReport rep;
  try {
    rep = run_verify(opt);
  } catch (...) {
    fault::set_flip_w_condition(false);
    throw;
  }
  fault::set_flip_w_condition(false);
  json j = report::header("verify", c.echo("verify"), opt.seed, opt.tol_zero);
  j["type"] = "verify";
  j["checks"] = json::array();
  for (const Check& ch : rep.checks) j["checks"].push_back(report::to_json(ch));
  if (rep.calibrated) j["calibration"] = report::to_json(rep.calibration);
  j["passed"] = rep.passed();
  j["failed"] = rep.failed();
  o.line(j);
  return rep.passed() ? 0 : 1;
}

json classification_record(const GroupElement& g, const CheegerGeometry& geo, double tol,
                           bool& construction_failed) {
  ZClassification c = classify(g, tol);
  construction_failed = false;
  std::string error;
  try {
    c.witness = construct_zero_horizontal_plane(g, geo, tol);
  } catch (const std::runtime_error& e) {
    construction_failed = true;
    error = e.what();
  }
  json j = report::to_json(c);
  if (construction_failed) j["witness_error"] = error;
  return j;
}

int cmd_classify(const RunConfig& c, std::ostream& out) {
  const GroupElement g = resolve_point(c.point);
  Output o(c.out, out);
  const CheegerGeometry geo(c.metric());
  bool failed = false;
  json j = report::header("classify", c.echo("classify"), c.seed_or(0), c.tol_zero);
  j["type"] = "classify";
  j["g"] = report::to_json(g);
  j["classification"] = classification_record(g, geo, c.tol_zero, failed);
  o.line(j);
  return failed ? 1 : 0;
}

int cmd_zero_plane(const RunConfig& c, std::ostream& out) {
  const GroupElement g = resolve_point(c.point);
  Output o(c.out, out);
  const CheegerGeometry geo(c.metric());
  json j = report::header("zero-plane", c.echo("zero-plane"), c.seed_or(0), c.tol_zero);
  j["type"] = "zero-plane";
  j["g"] = report::to_json(g);
  try {
    const std::optional<ZWitness> w = construct_zero_horizontal_plane(g, geo, c.tol_zero);
    j["witness"] = w ? report::to_json(*w) : json(nullptr);
  } catch (const std::runtime_error& e) {
    j["witness"] = nullptr;
    j["witness_error"] = e.what();
    o.line(j);
    return 1;
  }
  o.line(j);
  return 0;
}

int cmd_minsec(const RunConfig& c, std::ostream& out) {
  const GroupElement g = resolve_point(c.point);
  Output o(c.out, out);
  const CheegerGeometry geo(c.metric());
  const HorizontalSpace hs(geo, g);
  MinOptions opt;
  opt.starts = c.starts;
  opt.seed = c.seed_or(42);
  const MinResult k = min_kappa_horizontal(hs, opt);
  const MinResult s = min_sec_M(hs, opt);
  bool failed = false;
  json j = report::header("minsec", c.echo("minsec"), opt.seed, c.tol_zero);
  j["type"] = "minsec";
  j["g"] = report::to_json(g);
  j["min_kappa"] = report::to_json(k);
  j["min_secM"] = report::to_json(s);
  j["classification"] = classification_record(g, geo, c.tol_zero, failed);
  o.line(j);
  return failed ? 1 : 0;
}

double threshold_for(const RunConfig& c, const MetricParams& m, std::uint64_t seed,
                     json& calibration) {
  if (c.delta > 0.0) {
    calibration = {{"delta", c.delta}, {"source", "command line"}};
    return c.delta;
  }
  CalibrationOptions copt;
  copt.starts = c.starts;
  copt.workers = c.workers;
  const Calibration cal = calibrate_threshold(m, seed, copt);
  calibration = report::to_json(cal);
  return cal.delta;
}

int cmd_scan(const RunConfig& c, std::ostream& out) {
  const std::uint64_t seed = c.required_seed("scan");
  if (c.samples < 1) throw UsageError("--samples must be >= 1");
  const MetricParams m = c.metric();
  Output o(c.out, out);
  std::ofstream csv;
  if (!c.csv.empty()) {
    csv.open(c.csv);
    if (!csv) throw UsageError("cannot write " + c.csv);
  }
  json calibration;
  ScanConfig cfg;
  cfg.metric = m;
  cfg.seed = seed;
  cfg.starts = c.starts;
  cfg.workers = c.workers;
  cfg.tol_zero = c.tol_zero;
  try {
    cfg.threshold = threshold_for(c, m, seed, calibration);
  } catch (const std::runtime_error& e) {
    json j = report::header("scan", c.echo("scan"), seed, c.tol_zero);
    j["error"] = e.what();
    o.line(j);
    return 1;
  }
  const ScanReport rep =
      scan_points(spiked_batch(static_cast<std::size_t>(c.samples), c.spike, seed), cfg);
  o.line(report::header("scan", c.echo("scan"), seed, c.tol_zero));
  for (const ScanPoint& p : rep.points) o.line(report::to_json(p));
  json s = report::summary(rep);
  s["calibration"] = calibration;
  o.line(s);
  if (csv) {
    csv << report::csv_header() << '\n';
    for (const ScanPoint& p : rep.points) csv << report::csv_row(p) << '\n';
  }
  return 0;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  const std::uint64_t seed = c.required_seed("sweep");
  if (c.samples < 1) throw UsageError("--samples must be >= 1");
  for (double v : c.grid)
    if (!(v > 0.0 && v <= 1.0)) throw UsageError("grid values must lie in (0, 1]");
  Output o(c.out, out);
  o.line(report::header("sweep", c.echo("sweep"), seed, c.tol_zero));
  bool all_ok = true;
  for (double st : c.grid)
    for (double tt : c.grid) {
      const MetricParams m = MetricParams::make(st, tt);
      const CheegerGeometry geo(m);
      Rng rng = make_rng(seed);
      double min_sec = std::numeric_limits<double>::infinity();
      for (int i = 0; i < 1000; ++i)
        min_sec = std::min(min_sec, geo.sec(gaussian_algebra(rng), gaussian_algebra(rng)));
      json cell = {{"type", "cell"}, {"metric", report::to_json(m)},
                   {"min_random_sec_G", min_sec}, {"nonnegativity", min_sec >= -1e-9}};
      all_ok = all_ok && min_sec >= -1e-9;
      ScanConfig cfg;
      cfg.metric = m;
      cfg.seed = seed;
      cfg.starts = c.starts;
      cfg.workers = c.workers;
      cfg.tol_zero = c.tol_zero;
      json calibration;
      try {
        cfg.threshold = threshold_for(c, m, seed, calibration);
        const ScanReport rep = scan_points(haar_batch(static_cast<std::size_t>(c.samples), seed), cfg);
        json s = report::summary(rep);
        s.erase("type");
        cell["scan"] = s;
        all_ok = all_ok && rep.disagreements.empty();
      } catch (const std::runtime_error& e) {
        cell["error"] = e.what();
        all_ok = false;
      }
      cell["calibration"] = calibration;
      o.line(cell);
    }
  return all_ok ? 0 : 1;
}

void add_metric(CLI::App* sub, RunConfig& c) {
  auto* st = sub->add_option("--s-tilde", c.s_tilde, "s~ in (0, 1]");
  auto* tt = sub->add_option("--t-tilde", c.t_tilde, "t~ in (0, 1]");
  auto* s = sub->add_option("--s", c.s, "contraction s > 0 (s~ = s/(s+1))");
  auto* t = sub->add_option("--t", c.t, "contraction t > 0 (t~ = t/(t+1))");
  s->excludes(st)->excludes(tt);
  t->excludes(st)->excludes(tt);
  sub->add_option("--tol-zero", c.tol_zero, "classifier slack");
  sub->add_option("--out", c.out, "report path (default stdout)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curvature of Cheeger-deformed metrics on Sp(2) and its quotient Sp(2)/U"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  RunConfig c;

  auto* verify = app.add_subcommand("verify", "run the property suite");
  auto* classify_cmd = app.add_subcommand("classify", "Z1..Z4 membership of a point");
  auto* minsec = app.add_subcommand("minsec", "minimize kappa and sec_M over horizontal planes");
  auto* scan_cmd = app.add_subcommand("scan", "Monte Carlo audit over Haar samples");
  auto* sweep = app.add_subcommand("sweep", "scan summaries over an (s~, t~) grid");
  auto* zero = app.add_subcommand("zero-plane", "construct a flat horizontal plane");

  for (auto* sub : {verify, classify_cmd, minsec, scan_cmd, sweep, zero}) add_metric(sub, c);
  for (auto* sub : {classify_cmd, minsec, zero})
    sub->add_option("--point", c.point, "file, name (identity, diag-i-1, z2-sample) or 16 reals")
        ->required();
  for (auto* sub : {verify, minsec, scan_cmd, sweep, classify_cmd, zero})
    sub->add_option("--seed", c.seed, "RNG seed");
  for (auto* sub : {verify, minsec, scan_cmd, sweep})
    sub->add_option("--starts", c.starts, "minimizer starts")->check(CLI::PositiveNumber);
  for (auto* sub : {verify, scan_cmd, sweep}) {
    sub->add_option("--samples", c.samples, "sample count");
    sub->add_option("--workers", c.workers, "OpenMP threads")->check(CLI::PositiveNumber);
  }
  scan_cmd->add_option("--csv", c.csv, "also write the flat CSV table here");
  scan_cmd->add_option("--spike", c.spike, "fraction of constructed Z points injected");
  for (auto* sub : {scan_cmd, sweep})
    sub->add_option("--delta", c.delta, "zero threshold (default: calibrate)");
  sweep->add_option("--grid", c.grid, "values used for both s~ and t~")->delimiter(',');
  verify->add_option("--inject-fault", c.fault, "test hook: w-sign")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    c.metric();
    if (*verify) return cmd_verify(c, out);
    if (*classify_cmd) return cmd_classify(c, out);
    if (*minsec) return cmd_minsec(c, out);
    if (*scan_cmd) return cmd_scan(c, out);
    if (*sweep) return cmd_sweep(c, out);
    if (*zero) return cmd_zero_plane(c, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace gmsphere
