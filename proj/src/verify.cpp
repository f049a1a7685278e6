#include "gmsphere/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gmsphere {

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.pass || c.informational; });
}

std::vector<std::string> VerifyReport::failed() const {
  std::vector<std::string> out;
  for (const Check& c : checks)
    if (!c.pass && !c.informational) out.push_back(c.name);
  return out;
}

namespace {

Check below(std::string name, std::string subject, double value, double tol, std::string detail = {}) {
  return {std::move(name), std::move(subject), value < tol, value, tol, "<", std::move(detail)};
}

Check above(std::string name, std::string subject, double value, double tol, std::string detail = {}) {
  return {std::move(name), std::move(subject), value > tol, value, tol, ">", std::move(detail)};
}

Check check_bi_invariant(Rng& rng) {
  const CheegerGeometry geo(MetricParams::bi_invariant());
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const AlgebraElement x = gaussian_algebra(rng), y = gaussian_algebra(rng);
    const AlgebraElement b = bracket(x, y);
    worst = std::max(worst, std::abs(geo.kappa(x, y) - 0.25 * trace_inner(b, b)));
  }
  return below("bi_invariant_limit", "kappa = |[X,Y]|^2 / 4 at (1, 1)", worst, 1e-10);
}

Check check_tilde_identity(const MetricParams& m, Rng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const AlgebraElement x = gaussian_algebra(rng), v = gaussian_algebra(rng);
    const double lhs = inner2(x, v, m), rhs = inner1(tilde(x, m.t_tilde), v, m);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  return below("tilde_identity", "<X, V>_2 = <X~, V>_1", worst, 1e-12);
}

Check check_nonnegative(const CheegerGeometry& geo, Rng& rng) {
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2000; ++i)
    worst = std::min(worst, geo.sec(gaussian_algebra(rng), gaussian_algebra(rng)));
  Check c{"nonnegative_curvature", "sec_G >= 0", worst >= -1e-9, worst, -1e-9, ">=", "2000 random planes"};
  return c;
}

Check check_cheeger_split(const MetricParams& m, Rng& rng) {
  const double st = m.s_tilde < 1.0 ? m.s_tilde : 0.5;
  const MetricParams split = MetricParams::make(st, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 500; ++i)
    worst = std::min(worst,
                     cheeger_split_discrepancy(gaussian_algebra(rng), gaussian_algebra(rng), split));
  Check c{"cheeger_split", "kappa_1 >= split lower bound", worst >= -1e-9, worst, -1e-9, ">=",
          "s~ = " + format_double(st) + ", t~ = 1"};
  c.informational = true;
  return c;
}

Check check_templates(const CheegerGeometry& geo, Rng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const ImQuaternion y = random_unit_imaginary(rng);
    const Quaternion x = random_unit_quaternion(rng);
    ImQuaternion x2 = cross(y, random_unit_imaginary(rng));
    x2 *= 1.0 / x2.norm();
    for (const PlaneTemplate& t :
         {build_template(TemplateType::Type1, x, y), build_template(TemplateType::Type2a, x, y),
          build_template(TemplateType::Type2b, x2.quat(), y)}) {
      const MetricParams& m = geo.params();
      worst = std::max(worst, std::abs(geo.sec(t.x_vector(m), t.y_vector(m))));
    }
  }
  return below("zero_plane_templates", "Type1, Type2a, Type2b planes are flat", worst, 1e-10);
}

Check check_bracket_criterion(const CheegerGeometry& geo, int starts, std::uint64_t seed) {
  MinOptions opt;
  opt.starts = std::min(starts, 16);
  opt.seed = seed;
  const MinResult r = min_kappa_algebra(geo, opt);
  const double res = zero_bracket_residuals(r.x, r.y, geo.params()).max();
  Check c = below("bracket_criterion", "flat planes of sp(2) have vanishing brackets", res, 1e-6,
                  "min kappa " + format_double(r.value));
  c.pass = c.pass && r.value < 1e-9;
  return c;
}

Check check_type1(Rng& rng) {
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2000; ++i) {
    const GroupElement g = haar_sample(rng);
    worst = std::min(worst, nowhere_horizontal_residual(g, random_unit_imaginary(rng)));
  }
  return above("lemma_type1_nowhere_horizontal", "Type1 planes are nowhere horizontal", worst, 0.0);
}

struct PieceStats {
  int flagged = 0;
  double horizontality = 0.0;
  double kappa = 0.0;
  double a_norm = 0.0;
};

Check check_piece(int piece, const CheegerGeometry& geo, int n, double tol, Rng& rng,
                  PieceStats& stats) {
  for (int i = 0; i < n; ++i) {
    const GroupElement g = sample_z_point(piece, rng);
    const ZClassification c = classify(g, tol);
    const bool flags[4] = {c.z1, c.z2, c.z3, c.z4};
    if (flags[piece - 1]) ++stats.flagged;
    const ZWitness w = construct_witness(piece, g, geo);
    stats.horizontality = std::max(stats.horizontality, w.horizontality);
    stats.kappa = std::max(stats.kappa, std::abs(w.kappa));
    const HorizontalSpace hs(geo, g);
    const MetricParams& m = geo.params();
    Vec10 x = hs.project(geo.to_frame(w.plane.x_vector(m)));
    Vec10 y = hs.project(geo.to_frame(w.plane.y_vector(m)));
    x.normalize();
    y -= x.dot(y) * x;
    y.normalize();
    stats.a_norm = std::max(stats.a_norm, hs.a_tensor(x, y).norm());
  }
  static const char* names[4] = {"lemma_det_condition", "lemma_z2_conditions", "theorem_z3_piece",
                                 "theorem_z4_piece"};
  static const char* subjects[4] = {"det(I - Ad(a^-1) - Ad(b^-1)) = 0 gives a flat horizontal plane",
                                    "|a| = |b| = 1/sqrt2 and w-condition give a flat horizontal plane",
                                    "b = c = 0, |Im a| >= 1/2 gives a flat horizontal plane",
                                    "a = d = 0, |Im b| >= 1/2 gives a flat horizontal plane"};
  const double worst = std::max(stats.horizontality / 1e-8, stats.kappa / 1e-9);
  Check c{names[piece - 1], subjects[piece - 1],
          stats.flagged == n && stats.horizontality < 1e-8 && stats.kappa < 1e-9,
          worst, 1.0, "<",
          "flagged " + std::to_string(stats.flagged) + "/" + std::to_string(n) +
              ", horizontality " + format_double(stats.horizontality) + ", kappa " +
              format_double(stats.kappa)};
  return c;
}

Check check_a_tensor(const CheegerGeometry& geo, Rng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const HorizontalSpace hs(geo, haar_sample(rng));
    Vec10 x, y;
    for (int k = 0; k < 10; ++k) x[k] = gaussian(rng);
    for (int k = 0; k < 10; ++k) y[k] = gaussian(rng);
    x = hs.project(x);
    y = hs.project(y);
    worst = std::max(worst, (hs.a_tensor(x, y) - hs.a_tensor_fd(x, y)).norm() /
                                std::max(1.0, hs.a_tensor(x, y).norm()));
  }
  return below("a_tensor_consistency", "closed-form A agrees with finite differences", worst, 1e-6);
}

Check check_u_invariance(const CheegerGeometry& geo, int starts, double tol, Rng& rng) {
  double worst = 0.0;
  int flag_changes = 0;
  for (int i = 0; i < 30; ++i) {
    const int piece = i % 5;  // 0: Haar point
    const GroupElement g = piece == 0 ? haar_sample(rng) : sample_z_point(piece, rng);
    const GroupElement h = u_action(random_unit_quaternion(rng), g);
    const ZClassification cg = classify(g, tol), ch = classify(h, tol);
    if (cg.z1 != ch.z1 || cg.z2 != ch.z2 || cg.z3 != ch.z3 || cg.z4 != ch.z4) ++flag_changes;
    MinOptions opt;
    opt.starts = starts;
    opt.seed = rng();
    const double kg = min_kappa_horizontal(HorizontalSpace(geo, g), opt).value;
    const double kh = min_kappa_horizontal(HorizontalSpace(geo, h), opt).value;
    worst = std::max(worst, std::abs(kg - kh));
  }
  Check c = below("u_invariance", "flags and min kappa are U-invariant", worst, 1e-7,
                  "flag changes " + std::to_string(flag_changes));
  c.pass = c.pass && flag_changes == 0;
  return c;
}

}  // namespace

VerifyReport run_verify(const VerifyOptions& opt) {
  opt.metric.validate();
  VerifyReport rep;
  const CheegerGeometry geo(opt.metric);
  Rng rng = make_rng(opt.seed);

  rep.checks.push_back(check_bi_invariant(rng));
  rep.checks.push_back(check_tilde_identity(opt.metric, rng));
  rep.checks.push_back(check_nonnegative(geo, rng));
  rep.checks.push_back(check_cheeger_split(opt.metric, rng));
  rep.checks.push_back(check_templates(geo, rng));
  rep.checks.push_back(check_bracket_criterion(geo, opt.starts, rng()));
  rep.checks.push_back(check_type1(rng));

  PieceStats stats[4];
  for (int piece = 1; piece <= 4; ++piece)
    rep.checks.push_back(check_piece(piece, geo, opt.per_piece, opt.tol_zero, rng, stats[piece - 1]));
  double a_worst = 0.0;
  for (const PieceStats& s : stats) a_worst = std::max(a_worst, s.a_norm);
  rep.checks.push_back(below("oneill_vanishing", "A_X Y = 0 on constructed flat planes", a_worst, 1e-7));
  rep.checks.push_back(check_a_tensor(geo, rng));
  rep.checks.push_back(check_u_invariance(geo, opt.starts, opt.tol_zero, rng));

  CalibrationOptions copt;
  copt.starts = opt.starts;
  copt.workers = opt.workers;
  try {
    rep.calibration = calibrate_threshold(opt.metric, opt.seed, copt);
    rep.calibrated = true;
    rep.checks.push_back(above("calibration", "flat and perturbed points separate",
                               rep.calibration.min_perturbed, rep.calibration.noise,
                               "delta " + format_double(rep.calibration.delta)));
  } catch (const std::runtime_error& e) {
    rep.checks.push_back({"calibration", "flat and perturbed points separate", false, 0.0, 0.0, ">",
                          e.what()});
  }

  if (rep.calibrated) {
    std::vector<BatchPoint> batch = haar_batch(static_cast<std::size_t>(opt.samples), opt.seed);
    const std::vector<BatchPoint> zb =
        z_batch(opt.per_piece, 2 * opt.per_piece, 1e-2, opt.metric, opt.seed + 1);
    batch.insert(batch.end(), zb.begin(), zb.end());
    ScanConfig cfg;
    cfg.metric = opt.metric;
    cfg.seed = opt.seed;
    cfg.starts = opt.starts;
    cfg.workers = opt.workers;
    cfg.threshold = rep.calibration.delta;
    cfg.tol_zero = opt.tol_zero;
    cfg.sec_m = false;
    const ScanReport sr = scan_points(batch, cfg);
    rep.checks.push_back({"theorem_agreement", "flag <=> min kappa < delta",
                          sr.disagreements.empty(), static_cast<double>(sr.disagreements.size()), 0.0,
                          "==",
                          std::to_string(batch.size()) + " points, " +
                              std::to_string(sr.classifier_hits) + " flagged"});
  } else {
    rep.checks.push_back({"theorem_agreement", "flag <=> min kappa < delta", false, 0.0, 0.0, "==",
                          "no threshold"});
  }
  return rep;
}

}  // namespace gmsphere
