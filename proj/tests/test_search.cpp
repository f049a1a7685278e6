#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <omp.h>

#include "gmsphere/search.hpp"

using namespace gmsphere;
using std::numbers::pi;

namespace {

const MetricParams kM = MetricParams::make(0.5, 0.5);

const Calibration& calibration() {
  static const Calibration c = calibrate_threshold(kM, 42);
  return c;
}

Quaternion axis_angle(const ImQuaternion& axis, double angle) {
  return Quaternion(std::cos(angle / 2), 0, 0, 0) + std::sin(angle / 2) * axis.quat();
}

int threads() { return std::max(2, omp_get_max_threads()); }

bool same(const ScanReport& a, const ScanReport& b) {
  if (a.points.size() != b.points.size()) return false;
  for (std::size_t n = 0; n < a.points.size(); ++n) {
    const ScanPoint &p = a.points[n], &q = b.points[n];
    if (p.min_kappa != q.min_kappa || p.min_sec_m != q.min_sec_m || p.z != q.z || p.seed != q.seed ||
        p.agreement != q.agreement || !(p.g.matrix() == q.g.matrix()))
      return false;
  }
  return a.disagreements == b.disagreements && a.quantiles == b.quantiles &&
         a.fraction_below == b.fraction_below && a.hits == b.hits;
}

}  // namespace

TEST_CASE("minimizer examples") {
  CheegerGeometry geo(kM);
  const Calibration& cal = calibration();
  MinOptions opt;
  opt.seed = 1;
  MinResult z3 = min_kappa_horizontal(GroupElement::diag(Quaternion::i(), Quaternion::one()), kM, opt);
  CHECK(z3.value < 1e-9);
  MinResult id = min_kappa_horizontal(GroupElement::identity(), kM, opt);
  CHECK(id.value > cal.delta);
  CHECK(id.starts == 64);
  CHECK(id.converged_starts > 0);
}

TEST_CASE("descent from a witness converges immediately") {
  CheegerGeometry geo(kM);
  Rng rng = make_rng(60);
  for (int piece = 1; piece <= 4; ++piece) {
    GroupElement g = sample_z_point(piece, rng);
    ZWitness w = construct_witness(piece, g, geo);
    HorizontalSpace hs(geo, g);
    MinResult r = min_kappa_horizontal_from(hs, hs.project(w.plane.x_vector(kM)), hs.project(w.plane.y_vector(kM)));
    CHECK(r.value < 1e-10);
    CHECK(r.iterations <= 2);
    CHECK(r.status != MinStatus::MaxIterations);
  }
}

TEST_CASE("argmin pair is orthonormal, horizontal and reproduces the value") {
  CheegerGeometry geo(kM);
  Rng rng = make_rng(61);
  for (int n = 0; n < 10; ++n) {
    GroupElement g = n % 2 ? haar_sample(rng) : sample_z_point(1 + n % 4, rng);
    HorizontalSpace hs(geo, g);
    MinOptions opt;
    opt.seed = n;
    for (bool oneill : {false, true}) {
      MinResult r = oneill ? min_sec_M(hs, opt) : min_kappa_horizontal(hs, opt);
      CHECK(std::abs(inner2(r.x, r.x, kM) - 1) < 1e-10);
      CHECK(std::abs(inner2(r.y, r.y, kM) - 1) < 1e-10);
      CHECK(std::abs(inner2(r.x, r.y, kM)) < 1e-10);
      for (const AlgebraElement& v : {r.x, r.y})
        for (double c : hs.residual(v)) CHECK(std::abs(c) < 1e-9);
      double again = oneill ? hs.sec_M(r.x, r.y) : hs.sec_G(r.x, r.y);
      CHECK(std::abs(again - r.value) < 1e-12);
    }
  }
}

TEST_CASE("multistart beats random sampling and more starts never hurt") {
  CheegerGeometry geo(kM);
  Rng rng = make_rng(62);
  for (int n = 0; n < 5; ++n) {
    HorizontalSpace hs(geo, haar_sample(rng));
    MinOptions opt;
    opt.seed = 100 + n;
    MinResult r64 = min_kappa_horizontal(hs, opt);
    opt.starts = 128;
    MinResult r128 = min_kappa_horizontal(hs, opt);
    CHECK(r128.value <= r64.value + 1e-12);
    double sampled = 1e300;
    for (int k = 0; k < 2000; ++k) {
      Eigen::Matrix<double, 7, 1> a, b;
      for (int i = 0; i < 7; ++i) a[i] = gaussian(rng), b[i] = gaussian(rng);
      Vec10 x = hs.basis() * a, y = hs.basis() * b;
      sampled = std::min(sampled, hs.sec_G(geo.from_frame(x), geo.from_frame(y)));
    }
    CHECK(r64.value <= sampled + 1e-12);
  }
}

TEST_CASE("quartic minimizer rejects dependent starts") {
  QuarticForm f;
  f.n = 3;
  f.s = Eigen::MatrixXd::Identity(9, 9);
  Eigen::VectorXd x = Eigen::VectorXd::Unit(3, 0);
  CHECK_THROWS_AS(minimize_quartic(f, x, 2.0 * x), std::invalid_argument);
}

TEST_CASE("min sec_M examples") {
  CheegerGeometry geo(kM);
  Rng rng = make_rng(63);
  MinOptions opt;
  opt.seed = 3;
  for (int n = 0; n < 5; ++n) CHECK(min_sec_M(sample_z2_point(rng), kM, opt).value < 1e-7);
  HorizontalSpace at_id(geo, GroupElement::identity());
  MinResult k = min_kappa_horizontal(at_id, opt), s = min_sec_M(at_id, opt);
  CHECK(s.value > 0.0);
  CHECK(s.value >= k.value - 1e-12);
  CHECK(at_id.sec_M(k.x, k.y) >= k.value - 1e-12);
}

TEST_CASE("b = 0 angle sweep seen by the minimizer") {
  const Calibration& cal = calibration();
  Rng rng = make_rng(64);
  ImQuaternion axis = random_unit_imaginary(rng);
  Quaternion d = random_unit_quaternion(rng);
  MinOptions opt;
  opt.seed = 5;
  for (double offset : {-0.2, -0.05, 0.05, 0.2}) {
    GroupElement g = GroupElement::diag(axis_angle(axis, pi / 3 + offset), d);
    MinResult r = min_kappa_horizontal(g, kM, opt);
    CHECK((r.value < cal.delta) == (offset > 0));
  }
}

TEST_CASE("calibration separates zero and perturbed points") {
  const Calibration& c = calibration();
  CHECK(c.max_zero < 1e-9);
  CHECK(c.min_perturbed > 0.0);
  CHECK(c.min_perturbed > c.delta);
  CHECK(c.delta > c.noise);
  CHECK(c.zero_values.size() == 100);
  CHECK(c.perturbed_values.size() == 100);
  MESSAGE("delta " << c.delta << "  noise " << c.noise << "  min perturbed " << c.min_perturbed);
  CalibrationOptions fine;
  fine.eps = 1e-3;
  fine.workers = threads();
  Calibration c3 = calibrate_threshold(kM, 42, fine);
  CHECK(c3.delta < c.delta);
  CHECK(c3.min_perturbed < c.min_perturbed);
}

TEST_CASE("template identification") {
  Rng rng = make_rng(65);
  for (int n = 0; n < 50; ++n) {
    ImQuaternion y = gaussian_imaginary(rng);
    ImQuaternion x = gaussian_imaginary(rng);
    x -= (dot(x, y) / y.norm2()) * y;
    for (TemplateType t : {TemplateType::Type1, TemplateType::Type2a, TemplateType::Type2b}) {
      Quaternion xq = t == TemplateType::Type2b ? x.quat() : gaussian_quaternion(rng);
      PlaneTemplate p = build_template(t, xq, y);
      // any basis of the plane
      AlgebraElement u = p.x_vector(kM) * 0.8 + p.y_vector(kM) * 0.3;
      AlgebraElement v = p.x_vector(kM) * -0.4 + p.y_vector(kM) * 1.1;
      auto found = identify_template(u, v, kM);
      REQUIRE(found.has_value());
      CHECK(*found == t);
    }
  }
  CHECK(!identify_template(gaussian_algebra(rng), gaussian_algebra(rng), kM).has_value());
}

TEST_CASE("perturbation distance") {
  Rng rng = make_rng(66);
  GroupElement g = haar_sample(rng);
  GroupElement h = perturb(g, 1e-2, kM, rng);
  double d = (g.matrix() - h.matrix()).frobenius_norm();
  CHECK(d > 1e-3);
  CHECK(d < 3e-2);
}

TEST_CASE("batches are deterministic") {
  auto a = haar_batch(20, 9), b = haar_batch(20, 9);
  for (std::size_t n = 0; n < a.size(); ++n) {
    CHECK(a[n].g.matrix() == b[n].g.matrix());
    CHECK(a[n].g.matrix() == haar_sample(sample_seed(9, n)).matrix());
  }
  auto s = spiked_batch(100, 0.1, 9);
  int constructed = 0;
  for (const BatchPoint& p : s) constructed += p.kind == PointKind::Constructed;
  CHECK(constructed == 10);
  auto z = z_batch(3, 4, 1e-2, kM, 9);
  CHECK(z.size() == 16);
}

TEST_CASE("serial and parallel scans agree exactly") {
  ScanConfig cfg;
  cfg.metric = kM;
  cfg.seed = 7;
  cfg.threshold = calibration().delta;
  auto points = spiked_batch(40, 0.25, 7);
  ScanReport serial = scan_points_serial(points, cfg);
  cfg.workers = threads();
  ScanReport parallel = scan_points(points, cfg);
  CHECK(same(serial, parallel));
  cfg.workers = 1;
  CHECK(same(serial, scan_points(points, cfg)));
}

TEST_CASE("spiked scan agrees everywhere") {
  ScanConfig cfg;
  cfg.metric = kM;
  cfg.seed = 42;
  cfg.threshold = calibration().delta;
  cfg.workers = threads();
  ScanReport r = scan_points(spiked_batch(100, 0.1, 42), cfg);
  CHECK(r.agreement_fraction() == 1.0);
  CHECK(r.disagreements.empty());
  CHECK(r.classifier_hits == 10);
}

TEST_CASE("haar scan finds no zero points") {
  ScanConfig cfg;
  cfg.metric = kM;
  cfg.seed = 1234;
  cfg.threshold = calibration().delta;
  cfg.workers = threads();
  cfg.sec_m = false;
  ScanReport r = scan(1000, cfg);
  CHECK(r.points.size() == 1000);
  MESSAGE("classifier hits " << r.classifier_hits << ", disagreements " << r.disagreements.size());
  CHECK(r.classifier_hits == 0);
  CHECK(r.disagreements.empty());
}
