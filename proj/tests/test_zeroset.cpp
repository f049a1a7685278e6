#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gmsphere/zeroset.hpp"

using namespace gmsphere;
using std::numbers::pi;

namespace {

const ImQuaternion kI{1, 0, 0}, kJ{0, 1, 0}, kK{0, 0, 1};
const MetricParams kM = MetricParams::make(0.5, 0.5);

const std::array<MetricParams, 9> kGrid = [] {
  std::array<MetricParams, 9> g{};
  const double v[3] = {0.25, 0.5, 0.75};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) g[3 * a + b] = MetricParams::make(v[a], v[b]);
  return g;
}();

Quaternion axis_angle(const ImQuaternion& axis, double angle) {
  ImQuaternion n = axis * (1.0 / axis.norm());
  return Quaternion(std::cos(angle / 2), 0, 0, 0) + std::sin(angle / 2) * n.quat();
}

GroupElement z2_example() {
  const double r = 1.0 / std::sqrt(2.0);
  Quaternion h(0.5, 0.5, 0, 0);
  return GroupElement::from_matrix({h, h, Quaternion(r), Quaternion(-r)});
}

}  // namespace

TEST_CASE("template examples are flat") {
  for (const MetricParams& m : kGrid) {
    CheegerGeometry geo(m);
    PlaneTemplate t1 = build_template(TemplateType::Type1, {}, kI);
    PlaneTemplate t2 = build_template(TemplateType::Type2a, Quaternion(1, 0, 1, 0), kK);
    PlaneTemplate t3 = build_template(TemplateType::Type2b, Quaternion::j(), kI);
    for (const PlaneTemplate* t : {&t1, &t2, &t3}) CHECK(std::abs(geo.kappa(t->x_vector(m), t->y_vector(m))) < 1e-10);
  }
  CHECK(conjugate_by(Quaternion::j(), kI) == -kI);
  PlaneTemplate t = build_template(TemplateType::Type2a, Quaternion(1, 0, 1, 0), kK);
  CHECK(t.tilde_x == AlgebraElement::offdiag(Quaternion(1, 0, 1, 0)));
  CHECK(trace_norm(t.tilde_y - AlgebraElement::diag(kK, conjugate_by(Quaternion(1, 0, 1, 0), kK))) < 1e-15);
}

TEST_CASE("template preconditions") {
  CHECK_THROWS_AS(build_template(TemplateType::Type1, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_template(TemplateType::Type2a, {}, kI), std::invalid_argument);
  CHECK_THROWS_AS(build_template(TemplateType::Type2b, Quaternion::one(), kI), std::invalid_argument);
  CHECK_THROWS_AS(build_template(TemplateType::Type2b, Quaternion(0, 1, 1, 0), kI), std::invalid_argument);
  CHECK_THROWS_AS(build_template(TemplateType::Type2b, Quaternion(), kI), std::invalid_argument);
}

TEST_CASE("det condition examples") {
  Rng rng = make_rng(50);
  for (int n = 0; n < 100; ++n) {
    double a = gaussian(rng);
    CHECK(std::abs(det_condition(Quaternion(a), gaussian_quaternion(rng)) + 1.0) < 1e-12);
    double theta = uniform(rng, 0.0, pi);
    Quaternion q = axis_angle(gaussian_imaginary(rng), theta);
    CHECK(std::abs(det_condition(q, q) + (5.0 - 4.0 * std::cos(theta))) < 1e-12);
  }
  CHECK_THROWS_AS(det_condition(Quaternion(), Quaternion::one()), std::invalid_argument);
}

TEST_CASE("det root scan along a path") {
  Rng rng = make_rng(51);
  int found = 0;
  for (int n = 0; n < 50; ++n) {
    Quaternion b = random_unit_quaternion(rng);
    ImQuaternion axis = random_unit_imaginary(rng);
    auto f = [&](double angle) { return det_condition(axis_angle(axis, angle), b); };
    double lo = 0.0, hi = -1.0;
    for (int k = 1; k <= 64; ++k) {
      double t = 2 * pi * k / 64;
      if (f(t) > 0) { hi = t; break; }
      lo = t;
    }
    if (hi < 0) continue;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      double mid = 0.5 * (lo + hi);
      (f(mid) > 0 ? hi : lo) = mid;
    }
    CHECK(std::abs(f(0.5 * (lo + hi))) < 1e-12);
    ++found;
  }
  CHECK(found > 0);
}

TEST_CASE("w condition examples") {
  Rng rng = make_rng(52);
  Quaternion a = gaussian_quaternion(rng);
  WCondition same = w_condition(a, a);
  CHECK(same.w.norm() < 1e-14);
  CHECK(std::abs(same.value) < 1e-14);

  Quaternion b = gaussian_quaternion(rng);
  WCondition real_a = w_condition(Quaternion::one(), b);
  CHECK(std::abs(real_a.value + real_a.w.norm2()) < 1e-14);

  for (int n = 0; n < 100; ++n) {
    ImQuaternion axis = random_unit_imaginary(rng);
    ImQuaternion w = cross(axis, gaussian_imaginary(rng));
    Quaternion r = axis_angle(axis, pi / 3) * uniform(rng, 0.2, 2.0);
    Quaternion b2 = r * (Quaternion(gaussian(rng)) + w.quat());
    WCondition wc = w_condition(r, b2);
    CHECK((wc.w - w).norm() < 1e-12 * (1 + w.norm()));
    CHECK(std::abs(wc.value) < 1e-12 * (1 + w.norm2()));
  }
  CHECK_THROWS_AS(w_condition(Quaternion(), b), std::invalid_argument);
}

TEST_CASE("fault hook flips the w condition") {
  Quaternion b(0.0, 0.3, -0.2, 0.5);
  double normal = w_condition(Quaternion::one(), b).value;
  fault::set_flip_w_condition(true);
  double flipped = w_condition(Quaternion::one(), b).value;
  fault::set_flip_w_condition(false);
  CHECK(!fault::flip_w_condition());
  CHECK(std::abs(flipped + 3.0 * normal) < 1e-14);
}

TEST_CASE("classify examples") {
  ZClassification id = classify(GroupElement::identity());
  CHECK(!id.z1);
  CHECK(!id.z2);
  CHECK(!id.z3);
  CHECK(!id.z4);

  ZClassification d = classify(GroupElement::diag(Quaternion::i(), Quaternion::one()));
  CHECK(d.z3);
  CHECK(!d.z1);
  CHECK(!d.z2);
  CHECK(!d.z4);

  GroupElement g = z2_example();
  CHECK(unitarity_residual(g.matrix()) < 1e-15);
  ZClassification z = classify(g);
  CHECK(z.z2);
  CHECK(std::abs(z.residuals.a_norm - 1 / std::sqrt(2.0)) < 1e-15);
  CHECK(z.residuals.w_norm < 1e-15);
  CHECK(z.residuals.im_a_ratio_margin == doctest::Approx(0.5 - 0.5 / std::sqrt(2.0)));

  CHECK_THROWS_AS(classify(GroupElement::from_matrix(QMatrix2::identity() * 1.01, 1.0)), std::invalid_argument);
}

TEST_CASE("constructed witnesses") {
  CheegerGeometry geo(kM);
  CHECK(!construct_zero_horizontal_plane(GroupElement::identity(), geo).has_value());

  GroupElement d = GroupElement::diag(Quaternion::i(), Quaternion::one());
  auto w = construct_zero_horizontal_plane(d, geo);
  REQUIRE(w.has_value());
  CHECK(w->piece == 3);
  CHECK(w->plane.type == TemplateType::Type2a);
  CHECK(w->horizontality < 1e-8);
  CHECK(std::abs(w->kappa) < 1e-9);
  // Ad(x) y = Ad(i) y - y for y = (sqrt3/2) i + (1/2) j
  ImQuaternion y(std::sqrt(3.0) / 2, 0.5, 0);
  CHECK((conjugate_by(Quaternion::i(), y) - y - ImQuaternion(0, -1, 0)).norm() < 1e-15);

  auto w2 = construct_zero_horizontal_plane(z2_example(), geo);
  REQUIRE(w2.has_value());
  CHECK(w2->piece == 2);
  CHECK(w2->horizontality < 1e-8);
}

TEST_CASE("sampled points land in their piece and carry witnesses") {
  Rng rng = make_rng(53);
  for (const MetricParams& m : {kM, MetricParams::make(0.25, 0.75), MetricParams::make(0.75, 0.25)}) {
    CheegerGeometry geo(m);
    for (int piece = 1; piece <= 4; ++piece) {
      for (int n = 0; n < 10; ++n) {
        GroupElement g = sample_z_point(piece, rng);
        CHECK(unitarity_residual(g.matrix()) < 1e-12);
        ZClassification z = classify(g);
        bool flags[4] = {z.z1, z.z2, z.z3, z.z4};
        CHECK(flags[piece - 1]);
        ZWitness w = construct_witness(piece, g, geo);
        CHECK(w.horizontality < 1e-8);
        CHECK(std::abs(w.kappa) < 1e-9);
        if (piece == 1) CHECK(std::abs(det_condition(g.a(), g.b())) < 1e-10);
        if (piece == 2) {
          CHECK(w.plane.type == TemplateType::Type2b);
          CHECK(std::abs(g.a().norm() - g.b().norm()) < 1e-9);
          CHECK(std::abs(w_condition(g.a(), g.b()).value) < 1e-9);
          CHECK(g.a().imag().norm() / g.a().norm() >= 0.5 - 1e-9);
        }
      }
    }
  }
}

TEST_CASE("b = 0 points: horizontal type2a plane iff angle at least pi/3") {
  CheegerGeometry geo(kM);
  Rng rng = make_rng(54);
  ImQuaternion axis = random_unit_imaginary(rng);
  Quaternion d = random_unit_quaternion(rng);
  for (int k = -20; k <= 20; ++k) {
    if (k == 0) continue;
    double theta = pi / 3 + 0.01 * k;
    GroupElement g = GroupElement::diag(axis_angle(axis, theta), d);
    ZWitness w = construct_witness(3, g, geo);
    CHECK(classify(g).z3 == (k > 0));
    if (k > 0) {
      CHECK(w.horizontality < 1e-8);
      CHECK(std::abs(w.kappa) < 1e-9);
    } else {
      CHECK(w.horizontality > 1e-6);
    }
  }
}

TEST_CASE("vector rotated by a given angle") {
  Rng rng = make_rng(55);
  for (int n = 0; n < 100; ++n) {
    Quaternion r = random_unit_quaternion(rng);
    double target = uniform(rng, 0.0, rotation_angle(r));
    ImQuaternion y = vector_rotated_by(r, target, uniform(rng, 0.0, 2 * pi));
    CHECK(std::abs(y.norm() - 1.0) < 1e-12);
    double c = dot(y, conjugate_by(r, y));
    CHECK(std::abs(std::acos(std::clamp(c, -1.0, 1.0)) - target) < 1e-7);
  }
}

TEST_CASE("nowhere horizontal residual") {
  CHECK(nowhere_horizontal_residual(GroupElement::identity(), kI) == doctest::Approx(1.0));
  Rng rng = make_rng(56);
  for (int n = 0; n < 20; ++n) {
    GroupElement g = GroupElement::diag(random_unit_quaternion(rng), random_unit_quaternion(rng));
    ImQuaternion y = gaussian_imaginary(rng);
    CHECK(nowhere_horizontal_residual(g, y) >= y.norm() - 1e-15);
  }
  double lowest = 1e300;
  for (int n = 0; n < 10000; ++n) {
    GroupElement g = haar_sample(rng);
    ImQuaternion y = random_unit_imaginary(rng);
    lowest = std::min(lowest, nowhere_horizontal_residual(g, y));
    // triangle inequality: a y a* + b y b* never reaches 2 |y|
    CHECK(((conjugate_by(g.a(), y) * g.a().norm2()) + (conjugate_by(g.b(), y) * g.b().norm2())).norm() < 2.0);
  }
  MESSAGE("minimum type1 residual over 1e4 samples: " << lowest);
  CHECK(lowest > 0.0);
}

TEST_CASE("classification is U-invariant") {
  Rng rng = make_rng(57);
  std::vector<GroupElement> points;
  for (int n = 0; n < 500; ++n) points.push_back(haar_sample(rng));
  for (int n = 0; n < 500; ++n) points.push_back(sample_z_point(1 + n % 4, rng));
  for (const GroupElement& g : points) {
    Quaternion q = random_unit_quaternion(rng);
    ZClassification a = classify(g), b = classify(u_action(q, g));
    CHECK(a.z1 == b.z1);
    CHECK(a.z2 == b.z2);
    CHECK(a.z3 == b.z3);
    CHECK(a.z4 == b.z4);
    const ZResiduals &ra = a.residuals, &rb = b.residuals;
    CHECK(std::abs(ra.det - rb.det) < 1e-9);
    CHECK(std::abs(ra.w_value - rb.w_value) < 1e-9);
    CHECK(std::abs(ra.w_norm - rb.w_norm) < 1e-9);
    CHECK(std::abs(ra.im_a_margin - rb.im_a_margin) < 1e-9);
    CHECK(std::abs(ra.im_b_margin - rb.im_b_margin) < 1e-9);
  }
}
