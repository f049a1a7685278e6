#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gmsphere/sp2.hpp"

using namespace gmsphere;
using std::numbers::pi;

namespace {

double dist(const QMatrix2& a, const QMatrix2& b) { return (a - b).frobenius_norm(); }
double dist(const GroupElement& a, const GroupElement& b) { return dist(a.matrix(), b.matrix()); }
double norm(const AlgebraElement& x) { return trace_norm(x); }

const ImQuaternion kI{1, 0, 0}, kJ{0, 1, 0}, kK{0, 0, 1}, k0{};

}  // namespace

TEST_CASE("bracket examples") {
  Rng rng = make_rng(10);
  AlgebraElement x = gaussian_algebra(rng);
  CHECK(norm(bracket(x, x)) < 1e-14);
  AlgebraElement b = bracket(AlgebraElement::diag(kI, k0), AlgebraElement::diag(kJ, k0));
  CHECK(norm(b - AlgebraElement::diag(2.0 * kK, k0)) < 1e-15);
  // commuting diagonal pair diag(0, y), diag(y, 0)
  CHECK(norm(bracket(AlgebraElement::diag(k0, kJ), AlgebraElement::diag(kJ, k0))) < 1e-15);
}

TEST_CASE("trace_inner examples") {
  CHECK(trace_inner(AlgebraElement::diag(kI, kI), AlgebraElement::diag(kI, kI)) == doctest::Approx(2.0));
  CHECK(trace_inner(AlgebraElement::diag(kI, k0), AlgebraElement::diag(k0, kI)) == 0.0);
  AlgebraElement p = AlgebraElement::offdiag(Quaternion::one());
  CHECK(p.matrix()(1, 0) == Quaternion::one());
  CHECK(p.matrix()(0, 1) == -Quaternion::one());
  CHECK(trace_inner(p, p) == doctest::Approx(2.0));
}

TEST_CASE("matrix round trip and skew-hermiticity") {
  Rng rng = make_rng(11);
  for (int n = 0; n < 100; ++n) {
    AlgebraElement x = gaussian_algebra(rng);
    QMatrix2 m = x.matrix();
    CHECK((m.adjoint() + m).frobenius_norm() < 1e-15);
    CHECK(norm(AlgebraElement::from_matrix(m) - x) < 1e-14);
    CHECK(AlgebraElement::from_coords(x.coords()) == x);
    CHECK(recompose(x.p_part(), x.q_part(), x.h_part()) == x);
  }
  QMatrix2 bad = QMatrix2::identity();
  CHECK_THROWS_AS(AlgebraElement::from_matrix(bad), std::invalid_argument);
}

TEST_CASE("exp examples") {
  CHECK(dist(exp(AlgebraElement()), GroupElement::identity()) < 1e-15);
  GroupElement a = exp(AlgebraElement::diag(pi / 2 * kI, k0));
  CHECK(dist(a.matrix(), QMatrix2(Quaternion::i(), {}, {}, Quaternion::one())) < 1e-14);
  GroupElement r = exp(AlgebraElement::offdiag(Quaternion(pi / 2)));
  CHECK(dist(r.matrix(), QMatrix2({}, Quaternion(-1.0), Quaternion(1.0), {})) < 1e-14);
}

TEST_CASE("exp is a one-parameter group") {
  Rng rng = make_rng(12);
  for (int n = 0; n < 50; ++n) {
    AlgebraElement x = gaussian_algebra(rng);
    GroupElement g = exp(x);
    CHECK(unitarity_residual(g.matrix()) < 1e-12);
    CHECK(dist(exp(0.3 * x) * exp(0.7 * x), g) < 1e-12);
    CHECK(dist(exp(-1.0 * x), g.inverse()) < 1e-12);
  }
}

TEST_CASE("haar_sample regression value and statistics") {
  GroupElement g = haar_sample(42);
  CHECK(unitarity_residual(g.matrix()) < 1e-10);
  const std::array<double, 16> frozen{
      0.26981540224342071,  -0.16159466386553772, -0.67096681555955062, 0.34173963917556821,
      -0.13875519666261579, -0.37627307826867334, -0.27719910411592974, -0.31053274771446393,
      -0.048487963168893609, -0.15424736593277999, -0.4665004792415538,  0.30056336296089881,
      0.35105515310334828,  0.2346575513983592,   0.45079944937113364,  0.53326504173962186};
  auto r = to_reals(g);
  for (int n = 0; n < 16; ++n) CHECK(std::abs(r[n] - frozen[n]) < 1e-15);
  CHECK(dist(haar_sample(42), haar_sample(43)) > 1e-3);

  Rng rng = make_rng(13);
  double sum = 0.0;
  const int total = 100000;
  for (int n = 0; n < total; ++n) sum += haar_sample(rng).a().norm2();
  CHECK(std::abs(sum / total - 0.5) < 0.01);
}

TEST_CASE("u_action examples") {
  Rng rng = make_rng(14);
  GroupElement g = haar_sample(rng);
  CHECK(dist(u_action(Quaternion::one(), g), g) < 1e-15);
  Quaternion q = random_unit_quaternion(rng);
  GroupElement e = u_action(q, GroupElement::identity());
  CHECK(dist(e.matrix(), QMatrix2(Quaternion::one(), {}, {}, q.inverse())) < 1e-14);
  for (int n = 0; n < 100; ++n) {
    GroupElement h = haar_sample(rng);
    Quaternion u = random_unit_quaternion(rng);
    GroupElement t = u_action(u, h);
    CHECK(unitarity_residual(t.matrix()) < 1e-12);
    CHECK(std::abs(t.a().norm() - h.a().norm()) < 1e-14);
    CHECK(std::abs(t.a().imag().norm() - h.a().imag().norm()) < 1e-14);
    Quaternion v = random_unit_quaternion(rng);
    CHECK(dist(u_action(u, u_action(v, h)), u_action(u * v, h)) < 1e-13);
  }
  CHECK_THROWS(u_action(Quaternion(2.0), g));
}

TEST_CASE("symmetric pair inclusions") {
  Rng rng = make_rng(15);
  for (int n = 0; n < 200; ++n) {
    AlgebraElement x = gaussian_algebra(rng), y = gaussian_algebra(rng);
    // [p, p] in k, [k, p] in p
    CHECK(norm(bracket(x.p_part(), y.p_part()).p_part()) < 1e-12);
    CHECK(norm(bracket(x.k_part(), y.p_part()).k_part()) < 1e-12);
    // [q, q] in h, [h, q] in q
    AlgebraElement qq = bracket(x.q_part(), y.q_part());
    CHECK(norm(qq - qq.h_part()) < 1e-12);
    AlgebraElement hq = bracket(x.h_part(), y.q_part());
    CHECK(norm(hq - hq.q_part()) < 1e-12);
  }
}

TEST_CASE("jacobi identity and ad-invariance of the trace form") {
  Rng rng = make_rng(16);
  for (int n = 0; n < 200; ++n) {
    AlgebraElement x = gaussian_algebra(rng), y = gaussian_algebra(rng), z = gaussian_algebra(rng);
    AlgebraElement j = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y));
    CHECK(norm(j) < 1e-10);
    GroupElement g = haar_sample(rng);
    CHECK(std::abs(trace_inner(adjoint_action(g, x), adjoint_action(g, y)) - trace_inner(x, y)) < 1e-11);
    CHECK(std::abs(trace_inner(bracket(x, y), z) + trace_inner(y, bracket(x, z))) < 1e-11);
  }
}

TEST_CASE("serialization") {
  GroupElement g = haar_sample(7);
  GroupElement back = parse_group_element(format_reals(g));
  CHECK(back.matrix() == g.matrix());
  CHECK(parse_group_element("[1 0 0 0, 0 0 0 0, 0 0 0 0, 1 0 0 0]").matrix() == QMatrix2::identity());
  CHECK_THROWS_AS(parse_group_element("1 0 0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_group_element("2 0 0 0 0 0 0 0 0 0 0 0 1 0 0 0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_group_element("1 0 0 0 0 0 0 0 0 0 0 0 1 0 0 x"), std::invalid_argument);
  CHECK(std::stod(format_double(0.1)) == 0.1);
}

TEST_CASE("group_from_first_row") {
  Rng rng = make_rng(17);
  for (int n = 0; n < 100; ++n) {
    GroupElement h = haar_sample(rng);
    GroupElement g = group_from_first_row(h.a(), h.b(), random_unit_quaternion(rng));
    CHECK(unitarity_residual(g.matrix()) < 1e-12);
    CHECK(g.a() == h.a());
    CHECK(g.b() == h.b());
  }
  CHECK_THROWS(group_from_first_row(Quaternion(1.0), Quaternion(1.0)));
}
