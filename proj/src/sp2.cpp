#include "gmsphere/sp2.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace gmsphere {

QMatrix2 QMatrix2::adjoint() const {
  return {m[0].conj(), m[2].conj(), m[1].conj(), m[3].conj()};
}

double QMatrix2::frobenius_norm() const {
  double s = 0.0;
  for (const auto& e : m) s += e.norm2();
  return std::sqrt(s);
}

QMatrix2& QMatrix2::operator+=(const QMatrix2& o) {
  for (int i = 0; i < 4; ++i) m[i] += o.m[i];
  return *this;
}

QMatrix2& QMatrix2::operator-=(const QMatrix2& o) {
  for (int i = 0; i < 4; ++i) m[i] -= o.m[i];
  return *this;
}

QMatrix2& QMatrix2::operator*=(double s) {
  for (auto& e : m) e *= s;
  return *this;
}

QMatrix2 operator*(const QMatrix2& a, const QMatrix2& b) {
  return {a.m[0] * b.m[0] + a.m[1] * b.m[2], a.m[0] * b.m[1] + a.m[1] * b.m[3],
          a.m[2] * b.m[0] + a.m[3] * b.m[2], a.m[2] * b.m[1] + a.m[3] * b.m[3]};
}

double unitarity_residual(const QMatrix2& g) {
  return (g.adjoint() * g - QMatrix2::identity()).frobenius_norm();
}

GroupElement GroupElement::from_matrix(const QMatrix2& m, double tol) {
  const double r = unitarity_residual(m);
  if (!(r <= tol))
    throw std::invalid_argument("matrix is not in Sp(2): residual " + format_double(r));
  return GroupElement(m);
}

GroupElement GroupElement::diag(const Quaternion& p, const Quaternion& q, double tol) {
  return from_matrix({p, Quaternion(), Quaternion(), q}, tol);
}

AlgebraElement AlgebraElement::diag(const ImQuaternion& x1, const ImQuaternion& x2) {
  return {Quaternion(), (x1 - x2) * 0.5, (x1 + x2) * 0.5};
}

AlgebraElement AlgebraElement::offdiag(const Quaternion& x) { return {x, {}, {}}; }

AlgebraElement AlgebraElement::from_matrix(const QMatrix2& m, double tol) {
  const double skew = (m.adjoint() + m).frobenius_norm();
  if (!(skew <= tol))
    throw std::invalid_argument("matrix is not skew-Hermitian: residual " + format_double(skew));
  // Average the two off-diagonal slots so a nearly skew input is projected.
  const Quaternion p = (m.m[2] - m.m[1].conj()) * 0.5;
  return diag(m.m[0].imag(), m.m[3].imag()) + offdiag(p);
}

AlgebraElement AlgebraElement::from_coords(const Vec10& c) {
  return {Quaternion(c[0], c[1], c[2], c[3]), ImQuaternion(c[4], c[5], c[6]),
          ImQuaternion(c[7], c[8], c[9])};
}

QMatrix2 AlgebraElement::matrix() const {
  return {x1().quat(), -p_.conj(), p_, x2().quat()};
}

Vec10 AlgebraElement::coords() const {
  Vec10 c;
  c << p_.w, p_.x, p_.y, p_.z, q_.x, q_.y, q_.z, h_.x, h_.y, h_.z;
  return c;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
  p_ += o.p_;
  q_ += o.q_;
  h_ += o.h_;
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& o) {
  p_ -= o.p_;
  q_ -= o.q_;
  h_ -= o.h_;
  return *this;
}

AlgebraElement& AlgebraElement::operator*=(double s) {
  p_ *= s;
  q_ *= s;
  h_ *= s;
  return *this;
}

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  const QMatrix2 mx = x.matrix(), my = y.matrix();
  return AlgebraElement::from_matrix(mx * my - my * mx, 1e300);
}

double trace_inner(const AlgebraElement& x, const AlgebraElement& y) {
  return 2.0 * (dot(x.p(), y.p()) + dot(x.q(), y.q()) + dot(x.h(), y.h()));
}

AlgebraElement adjoint_action(const GroupElement& g, const AlgebraElement& x) {
  return AlgebraElement::from_matrix(g.matrix() * x.matrix() * g.matrix().adjoint(), 1e300);
}

GroupElement exp(const AlgebraElement& x) {
  const QMatrix2 m = x.matrix();
  const double n = m.frobenius_norm();
  int squarings = 0;
  double scale = 1.0;
  while (n * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  const QMatrix2 a = m * scale;
  QMatrix2 sum = QMatrix2::identity();
  QMatrix2 term = QMatrix2::identity();
  for (int k = 1; k <= 12; ++k) {
    term = term * a * (1.0 / k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return GroupElement(sum);
}

namespace {

// <u, v> = sum conj(u_i) v_i, so that u <u, v> is the right-linear projection.
Quaternion hermitian(const Quaternion& u0, const Quaternion& u1, const Quaternion& v0,
                     const Quaternion& v1) {
  return u0.conj() * v0 + u1.conj() * v1;
}

}  // namespace

GroupElement haar_sample(Rng& rng) {
  for (;;) {
    Quaternion c0 = gaussian_quaternion(rng);
    Quaternion c1 = gaussian_quaternion(rng);
    Quaternion e0 = gaussian_quaternion(rng);
    Quaternion e1 = gaussian_quaternion(rng);
    const double n0 = std::sqrt(c0.norm2() + c1.norm2());
    if (n0 < 1e-8) continue;
    c0 *= 1.0 / n0;
    c1 *= 1.0 / n0;
    const Quaternion proj = hermitian(c0, c1, e0, e1);
    e0 -= c0 * proj;
    e1 -= c1 * proj;
    // Second Gram-Schmidt pass for orthogonality to rounding.
    const Quaternion proj2 = hermitian(c0, c1, e0, e1);
    e0 -= c0 * proj2;
    e1 -= c1 * proj2;
    const double n1 = std::sqrt(e0.norm2() + e1.norm2());
    if (n1 < 1e-8) continue;
    e0 *= 1.0 / n1;
    e1 *= 1.0 / n1;
    return GroupElement(QMatrix2(c0, e0, c1, e1));
  }
}

AlgebraElement gaussian_algebra(Rng& rng) {
  Vec10 c;
  for (int i = 0; i < 10; ++i) c[i] = gaussian(rng);
  return AlgebraElement::from_coords(c);
}

GroupElement haar_sample(std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return haar_sample(rng);
}

GroupElement group_from_first_row(const Quaternion& a, const Quaternion& b,
                                  const Quaternion& phase, double tol) {
  const double na2 = a.norm2(), nb2 = b.norm2();
  Quaternion c, d;
  if (na2 >= nb2) {
    d = phase * std::sqrt(na2);
    c = -(d * b.conj() * a) * (1.0 / na2);
  } else {
    c = phase * std::sqrt(nb2);
    d = -(c * a.conj() * b) * (1.0 / nb2);
  }
  return GroupElement::from_matrix({a, b, c, d}, tol);
}

GroupElement u_action(const Quaternion& q, const GroupElement& g) {
  if (std::abs(q.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("u_action requires a unit quaternion");
  const Quaternion qi = q.conj();
  const QMatrix2& m = g.matrix();
  return GroupElement::from_matrix({q * m.m[0] * qi, q * m.m[1] * qi, m.m[2] * qi, m.m[3] * qi},
                                   1e-8);
}

std::array<double, 16> to_reals(const GroupElement& g) {
  std::array<double, 16> r{};
  for (int e = 0; e < 4; ++e) {
    const Quaternion& q = g.matrix().m[e];
    r[4 * e + 0] = q.w;
    r[4 * e + 1] = q.x;
    r[4 * e + 2] = q.y;
    r[4 * e + 3] = q.z;
  }
  return r;
}

GroupElement from_reals(std::span<const double, 16> r, double tol) {
  QMatrix2 m;
  for (int e = 0; e < 4; ++e) m.m[e] = {r[4 * e], r[4 * e + 1], r[4 * e + 2], r[4 * e + 3]};
  return GroupElement::from_matrix(m, tol);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_reals(const GroupElement& g) {
  std::string out;
  const auto r = to_reals(g);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) out += ',';
    out += format_double(r[i]);
  }
  return out;
}

GroupElement parse_group_element(std::string_view text, double tol) {
  std::vector<double> vals;
  std::size_t i = 0;
  auto is_sep = [](char ch) {
    return ch == ',' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '[' ||
           ch == ']';
  };
  while (i < text.size()) {
    if (is_sep(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !is_sep(text[j])) ++j;
    double v = 0.0;
    const char* first = text.data() + i;
    const char* last = text.data() + j;
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
      throw std::invalid_argument("malformed real: '" + std::string(text.substr(i, j - i)) + "'");
    vals.push_back(v);
    i = j;
  }
  if (vals.size() != 16)
    throw std::invalid_argument("expected 16 reals, got " + std::to_string(vals.size()));
  return from_reals(std::span<const double, 16>(vals.data(), 16), tol);
}

}  // namespace gmsphere
