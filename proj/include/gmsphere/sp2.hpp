#pragma once

// Sp(2), its Lie algebra sp(2) = p + q + h, and the U-action whose orbit
// space is the Gromoll-Meyer sphere.

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "gmsphere/quat.hpp"
#include "gmsphere/random.hpp"

namespace gmsphere {

/// Quaternionic 2x2 matrix, row-major entries (m11, m12, m21, m22).
struct QMatrix2 {
  std::array<Quaternion, 4> m{};

  constexpr QMatrix2() = default;
  constexpr QMatrix2(Quaternion m11, Quaternion m12, Quaternion m21, Quaternion m22)
      : m{m11, m12, m21, m22} {}

  static constexpr QMatrix2 identity() {
    return {Quaternion::one(), Quaternion(), Quaternion(), Quaternion::one()};
  }

  constexpr const Quaternion& operator()(int r, int c) const { return m[2 * r + c]; }
  constexpr Quaternion& operator()(int r, int c) { return m[2 * r + c]; }

  /// Quaternionic conjugate transpose.
  QMatrix2 adjoint() const;
  /// sqrt(Re trace M^* M).
  double frobenius_norm() const;

  QMatrix2& operator+=(const QMatrix2& o);
  QMatrix2& operator-=(const QMatrix2& o);
  QMatrix2& operator*=(double s);
  bool operator==(const QMatrix2&) const = default;
};

QMatrix2 operator*(const QMatrix2& a, const QMatrix2& b);
inline QMatrix2 operator+(QMatrix2 a, const QMatrix2& b) { return a += b; }
inline QMatrix2 operator-(QMatrix2 a, const QMatrix2& b) { return a -= b; }
inline QMatrix2 operator*(QMatrix2 a, double s) { return a *= s; }
inline QMatrix2 operator*(double s, QMatrix2 a) { return a *= s; }

/// Frobenius norm of g^* g - I.
double unitarity_residual(const QMatrix2& g);

/// Element of Sp(2).  Construction through from_matrix checks g^* g = I.
class GroupElement {
 public:
  GroupElement() : m_(QMatrix2::identity()) {}

  /// Throws std::invalid_argument if the unitarity residual exceeds tol.
  static GroupElement from_matrix(const QMatrix2& m, double tol = 1e-10);
  static GroupElement identity() { return GroupElement(); }
  /// diag(p, q) for unit p, q.
  static GroupElement diag(const Quaternion& p, const Quaternion& q, double tol = 1e-10);

  const QMatrix2& matrix() const { return m_; }
  const Quaternion& a() const { return m_.m[0]; }
  const Quaternion& b() const { return m_.m[1]; }
  const Quaternion& c() const { return m_.m[2]; }
  const Quaternion& d() const { return m_.m[3]; }

  GroupElement inverse() const { return GroupElement(m_.adjoint()); }
  GroupElement operator*(const GroupElement& o) const { return GroupElement(m_ * o.m_); }

 private:
  explicit GroupElement(const QMatrix2& m) : m_(m) {}
  friend GroupElement exp(const class AlgebraElement& x);
  friend GroupElement haar_sample(Rng& rng);

  QMatrix2 m_;
};

using Vec10 = Eigen::Matrix<double, 10, 1>;

/// Skew-Hermitian 2x2 quaternionic matrix stored by its (p, q, h) parts:
///
///   X = ( h + q   -conj(p) )
///       (   p       h - q  )
///
/// so X_p is the off-diagonal part, X_q = diag(q, -q), X_h = diag(h, h).
/// Skew-Hermiticity holds by construction.
class AlgebraElement {
 public:
  AlgebraElement() = default;
  AlgebraElement(const Quaternion& p, const ImQuaternion& q, const ImQuaternion& h)
      : p_(p), q_(q), h_(h) {}

  /// diag(x1, x2).
  static AlgebraElement diag(const ImQuaternion& x1, const ImQuaternion& x2);
  /// Off-diagonal element with m21 = x, m12 = -conj(x).
  static AlgebraElement offdiag(const Quaternion& x);
  /// Throws std::invalid_argument if |M^* + M| exceeds tol.
  static AlgebraElement from_matrix(const QMatrix2& m, double tol = 1e-10);
  /// Raw coordinates (p.w, p.x, p.y, p.z, q.x, q.y, q.z, h.x, h.y, h.z).
  static AlgebraElement from_coords(const Vec10& c);

  const Quaternion& p() const { return p_; }
  const ImQuaternion& q() const { return q_; }
  const ImQuaternion& h() const { return h_; }
  ImQuaternion x1() const { return h_ + q_; }
  ImQuaternion x2() const { return h_ - q_; }

  AlgebraElement p_part() const { return {p_, {}, {}}; }
  AlgebraElement q_part() const { return {{}, q_, {}}; }
  AlgebraElement h_part() const { return {{}, {}, h_}; }
  AlgebraElement k_part() const { return {{}, q_, h_}; }

  QMatrix2 matrix() const;
  Vec10 coords() const;

  AlgebraElement& operator+=(const AlgebraElement& o);
  AlgebraElement& operator-=(const AlgebraElement& o);
  AlgebraElement& operator*=(double s);
  AlgebraElement operator-() const { return {-p_, -q_, -h_}; }
  bool operator==(const AlgebraElement&) const = default;

 private:
  Quaternion p_;
  ImQuaternion q_;
  ImQuaternion h_;
};

inline AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
inline AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
inline AlgebraElement operator*(AlgebraElement a, double s) { return a *= s; }
inline AlgebraElement operator*(double s, AlgebraElement a) { return a *= s; }

/// Sum of the three parts; inverse of (p_part, q_part, h_part).
inline AlgebraElement recompose(const AlgebraElement& p, const AlgebraElement& q,
                                const AlgebraElement& h) {
  return {p.p(), q.q(), h.h()};
}

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y);

/// Bi-invariant trace metric Re trace X^* Y.
double trace_inner(const AlgebraElement& x, const AlgebraElement& y);
inline double trace_norm(const AlgebraElement& x) { return std::sqrt(trace_inner(x, x)); }

/// g X g^{-1}.
AlgebraElement adjoint_action(const GroupElement& g, const AlgebraElement& x);

/// Scaling and squaring: scale to norm <= 0.5, 12 Taylor terms, square back.
GroupElement exp(const AlgebraElement& x);

/// Haar-distributed element via quaternionic Gram-Schmidt on two Gaussian
/// columns (scalars act on the right).
GroupElement haar_sample(Rng& rng);
GroupElement haar_sample(std::uint64_t seed);

/// Standard Gaussian in the (p, q, h) coordinates.
AlgebraElement gaussian_algebra(Rng& rng);

/// Element of Sp(2) with first row (a, b), |a|^2 + |b|^2 = 1.  The second
/// row is fixed up to the unit quaternion `phase`.
GroupElement group_from_first_row(const Quaternion& a, const Quaternion& b,
                                  const Quaternion& phase = Quaternion::one(),
                                  double tol = 1e-10);

/// diag(q, 1) g diag(q, q)^{-1}.  Throws std::invalid_argument unless |q| = 1.
GroupElement u_action(const Quaternion& q, const GroupElement& g);

// 16 reals, row-major entries, (w, x, y, z) per entry.
std::array<double, 16> to_reals(const GroupElement& g);
GroupElement from_reals(std::span<const double, 16> r, double tol = 1e-10);
/// Shortest round-trip decimal text, comma separated.
std::string format_reals(const GroupElement& g);
/// Accepts 16 reals separated by commas and/or whitespace, optionally in
/// brackets.  Throws std::invalid_argument on malformed or non-unitary input.
GroupElement parse_group_element(std::string_view text, double tol = 1e-10);

/// Shortest round-trip formatting of one double.
std::string format_double(double v);

}  // namespace gmsphere
