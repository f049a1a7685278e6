#pragma once

// Quaternion arithmetic and the conjugation action of H^* on Im H.

#include <Eigen/Core>
#include <cmath>
#include <iosfwd>

namespace gmsphere {

struct ImQuaternion;

/// q = w + x i + y j + z k.  No implicit normalization anywhere.
struct Quaternion {
  double w = 0.0, x = 0.0, y = 0.0, z = 0.0;

  constexpr Quaternion() = default;
  constexpr Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}
  constexpr explicit Quaternion(double real) : w(real) {}

  static constexpr Quaternion one() { return {1.0, 0.0, 0.0, 0.0}; }
  static constexpr Quaternion i() { return {0.0, 1.0, 0.0, 0.0}; }
  static constexpr Quaternion j() { return {0.0, 0.0, 1.0, 0.0}; }
  static constexpr Quaternion k() { return {0.0, 0.0, 0.0, 1.0}; }

  constexpr double real() const { return w; }
  ImQuaternion imag() const;

  constexpr Quaternion conj() const { return {w, -x, -y, -z}; }
  constexpr double norm2() const { return w * w + x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
  /// Throws std::domain_error for the zero quaternion.
  Quaternion inverse() const;
  /// Throws std::domain_error for the zero quaternion.
  Quaternion normalized() const;

  constexpr Quaternion operator-() const { return {-w, -x, -y, -z}; }
  constexpr Quaternion& operator+=(const Quaternion& o) {
    w += o.w; x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Quaternion& operator-=(const Quaternion& o) {
    w -= o.w; x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Quaternion& operator*=(double s) {
    w *= s; x *= s; y *= s; z *= s;
    return *this;
  }

  constexpr bool operator==(const Quaternion&) const = default;
};

constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
constexpr Quaternion operator*(Quaternion a, double s) { return a *= s; }
constexpr Quaternion operator*(double s, Quaternion a) { return a *= s; }
constexpr Quaternion operator/(Quaternion a, double s) { return a *= (1.0 / s); }

// Hamilton product.
constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline Quaternion mul(const Quaternion& a, const Quaternion& b) { return a * b; }

/// Euclidean inner product on H = R^4, equal to Re(conj(a) b).
constexpr double dot(const Quaternion& a, const Quaternion& b) {
  return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

/// Purely imaginary quaternion, identified with a vector of R^3.
struct ImQuaternion {
  double x = 0.0, y = 0.0, z = 0.0;

  constexpr ImQuaternion() = default;
  constexpr ImQuaternion(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
  explicit ImQuaternion(const Eigen::Vector3d& v) : x(v.x()), y(v.y()), z(v.z()) {}

  constexpr Quaternion quat() const { return {0.0, x, y, z}; }
  Eigen::Vector3d vec() const { return {x, y, z}; }
  constexpr double norm2() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }

  constexpr ImQuaternion operator-() const { return {-x, -y, -z}; }
  constexpr ImQuaternion& operator+=(const ImQuaternion& o) {
    x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr ImQuaternion& operator-=(const ImQuaternion& o) {
    x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr ImQuaternion& operator*=(double s) {
    x *= s; y *= s; z *= s;
    return *this;
  }
  constexpr bool operator==(const ImQuaternion&) const = default;
};

constexpr ImQuaternion operator+(ImQuaternion a, const ImQuaternion& b) { return a += b; }
constexpr ImQuaternion operator-(ImQuaternion a, const ImQuaternion& b) { return a -= b; }
constexpr ImQuaternion operator*(ImQuaternion a, double s) { return a *= s; }
constexpr ImQuaternion operator*(double s, ImQuaternion a) { return a *= s; }
constexpr double dot(const ImQuaternion& a, const ImQuaternion& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
constexpr ImQuaternion cross(const ImQuaternion& a, const ImQuaternion& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline ImQuaternion Quaternion::imag() const { return {x, y, z}; }

std::ostream& operator<<(std::ostream& os, const Quaternion& q);
std::ostream& operator<<(std::ostream& os, const ImQuaternion& v);

using Rotation3 = Eigen::Matrix<double, 3, 3, Eigen::RowMajor>;

/// Matrix of v -> q v q^{-1} on Im H.  Independent of |q|.
/// Throws std::domain_error when q = 0.
Rotation3 ad_rotation(const Quaternion& q);

/// q v q^{-1} without forming the matrix.
ImQuaternion conjugate_by(const Quaternion& q, const ImQuaternion& v);

/// Rotation angle of Ad(q) in [0, pi]; q and -q agree.
/// Throws std::domain_error when q = 0.
double rotation_angle(const Quaternion& q);

/// Unit quaternion x with x y x^{-1} = u.  Requires |y| = |u| > 0 (relative
/// tolerance 1e-9).  For u = -y the rotation is by pi about the coordinate
/// axis least aligned with y, projected orthogonal to y.
Quaternion solve_rotation_mapping(const ImQuaternion& y, const ImQuaternion& u);

}  // namespace gmsphere
