#include "gmsphere/quat.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace gmsphere {

Quaternion Quaternion::inverse() const {
  const double n2 = norm2();
  if (n2 == 0.0) throw std::domain_error("inverse of zero quaternion");
  return conj() * (1.0 / n2);
}

Quaternion Quaternion::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::domain_error("normalizing zero quaternion");
  return *this * (1.0 / n);
}

std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
  return os << '(' << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ')';
}

std::ostream& operator<<(std::ostream& os, const ImQuaternion& v) {
  return os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
}

Rotation3 ad_rotation(const Quaternion& q) {
  const double n2 = q.norm2();
  if (n2 == 0.0) throw std::domain_error("ad_rotation of zero quaternion");
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  const double s = 1.0 / n2;
  Rotation3 r;
  r << (w * w + x * x - y * y - z * z) * s, 2.0 * (x * y - w * z) * s, 2.0 * (x * z + w * y) * s,
      2.0 * (x * y + w * z) * s, (w * w - x * x + y * y - z * z) * s, 2.0 * (y * z - w * x) * s,
      2.0 * (x * z - w * y) * s, 2.0 * (y * z + w * x) * s, (w * w - x * x - y * y + z * z) * s;
  return r;
}

ImQuaternion conjugate_by(const Quaternion& q, const ImQuaternion& v) {
  return ImQuaternion(Eigen::Vector3d(ad_rotation(q) * v.vec()));
}

double rotation_angle(const Quaternion& q) {
  if (q.norm2() == 0.0) throw std::domain_error("rotation_angle of zero quaternion");
  return 2.0 * std::atan2(q.imag().norm(), std::abs(q.w));
}

namespace {

// Half-way construction; well conditioned while <y,u> >= 0.
Quaternion halfway(const ImQuaternion& y, const ImQuaternion& u) {
  const ImQuaternion axis = cross(y, u);
  return Quaternion(y.norm() * u.norm() + dot(y, u), axis.x, axis.y, axis.z).normalized();
}

}  // namespace

Quaternion solve_rotation_mapping(const ImQuaternion& y, const ImQuaternion& u) {
  const double ny = y.norm(), nu = u.norm();
  if (ny == 0.0 || nu == 0.0) throw std::invalid_argument("solve_rotation_mapping: zero vector");
  if (std::abs(ny - nu) > 1e-9 * std::max(1.0, std::max(ny, nu)))
    throw std::invalid_argument("solve_rotation_mapping: |y| != |u|");
  if (dot(y, u) >= 0.0) return halfway(y, u);

  // Flip y to -y by a half turn about an axis orthogonal to y, then finish
  // with the well-conditioned half-way rotation from -y to u.
  const Eigen::Vector3d yv = y.vec() / ny;
  int best = 0;
  for (int c = 1; c < 3; ++c)
    if (std::abs(yv[c]) < std::abs(yv[best])) best = c;
  Eigen::Vector3d n = Eigen::Vector3d::Unit(best) - yv[best] * yv;
  n.normalize();
  const Quaternion flip(0.0, n.x(), n.y(), n.z());
  return (halfway(-y, u) * flip).normalized();
}

}  // namespace gmsphere
