#include "gmsphere/zeroset.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gmsphere {

namespace {

constexpr double kPi = std::numbers::pi;

PlaneTemplate make_template(TemplateType type, const Quaternion& x, const ImQuaternion& y) {
  PlaneTemplate t;
  t.type = type;
  t.x = x;
  t.y = y;
  switch (type) {
    case TemplateType::Type1:
      t.tilde_x = AlgebraElement::diag({}, y);
      t.tilde_y = AlgebraElement::diag(y, {});
      break;
    case TemplateType::Type2a:
      t.tilde_x = AlgebraElement::offdiag(x);
      t.tilde_y = AlgebraElement::diag(y, conjugate_by(x, y));
      break;
    case TemplateType::Type2b:
      t.tilde_x = AlgebraElement::offdiag(Quaternion(0.0, x.x, x.y, x.z)) + AlgebraElement::diag(y, y);
      t.tilde_y = AlgebraElement::diag(y, -y);
      break;
  }
  return t;
}

// Coordinate axis least aligned with n, made orthogonal to n.
Eigen::Vector3d orthogonal_unit(const Eigen::Vector3d& n) {
  int best = 0;
  for (int c = 1; c < 3; ++c)
    if (std::abs(n[c]) < std::abs(n[best])) best = c;
  Eigen::Vector3d e = Eigen::Vector3d::Unit(best) - n[best] * n;
  return e.normalized();
}

ImQuaternion rescaled(const ImQuaternion& v, double norm) { return v * (norm / v.norm()); }

}  // namespace

std::string to_string(TemplateType t) {
  switch (t) {
    case TemplateType::Type1: return "type1";
    case TemplateType::Type2a: return "type2a";
    case TemplateType::Type2b: return "type2b";
  }
  return "unknown";
}

PlaneTemplate build_template(TemplateType type, const Quaternion& x, const ImQuaternion& y) {
  const double ny = y.norm();
  if (!(ny > 0.0)) throw std::invalid_argument("template requires y != 0");
  if (type == TemplateType::Type2a && !(x.norm() > 0.0))
    throw std::invalid_argument("type2a template requires x != 0");
  if (type == TemplateType::Type2b) {
    const double nx = x.norm();
    if (!(nx > 0.0)) throw std::invalid_argument("type2b template requires x != 0");
    if (std::abs(x.w) > 1e-10 * nx) throw std::invalid_argument("type2b template requires x imaginary");
    if (std::abs(dot(x.imag(), y)) > 1e-10 * nx * ny)
      throw std::invalid_argument("type2b template requires x orthogonal to y");
  }
  return make_template(type, x, y);
}

double det_condition(const Quaternion& a, const Quaternion& b) {
  if (a.norm2() == 0.0 || b.norm2() == 0.0)
    throw std::invalid_argument("det_condition requires a, b != 0");
  const Rotation3 m = Rotation3::Identity() - ad_rotation(a.inverse()) - ad_rotation(b.inverse());
  return m.determinant();
}

namespace fault {
namespace {
std::atomic<bool> flip_w{false};
}
void set_flip_w_condition(bool on) { flip_w = on; }
bool flip_w_condition() { return flip_w; }
}  // namespace fault

WCondition w_condition(const Quaternion& a, const Quaternion& b) {
  if (a.norm2() == 0.0) throw std::invalid_argument("w_condition requires a != 0");
  const Quaternion ai = a.inverse();
  const ImQuaternion w = (ai * b).imag();
  const ImQuaternion rotated = conjugate_by(ai, w);
  const double sign = fault::flip_w_condition() ? -1.0 : 1.0;
  return {w, dot(w - sign * 2.0 * rotated, w)};
}

double nowhere_horizontal_residual(const GroupElement& g, const ImQuaternion& y) {
  const Quaternion yq = y.quat();
  const Quaternion& a = g.a();
  const Quaternion& b = g.b();
  const double ra = (a * yq * a.conj() - yq).norm();
  const double rb = (b * yq * b.conj() - yq).norm();
  return std::max(ra, rb);
}

ImQuaternion vector_rotated_by(const Quaternion& r, double angle, double azimuth) {
  const double theta = rotation_angle(r);
  Eigen::Vector3d n = r.imag().vec();
  if (n.norm() == 0.0) n = Eigen::Vector3d::UnitX();
  n.normalize();
  const double denom = 1.0 - std::cos(theta);
  double sin2 = denom > 0.0 ? (1.0 - std::cos(angle)) / denom : 1.0;
  sin2 = std::min(1.0, std::max(0.0, sin2));
  const double sphi = std::sqrt(sin2), cphi = std::sqrt(1.0 - sin2);
  const Eigen::Vector3d e1 = orthogonal_unit(n);
  const Eigen::Vector3d e2 = n.cross(e1);
  const Eigen::Vector3d e = std::cos(azimuth) * e1 + std::sin(azimuth) * e2;
  return ImQuaternion(Eigen::Vector3d(cphi * n + sphi * e));
}

ZClassification classify(const GroupElement& g, double tol) {
  if (!(unitarity_residual(g.matrix()) <= 1e-8))
    throw std::invalid_argument("classify: g is not unitary");
  const Quaternion &a = g.a(), &b = g.b();
  ZClassification out;
  ZResiduals& r = out.residuals;
  r.a_norm = a.norm();
  r.b_norm = b.norm();
  r.c_norm = g.c().norm();
  r.d_norm = g.d().norm();
  r.norm_gap = r.a_norm - r.b_norm;
  r.half_gap = r.a_norm - 1.0 / std::sqrt(2.0);
  const double im_a = a.imag().norm(), im_b = b.imag().norm();
  r.im_a_ratio_margin = im_a - 0.5 * r.a_norm;
  r.im_a_margin = im_a - 0.5;
  r.im_b_margin = im_b - 0.5;

  const bool a_nonzero = r.a_norm > tol, b_nonzero = r.b_norm > tol;
  if (a_nonzero && b_nonzero) r.det = det_condition(a, b);
  double w_normalized = 0.0;
  if (a_nonzero) {
    const WCondition wc = w_condition(a, b);
    r.w_value = wc.value;
    r.w_norm = wc.w.norm();
    if (r.w_norm > tol) w_normalized = wc.value / (r.w_norm * r.w_norm);
  }

  out.z1 = a_nonzero && b_nonzero && std::abs(r.det) <= tol;
  out.z2 = a_nonzero && std::abs(r.norm_gap) <= tol && std::abs(r.half_gap) <= tol &&
           r.im_a_ratio_margin >= -tol && (r.w_norm <= tol || std::abs(w_normalized) <= tol);
  out.z3 = r.b_norm <= tol && r.c_norm <= tol && r.im_a_margin >= -tol;
  out.z4 = r.a_norm <= tol && r.d_norm <= tol && r.im_b_margin >= -tol;
  return out;
}

ZWitness evaluate_witness(int piece, const PlaneTemplate& plane, const GroupElement& g,
                          const CheegerGeometry& geo) {
  ZWitness w;
  w.piece = piece;
  w.plane = plane;
  w.g = g;
  const MetricParams& m = geo.params();
  AlgebraElement x = plane.x_vector(m), y = plane.y_vector(m);
  x *= 1.0 / std::sqrt(inner2(x, x, m));
  y *= 1.0 / std::sqrt(inner2(y, y, m));
  const VerticalFrame vf = vertical_basis(g);
  double worst = 0.0;
  for (const auto& v : vf.v) {
    worst = std::max(worst, std::abs(inner2(x, v, m)));
    worst = std::max(worst, std::abs(inner2(y, v, m)));
  }
  w.horizontality = worst;
  w.kappa = geo.sec(x, y);
  return w;
}

ZWitness construct_witness(int piece, const GroupElement& g, const CheegerGeometry& geo) {
  const Quaternion &a = g.a(), &b = g.b();
  PlaneTemplate plane;
  switch (piece) {
    case 3: {
      const ImQuaternion y = vector_rotated_by(a, kPi / 3.0);
      const ImQuaternion u = conjugate_by(a, y) - y;
      const Quaternion x = solve_rotation_mapping(y, rescaled(u, y.norm()));
      plane = make_template(TemplateType::Type2a, x, y);
      break;
    }
    case 4: {
      const ImQuaternion z = vector_rotated_by(b, kPi / 3.0);
      const ImQuaternion y = conjugate_by(b, z) - z;
      const Quaternion x = solve_rotation_mapping(rescaled(y, z.norm()), z);
      plane = make_template(TemplateType::Type2a, x, y);
      break;
    }
    case 1: {
      const Rotation3 m =
          Rotation3::Identity() - ad_rotation(a.inverse()) - ad_rotation(b.inverse());
      Eigen::JacobiSVD<Eigen::Matrix3d> svd(Eigen::Matrix3d(m), Eigen::ComputeFullV);
      const ImQuaternion w(Eigen::Vector3d(svd.matrixV().col(2)));
      const ImQuaternion y = conjugate_by(a.inverse(), w);
      plane = make_template(TemplateType::Type2a, b.inverse() * a, y);
      break;
    }
    case 2: {
      const Quaternion ai = a.inverse();
      const Quaternion pt = ai * b;
      const ImQuaternion w = pt.imag();
      const ImQuaternion y =
          w.norm() > kDefaultZTol ? w * (1.0 / w.norm()) : vector_rotated_by(ai, kPi / 3.0);
      const ImQuaternion z = 2.0 * conjugate_by(ai, y) - y;
      const Quaternion p = pt * (1.0 / geo.params().s_tilde);
      const Quaternion x = p.inverse() * z.quat();
      plane = make_template(TemplateType::Type2b, x.imag().quat(), y);
      break;
    }
    default: throw std::invalid_argument("construct_witness: piece must be 1..4");
  }
  return evaluate_witness(piece, plane, g, geo);
}

std::optional<ZWitness> construct_zero_horizontal_plane(const GroupElement& g,
                                                        const CheegerGeometry& geo, double tol) {
  const ZClassification c = classify(g, tol);
  if (!c.any()) return std::nullopt;
  const int piece = c.z3 ? 3 : c.z4 ? 4 : c.z1 ? 1 : 2;
  ZWitness w = construct_witness(piece, g, geo);
  // Residuals scale with the classification slack; 1e-8 and 1e-9 are the
  // targets for points on Z up to rounding.
  const double slack = std::max(1.0, tol / kDefaultZTol);
  if (!(w.horizontality < 1e-8 * slack) || !(w.kappa < 1e-9 * slack))
    throw std::runtime_error("zero-plane construction failed for Z" + std::to_string(piece) +
                             ": horizontality " + format_double(w.horizontality) + ", kappa " +
                             format_double(w.kappa));
  return w;
}

namespace {

Quaternion unit_with_large_imaginary(Rng& rng) {
  for (;;) {
    const Quaternion q = random_unit_quaternion(rng);
    if (q.imag().norm() >= 0.5) return q;
  }
}

}  // namespace

GroupElement sample_z1_point(Rng& rng) {
  for (;;) {
    const Quaternion b = random_unit_quaternion(rng);
    Quaternion far = random_unit_quaternion(rng);
    int tries = 0;
    while (det_condition(far, b) <= 0.0 && tries++ < 64) far = random_unit_quaternion(rng);
    if (det_condition(far, b) <= 0.0) continue;
    auto path = [&](double tau) { return (Quaternion::one() * (1.0 - tau) + far * tau); };
    auto f = [&](double tau) { return det_condition(path(tau), b); };
    // det(-Ad(b^-1)) = -1 at tau = 0.
    double lo = 0.0, hi = 1.0;
    constexpr int kScan = 64;
    for (int s = 1; s <= kScan; ++s) {
      const double tau = static_cast<double>(s) / kScan;
      if (path(tau).norm2() < 1e-12) continue;
      if (f(tau) > 0.0) {
        hi = tau;
        lo = static_cast<double>(s - 1) / kScan;
        break;
      }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) > 0.0 ? hi : lo) = mid;
    }
    const double tau = std::abs(f(lo)) < std::abs(f(hi)) ? lo : hi;
    const Quaternion a_dir = path(tau).normalized();
    const double alpha = uniform(rng, 0.1, kPi / 2.0 - 0.1);
    const Quaternion phase = random_unit_quaternion(rng);
    return group_from_first_row(a_dir * std::cos(alpha), b * std::sin(alpha), phase);
  }
}

GroupElement sample_z2_point(Rng& rng) {
  const Quaternion a = unit_with_large_imaginary(rng) * (1.0 / std::sqrt(2.0));
  const double branch = uniform(rng, 0.0, 1.0);
  Quaternion pt;
  if (branch < 0.2) {
    pt = Quaternion(branch < 0.1 ? 1.0 : -1.0);
  } else {
    const double azimuth = uniform(rng, 0.0, 2.0 * kPi);
    const ImQuaternion n = vector_rotated_by(a.inverse(), kPi / 3.0, azimuth);
    const double phi = uniform(rng, 0.2, kPi - 0.2);
    pt = Quaternion(std::cos(phi), 0.0, 0.0, 0.0) + n.quat() * std::sin(phi);
  }
  const Quaternion phase = random_unit_quaternion(rng);
  return group_from_first_row(a, a * pt, phase);
}

GroupElement sample_z3_point(Rng& rng) {
  const Quaternion a = unit_with_large_imaginary(rng);
  const Quaternion d = random_unit_quaternion(rng);
  return GroupElement::diag(a, d);
}

GroupElement sample_z4_point(Rng& rng) {
  const Quaternion b = unit_with_large_imaginary(rng);
  const Quaternion c = random_unit_quaternion(rng);
  return GroupElement::from_matrix({Quaternion(), b, c, Quaternion()});
}

GroupElement sample_z_point(int piece, Rng& rng) {
  switch (piece) {
    case 1: return sample_z1_point(rng);
    case 2: return sample_z2_point(rng);
    case 3: return sample_z3_point(rng);
    case 4: return sample_z4_point(rng);
    default: throw std::invalid_argument("sample_z_point: piece must be 1..4");
  }
}

}  // namespace gmsphere
