#include "gmsphere/cheeger.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gmsphere {

void MetricParams::validate() const {
  if (!(s_tilde > 0.0 && s_tilde <= 1.0))
    throw std::invalid_argument("s_tilde must lie in (0, 1], got " + format_double(s_tilde));
  if (!(t_tilde > 0.0 && t_tilde <= 1.0))
    throw std::invalid_argument("t_tilde must lie in (0, 1], got " + format_double(t_tilde));
}

MetricParams MetricParams::make(double s_tilde, double t_tilde) {
  MetricParams m{s_tilde, t_tilde};
  m.validate();
  return m;
}

MetricParams MetricParams::from_contraction(double s, double t) {
  if (!(s > 0.0) || !(t > 0.0)) throw std::invalid_argument("contraction parameters must be > 0");
  return make(s / (s + 1.0), t / (t + 1.0));
}

double inner1(const AlgebraElement& x, const AlgebraElement& y, const MetricParams& m) {
  return 2.0 * (dot(x.p(), y.p()) + m.s_tilde * (dot(x.q(), y.q()) + dot(x.h(), y.h())));
}

double inner2(const AlgebraElement& x, const AlgebraElement& y, const MetricParams& m) {
  return 2.0 * (dot(x.p(), y.p()) + m.s_tilde * dot(x.q(), y.q()) +
                m.s_tilde * m.t_tilde * dot(x.h(), y.h()));
}

AlgebraElement tilde(const AlgebraElement& x, double t_tilde) {
  if (!(t_tilde > 0.0)) throw std::invalid_argument("tilde requires t_tilde > 0");
  return {x.p(), x.q(), x.h() * t_tilde};
}

AlgebraElement untilde(const AlgebraElement& x, double t_tilde) {
  if (!(t_tilde > 0.0)) throw std::invalid_argument("untilde requires t_tilde > 0");
  const ImQuaternion h = x.h();
  return {x.p(), x.q(), {h.x / t_tilde, h.y / t_tilde, h.z / t_tilde}};
}

CheegerGeometry::CheegerGeometry(const MetricParams& m)
    : params_(m), structure_(1000, 0.0), christoffel_(1000, 0.0) {
  params_.validate();
  scale_ = {std::sqrt(2.0), std::sqrt(2.0 * m.s_tilde), std::sqrt(2.0 * m.s_tilde * m.t_tilde)};

  auto& frame = tensor_.frame;
  const Quaternion units[4] = {Quaternion::one(), Quaternion::i(), Quaternion::j(), Quaternion::k()};
  for (int u = 0; u < 4; ++u) frame[u] = AlgebraElement::offdiag(units[u] * (1.0 / scale_[0]));
  for (int u = 0; u < 3; ++u) {
    const ImQuaternion v = units[u + 1].imag();
    frame[4 + u] = AlgebraElement({}, v * (1.0 / scale_[1]), {});
    frame[7 + u] = AlgebraElement({}, {}, v * (1.0 / scale_[2]));
  }

  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b) {
      const Vec10 c = to_frame(gmsphere::bracket(frame[a], frame[b]));
      for (int k = 0; k < 10; ++k) structure_[(a * 10 + b) * 10 + k] = c[k];
    }

  // Koszul: 2<nabla_a e_b, e_c> = C_abc - C_bca + C_cab.
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b)
      for (int c = 0; c < 10; ++c)
        christoffel_[(a * 10 + b) * 10 + c] =
            0.5 * (structure(a, b, c) - structure(b, c, a) + structure(c, a, b));

  // R_abcd = sum_e (G_bce G_aed - G_ace G_bed) - sum_f C_abf G_fcd.
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b)
      for (int c = 0; c < 10; ++c)
        for (int d = 0; d < 10; ++d) {
          double s = 0.0;
          for (int e = 0; e < 10; ++e) {
            s += christoffel(b, c, e) * christoffel(a, e, d) -
                 christoffel(a, c, e) * christoffel(b, e, d);
            s -= structure(a, b, e) * christoffel(e, c, d);
          }
          tensor_(a, b, c, d) = s;
        }
}

Vec10 CheegerGeometry::to_frame(const AlgebraElement& x) const {
  const Quaternion& p = x.p();
  const ImQuaternion& q = x.q();
  const ImQuaternion& h = x.h();
  Vec10 c;
  c << scale_[0] * p.w, scale_[0] * p.x, scale_[0] * p.y, scale_[0] * p.z, scale_[1] * q.x,
      scale_[1] * q.y, scale_[1] * q.z, scale_[2] * h.x, scale_[2] * h.y, scale_[2] * h.z;
  return c;
}

AlgebraElement CheegerGeometry::from_frame(const Vec10& c) const {
  const double s0 = 1.0 / scale_[0], s1 = 1.0 / scale_[1], s2 = 1.0 / scale_[2];
  return {Quaternion(c[0] * s0, c[1] * s0, c[2] * s0, c[3] * s0),
          ImQuaternion(c[4] * s1, c[5] * s1, c[6] * s1),
          ImQuaternion(c[7] * s2, c[8] * s2, c[9] * s2)};
}

Vec10 CheegerGeometry::bracket(const Vec10& x, const Vec10& y) const {
  Vec10 out = Vec10::Zero();
  for (int a = 0; a < 10; ++a) {
    if (x[a] == 0.0) continue;
    for (int b = 0; b < 10; ++b) {
      const double w = x[a] * y[b];
      if (w == 0.0) continue;
      const double* row = &structure_[(a * 10 + b) * 10];
      for (int c = 0; c < 10; ++c) out[c] += w * row[c];
    }
  }
  return out;
}

Vec10 CheegerGeometry::nabla(const Vec10& x, const Vec10& y) const {
  Vec10 out = Vec10::Zero();
  for (int a = 0; a < 10; ++a) {
    if (x[a] == 0.0) continue;
    for (int b = 0; b < 10; ++b) {
      const double w = x[a] * y[b];
      if (w == 0.0) continue;
      const double* row = &christoffel_[(a * 10 + b) * 10];
      for (int c = 0; c < 10; ++c) out[c] += w * row[c];
    }
  }
  return out;
}

AlgebraElement CheegerGeometry::nabla(const AlgebraElement& x, const AlgebraElement& y) const {
  return from_frame(nabla(to_frame(x), to_frame(y)));
}

double CheegerGeometry::kappa(const Vec10& x, const Vec10& y) const {
  const Vec10 yy = nabla(y, y);
  const Vec10 xy = nabla(x, y);
  const Vec10 rxy = nabla(x, yy) - nabla(y, xy) - nabla(bracket(x, y), y);
  return rxy.dot(x);
}

double CheegerGeometry::kappa_from_tensor(const Vec10& x, const Vec10& y) const {
  double s = 0.0;
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b) {
      const double xy = x[a] * y[b];
      if (xy == 0.0) continue;
      for (int c = 0; c < 10; ++c) {
        const double* row = &tensor_.r[((a * 10 + b) * 10 + c) * 10];
        double t = 0.0;
        for (int d = 0; d < 10; ++d) t += row[d] * x[d];
        s += xy * y[c] * t;
      }
    }
  return s;
}

double CheegerGeometry::kappa(const AlgebraElement& x, const AlgebraElement& y) const {
  return kappa(to_frame(x), to_frame(y));
}

double CheegerGeometry::sec(const AlgebraElement& x, const AlgebraElement& y) const {
  const Vec10 fx = to_frame(x), fy = to_frame(y);
  const double xx = fx.squaredNorm(), yy = fy.squaredNorm(), xy = fx.dot(fy);
  const double gram = xx * yy - xy * xy;
  if (!(gram > 1e-12 * xx * yy) || gram <= 0.0)
    throw std::invalid_argument("sec: degenerate plane");
  return kappa(fx, fy) / gram;
}

double kappa_G(const AlgebraElement& x, const AlgebraElement& y, const MetricParams& m) {
  return CheegerGeometry(m).kappa(x, y);
}

double sec_G(const AlgebraElement& x, const AlgebraElement& y, const MetricParams& m) {
  return CheegerGeometry(m).sec(x, y);
}

double BracketResiduals::max() const {
  return std::max({tilde_bracket, k_bracket, p_bracket, q_bracket, h_bracket});
}

BracketResiduals zero_bracket_residuals(const AlgebraElement& x, const AlgebraElement& y,
                                        const MetricParams& m) {
  const AlgebraElement tx = tilde(x, m.t_tilde), ty = tilde(y, m.t_tilde);
  BracketResiduals r;
  r.tilde_bracket = trace_norm(bracket(tx, ty));
  r.k_bracket = trace_norm(bracket(tx.k_part(), ty.k_part()));
  r.p_bracket = trace_norm(bracket(x.p_part(), y.p_part()));
  r.q_bracket = trace_norm(bracket(x.q_part(), y.q_part()));
  r.h_bracket = trace_norm(bracket(x.h_part(), y.h_part()));
  return r;
}

double cheeger_split_discrepancy(const AlgebraElement& x, const AlgebraElement& y,
                                 const MetricParams& m) {
  if (m.t_tilde != 1.0 || !(m.s_tilde < 1.0))
    throw std::invalid_argument("cheeger_split_discrepancy needs t~ = 1 and s~ < 1");
  const double st = m.s_tilde;
  const double s = st / (1.0 - st);
  auto phi = [st](const AlgebraElement& v) { return v.p_part() + v.k_part() * st; };
  const AlgebraElement tx = phi(x), ty = phi(y);
  const double top = 0.25 * trace_inner(bracket(tx, ty), bracket(tx, ty));
  const AlgebraElement kb = bracket(tx.k_part(), ty.k_part());
  const double fib = 0.25 * trace_inner(kb, kb) / (s * s * s);
  return kappa_G(x, y, m) - (top + fib);
}

}  // namespace gmsphere
