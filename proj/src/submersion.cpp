#include "gmsphere/submersion.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

namespace gmsphere {

namespace {

const ImQuaternion kUnits[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

// g^{-1} diag(v, 0) g.
AlgebraElement lifted_generator(const GroupElement& g, const ImQuaternion& v) {
  const QMatrix2& m = g.matrix();
  const QMatrix2 e(v.quat(), Quaternion(), Quaternion(), Quaternion());
  return AlgebraElement::from_matrix(m.adjoint() * e * m, 1e300);
}

// Modified Gram-Schmidt: cols = on * r with r upper triangular.
void orthonormalize(const Mat10x3& cols, Mat10x3& on, Eigen::Matrix3d& r) {
  r.setZero();
  on = cols;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < j; ++i) {
      r(i, j) = on.col(i).dot(on.col(j));
      on.col(j) -= r(i, j) * on.col(i);
    }
    // Reorthogonalize once; the columns can be far from orthogonal.
    for (int i = 0; i < j; ++i) {
      const double c = on.col(i).dot(on.col(j));
      r(i, j) += c;
      on.col(j) -= c * on.col(i);
    }
    r(j, j) = on.col(j).norm();
    if (!(r(j, j) > 1e-12)) throw std::logic_error("vertical frame is rank deficient");
    on.col(j) /= r(j, j);
  }
}

Mat10x3 vertical_orthonormal_at(const CheegerGeometry& geo, const GroupElement& g) {
  const VerticalFrame vf = vertical_basis(g);
  Mat10x3 cols;
  for (int j = 0; j < 3; ++j) cols.col(j) = geo.to_frame(vf.v[j]);
  Mat10x3 on;
  Eigen::Matrix3d r;
  orthonormalize(cols, on, r);
  return on;
}

}  // namespace

VerticalFrame vertical_basis(const GroupElement& g) {
  const double res = unitarity_residual(g.matrix());
  if (!(res <= 1e-8)) throw std::invalid_argument("vertical_basis: g is not unitary");
  VerticalFrame vf{g, {}};
  for (int j = 0; j < 3; ++j)
    vf.v[j] = lifted_generator(g, kUnits[j]) - AlgebraElement({}, {}, kUnits[j]);
  return vf;
}

double QuarticForm::value(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  const Eigen::MatrixXd xx = x * x.transpose();
  const Eigen::MatrixXd yy = y * y.transpose();
  const Eigen::Map<const Eigen::VectorXd> vx(xx.data(), n * n);
  const Eigen::Map<const Eigen::VectorXd> vy(yy.data(), n * n);
  return vx.dot(s * vy);
}

QuarticForm QuarticForm::from_kappa_layout(int n, const std::vector<double>& t) {
  auto at = [&](int a, int b, int c, int d) { return t[((a * n + b) * n + c) * n + d]; };
  QuarticForm f;
  f.n = n;
  f.s.resize(n * n, n * n);
  for (int a = 0; a < n; ++a)
    for (int d = 0; d < n; ++d)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          // x_a x_d y_b y_c: T(a,b,c,d); pair swap gives T(b,a,d,c).
          const double v = at(a, b, c, d) + at(d, b, c, a) + at(a, c, b, d) + at(d, c, b, a) +
                           at(b, a, d, c) + at(c, a, d, b) + at(b, d, a, c) + at(c, d, a, b);
          f.s(a * n + d, b * n + c) = v / 8.0;
        }
  return f;
}

HorizontalSpace::HorizontalSpace(const CheegerGeometry& geo, const GroupElement& g)
    : geo_(&geo), g_(g), vertical_(vertical_basis(g)) {
  for (int j = 0; j < 3; ++j) {
    vertical_coords_.col(j) = geo.to_frame(vertical_.v[j]);
    lifted_[j] = geo.to_frame(lifted_generator(g, kUnits[j]));
  }
  Eigen::Matrix3d r;
  orthonormalize(vertical_coords_, vertical_on_, r);
  r_inv_t_ = r.inverse().transpose();

  // Pivoted Gram-Schmidt on the projected canonical frame.
  Eigen::Matrix<double, 10, 10> cand =
      Eigen::Matrix<double, 10, 10>::Identity() - vertical_on_ * vertical_on_.transpose();
  bool used[10] = {};
  for (int k = 0; k < 7; ++k) {
    int best = -1;
    double best_norm = -1.0;
    for (int c = 0; c < 10; ++c) {
      if (used[c]) continue;
      const double nn = cand.col(c).norm();
      if (nn > best_norm) {
        best_norm = nn;
        best = c;
      }
    }
    used[best] = true;
    Vec10 e = cand.col(best) / best_norm;
    // Clean against the vertical space and previous basis vectors.
    e -= vertical_on_ * (vertical_on_.transpose() * e);
    for (int i = 0; i < k; ++i) e -= basis_.col(i).dot(e) * basis_.col(i);
    e.normalize();
    basis_.col(k) = e;
    for (int c = 0; c < 10; ++c)
      if (!used[c]) cand.col(c) -= e.dot(cand.col(c)) * e;
  }
}

AlgebraElement HorizontalSpace::basis_element(int i) const {
  return geo_->from_frame(basis_.col(i));
}

Vec10 HorizontalSpace::vertical_part(const Vec10& x) const {
  return vertical_on_ * (vertical_on_.transpose() * x);
}

Vec10 HorizontalSpace::project(const Vec10& x) const { return x - vertical_part(x); }

AlgebraElement HorizontalSpace::project(const AlgebraElement& x) const {
  return geo_->from_frame(project(geo_->to_frame(x)));
}

std::array<double, 3> HorizontalSpace::residual(const AlgebraElement& x) const {
  std::array<double, 3> r{};
  for (int j = 0; j < 3; ++j) r[j] = inner2(x, vertical_.v[j], geo_->params());
  return r;
}

Vec10 HorizontalSpace::a_tensor(const Vec10& x, const Vec10& y) const {
  const Vec10 nab = geo_->nabla(x, y);
  Eigen::Vector3d t;
  for (int j = 0; j < 3; ++j) t[j] = geo_->bracket(lifted_[j], x).dot(y);
  return vertical_part(nab) - vertical_on_ * (r_inv_t_ * t);
}

Vec10 HorizontalSpace::a_tensor_fd(const Vec10& x, const Vec10& y, double step) const {
  const AlgebraElement xa = geo_->from_frame(x);
  auto projected_at = [&](double tau) {
    const Mat10x3 on = vertical_orthonormal_at(*geo_, g_ * exp(xa * tau));
    return Vec10(y - on * (on.transpose() * y));
  };
  auto central = [&](double h) { return Vec10((projected_at(h) - projected_at(-h)) / (2.0 * h)); };
  const Vec10 d = (4.0 * central(0.5 * step) - central(step)) / 3.0;
  return vertical_part(geo_->nabla(x, y) + d);
}

QuarticForm HorizontalSpace::kappa_form() const {
  constexpr int N = 10, n = 7;
  const auto& r = geo_->curvature().r;
  // Contract one index at a time: T[a][b][c][d] = sum R[A][B][C][D] H_Aa H_Bb H_Cc H_Dd.
  std::vector<double> t1(n * N * N * N, 0.0), t2(n * n * N * N, 0.0), t3(n * n * n * N, 0.0),
      t4(n * n * n * n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int A = 0; A < N; ++A) {
      const double h = basis_(A, a);
      if (h == 0.0) continue;
      for (int rest = 0; rest < N * N * N; ++rest) t1[a * N * N * N + rest] += h * r[A * N * N * N + rest];
    }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int B = 0; B < N; ++B) {
        const double h = basis_(B, b);
        if (h == 0.0) continue;
        for (int rest = 0; rest < N * N; ++rest)
          t2[(a * n + b) * N * N + rest] += h * t1[(a * N + B) * N * N + rest];
      }
  for (int ab = 0; ab < n * n; ++ab)
    for (int c = 0; c < n; ++c)
      for (int C = 0; C < N; ++C) {
        const double h = basis_(C, c);
        if (h == 0.0) continue;
        for (int D = 0; D < N; ++D) t3[(ab * n + c) * N + D] += h * t2[(ab * N + C) * N + D];
      }
  for (int abc = 0; abc < n * n * n; ++abc)
    for (int d = 0; d < n; ++d) {
      double s = 0.0;
      for (int D = 0; D < N; ++D) s += basis_(D, d) * t3[abc * N + D];
      t4[abc * n + d] = s;
    }
  return QuarticForm::from_kappa_layout(n, t4);
}

QuarticForm HorizontalSpace::oneill_form() const {
  constexpr int n = 7;
  QuarticForm f = kappa_form();
  // A^k_ab in the orthonormal vertical basis.
  std::array<Eigen::Matrix<double, 7, 7>, 3> comp;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Vec10 av = a_tensor(basis_.col(a), basis_.col(b));
      const Eigen::Vector3d c = vertical_on_.transpose() * av;
      for (int k = 0; k < 3; ++k) comp[k](a, b) = c[k];
    }
  std::vector<double> t(n * n * n * n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double s = 0.0;
          for (int k = 0; k < 3; ++k) s += comp[k](a, b) * comp[k](d, c);
          t[((a * n + b) * n + c) * n + d] = 3.0 * s;
        }
  f.s += QuarticForm::from_kappa_layout(n, t).s;
  return f;
}

double HorizontalSpace::sec_G(const AlgebraElement& x, const AlgebraElement& y) const {
  return geo_->sec(x, y);
}

double HorizontalSpace::sec_M(const AlgebraElement& x, const AlgebraElement& y) const {
  const Vec10 fx = geo_->to_frame(x), fy = geo_->to_frame(y);
  if ((vertical_on_.transpose() * fx).norm() > 1e-9 * std::max(1.0, fx.norm()) ||
      (vertical_on_.transpose() * fy).norm() > 1e-9 * std::max(1.0, fy.norm()))
    throw std::invalid_argument("sec_M: vectors are not horizontal");
  const double xx = fx.squaredNorm(), yy = fy.squaredNorm(), xy = fx.dot(fy);
  const double gram = xx * yy - xy * xy;
  if (!(gram > 1e-12 * xx * yy)) throw std::invalid_argument("sec_M: degenerate plane");
  const Vec10 a = a_tensor(fx, fy);
  return (geo_->kappa(fx, fy) + 3.0 * a.squaredNorm()) / gram;
}

AlgebraElement horizontal_projection(const GroupElement& g, const AlgebraElement& x,
                                     const MetricParams& m) {
  const CheegerGeometry geo(m);
  return HorizontalSpace(geo, g).project(x);
}

std::array<double, 3> horizontality_residual_tilded(const AlgebraElement& x_tilde,
                                                   const GroupElement& g, const MetricParams& m) {
  const VerticalFrame vf = vertical_basis(g);
  std::array<double, 3> r{};
  for (int j = 0; j < 3; ++j) r[j] = inner1(x_tilde, vf.v[j], m);
  return r;
}

AlgebraElement a_tensor(const GroupElement& g, const AlgebraElement& x, const AlgebraElement& y,
                        const MetricParams& m) {
  const CheegerGeometry geo(m);
  const HorizontalSpace hs(geo, g);
  const Vec10 fx = geo.to_frame(x), fy = geo.to_frame(y);
  if ((hs.vertical_orthonormal().transpose() * fx).norm() > 1e-9 * std::max(1.0, fx.norm()) ||
      (hs.vertical_orthonormal().transpose() * fy).norm() > 1e-9 * std::max(1.0, fy.norm()))
    throw std::invalid_argument("a_tensor: vectors are not horizontal");
  return geo.from_frame(hs.a_tensor(fx, fy));
}

double sec_M(const GroupElement& g, const AlgebraElement& x, const AlgebraElement& y,
             const MetricParams& m) {
  const CheegerGeometry geo(m);
  return HorizontalSpace(geo, g).sec_M(x, y);
}

}  // namespace gmsphere
