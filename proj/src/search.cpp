#include "gmsphere/search.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gmsphere {

std::string to_string(MinStatus s) {
  switch (s) {
    case MinStatus::Converged: return "converged";
    case MinStatus::Stalled: return "stalled";
    case MinStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

std::string to_string(PointKind k) {
  switch (k) {
    case PointKind::Haar: return "haar";
    case PointKind::Constructed: return "constructed";
    case PointKind::NearZ: return "near_z";
  }
  return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// M(y)_ad = sum_bc S[ad][bc] y_b y_c.
MatrixXd contract(const QuarticForm& f, const VectorXd& y) {
  const int n = f.n;
  const MatrixXd yy = y * y.transpose();
  const VectorXd v = f.s * Eigen::Map<const VectorXd>(yy.data(), n * n);
  // Row index a*n+d maps to column-major (d, a); M is symmetric.
  return Eigen::Map<const MatrixXd>(v.data(), n, n);
}

// C_ab = sum_dc S[ad][bc] x_d y_c.
MatrixXd cross_term(const QuarticForm& f, const VectorXd& x, const VectorXd& y) {
  const int n = f.n;
  MatrixXd c = MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int d = 0; d < n; ++d) {
      const double xd = x[d];
      if (xd == 0.0) continue;
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += f.s(a * n + d, b * n + k) * y[k];
        c(a, b) += xd * s;
      }
    }
  return c;
}

double ratio(const QuarticForm& f, const VectorXd& x, const VectorXd& y) {
  const double xx = x.squaredNorm(), yy = y.squaredNorm(), xy = x.dot(y);
  return f.value(x, y) / (xx * yy - xy * xy);
}

bool orthonormalize_pair(VectorXd& x, VectorXd& y) {
  const double nx = x.norm();
  if (!(nx > 0.0)) return false;
  x /= nx;
  for (int pass = 0; pass < 2; ++pass) y -= x.dot(y) * x;
  const double ny = y.norm();
  if (!(ny > 1e-12)) return false;
  y /= ny;
  return true;
}

MatrixXd complement(const VectorXd& x, const VectorXd& y) {
  const int n = static_cast<int>(x.size());
  MatrixXd uv(n, 2);
  uv << x, y;
  const Eigen::HouseholderQR<MatrixXd> qr(uv);
  const MatrixXd q = qr.householderQ();
  return q.rightCols(n - 2);
}

}  // namespace

QuarticMinimum minimize_quartic(const QuarticForm& f, const VectorXd& x0, const VectorXd& y0,
                                int max_iterations, double tolerance) {
  VectorXd x = x0, y = y0;
  if (!orthonormalize_pair(x, y)) throw std::invalid_argument("minimize_quartic: dependent start");
  const int n = f.n, m = n - 2;
  QuarticMinimum out;
  double value = f.value(x, y);
  for (int it = 0; it < max_iterations; ++it) {
    out.iterations = it + 1;
    const MatrixXd w = complement(x, y);
    const MatrixXd my = contract(f, y), mx = contract(f, x);
    const VectorXd gx = 2.0 * my * x, gy = 2.0 * mx * y;
    value = x.dot(my * x);
    VectorXd grad(2 * m);
    grad << w.transpose() * gx, w.transpose() * gy;
    out.gradient_norm = grad.norm();
    if (out.gradient_norm < tolerance) {
      out.status = MinStatus::Converged;
      break;
    }
    const MatrixXd c = 4.0 * cross_term(f, x, y);
    MatrixXd h(2 * m, 2 * m);
    h.topLeftCorner(m, m) = w.transpose() * (2.0 * my) * w;
    h.bottomRightCorner(m, m) = w.transpose() * (2.0 * mx) * w;
    h.topRightCorner(m, m) = w.transpose() * c * w;
    h.bottomLeftCorner(m, m) = h.topRightCorner(m, m).transpose();
    h -= 2.0 * value * MatrixXd::Identity(2 * m, 2 * m);

    const Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
    const VectorXd& lam = es.eigenvalues();
    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    const double floor = 1e-10 * scale;
    VectorXd coef = es.eigenvectors().transpose() * grad;
    for (int i = 0; i < 2 * m; ++i) coef[i] /= std::max(std::abs(lam[i]), floor);
    VectorXd d = -(es.eigenvectors() * coef);
    const double dn = d.norm();
    if (dn > 0.5) d *= 0.5 / dn;

    const double slope = grad.dot(d);
    double t = 1.0, trial = value;
    VectorXd nx, ny;
    bool accepted = false;
    for (int k = 0; k < 40; ++k) {
      nx = x + w * (t * d.head(m));
      ny = y + w * (t * d.tail(m));
      trial = ratio(f, nx, ny);
      if (trial <= value + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      out.status = MinStatus::Stalled;
      break;
    }
    orthonormalize_pair(nx, ny);
    x = nx;
    y = ny;
    value = f.value(x, y);
    if (t * d.norm() < tolerance) {
      out.status = MinStatus::Converged;
      break;
    }
  }
  out.value = f.value(x, y);
  out.x = x;
  out.y = y;
  return out;
}

MinResult minimize_over(const QuarticForm& f, const CheegerGeometry& geo, const MatrixXd& basis,
                        const MinOptions& opt) {
  if (opt.starts < 1) throw std::invalid_argument("starts must be >= 1");
  const int n = f.n;
  Rng rng = make_rng(opt.seed);
  MinResult best;
  best.value = std::numeric_limits<double>::infinity();
  QuarticMinimum arg;
  for (int s = 0; s < opt.starts; ++s) {
    VectorXd x0(n), y0(n);
    for (int i = 0; i < n; ++i) x0[i] = gaussian(rng);
    for (int i = 0; i < n; ++i) y0[i] = gaussian(rng);
    const QuarticMinimum r = minimize_quartic(f, x0, y0, opt.max_iterations, opt.tolerance);
    best.iterations += r.iterations;
    if (r.status != MinStatus::MaxIterations) ++best.converged_starts;
    if (r.value < best.value) {
      best.value = r.value;
      best.status = r.status;
      arg = r;
    }
  }
  best.starts = opt.starts;
  best.x = geo.from_frame(basis * arg.x);
  best.y = geo.from_frame(basis * arg.y);
  return best;
}

MinResult min_kappa_horizontal(const HorizontalSpace& hs, const MinOptions& opt) {
  return minimize_over(hs.kappa_form(), hs.geometry(), hs.basis(), opt);
}

MinResult min_kappa_horizontal(const GroupElement& g, const MetricParams& m,
                               const MinOptions& opt) {
  const CheegerGeometry geo(m);
  return min_kappa_horizontal(HorizontalSpace(geo, g), opt);
}

MinResult min_sec_M(const HorizontalSpace& hs, const MinOptions& opt) {
  return minimize_over(hs.oneill_form(), hs.geometry(), hs.basis(), opt);
}

MinResult min_sec_M(const GroupElement& g, const MetricParams& m, const MinOptions& opt) {
  const CheegerGeometry geo(m);
  return min_sec_M(HorizontalSpace(geo, g), opt);
}

MinResult min_kappa_algebra(const CheegerGeometry& geo, const MinOptions& opt) {
  const QuarticForm f = QuarticForm::from_kappa_layout(10, geo.curvature().r);
  return minimize_over(f, geo, MatrixXd::Identity(10, 10), opt);
}

MinResult min_kappa_horizontal_from(const HorizontalSpace& hs, const AlgebraElement& x0,
                                    const AlgebraElement& y0, int max_iterations) {
  const CheegerGeometry& geo = hs.geometry();
  const MatrixXd b = hs.basis();
  const VectorXd cx = b.transpose() * geo.to_frame(x0);
  const VectorXd cy = b.transpose() * geo.to_frame(y0);
  const QuarticMinimum r = minimize_quartic(hs.kappa_form(), cx, cy, max_iterations);
  MinResult out;
  out.value = r.value;
  out.x = geo.from_frame(b * r.x);
  out.y = geo.from_frame(b * r.y);
  out.starts = 1;
  out.iterations = r.iterations;
  out.converged_starts = r.status == MinStatus::MaxIterations ? 0 : 1;
  out.status = r.status;
  return out;
}

std::optional<TemplateType> identify_template(const AlgebraElement& x, const AlgebraElement& y,
                                              const MetricParams& m, double tol) {
  AlgebraElement tx = tilde(x, m.t_tilde), ty = tilde(y, m.t_tilde);
  // Orthonormalize in <,>_1, for which p and k are orthogonal.
  tx *= 1.0 / std::sqrt(inner1(tx, tx, m));
  ty -= inner1(tx, ty, m) * tx;
  ty *= 1.0 / std::sqrt(inner1(ty, ty, m));
  Eigen::Matrix<double, 4, 2> p;
  const Quaternion px = tx.p(), py = ty.p();
  p << px.w, py.w, px.x, py.x, px.y, py.y, px.z, py.z;
  p *= std::sqrt(2.0);
  const Eigen::JacobiSVD<Eigen::Matrix<double, 4, 2>> svd(p, Eigen::ComputeFullV);
  const Eigen::Vector2d sv = svd.singularValues();
  if (sv[0] < tol) return TemplateType::Type1;
  if (sv[1] >= tol) return std::nullopt;
  const Eigen::Vector2d xdir = svd.matrixV().col(0);
  const AlgebraElement xt = xdir[0] * tx + xdir[1] * ty;
  const AlgebraElement k = xt.k_part();
  return std::sqrt(inner1(k, k, m)) < tol ? TemplateType::Type2a : TemplateType::Type2b;
}

GroupElement perturb(const GroupElement& g, double eps, const MetricParams& m, Rng& rng) {
  const CheegerGeometry geo(m);
  Vec10 c;
  for (int i = 0; i < 10; ++i) c[i] = gaussian(rng);
  c.normalize();
  return g * exp(geo.from_frame(c) * eps);
}

namespace {
// Exact zeros are reported as this when forming the geometric midpoint.
constexpr double kNoiseFloor = 1e-18;
}  // namespace

Calibration calibrate_threshold(const MetricParams& m, std::uint64_t seed,
                                const CalibrationOptions& opt) {
  const int per_piece = std::max(1, opt.points / 4);
  const std::vector<BatchPoint> batch = z_batch(per_piece, 4 * per_piece, opt.eps, m, seed);
  ScanConfig cfg;
  cfg.metric = m;
  cfg.seed = seed;
  cfg.starts = opt.starts;
  cfg.workers = opt.workers;
  cfg.sec_m = false;
  const ScanReport rep = scan_points(batch, cfg);
  Calibration cal;
  cal.eps = opt.eps;
  cal.min_perturbed = std::numeric_limits<double>::infinity();
  cal.max_zero = -std::numeric_limits<double>::infinity();
  cal.noise = kNoiseFloor;
  for (const ScanPoint& p : rep.points) {
    if (p.kind == PointKind::Constructed) {
      cal.zero_values.push_back(p.min_kappa);
      cal.max_zero = std::max(cal.max_zero, p.min_kappa);
      cal.noise = std::max(cal.noise, std::abs(p.min_kappa));
    } else {
      cal.perturbed_values.push_back(p.min_kappa);
      cal.min_perturbed = std::min(cal.min_perturbed, p.min_kappa);
    }
  }
  if (!(cal.max_zero < opt.zero_ceiling))
    throw std::runtime_error("calibration failed: constructed Z point with min kappa " +
                             format_double(cal.max_zero));
  if (!(cal.min_perturbed > cal.noise))
    throw std::runtime_error("calibration failed: perturbed point with min kappa " +
                             format_double(cal.min_perturbed) + " not above " +
                             format_double(cal.noise));
  cal.delta = std::sqrt(cal.noise * cal.min_perturbed);
  return cal;
}

double ScanReport::agreement_fraction() const {
  if (points.empty()) return 1.0;
  return 1.0 - static_cast<double>(disagreements.size()) / static_cast<double>(points.size());
}

std::vector<BatchPoint> haar_batch(std::size_t n, std::uint64_t seed) {
  std::vector<BatchPoint> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t s = sample_seed(seed, i);
    out[i].g = haar_sample(s);
    out[i].seed = splitmix64(s);
  }
  return out;
}

std::vector<BatchPoint> z_batch(int per_piece, int near, double eps, const MetricParams& m,
                                std::uint64_t seed) {
  std::vector<BatchPoint> out;
  Rng rng = make_rng(seed ^ 0x7a5eedULL);
  for (int piece = 1; piece <= 4; ++piece)
    for (int i = 0; i < per_piece; ++i) {
      BatchPoint p;
      p.g = sample_z_point(piece, rng);
      p.seed = rng();
      p.kind = PointKind::Constructed;
      p.piece = piece;
      out.push_back(p);
    }
  for (int i = 0; i < near; ++i) {
    BatchPoint p;
    p.piece = 1 + i % 4;
    p.g = perturb(sample_z_point(p.piece, rng), eps, m, rng);
    p.seed = rng();
    p.kind = PointKind::NearZ;
    out.push_back(p);
  }
  return out;
}

std::vector<BatchPoint> spiked_batch(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("spike fraction must lie in [0, 1]");
  std::vector<BatchPoint> out = haar_batch(n, seed);
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t i = j * n / k;
    Rng rng = make_rng(sample_seed(seed, i) ^ 0x5b1c3dULL);
    BatchPoint& p = out[i];
    p.piece = 1 + static_cast<int>(j % 4);
    p.g = sample_z_point(p.piece, rng);
    p.kind = PointKind::Constructed;
  }
  return out;
}

ScanPoint evaluate_point(const BatchPoint& p, std::uint64_t index, const CheegerGeometry& geo,
                         const ScanConfig& cfg) {
  ScanPoint out;
  out.index = index;
  out.seed = p.seed;
  out.kind = p.kind;
  out.piece = p.piece;
  out.g = p.g;
  const ZClassification c = classify(p.g, cfg.tol_zero);
  out.z = {c.z1, c.z2, c.z3, c.z4};
  const HorizontalSpace hs(geo, p.g);
  MinOptions opt;
  opt.starts = cfg.starts;
  opt.seed = p.seed;
  out.min_kappa = min_kappa_horizontal(hs, opt).value;
  if (cfg.sec_m) out.min_sec_m = min_sec_M(hs, opt).value;
  out.agreement = (out.min_kappa < cfg.threshold) == c.any();
  return out;
}

namespace {

void summarize(ScanReport& rep) {
  std::vector<double> v;
  for (const ScanPoint& p : rep.points) {
    if (!p.agreement) rep.disagreements.push_back(p.index);
    bool any = false;
    for (int i = 0; i < 4; ++i)
      if (p.z[i]) {
        ++rep.hits[i];
        any = true;
      }
    if (any) ++rep.classifier_hits;
    if (p.z[0] && p.z[1]) ++rep.z1_z2_overlap;
    v.push_back(rep.config.sec_m ? p.min_sec_m : p.min_kappa);
  }
  if (v.empty()) return;
  std::sort(v.begin(), v.end());
  for (double q : {0.0, 0.001, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0}) {
    const std::size_t i = static_cast<std::size_t>(std::llround(q * static_cast<double>(v.size() - 1)));
    rep.quantiles.emplace_back(q, v[i]);
  }
  for (int k = 2; k <= 8; ++k) {
    const double thr = std::pow(10.0, -k);
    const auto cnt = std::lower_bound(v.begin(), v.end(), thr) - v.begin();
    rep.fraction_below.emplace_back(k, static_cast<double>(cnt) / static_cast<double>(v.size()));
  }
}

}  // namespace

ScanReport scan_points_serial(const std::vector<BatchPoint>& points, const ScanConfig& cfg) {
  const CheegerGeometry geo(cfg.metric);
  ScanReport rep;
  rep.config = cfg;
  rep.points.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) rep.points[i] = evaluate_point(points[i], i, geo, cfg);
  summarize(rep);
  return rep;
}

ScanReport scan_points(const std::vector<BatchPoint>& points, const ScanConfig& cfg) {
  const CheegerGeometry geo(cfg.metric);
  ScanReport rep;
  rep.config = cfg;
  rep.points.resize(points.size());
  const auto n = static_cast<std::int64_t>(points.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, cfg.workers))
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      rep.points[i] = evaluate_point(points[i], static_cast<std::uint64_t>(i), geo, cfg);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  summarize(rep);
  return rep;
}

ScanReport scan(std::size_t n_samples, const ScanConfig& cfg) {
  if (n_samples < 1) throw std::invalid_argument("scan requires n_samples >= 1");
  return scan_points(haar_batch(n_samples, cfg.seed), cfg);
}

}  // namespace gmsphere
