#pragma once

// Numerical minimization of curvature over 2-planes, threshold calibration
// and Monte Carlo audits of the zero-set classification.

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "gmsphere/submersion.hpp"
#include "gmsphere/zeroset.hpp"

namespace gmsphere {

enum class MinStatus {
  Converged,  // gradient or step norm below tolerance
  Stalled,    // line search made no progress (round-off floor)
  MaxIterations,
};

std::string to_string(MinStatus s);

struct MinOptions {
  int starts = 64;
  std::uint64_t seed = 0;
  int max_iterations = 200;
  double tolerance = 1e-12;
};

/// Local minimum of N(x, y) over orthonormal pairs in R^n.
struct QuarticMinimum {
  double value = 0.0;
  Eigen::VectorXd x, y;
  int iterations = 0;
  MinStatus status = MinStatus::MaxIterations;
  double gradient_norm = 0.0;
};

/// Damped Riemannian Newton descent on the Grassmannian of 2-planes, from
/// the plane spanned by (x0, y0).  Gradient and Hessian are exact for the
/// quartic.  Throws std::invalid_argument if x0, y0 are dependent.
QuarticMinimum minimize_quartic(const QuarticForm& f, const Eigen::VectorXd& x0,
                                const Eigen::VectorXd& y0, int max_iterations = 200,
                                double tolerance = 1e-12);

struct MinResult {
  double value = 0.0;
  AlgebraElement x, y;  // <,>_2-orthonormal argmin pair
  int starts = 0;
  int iterations = 0;   // total over starts
  int converged_starts = 0;
  MinStatus status = MinStatus::MaxIterations;  // of the best start
};

/// Multistart minimum of f over planes in span(basis) (frame coordinates,
/// orthonormal columns).
MinResult minimize_over(const QuarticForm& f, const CheegerGeometry& geo,
                        const Eigen::MatrixXd& basis, const MinOptions& opt);

/// min kappa_G over horizontal planes at g.
MinResult min_kappa_horizontal(const HorizontalSpace& hs, const MinOptions& opt = {});
MinResult min_kappa_horizontal(const GroupElement& g, const MetricParams& m,
                               const MinOptions& opt = {});
/// min sec_M = kappa_G + 3 |A|^2 over horizontal planes at g.
MinResult min_sec_M(const HorizontalSpace& hs, const MinOptions& opt = {});
MinResult min_sec_M(const GroupElement& g, const MetricParams& m, const MinOptions& opt = {});
/// min kappa_G over all planes of sp(2).
MinResult min_kappa_algebra(const CheegerGeometry& geo, const MinOptions& opt = {});

/// Single local descent of kappa_G from a given horizontal plane.
MinResult min_kappa_horizontal_from(const HorizontalSpace& hs, const AlgebraElement& x0,
                                    const AlgebraElement& y0, int max_iterations = 200);

/// Template family of a zero plane recovered from its spanning pair;
/// `std::nullopt` when the plane matches none of the three families
/// within `tol`.
std::optional<TemplateType> identify_template(const AlgebraElement& x, const AlgebraElement& y,
                                              const MetricParams& m, double tol = 1e-6);

/// g exp(eps X) for X drawn uniformly from the <,>_2-unit sphere.
GroupElement perturb(const GroupElement& g, double eps, const MetricParams& m, Rng& rng);

struct Calibration {
  double delta = 0.0;
  double eps = 0.0;
  double max_zero = 0.0;       // largest min-kappa over constructed Z points
  double noise = 0.0;          // largest |min-kappa| over constructed Z points
  double min_perturbed = 0.0;  // smallest min-kappa over perturbed points
  std::vector<double> zero_values, perturbed_values;
};

struct CalibrationOptions {
  int points = 100;  // split evenly over Z1..Z4, same count perturbed
  double eps = 1e-2;
  double zero_ceiling = 1e-9;
  int starts = 64;
  int workers = 1;
};

/// delta = sqrt(noise * min_perturbed), the geometric midpoint between the
/// round-off level at Z and the closest perturbed value.  Throws
/// std::runtime_error when max_zero >= zero_ceiling or min_perturbed does
/// not exceed the noise.
Calibration calibrate_threshold(const MetricParams& m, std::uint64_t seed,
                                const CalibrationOptions& opt = {});

enum class PointKind { Haar, Constructed, NearZ };
std::string to_string(PointKind k);

struct BatchPoint {
  GroupElement g;
  std::uint64_t seed = 0;  // minimizer seed
  PointKind kind = PointKind::Haar;
  int piece = 0;           // source piece for Constructed and NearZ
};

struct ScanConfig {
  MetricParams metric;
  std::uint64_t seed = 0;
  int starts = 64;
  int workers = 1;
  double threshold = 0.0;     // delta_cal
  double tol_zero = kDefaultZTol;
  bool sec_m = true;          // also minimize sec_M
};

struct ScanPoint {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  PointKind kind = PointKind::Haar;
  int piece = 0;
  GroupElement g;
  double min_kappa = 0.0;
  double min_sec_m = 0.0;
  std::array<bool, 4> z{};
  bool agreement = true;  // (min_kappa < threshold) == any flag
};

struct ScanReport {
  ScanConfig config;
  std::vector<ScanPoint> points;
  std::vector<std::uint64_t> disagreements;
  std::array<int, 4> hits{};
  int z1_z2_overlap = 0;
  int classifier_hits = 0;
  std::vector<std::pair<double, double>> quantiles;        // (p, min sec_M) or min kappa
  std::vector<std::pair<int, double>> fraction_below;      // (k, fraction below 1e-k)

  double agreement_fraction() const;
};

/// Per-sample seed for Haar scans.
inline std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) { return seed ^ index; }

std::vector<BatchPoint> haar_batch(std::size_t n, std::uint64_t seed);
/// `per_piece` constructed points of each Z_i, then `near` perturbations of
/// further constructed points at distance eps, cycling over the pieces.
std::vector<BatchPoint> z_batch(int per_piece, int near, double eps, const MetricParams& m,
                                std::uint64_t seed);

/// n points: Haar samples with llround(fraction * n) of them replaced by
/// constructed Z points (pieces cycling), spread evenly over the indices.
std::vector<BatchPoint> spiked_batch(std::size_t n, double fraction, std::uint64_t seed);

ScanPoint evaluate_point(const BatchPoint& p, std::uint64_t index, const CheegerGeometry& geo,
                         const ScanConfig& cfg);

/// Serial reference and OpenMP versions; outputs are identical.
ScanReport scan_points_serial(const std::vector<BatchPoint>& points, const ScanConfig& cfg);
ScanReport scan_points(const std::vector<BatchPoint>& points, const ScanConfig& cfg);
ScanReport scan(std::size_t n_samples, const ScanConfig& cfg);

}  // namespace gmsphere
