#pragma once

// Zero-curvature plane templates on sp(2), the horizontality criteria at a
// point g = (a b; c d), and the four-piece description Z = Z1 u Z2 u Z3 u Z4
// of the points of Sp(2)/U carrying a flat plane.

#include <array>
#include <optional>
#include <string>

#include "gmsphere/cheeger.hpp"
#include "gmsphere/submersion.hpp"

namespace gmsphere {

enum class TemplateType { Type1, Type2a, Type2b };

std::string to_string(TemplateType t);

/// A zero-curvature plane given by its tilded spanning pair (X~, Y~):
///
///   Type1:  X~ = diag(0, y),          Y~ = diag(y, 0)
///   Type2a: X~ = offdiag(x),          Y~ = diag(y, x y x^{-1})
///   Type2b: X~ = offdiag(x) + diag(y, y),  Y~ = diag(y, -y),  x _|_ y imaginary
struct PlaneTemplate {
  TemplateType type = TemplateType::Type2a;
  Quaternion x;
  ImQuaternion y;
  AlgebraElement tilde_x;
  AlgebraElement tilde_y;

  /// Untilded spanning pair for the metric's t~.
  AlgebraElement x_vector(const MetricParams& m) const { return untilde(tilde_x, m.t_tilde); }
  AlgebraElement y_vector(const MetricParams& m) const { return untilde(tilde_y, m.t_tilde); }
};

/// Throws std::invalid_argument when the variant's preconditions fail
/// (y = 0; x = 0 for Type2a; for Type2b x must be imaginary, nonzero and
/// orthogonal to y within 1e-10 relative).  `x` is ignored for Type1.
PlaneTemplate build_template(TemplateType type, const Quaternion& x, const ImQuaternion& y);

/// det(I - Ad(a^{-1}) - Ad(b^{-1})).  Throws std::invalid_argument on zero input.
double det_condition(const Quaternion& a, const Quaternion& b);

struct WCondition {
  ImQuaternion w;      // Im(a^{-1} b)
  double value = 0.0;  // <w - 2 a^{-1} w a, w>
};

/// Throws std::invalid_argument when a = 0.
WCondition w_condition(const Quaternion& a, const Quaternion& b);

namespace fault {
/// Mutation hook for smoke tests: evaluates <w + 2 a^{-1} w a, w> instead.
void set_flip_w_condition(bool on);
bool flip_w_condition();
}  // namespace fault

/// max(|a y conj(a) - y|, |b y conj(b) - y|); the Type1 plane built on y is
/// horizontal at g only if both vanish.
double nowhere_horizontal_residual(const GroupElement& g, const ImQuaternion& y);

/// Unit y whose angle to Ad(r) y is exactly `angle`, when the rotation angle
/// of Ad(r) is at least `angle`; otherwise the best approximation (y
/// orthogonal to the axis).  `azimuth` selects among the solutions.
ImQuaternion vector_rotated_by(const Quaternion& r, double angle, double azimuth = 0.0);

struct ZResiduals {
  double a_norm = 0.0, b_norm = 0.0, c_norm = 0.0, d_norm = 0.0;
  double det = 0.0;             // det condition (0 if a or b vanishes)
  double w_value = 0.0;         // w-condition, normalized |a| = |b|-scale
  double w_norm = 0.0;          // |w|
  double norm_gap = 0.0;        // |a| - |b|
  double half_gap = 0.0;        // |a| - 1/sqrt(2)
  double im_a_ratio_margin = 0.0;  // |Im a| - |a| / 2
  double im_a_margin = 0.0;     // |Im a| - 1/2
  double im_b_margin = 0.0;     // |Im b| - 1/2
};

struct ZWitness {
  int piece = 0;  // 1..4
  PlaneTemplate plane;
  GroupElement g;
  double horizontality = 0.0;  // max |<X, v_g>_2| over unit X, Y
  double kappa = 0.0;          // sec_G of the untilded plane
};

struct ZClassification {
  bool z1 = false, z2 = false, z3 = false, z4 = false;
  ZResiduals residuals;
  std::optional<ZWitness> witness;

  bool any() const { return z1 || z2 || z3 || z4; }
};

inline constexpr double kDefaultZTol = 1e-9;

/// Membership flags with inclusive tol-slack on every equality and
/// inequality.  Throws std::invalid_argument for non-unitary g.
ZClassification classify(const GroupElement& g, double tol = kDefaultZTol);

/// Witness plane for the first flagged piece (order 3, 4, 1, 2), with its
/// horizontality and curvature evaluated for `geo`.  Empty when no flag is
/// set.  Throws std::runtime_error when a flag is set but the construction
/// does not reach horizontality 1e-8 and curvature 1e-9 within the
/// classification slack.
std::optional<ZWitness> construct_zero_horizontal_plane(const GroupElement& g,
                                                        const CheegerGeometry& geo,
                                                        double tol = kDefaultZTol);

/// Witness for a specific piece without checking the flags.
ZWitness construct_witness(int piece, const GroupElement& g, const CheegerGeometry& geo);

/// Evaluates a witness candidate.
ZWitness evaluate_witness(int piece, const PlaneTemplate& plane, const GroupElement& g,
                          const CheegerGeometry& geo);

// Constructed sample points of each piece.  Z1 points come from a bisection
// root scan of det_condition along a path between two directions of a of
// opposite sign; Z2 points include the a = +-b branch with probability 1/5.
GroupElement sample_z1_point(Rng& rng);
GroupElement sample_z2_point(Rng& rng);
GroupElement sample_z3_point(Rng& rng);
GroupElement sample_z4_point(Rng& rng);
GroupElement sample_z_point(int piece, Rng& rng);

}  // namespace gmsphere
