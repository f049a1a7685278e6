#pragma once

// Two-stage Cheeger deformation of the trace metric on sp(2): first along
// K = Sp(1) x Sp(1), then along the diagonal H = Sp(1).  The resulting
// left-invariant metric is
//
//   <X, Y>_2 = <X_p, Y_p> + s~ <X_q, Y_q> + s~ t~ <X_h, Y_h>,
//
// with contraction factors s~ = s/(s+1), t~ = t/(t+1) in (0, 1].  The
// bi-invariant metric is (s~, t~) = (1, 1).
//
// Curvature is computed intrinsically from the Koszul formula in a fixed
// <,>_2-orthonormal frame, so the metric is the identity matrix there and
// every operation below reduces to structure constants.

#include <array>
#include <vector>

#include "gmsphere/sp2.hpp"

namespace gmsphere {

struct MetricParams {
  double s_tilde = 1.0;
  double t_tilde = 1.0;

  /// Throws std::invalid_argument unless 0 < s~, t~ <= 1.
  static MetricParams make(double s_tilde, double t_tilde);
  /// From the contraction parameters s, t > 0.
  static MetricParams from_contraction(double s, double t);
  static MetricParams bi_invariant() { return {1.0, 1.0}; }

  void validate() const;
  bool operator==(const MetricParams&) const = default;
};

/// <X_p, Y_p> + s~ <X_k, Y_k>.
double inner1(const AlgebraElement& x, const AlgebraElement& y, const MetricParams& m);
double inner2(const AlgebraElement& x, const AlgebraElement& y, const MetricParams& m);

/// Scales the h-part by t~.  Throws std::invalid_argument for t~ <= 0.
AlgebraElement tilde(const AlgebraElement& x, double t_tilde);
AlgebraElement untilde(const AlgebraElement& x, double t_tilde);

/// R[a][b][c][d] = <R(e_a, e_b) e_c, e_d>_2 with
/// R(X, Y) Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z,
/// so kappa(X, Y) = sum R[a][b][c][d] X_a Y_b Y_c X_d.
struct CurvatureTensor {
  std::vector<double> r = std::vector<double>(10000, 0.0);
  std::array<AlgebraElement, 10> frame{};

  double operator()(int a, int b, int c, int d) const { return r[((a * 10 + b) * 10 + c) * 10 + d]; }
  double& operator()(int a, int b, int c, int d) { return r[((a * 10 + b) * 10 + c) * 10 + d]; }
};

/// Levi-Civita data of one metric of the family.  Immutable after
/// construction and safe to share between threads.
///
/// Frame order: 0-3 off-diagonal {1,i,j,k}/sqrt(2), 4-6 diag(u,-u)/sqrt(2 s~),
/// 7-9 diag(u,u)/sqrt(2 s~ t~) for u in {i,j,k}.
class CheegerGeometry {
 public:
  explicit CheegerGeometry(const MetricParams& m = MetricParams::bi_invariant());

  const MetricParams& params() const { return params_; }
  const std::array<AlgebraElement, 10>& frame() const { return tensor_.frame; }

  /// Orthonormal-frame coordinates <X, e_a>_2.
  Vec10 to_frame(const AlgebraElement& x) const;
  AlgebraElement from_frame(const Vec10& c) const;

  /// <[e_a, e_b], e_c>_2.
  double structure(int a, int b, int c) const { return structure_[(a * 10 + b) * 10 + c]; }
  /// <nabla_{e_a} e_b, e_c>_2.
  double christoffel(int a, int b, int c) const { return christoffel_[(a * 10 + b) * 10 + c]; }

  Vec10 bracket(const Vec10& x, const Vec10& y) const;
  Vec10 nabla(const Vec10& x, const Vec10& y) const;
  AlgebraElement nabla(const AlgebraElement& x, const AlgebraElement& y) const;

  const CurvatureTensor& curvature() const { return tensor_; }

  /// <R(X,Y)Y, X>_2 evaluated through the connection.
  double kappa(const Vec10& x, const Vec10& y) const;
  /// Same value contracted from the stored curvature tensor.
  double kappa_from_tensor(const Vec10& x, const Vec10& y) const;
  double kappa(const AlgebraElement& x, const AlgebraElement& y) const;
  /// kappa / |X ^ Y|^2.  Throws std::invalid_argument if the Gram
  /// determinant is below 1e-12 |X|^2 |Y|^2.
  double sec(const AlgebraElement& x, const AlgebraElement& y) const;

 private:
  MetricParams params_;
  std::array<double, 3> scale_{};  // sqrt(2), sqrt(2 s~), sqrt(2 s~ t~)
  std::vector<double> structure_;
  std::vector<double> christoffel_;
  CurvatureTensor tensor_;
};

inline CheegerGeometry connection_coefficients(const MetricParams& m) { return CheegerGeometry(m); }

double kappa_G(const AlgebraElement& x, const AlgebraElement& y, const MetricParams& m);
double sec_G(const AlgebraElement& x, const AlgebraElement& y, const MetricParams& m);

/// Trace norms of the brackets whose joint vanishing characterizes
/// zero-curvature planes of <,>_2.  tilde_bracket uses the t~-tilde map.
struct BracketResiduals {
  double tilde_bracket = 0.0;  // [X~, Y~]
  double k_bracket = 0.0;      // [X~_k, Y~_k]
  double p_bracket = 0.0;      // [X_p, Y_p]
  double q_bracket = 0.0;      // [X_q, Y_q]
  double h_bracket = 0.0;      // [X_h, Y_h]

  double max() const;
};

BracketResiduals zero_bracket_residuals(const AlgebraElement& x, const AlgebraElement& y,
                                        const MetricParams& m);

/// At t~ = 1 and s~ < 1: kappa_1(X, Y) - [kappa_bi(X~, Y~) + s^-3 kappa_bi(X~_k, Y~_k)]
/// where X~ = X_p + s~ X_k.  This is the O'Neill term of the submersion
/// G x sK -> G and is nonnegative.
double cheeger_split_discrepancy(const AlgebraElement& x, const AlgebraElement& y,
                                 const MetricParams& m);

}  // namespace gmsphere
