#pragma once

// The Riemannian submersion Sp(2) -> Sp(2)/U.  All vectors are
// left-trivialized: a tangent vector g X at g is represented by X in sp(2).

#include <Eigen/Core>
#include <array>

#include "gmsphere/cheeger.hpp"

namespace gmsphere {

/// v_g = g^{-1} diag(v, 0) g - diag(v, v) for v = i, j, k.
struct VerticalFrame {
  GroupElement g;
  std::array<AlgebraElement, 3> v{};
};

/// Throws std::invalid_argument when g is not unitary within 1e-8.
VerticalFrame vertical_basis(const GroupElement& g);

using Mat10x3 = Eigen::Matrix<double, 10, 3>;
using Mat10x7 = Eigen::Matrix<double, 10, 7>;

/// Symmetric quartic form N(x, y) = sum S[a d][b c] x_a x_d y_b y_c in n
/// variables, with S symmetric in (a, d), in (b, c), and under swapping the
/// two pairs.  Used for kappa(x, y) and for its O'Neill-corrected version.
struct QuarticForm {
  int n = 0;
  Eigen::MatrixXd s;  // n^2 x n^2, row index a*n+d, column index b*n+c

  double value(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  /// From T with N = sum T[a][b][c][d] x_a y_b y_c x_d (row-major n^4).
  static QuarticForm from_kappa_layout(int n, const std::vector<double>& t);
};

/// Horizontal/vertical geometry of the submersion at one point g for one
/// metric.  Holds a pointer to `geo`, which must outlive this object.
class HorizontalSpace {
 public:
  HorizontalSpace(const CheegerGeometry& geo, const GroupElement& g);

  const GroupElement& point() const { return g_; }
  const CheegerGeometry& geometry() const { return *geo_; }
  const VerticalFrame& vertical() const { return vertical_; }

  /// Frame coordinates of v_i and an orthonormal basis of their span.
  const Mat10x3& vertical_frame() const { return vertical_coords_; }
  const Mat10x3& vertical_orthonormal() const { return vertical_on_; }
  /// <,>_2-orthonormal basis of the horizontal space, frame coordinates.
  const Mat10x7& basis() const { return basis_; }
  AlgebraElement basis_element(int i) const;

  Vec10 project(const Vec10& x) const;
  AlgebraElement project(const AlgebraElement& x) const;
  Vec10 vertical_part(const Vec10& x) const;

  /// <X, v_g>_2 for v = i, j, k.
  std::array<double, 3> residual(const AlgebraElement& x) const;

  /// O'Neill tensor A_X Y for horizontal X, Y in frame coordinates,
  /// computed with the closed-form derivative d/dtau v_{g exp(tau X)} = [g^{-1} diag(v,0) g, X].
  Vec10 a_tensor(const Vec10& x, const Vec10& y) const;
  /// Same tensor from central differences of the horizontally projected
  /// extension of Y along g exp(tau X); Richardson extrapolation over
  /// steps h and h/2.
  Vec10 a_tensor_fd(const Vec10& x, const Vec10& y, double step = 1e-5) const;

  /// Quartic forms on the 7-dim horizontal space (basis() coordinates):
  /// kappa_G, and kappa_G + 3 |A|^2.
  QuarticForm kappa_form() const;
  QuarticForm oneill_form() const;

  double sec_G(const AlgebraElement& x, const AlgebraElement& y) const;
  /// sec_G + 3 |A_X Y|^2 / |X ^ Y|^2.  Throws std::invalid_argument if X or
  /// Y is not horizontal within 1e-9 or the plane is degenerate.
  double sec_M(const AlgebraElement& x, const AlgebraElement& y) const;

 private:
  const CheegerGeometry* geo_;
  GroupElement g_;
  VerticalFrame vertical_;
  Mat10x3 vertical_coords_;
  Mat10x3 vertical_on_;
  Eigen::Matrix3d r_inv_t_;       // R^-T with vertical_coords_ = vertical_on_ * R
  std::array<Vec10, 3> lifted_{};  // frame coords of g^{-1} diag(v, 0) g
  Mat10x7 basis_;
};

AlgebraElement horizontal_projection(const GroupElement& g, const AlgebraElement& x,
                                     const MetricParams& m);

/// <X~, v_g>_1 for v = i, j, k.  Equals <untilde(X~), v_g>_2.
std::array<double, 3> horizontality_residual_tilded(const AlgebraElement& x_tilde,
                                                   const GroupElement& g, const MetricParams& m);

AlgebraElement a_tensor(const GroupElement& g, const AlgebraElement& x, const AlgebraElement& y,
                        const MetricParams& m);

double sec_M(const GroupElement& g, const AlgebraElement& x, const AlgebraElement& y,
             const MetricParams& m);

}  // namespace gmsphere
