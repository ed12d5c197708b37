#pragma once

#include "evolab/common.hpp"

#include <optional>

namespace evolab {

/// Periodic 1D or 2D spatial grid; the flattened dimension is
/// n_x * n_y with x fastest (index = ix + n_x * iy).
class SpaceGrid {
 public:
  SpaceGrid(double length_x, int n_x);
  SpaceGrid(double length_x, int n_x, double length_y, int n_y);

  double length_x() const { return length_x_; }
  int n_x() const { return n_x_; }
  double h_x() const { return length_x_ / n_x_; }
  double x(int ix) const { return ix * h_x(); }

  bool has_y() const { return n_y_ > 0; }
  double length_y() const { return length_y_; }
  int n_y() const { return n_y_; }
  double h_y() const { return length_y_ / n_y_; }
  double y(int iy) const { return iy * h_y(); }

  int dim() const { return n_x_ * (has_y() ? n_y_ : 1); }

 private:
  double length_x_;
  int n_x_;
  double length_y_ = 0.0;
  int n_y_ = 0;
};

enum class Axis { X, Y };

struct OpTags {
  bool skew_adjoint = false;
  bool diagonal = false;
  bool identity = false;
};

/// Finite stand-in for an operator on the flattened spatial grid. Tags are
/// structural guarantees established at construction time.
struct SpatialOperator {
  int dim = 0;
  Mat matrix;
  OpTags tags;

  static SpatialOperator dense(Mat m, OpTags tags = {});
  static SpatialOperator identity(int d);
  static SpatialOperator zero(int d);
};

/// Centered second-order periodic difference along the given axis:
/// (D phi)_j = (phi_{j+1} - phi_{j-1}) / (2h). Exactly real
/// skew-symmetric by construction; tagged skew_adjoint.
SpatialOperator periodic_derivative(const SpaceGrid& grid, Axis axis = Axis::X);

/// Diagonal operator acting by pointwise multiplication.
SpatialOperator multiplication_operator(const Vec& samples);
SpatialOperator multiplication_operator(const RealVec& samples);

/// Sum and scalar multiple with exact tag propagation.
SpatialOperator operator_add(const SpatialOperator& a, const SpatialOperator& b);
SpatialOperator operator_scale(Complex c, const SpatialOperator& a);

Mat hermitian_part(const Mat& m);
double lambda_min_hermitian(const Mat& hermitian);
/// Spectral norm via the largest singular value.
double operator_norm(const Mat& m);

/// Direct dense solve of (C + A) phi = psi with a residual certificate:
/// the result satisfies ||(C+A)phi - psi|| <= 1e-10 ||psi|| (one step of
/// iterative refinement is applied if needed) and the Picard-type norm
/// bound ||phi|| <= (1/alpha) ||psi|| (1 + 1e-8), where alpha is the
/// caller-supplied accretivity constant of C. Throws NumericalError with
/// the residual attached if either certificate fails.
class ResolventSolver {
 public:
  ResolventSolver(const SpatialOperator& C, const SpatialOperator& A, double alpha);

  Vec solve(const Vec& psi) const;

  const Mat& system_matrix() const { return m_; }

 private:
  Mat m_;
  Eigen::PartialPivLU<Mat> lu_;
  double alpha_;
};

Vec resolvent_solve(const SpatialOperator& C, const SpatialOperator& A, const Vec& psi,
                    double alpha);

constexpr double kResolventResidualTol = 1e-10;
constexpr double kResolventNormSlack = 1e-8;

}  // namespace evolab
