#include "evolab/space_ops.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace evolab {

SpaceGrid::SpaceGrid(double length_x, int n_x) : length_x_(length_x), n_x_(n_x) {
  if (length_x <= 0.0) throw ContractViolation("SpaceGrid: length_x must be > 0");
  if (n_x < 4) throw ContractViolation("SpaceGrid: n_x must be >= 4");
}

SpaceGrid::SpaceGrid(double length_x, int n_x, double length_y, int n_y)
    : SpaceGrid(length_x, n_x) {
  if (length_y <= 0.0) throw ContractViolation("SpaceGrid: length_y must be > 0");
  if (n_y < 4) throw ContractViolation("SpaceGrid: n_y must be >= 4");
  length_y_ = length_y;
  n_y_ = n_y;
}

SpatialOperator SpatialOperator::dense(Mat m, OpTags tags) {
  if (m.rows() != m.cols()) throw ContractViolation("SpatialOperator: matrix must be square");
  const int d = static_cast<int>(m.rows());
  return SpatialOperator{d, std::move(m), tags};
}

SpatialOperator SpatialOperator::identity(int d) {
  OpTags tags;
  tags.diagonal = true;
  tags.identity = true;
  return SpatialOperator{d, Mat::Identity(d, d), tags};
}

SpatialOperator SpatialOperator::zero(int d) {
  OpTags tags;
  tags.skew_adjoint = true;
  tags.diagonal = true;
  return SpatialOperator{d, Mat::Zero(d, d), tags};
}

namespace {

// 1D circulant centered difference, exactly antisymmetric entrywise.
Mat circulant_centered(int n, double h) {
  Mat d = Mat::Zero(n, n);
  const double c = 1.0 / (2.0 * h);
  for (int j = 0; j < n; ++j) {
    d(j, (j + 1) % n) += c;
    d(j, (j + n - 1) % n) -= c;
  }
  return d;
}

}  // namespace

SpatialOperator periodic_derivative(const SpaceGrid& grid, Axis axis) {
  OpTags tags;
  tags.skew_adjoint = true;
  if (axis == Axis::Y && !grid.has_y())
    throw ContractViolation("periodic_derivative: grid has no y axis");
  if (!grid.has_y()) {
    return SpatialOperator{grid.dim(), circulant_centered(grid.n_x(), grid.h_x()), tags};
  }
  const int nx = grid.n_x();
  const int ny = grid.n_y();
  Mat full = Mat::Zero(grid.dim(), grid.dim());
  if (axis == Axis::X) {
    const Mat dx = circulant_centered(nx, grid.h_x());
    for (int iy = 0; iy < ny; ++iy)
      full.block(iy * nx, iy * nx, nx, nx) = dx;  // I_y (x) D_x
  } else {
    const double c = 1.0 / (2.0 * grid.h_y());
    for (int iy = 0; iy < ny; ++iy) {
      const int up = ((iy + 1) % ny) * nx;
      const int dn = ((iy + ny - 1) % ny) * nx;
      for (int ix = 0; ix < nx; ++ix) {
        full(iy * nx + ix, up + ix) += c;
        full(iy * nx + ix, dn + ix) -= c;
      }
    }
  }
  return SpatialOperator{grid.dim(), std::move(full), tags};
}

SpatialOperator multiplication_operator(const Vec& samples) {
  const int d = static_cast<int>(samples.size());
  OpTags tags;
  tags.diagonal = true;
  tags.identity = (samples.array() == Complex(1.0, 0.0)).all();
  Mat m = Mat::Zero(d, d);
  m.diagonal() = samples;
  return SpatialOperator{d, std::move(m), tags};
}

SpatialOperator multiplication_operator(const RealVec& samples) {
  return multiplication_operator(Vec(samples.cast<Complex>()));
}

SpatialOperator operator_add(const SpatialOperator& a, const SpatialOperator& b) {
  if (a.dim != b.dim) throw ContractViolation("operator_add: dimension mismatch");
  OpTags tags;
  tags.skew_adjoint = a.tags.skew_adjoint && b.tags.skew_adjoint;
  tags.diagonal = a.tags.diagonal && b.tags.diagonal;
  return SpatialOperator{a.dim, a.matrix + b.matrix, tags};
}

SpatialOperator operator_scale(Complex c, const SpatialOperator& a) {
  OpTags tags;
  tags.diagonal = a.tags.diagonal;
  tags.skew_adjoint = a.tags.skew_adjoint && c.imag() == 0.0;
  return SpatialOperator{a.dim, c * a.matrix, tags};
}

Mat hermitian_part(const Mat& m) { return 0.5 * (m + m.adjoint()); }

double lambda_min_hermitian(const Mat& hermitian) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("lambda_min_hermitian: eigensolver failed", 0.0);
  return es.eigenvalues().minCoeff();
}

double operator_norm(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(Mat(m.adjoint() * m), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("operator_norm: eigensolver failed", 0.0);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

ResolventSolver::ResolventSolver(const SpatialOperator& C, const SpatialOperator& A,
                                 double alpha)
    : alpha_(alpha) {
  if (!A.tags.skew_adjoint)
    throw ContractViolation("ResolventSolver: A must be tagged skew_adjoint");
  if (C.dim != A.dim) throw ContractViolation("ResolventSolver: dimension mismatch");
  if (alpha <= 0.0) throw ContractViolation("ResolventSolver: alpha must be > 0");
  m_ = C.matrix + A.matrix;
  lu_.compute(m_);
}

Vec ResolventSolver::solve(const Vec& psi) const {
  if (psi.size() != m_.rows()) throw ContractViolation("ResolventSolver: psi size mismatch");
  const double psi_norm = psi.norm();
  Vec phi = lu_.solve(psi);
  if (psi_norm == 0.0) return phi;
  Vec r = psi - m_ * phi;
  if (r.norm() > 0.1 * kResolventResidualTol * psi_norm) {
    phi += lu_.solve(r);  // one refinement pass
    r = psi - m_ * phi;
  }
  const double rel_residual = r.norm() / psi_norm;
  if (rel_residual > kResolventResidualTol) {
    std::ostringstream msg;
    msg << "resolvent_solve: residual " << rel_residual << " exceeds " << kResolventResidualTol;
    throw NumericalError(msg.str(), rel_residual);
  }
  const double bound = (1.0 / alpha_) * psi_norm * (1.0 + kResolventNormSlack);
  if (phi.norm() > bound) {
    std::ostringstream msg;
    msg << "resolvent_solve: ||phi|| = " << phi.norm() << " violates the 1/alpha bound "
        << bound;
    throw NumericalError(msg.str(), phi.norm() / psi_norm);
  }
  return phi;
}

Vec resolvent_solve(const SpatialOperator& C, const SpatialOperator& A, const Vec& psi,
                    double alpha) {
  return ResolventSolver(C, A, alpha).solve(psi);
}

}  // namespace evolab
