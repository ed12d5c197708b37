#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace evolab {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;
using Mat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Thrown when a caller violates a documented precondition.
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a computation fails to meet its accuracy contract.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Runs fn(i) for i in [0, count). Work is split into contiguous blocks so
/// every index is handled exactly once; fn must write only to its own slot.
/// Thread count is capped by the EVOLAB_THREADS environment variable.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

std::size_t effective_thread_count();

/// Deterministic generator used for seeded test vectors (splitmix64 core).
/// Uniform and normal variates are derived by hand so that streams do not
/// depend on the standard library's unspecified distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Uniform on [0,1).
  double uniform();
  /// Uniform on [lo,hi).
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::uint64_t next_u64();
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace evolab
