#pragma once

#include "evolab/common.hpp"
#include "evolab/time_axis.hpp"

#include <cmath>

namespace evolab::testing {

inline WeightedSignal gaussian_signal(const TimeGrid& grid, double rho, double center,
                                      double width, int dim = 1) {
  Mat values(dim, grid.n_samples());
  for (int s = 0; s < grid.n_samples(); ++s) {
    const double v = std::exp(-std::pow((grid.time(s) - center) / width, 2));
    for (int i = 0; i < dim; ++i) values(i, s) = v * (1.0 + 0.25 * i);
  }
  return WeightedSignal(grid, std::move(values), rho);
}

inline WeightedSignal random_interior_signal(const TimeGrid& grid, double rho, std::uint64_t seed,
                                             int dim = 1) {
  // Random superposition of interior-supported Gaussians (smooth, compact).
  Rng rng(seed);
  Mat values = Mat::Zero(dim, grid.n_samples());
  const double t0 = grid.t_min();
  const double span = grid.duration();
  for (int b = 0; b < 5; ++b) {
    const double c = t0 + span * rng.uniform(0.35, 0.65);
    const double w = span * rng.uniform(0.02, 0.06);
    for (int i = 0; i < dim; ++i) {
      const Complex amp(rng.normal(), rng.normal());
      for (int s = 0; s < grid.n_samples(); ++s)
        values(i, s) += amp * std::exp(-std::pow((grid.time(s) - c) / w, 2));
    }
  }
  return WeightedSignal(grid, std::move(values), rho);
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace evolab::testing
