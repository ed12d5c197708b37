#pragma once

#include <Eigen/Dense>

namespace evolab::detail {

// In-place DFT along each row of m (length = cols). sign = -1 is the
// forward transform sum_s x_s e^{-2pi i k s / n}, sign = +1 the unscaled
// inverse. Backed by FFTW; plans are cached per length behind a mutex, so
// concurrent calls are safe (executions on the shared buffer serialize).
void fft_rows_inplace(Eigen::MatrixXcd& m, int sign);

}  // namespace evolab::detail
