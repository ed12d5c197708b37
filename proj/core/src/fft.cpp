#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace evolab::detail {

namespace {

struct PlanEntry {
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex g_fft_mutex;
std::map<int, PlanEntry>& plan_cache() {
  static std::map<int, PlanEntry> cache;
  return cache;
}

PlanEntry& plan_for(int n) {
  auto& cache = plan_cache();
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  PlanEntry e;
  e.buf = fftw_alloc_complex(static_cast<std::size_t>(n));
  e.fwd = fftw_plan_dft_1d(n, e.buf, e.buf, FFTW_FORWARD, FFTW_ESTIMATE);
  e.bwd = fftw_plan_dft_1d(n, e.buf, e.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  return cache.emplace(n, e).first->second;
}

}  // namespace

void fft_rows_inplace(Eigen::MatrixXcd& m, int sign) {
  const int n = static_cast<int>(m.cols());
  const int rows = static_cast<int>(m.rows());
  if (n == 0 || rows == 0) return;
  std::lock_guard<std::mutex> lock(g_fft_mutex);
  PlanEntry& plan = plan_for(n);
  auto* buf = reinterpret_cast<std::complex<double>*>(plan.buf);
  for (int r = 0; r < rows; ++r) {
    for (int s = 0; s < n; ++s) buf[s] = m(r, s);
    fftw_execute(sign < 0 ? plan.fwd : plan.bwd);
    for (int s = 0; s < n; ++s) m(r, s) = buf[s];
  }
}

}  // namespace evolab::detail
