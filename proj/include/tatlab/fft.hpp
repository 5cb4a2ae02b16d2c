#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <type_traits>
#include <vector>

#include <fftw3.h>

namespace tat::fft {

using cplx = std::complex<double>;
static_assert(sizeof(cplx) == sizeof(fftw_complex));

enum class Direction : int { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

// FFTW's planner is not thread-safe; execution is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

namespace detail {
struct PlanDeleter {
  void operator()(std::remove_pointer_t<fftw_plan>* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDeleter>;

inline fftw_complex* as_fftw(std::vector<cplx>& v) {
  return reinterpret_cast<fftw_complex*>(v.data());
}
}  // namespace detail

/// In-place unnormalized 2D DFT of ny rows by nx columns (x fastest).
inline void dft2(std::vector<cplx>& data, std::size_t nx, std::size_t ny, Direction dir) {
  detail::Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_2d(int(ny), int(nx), detail::as_fftw(data), detail::as_fftw(data),
                                int(dir), FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());
}

/// In-place unnormalized 1D DFT.
inline void dft1(std::vector<cplx>& data, Direction dir) {
  detail::Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_1d(int(data.size()), detail::as_fftw(data), detail::as_fftw(data),
                                int(dir), FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());
}

/// Angular frequency of DFT bin `k` for n samples at the given spacing.
inline double angular_frequency(std::size_t k, std::size_t n, double spacing) {
  const double signed_k = k <= n / 2 ? double(k) : double(k) - double(n);
  return 2.0 * std::numbers::pi * signed_k / (double(n) * spacing);
}

}  // namespace tat::fft
