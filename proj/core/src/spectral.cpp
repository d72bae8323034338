#include "spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace meps::detail {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

std::size_t half_size(const TorusGrid& grid) {
  const std::size_t half = std::size_t(grid.n() / 2 + 1);
  return grid.dim() == 1 ? half : std::size_t(grid.n()) * half;
}

// FFTW planning is not thread-safe; execution through the new-array API is.
const PlanPair& plans_for(const TorusGrid& grid) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard lock(mutex);
  auto [it, inserted] = cache.try_emplace({grid.dim(), grid.n()});
  if (inserted) {
    std::vector<double> real(grid.size());
    std::vector<std::complex<double>> spec(half_size(grid));
    auto* c = reinterpret_cast<fftw_complex*>(spec.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (grid.dim() == 1) {
      it->second.forward = fftw_plan_dft_r2c_1d(grid.n(), real.data(), c, flags);
      it->second.inverse = fftw_plan_dft_c2r_1d(grid.n(), c, real.data(), flags);
    } else {
      it->second.forward = fftw_plan_dft_r2c_2d(grid.n(), grid.n(), real.data(), c, flags);
      it->second.inverse = fftw_plan_dft_c2r_2d(grid.n(), grid.n(), c, real.data(), flags);
    }
  }
  return it->second;
}

}  // namespace

Spectrum::Spectrum(const ScalarField& f) : grid_(f.grid()), coeffs_(half_size(f.grid())) {
  std::vector<double> input(f.values().begin(), f.values().end());
  fftw_execute_dft_r2c(plans_for(grid_).forward, input.data(),
                       reinterpret_cast<fftw_complex*>(coeffs_.data()));
}

std::array<int, 2> Spectrum::wavenumber(std::size_t i) const noexcept {
  const int n = grid_.n();
  if (grid_.dim() == 1) return {int(i), 0};
  const int half = n / 2 + 1;
  const int j0 = int(i) / half;
  const int j1 = int(i) % half;
  return {j0 <= n / 2 ? j0 : j0 - n, j1};
}

ScalarField Spectrum::to_field() const {
  // c2r overwrites its input.
  std::vector<std::complex<double>> scratch = coeffs_;
  std::vector<double> out(grid_.size());
  fftw_execute_dft_c2r(plans_for(grid_).inverse, reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
  const double scale = 1.0 / double(grid_.size());
  for (double& v : out) v *= scale;
  return ScalarField(grid_, std::move(out));
}

}  // namespace meps::detail
