#pragma once

#include <complex>
#include <vector>

#include "meps/torus_field.hpp"

namespace meps::detail {

/// Half-complex spectrum of a real field (FFTW r2c layout, last axis halved).
class Spectrum {
 public:
  explicit Spectrum(const ScalarField& f);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::complex<double>& operator[](std::size_t i) noexcept { return coeffs_[i]; }

  /// Signed wavenumbers of slot i; the second entry is 0 when d = 1.
  std::array<int, 2> wavenumber(std::size_t i) const noexcept;

  ScalarField to_field() const;

 private:
  TorusGrid grid_;
  std::vector<std::complex<double>> coeffs_;
};

}  // namespace meps::detail
