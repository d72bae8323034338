#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace meps {

/// Point or constant vector in R^d; the second entry is unused when d = 1.
using Vec2 = std::array<double, 2>;

/// Uniform periodic grid on the unit d-torus, d in {1, 2}, n points per axis.
/// Points are stored row-major with the last axis fastest.
class TorusGrid {
 public:
  TorusGrid(int dim, int points_per_axis);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double spacing() const noexcept { return 1.0 / n_; }
  std::size_t size() const noexcept { return dim_ == 1 ? n_ : std::size_t(n_) * n_; }
  double cell_volume() const noexcept { return dim_ == 1 ? spacing() : spacing() * spacing(); }
  double coordinate(std::size_t index, int axis) const noexcept;
  Vec2 point(std::size_t index) const noexcept;

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  int dim_;
  int n_;
};

class ScalarField {
 public:
  explicit ScalarField(const TorusGrid& grid, double value = 0.0);
  ScalarField(const TorusGrid& grid, std::vector<double> values);

  static ScalarField from_function(const TorusGrid& grid, const std::function<double(Vec2)>& f);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  double mean() const noexcept;
  double min() const noexcept;
  double max() const noexcept;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(const ScalarField& other);
  ScalarField& operator+=(double value) noexcept;
  ScalarField& operator*=(double value) noexcept;

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField operator-(ScalarField a);

/// d collocated components.
class VectorField {
 public:
  explicit VectorField(const TorusGrid& grid, Vec2 value = {0.0, 0.0});
  VectorField(const TorusGrid& grid, std::vector<ScalarField> components);

  const TorusGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return grid_.dim(); }
  const ScalarField& operator[](int axis) const noexcept { return components_[axis]; }
  ScalarField& operator[](int axis) noexcept { return components_[axis]; }
  Vec2 at(std::size_t point) const noexcept;

  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  VectorField& operator+=(const VectorField& other);
  VectorField& operator-=(const VectorField& other);
  VectorField& operator+=(Vec2 constant) noexcept;
  VectorField& operator*=(double s) noexcept;
  VectorField& operator*=(const ScalarField& s);

 private:
  TorusGrid grid_;
  std::vector<ScalarField> components_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(const ScalarField& s, VectorField u);
VectorField operator*(double s, VectorField u);

ScalarField dot(const VectorField& u, const VectorField& w);
ScalarField norm_squared(const VectorField& u);

/// Upper triangle of a symmetric d x d field: (00) for d = 1, (00, 01, 11) for d = 2.
class SymTensorField {
 public:
  explicit SymTensorField(const TorusGrid& grid);

  const TorusGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return grid_.dim(); }
  static int component_count(int dim) noexcept { return dim * (dim + 1) / 2; }
  const ScalarField& operator()(int i, int j) const noexcept { return components_[slot(i, j)]; }
  ScalarField& operator()(int i, int j) noexcept { return components_[slot(i, j)]; }

 private:
  int slot(int i, int j) const noexcept;

  TorusGrid grid_;
  std::vector<ScalarField> components_;
};

// Spectral operators. Odd derivatives drop the Nyquist mode; the Laplacian keeps it.
ScalarField partial(const ScalarField& f, int axis);
VectorField grad(const ScalarField& f);
ScalarField div(const VectorField& u);
ScalarField laplacian(const ScalarField& f);
/// grad u + (grad u)^T.
SymTensorField sym_grad(const VectorField& u);

/// Solves epsilon * Lap(psi) = source with mean(psi) = 0.
/// Throws MepsError(kNonZeroMeanSource) if |mean(source)| > 1e-10.
ScalarField poisson_solve(const ScalarField& source, double epsilon);

/// 2/3-rule filter: zeroes every mode with 3|k_axis| > n on some axis.
ScalarField dealias(const ScalarField& f);

/// h^d * sum of values.
double integrate(const ScalarField& f);

ScalarField max_eigenvalue_field(const SymTensorField& s);
ScalarField min_eigenvalue_field(const SymTensorField& s);

}  // namespace meps
