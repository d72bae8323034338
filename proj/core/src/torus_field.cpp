#include "meps/torus_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "meps/errors.hpp"
#include "spectral.hpp"

namespace meps {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_grid(const TorusGrid& a, const TorusGrid& b) {
  if (!(a == b)) throw MepsError(ErrorKind::kInvalidArgument, "fields live on different grids");
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

TorusGrid::TorusGrid(int dim, int points_per_axis) : dim_(dim), n_(points_per_axis) {
  if (dim != 1 && dim != 2) {
    throw MepsError(ErrorKind::kInvalidArgument, "dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (points_per_axis < 8 || !is_power_of_two(points_per_axis)) {
    throw MepsError(ErrorKind::kInvalidArgument,
                    "points per axis must be a power of two >= 8, got " + std::to_string(points_per_axis));
  }
}

double TorusGrid::coordinate(std::size_t index, int axis) const noexcept {
  if (dim_ == 1) return double(index) * spacing();
  const std::size_t i = axis == 0 ? index / std::size_t(n_) : index % std::size_t(n_);
  return double(i) * spacing();
}

Vec2 TorusGrid::point(std::size_t index) const noexcept {
  return {coordinate(index, 0), dim_ == 2 ? coordinate(index, 1) : 0.0};
}

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(const TorusGrid& grid, double value) : grid_(grid), values_(grid.size(), value) {}

ScalarField::ScalarField(const TorusGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw MepsError(ErrorKind::kInvalidArgument, "value count does not match grid size");
  }
}

ScalarField ScalarField::from_function(const TorusGrid& grid, const std::function<double(Vec2)>& f) {
  ScalarField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f(grid.point(i));
  return out;
}

double ScalarField::mean() const noexcept {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum / double(values_.size());
}

double ScalarField::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator+=(double value) noexcept {
  for (double& v : values_) v += value;
  return *this;
}

ScalarField& ScalarField::operator*=(double value) noexcept {
  for (double& v : values_) v *= value;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }

// ---------------------------------------------------------------- VectorField

VectorField::VectorField(const TorusGrid& grid, Vec2 value) : grid_(grid) {
  for (int a = 0; a < grid.dim(); ++a) components_.emplace_back(grid, value[a]);
}

VectorField::VectorField(const TorusGrid& grid, std::vector<ScalarField> components)
    : grid_(grid), components_(std::move(components)) {
  if (int(components_.size()) != grid.dim()) {
    throw MepsError(ErrorKind::kInvalidArgument, "vector field needs one component per axis");
  }
  for (const auto& c : components_) require_same_grid(grid_, c.grid());
}

Vec2 VectorField::at(std::size_t point) const noexcept {
  return {components_[0][point], dim() == 2 ? components_[1][point] : 0.0};
}

double VectorField::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& c : components_) m = std::max(m, c.max_abs());
  return m;
}

bool VectorField::all_finite() const noexcept {
  return std::all_of(components_.begin(), components_.end(), [](const auto& c) { return c.all_finite(); });
}

VectorField& VectorField::operator+=(const VectorField& other) {
  for (int a = 0; a < dim(); ++a) components_[a] += other.components_[a];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
  for (int a = 0; a < dim(); ++a) components_[a] -= other.components_[a];
  return *this;
}

VectorField& VectorField::operator+=(Vec2 constant) noexcept {
  for (int a = 0; a < dim(); ++a) components_[a] += constant[a];
  return *this;
}

VectorField& VectorField::operator*=(double s) noexcept {
  for (auto& c : components_) c *= s;
  return *this;
}

VectorField& VectorField::operator*=(const ScalarField& s) {
  for (auto& c : components_) c *= s;
  return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(const ScalarField& s, VectorField u) { return u *= s; }
VectorField operator*(double s, VectorField u) { return u *= s; }

ScalarField dot(const VectorField& u, const VectorField& w) {
  ScalarField out = u[0] * w[0];
  if (u.dim() == 2) out += u[1] * w[1];
  return out;
}

ScalarField norm_squared(const VectorField& u) { return dot(u, u); }

// ------------------------------------------------------------- SymTensorField

SymTensorField::SymTensorField(const TorusGrid& grid) : grid_(grid) {
  for (int i = 0; i < component_count(grid.dim()); ++i) components_.emplace_back(grid);
}

int SymTensorField::slot(int i, int j) const noexcept {
  if (i > j) std::swap(i, j);
  return dim() == 1 ? 0 : (i == 0 ? j : 2);
}

// ----------------------------------------------------------------- operators

ScalarField partial(const ScalarField& f, int axis) {
  detail::Spectrum s(f);
  const int nyquist = f.grid().n() / 2;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const int k = s.wavenumber(i)[axis];
    s[i] *= (std::abs(k) == nyquist) ? std::complex<double>(0.0) : std::complex<double>(0.0, kTwoPi * k);
  }
  return s.to_field();
}

VectorField grad(const ScalarField& f) {
  std::vector<ScalarField> comps;
  for (int a = 0; a < f.grid().dim(); ++a) comps.push_back(partial(f, a));
  return VectorField(f.grid(), std::move(comps));
}

ScalarField div(const VectorField& u) {
  ScalarField out = partial(u[0], 0);
  if (u.dim() == 2) out += partial(u[1], 1);
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  detail::Spectrum s(f);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto k = s.wavenumber(i);
    s[i] *= -kTwoPi * kTwoPi * double(k[0] * k[0] + k[1] * k[1]);
  }
  return s.to_field();
}

SymTensorField sym_grad(const VectorField& u) {
  SymTensorField out(u.grid());
  const int d = u.dim();
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      ScalarField entry = partial(u[i], j);
      if (i == j) {
        entry *= 2.0;
      } else {
        entry += partial(u[j], i);
      }
      out(i, j) = std::move(entry);
    }
  }
  return out;
}

ScalarField poisson_solve(const ScalarField& source, double epsilon) {
  if (!(epsilon > 0.0)) throw MepsError(ErrorKind::kInvalidArgument, "epsilon must be positive");
  const double m = source.mean();
  if (std::abs(m) > 1e-10) {
    throw MepsError(ErrorKind::kNonZeroMeanSource, "Poisson source has mean " + std::to_string(m));
  }
  detail::Spectrum s(source);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto k = s.wavenumber(i);
    const int k2 = k[0] * k[0] + k[1] * k[1];
    s[i] = k2 == 0 ? std::complex<double>(0.0) : s[i] / (-epsilon * kTwoPi * kTwoPi * double(k2));
  }
  return s.to_field();
}

ScalarField dealias(const ScalarField& f) {
  detail::Spectrum s(f);
  const int n = f.grid().n();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto k = s.wavenumber(i);
    if (3 * std::abs(k[0]) > n || 3 * std::abs(k[1]) > n) s[i] = 0.0;
  }
  return s.to_field();
}

double integrate(const ScalarField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum * f.grid().cell_volume();
}

namespace {

template <bool kLargest>
ScalarField extreme_eigenvalue(const SymTensorField& s) {
  ScalarField out(s.grid());
  if (s.dim() == 1) {
    out = s(0, 0);
    return out;
  }
  const auto& a = s(0, 0);
  const auto& b = s(0, 1);
  const auto& c = s(1, 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double mid = 0.5 * (a[i] + c[i]);
    const double radius = std::hypot(0.5 * (a[i] - c[i]), b[i]);
    out[i] = kLargest ? mid + radius : mid - radius;
  }
  return out;
}

}  // namespace

ScalarField max_eigenvalue_field(const SymTensorField& s) { return extreme_eigenvalue<true>(s); }
ScalarField min_eigenvalue_field(const SymTensorField& s) { return extreme_eigenvalue<false>(s); }

}  // namespace meps
