#pragma once

// Periodic d-dimensional lattices (1 <= d <= 4) and time-stacked histories.
// Storage is axis-major with x fastest; sites are addressed by index vectors.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lwave/errors.hpp"
#include "lwave/filter_design.hpp"
#include "lwave/scalar_traits.hpp"

namespace lwave {

inline constexpr int kMaxDim = 4;

/// Coordinates of a lattice site (or an offset); entries beyond the grid dimension are ignored.
using Site = std::array<int, kMaxDim>;

inline constexpr int wrap_index(int x, int n) {
  const int r = x % n;
  return r < 0 ? r + n : r;
}

class GridShape {
 public:
  GridShape(int dim, int extent) : dim_(dim), extent_(extent) {
    if (dim < 1 || dim > kMaxDim) {
      throw DomainError("grid dimension must be in [1, 4], got " + std::to_string(dim));
    }
    if (extent < 4 || extent % 2 != 0) {
      throw DomainError("grid extent must be even and >= 4, got " + std::to_string(extent));
    }
  }

  int dim() const { return dim_; }
  int extent() const { return extent_; }

  std::size_t site_count() const {
    std::size_t count = 1;
    for (int a = 0; a < dim_; ++a) count *= static_cast<std::size_t>(extent_);
    return count;
  }

  /// Distance in the linear index between neighbors along `axis`.
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = 0; a < axis; ++a) s *= static_cast<std::size_t>(extent_);
    return s;
  }

  /// Linear index of a site; coordinates are reduced modulo N.
  std::size_t linear(const Site& site) const {
    std::size_t idx = 0;
    for (int a = dim_ - 1; a >= 0; --a) {
      idx = idx * static_cast<std::size_t>(extent_) + static_cast<std::size_t>(wrap_index(site[a], extent_));
    }
    return idx;
  }

  Site coords(std::size_t linear_index) const {
    Site s{};
    for (int a = 0; a < dim_; ++a) {
      s[a] = static_cast<int>(linear_index % static_cast<std::size_t>(extent_));
      linear_index /= static_cast<std::size_t>(extent_);
    }
    return s;
  }

  /// Bit a set iff coordinate a of the site is odd.
  unsigned parity_mask(const Site& site) const {
    unsigned mask = 0;
    for (int a = 0; a < dim_; ++a) mask |= static_cast<unsigned>(site[a] & 1) << a;
    return mask;
  }

  friend bool operator==(const GridShape&, const GridShape&) = default;

 private:
  int dim_;
  int extent_;
};

/// Real (or complex test-extension) scalar field on a periodic lattice at time index tau.
template <class T>
class GridField {
 public:
  using value_type = T;

  explicit GridField(GridShape shape, std::int64_t tau = 0)
      : shape_(shape), tau_(tau), values_(shape.site_count(), T(0)) {}

  GridField(GridShape shape, std::vector<T> values, std::int64_t tau = 0)
      : shape_(shape), tau_(tau), values_(std::move(values)) {
    if (values_.size() != shape_.site_count()) {
      throw DomainError("field has " + std::to_string(values_.size()) + " values, grid needs " +
                        std::to_string(shape_.site_count()));
    }
    if (tau_ < 0) throw DomainError("time index must be non-negative");
    for (const auto& v : values_) {
      if (!is_finite_value(v)) throw DomainError("field values must be finite");
    }
  }

  const GridShape& shape() const { return shape_; }
  std::int64_t tau() const { return tau_; }
  void set_tau(std::int64_t tau) { tau_ = tau; }

  std::size_t size() const { return values_.size(); }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }
  T& at(const Site& site) { return values_[shape_.linear(site)]; }
  const T& at(const Site& site) const { return values_[shape_.linear(site)]; }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, magnitude_of(v));
    return m;
  }

 private:
  GridShape shape_;
  std::int64_t tau_;
  std::vector<T> values_;
};

/// Periodic neighbor access: S at (site + offset) mod N on every axis.
template <class T>
const T& shift_sample(const GridField<T>& field, const Site& site, const Site& offset) {
  const auto& shape = field.shape();
  Site target{};
  for (int a = 0; a < shape.dim(); ++a) {
    if (offset[a] <= -shape.extent() || offset[a] >= shape.extent()) {
      throw DomainError("shift offset must satisfy |offset| < N");
    }
    target[a] = site[a] + offset[a];
  }
  return field.at(target);
}

template <class To, class From>
GridField<To> convert_field(const GridField<From>& field) {
  std::vector<To> values;
  values.reserve(field.size());
  for (const auto& v : field.values()) {
    if constexpr (std::is_same_v<To, From>) {
      values.push_back(v);
    } else if constexpr (is_complex_v<To> && !is_complex_v<From>) {
      values.push_back(To(to_double(v), 0.0));
    } else if constexpr (std::is_arithmetic_v<To>) {
      values.push_back(static_cast<To>(to_double(v)));
    } else {
      values.push_back(To(v));
    }
  }
  return GridField<To>(field.shape(), std::move(values), field.tau());
}

/// Frames S(., tau) for tau = 0..K-1 with the per-frame max |S| recorded.
template <class T>
class History {
 public:
  explicit History(GridShape shape, FilterBand band = FilterBand::ZeroMax) : shape_(shape), band_(band) {}

  const GridShape& shape() const { return shape_; }
  FilterBand band() const { return band_; }
  void set_band(FilterBand band) { band_ = band; }

  std::size_t frame_count() const { return frames_.size(); }
  const GridField<T>& frame(std::size_t k) const { return frames_.at(k); }
  const std::vector<GridField<T>>& frames() const { return frames_; }

  /// Appends the next frame; frames must share the shape and carry consecutive tau from 0.
  void push_back(GridField<T> frame) {
    if (!(frame.shape() == shape_)) throw DomainError("history frame shape mismatch");
    if (frame.tau() != static_cast<std::int64_t>(frames_.size())) {
      throw DomainError("history frames must be contiguous in tau: expected " + std::to_string(frames_.size()) +
                        ", got " + std::to_string(frame.tau()));
    }
    max_abs_.push_back(frame.max_abs());
    frames_.push_back(std::move(frame));
  }

  /// max |S| of each frame.
  const std::vector<double>& growth() const { return max_abs_; }

 private:
  GridShape shape_;
  FilterBand band_;
  std::vector<GridField<T>> frames_;
  std::vector<double> max_abs_;
};

}  // namespace lwave
