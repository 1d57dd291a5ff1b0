#pragma once

// Parity decomposition of a band-limited field into 2^d virtual functions.
//
// ZeroMax: S = sum_mu v_mu * prod_a (cos^2 or sin^2)(pi x_a / 2), so the
// function with parity mask mu simply holds S on the sites of that parity.
// Central: S = sum_mu v_mu * prod_a (cos or sin)(pi x_a / 2); the trig weight is
// +-1 on the matching sites and v_mu = S * weight.
//
// Functions live on compacted (N/2)^d sub-grids; site = 2 * subsite + parity.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lwave/errors.hpp"
#include "lwave/filter_design.hpp"
#include "lwave/grid.hpp"

namespace lwave {

/// Per-axis trig weight at an integer coordinate: cos(pi x/2) for even x, sin(pi x/2) for odd x.
/// +1 for x = 0,1 (mod 4), -1 for x = 2,3 (mod 4).
constexpr int central_axis_sign(int x) { return wrap_index(x, 4) < 2 ? 1 : -1; }

inline int central_sign(const Site& site, int dim) {
  int s = 1;
  for (int a = 0; a < dim; ++a) s *= central_axis_sign(site[a]);
  return s;
}

inline int band_weight(FilterBand band, const Site& site, int dim) {
  return band == FilterBand::Central ? central_sign(site, dim) : 1;
}

namespace detail {

struct NamedMask {
  std::string_view name;
  unsigned mask;
};

// Parity masks use bit 0 = x odd, bit 1 = y odd, bit 2 = z odd.
inline constexpr std::array<NamedMask, 2> kNames1d{{{"p", 0b0}, {"q", 0b1}}};
inline constexpr std::array<NamedMask, 4> kNames2d{{{"p", 0b00}, {"r", 0b01}, {"q", 0b11}, {"s", 0b10}}};
inline constexpr std::array<NamedMask, 8> kNames3d{{{"p0", 0b000},
                                                   {"q0", 0b111},
                                                   {"p1", 0b110},
                                                   {"q1", 0b001},
                                                   {"p2", 0b101},
                                                   {"q2", 0b010},
                                                   {"p3", 0b011},
                                                   {"q3", 0b100}}};

template <std::size_t M>
std::string name_in(const std::array<NamedMask, M>& table, unsigned mask) {
  for (const auto& e : table) {
    if (e.mask == mask) return std::string(e.name);
  }
  throw DomainError("parity mask out of range");
}

template <std::size_t M>
unsigned mask_in(const std::array<NamedMask, M>& table, std::string_view name) {
  for (const auto& e : table) {
    if (e.name == name) return e.mask;
  }
  throw DomainError("unknown virtual function '" + std::string(name) + "'");
}

}  // namespace detail

/// Conventional name of the virtual function with parity `mask`:
/// p,q (1D); p,q,r,s (2D); p0..p3,q0..q3 (3D); v0..v15 (4D, v<mask>).
inline std::string virtual_function_name(int dim, unsigned mask) {
  switch (dim) {
    case 1: return detail::name_in(detail::kNames1d, mask);
    case 2: return detail::name_in(detail::kNames2d, mask);
    case 3: return detail::name_in(detail::kNames3d, mask);
    default:
      if (mask >= 16u) throw DomainError("parity mask out of range");
      return "v" + std::to_string(mask);
  }
}

inline unsigned virtual_function_mask(int dim, std::string_view name) {
  switch (dim) {
    case 1: return detail::mask_in(detail::kNames1d, name);
    case 2: return detail::mask_in(detail::kNames2d, name);
    case 3: return detail::mask_in(detail::kNames3d, name);
    default: {
      if (name.size() < 2 || name[0] != 'v') throw DomainError("unknown virtual function '" + std::string(name) + "'");
      return static_cast<unsigned>(std::stoul(std::string(name.substr(1))));
    }
  }
}

template <class T>
class VirtualSet {
 public:
  VirtualSet(GridShape shape, FilterBand band)
      : shape_(shape),
        band_(band),
        sub_shape_extent_(shape.extent() / 2),
        functions_(std::size_t{1} << shape.dim()),
        signs_(band == FilterBand::Central ? std::size_t{1} << shape.dim() : 0) {
    const std::size_t sub_sites = sub_site_count();
    for (auto& f : functions_) f.assign(sub_sites, T(0));
    for (unsigned mask = 0; mask < signs_.size(); ++mask) {
      signs_[mask].resize(sub_sites);
      for (std::size_t j = 0; j < sub_sites; ++j) {
        signs_[mask][j] = static_cast<std::int8_t>(central_sign(site_of(mask, j), shape_.dim()));
      }
    }
  }

  const GridShape& shape() const { return shape_; }
  FilterBand band() const { return band_; }
  unsigned count() const { return static_cast<unsigned>(functions_.size()); }
  int sub_extent() const { return sub_shape_extent_; }

  std::size_t sub_site_count() const {
    std::size_t c = 1;
    for (int a = 0; a < shape_.dim(); ++a) c *= static_cast<std::size_t>(sub_shape_extent_);
    return c;
  }

  std::span<T> function(unsigned mask) { return functions_.at(mask); }
  std::span<const T> function(unsigned mask) const { return functions_.at(mask); }

  /// Sub-grid linear index (x fastest) of a sub-site, coordinates reduced modulo N/2.
  std::size_t sub_linear(const Site& subsite) const {
    std::size_t idx = 0;
    for (int a = shape_.dim() - 1; a >= 0; --a) {
      idx = idx * static_cast<std::size_t>(sub_shape_extent_) +
            static_cast<std::size_t>(wrap_index(subsite[a], sub_shape_extent_));
    }
    return idx;
  }

  Site sub_coords(std::size_t j) const {
    Site s{};
    for (int a = 0; a < shape_.dim(); ++a) {
      s[a] = static_cast<int>(j % static_cast<std::size_t>(sub_shape_extent_));
      j /= static_cast<std::size_t>(sub_shape_extent_);
    }
    return s;
  }

  /// Full-grid site of sub-site j of the function with parity mask.
  Site site_of(unsigned mask, std::size_t j) const {
    Site sub = sub_coords(j);
    Site s{};
    for (int a = 0; a < shape_.dim(); ++a) s[a] = 2 * sub[a] + static_cast<int>((mask >> a) & 1u);
    return s;
  }

  const T& value(unsigned mask, const Site& subsite) const { return functions_.at(mask)[sub_linear(subsite)]; }

  /// Sign of the trig weight carried by the site (always +1 for ZeroMax).
  int sign(unsigned mask, std::size_t j) const { return signs_.empty() ? 1 : signs_.at(mask)[j]; }

 private:
  GridShape shape_;
  FilterBand band_;
  int sub_shape_extent_;
  std::vector<std::vector<T>> functions_;
  std::vector<std::vector<std::int8_t>> signs_;
};

template <class T>
VirtualSet<T> decompose(const GridField<T>& field, FilterBand band) {
  VirtualSet<T> vs(field.shape(), band);
  const std::size_t sub_sites = vs.sub_site_count();
  for (unsigned mask = 0; mask < vs.count(); ++mask) {
    auto fn = vs.function(mask);
    for (std::size_t j = 0; j < sub_sites; ++j) {
      const T& s = field.at(vs.site_of(mask, j));
      fn[j] = vs.sign(mask, j) > 0 ? s : T(-s);
    }
  }
  return vs;
}

template <class T>
GridField<T> recompose(const VirtualSet<T>& vs) {
  GridField<T> field(vs.shape());
  const std::size_t sub_sites = vs.sub_site_count();
  for (unsigned mask = 0; mask < vs.count(); ++mask) {
    auto fn = vs.function(mask);
    for (std::size_t j = 0; j < sub_sites; ++j) {
      field.at(vs.site_of(mask, j)) = vs.sign(mask, j) > 0 ? fn[j] : T(-fn[j]);
    }
  }
  return field;
}

}  // namespace lwave
