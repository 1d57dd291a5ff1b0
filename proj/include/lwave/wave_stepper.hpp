#pragma once

// Band-specific iterative propagation on d = 1..4 periodic grids:
//
//   S'(x) = S(x) + sum_axes M_a(x) sum_m alpha_n(m) [S(x + o_m e_a) -+ S(x - o_m e_a)],  o_m = 2m - 1
//
// with "-" for the [0]+[N/2] zones and "+" for the [N/4] band, and M_a(x) = (-1)^(e_a . x)
// the per-axis sign multiplier.

#include <array>
#include <bit>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lwave/errors.hpp"
#include "lwave/filter_design.hpp"
#include "lwave/grid.hpp"
#include "lwave/scalar_traits.hpp"

namespace lwave {

enum class UpdateMode : std::uint8_t {
  Synchronous,   ///< every read from frame tau
  SweepInPlace,  ///< ascending linear order; reads see sites already updated this step
};

inline std::string_view to_string(UpdateMode mode) {
  return mode == UpdateMode::Synchronous ? "sync" : "sweep";
}

inline UpdateMode parse_mode(std::string_view text) {
  if (text == "sync") return UpdateMode::Synchronous;
  if (text == "sweep") return UpdateMode::SweepInPlace;
  throw DomainError("unknown update mode '" + std::string(text) + "' (expected sync or sweep)");
}

/// Per-axis exponent vectors: axis a multiplies by (-1)^(e_a . x). Bit b of exponent(a) is the
/// coefficient of coordinate b.
class MultiplierRule {
 public:
  MultiplierRule(int dim, FilterBand band, std::array<unsigned, kMaxDim> exponents)
      : dim_(dim), band_(band), exponents_(exponents) {
    if (dim < 1 || dim > kMaxDim) throw DomainError("multiplier rule dimension must be in [1, 4]");
    const unsigned limit = 1u << dim;
    for (int a = 0; a < kMaxDim; ++a) {
      if (a >= dim) {
        exponents_[a] = 0;
      } else if (exponents_[a] >= limit) {
        throw DomainError("multiplier exponent refers to an axis beyond the grid dimension");
      }
    }
  }

  int dim() const { return dim_; }
  FilterBand band() const { return band_; }
  unsigned exponent(int axis) const { return exponents_.at(static_cast<std::size_t>(axis)); }
  const std::array<unsigned, kMaxDim>& exponents() const { return exponents_; }

  /// Multiplier of `axis` on sites whose parity mask is `parity` (bit b = coordinate b odd).
  int multiplier(int axis, unsigned parity) const {
    return (std::popcount(exponents_[static_cast<std::size_t>(axis)] & parity) & 1) ? -1 : 1;
  }

  /// e.g. "X=1, Y=(-1)^(x)".
  std::string to_string() const {
    static constexpr const char* kAxis[] = {"X", "Y", "Z", "W"};
    static constexpr const char* kCoord[] = {"x", "y", "z", "w"};
    std::string out;
    for (int a = 0; a < dim_; ++a) {
      if (a) out += ", ";
      out += kAxis[a];
      out += "=";
      if (exponents_[a] == 0) {
        out += "1";
        continue;
      }
      out += "(-1)^(";
      bool first = true;
      for (int b = 0; b < dim_; ++b) {
        if (!((exponents_[a] >> b) & 1u)) continue;
        if (!first) out += "+";
        out += kCoord[b];
        first = false;
      }
      out += ")";
    }
    return out;
  }

  friend bool operator==(const MultiplierRule&, const MultiplierRule&) = default;

 private:
  int dim_;
  FilterBand band_;
  std::array<unsigned, kMaxDim> exponents_;
};

namespace detail {
inline constexpr unsigned kX = 1u, kY = 2u, kZ = 4u;
}

/// Multiplier patterns given for d = 1..3. The 4D pattern comes from find_multipliers_4d.
inline MultiplierRule reference_rule(int dim, FilterBand band) {
  using namespace detail;
  const bool central = band == FilterBand::Central;
  switch (dim) {
    case 1: return MultiplierRule(1, band, {central ? kX : 0u, 0, 0, 0});
    case 2:
      return central ? MultiplierRule(2, band, {kX, kX | kY, 0, 0}) : MultiplierRule(2, band, {0u, kX, 0, 0});
    case 3:
      return central ? MultiplierRule(3, band, {kX | kY, kY | kZ, kX | kZ, 0})
                     : MultiplierRule(3, band, {kY, kZ, kX, 0});
    default: throw DomainError("no reference multiplier pattern for d = " + std::to_string(dim));
  }
}

class SchemeConfig {
 public:
  SchemeConfig(DiffFilter filter, MultiplierRule rule, UpdateMode mode = UpdateMode::Synchronous)
      : filter_(std::move(filter)), rule_(rule), mode_(mode) {
    if (filter_.band() != rule_.band()) {
      throw ConfigError("filter band (" + std::string(lwave::to_string(filter_.band())) +
                        ") does not match multiplier rule band (" + std::string(lwave::to_string(rule_.band())) + ")");
    }
  }

  const DiffFilter& filter() const { return filter_; }
  const MultiplierRule& rule() const { return rule_; }
  UpdateMode mode() const { return mode_; }
  FilterBand band() const { return filter_.band(); }
  int dim() const { return rule_.dim(); }

 private:
  DiffFilter filter_;
  MultiplierRule rule_;
  UpdateMode mode_;
};

namespace detail {

template <class T>
std::vector<T> coefficients_as(const DiffFilter& filter) {
  std::vector<T> out;
  out.reserve(static_cast<std::size_t>(filter.order()));
  for (const auto& c : filter.exact_coeffs()) {
    if constexpr (is_multiprecision_v<T>) {
      out.push_back(scalar_from<T>(c));
    } else {
      out.push_back(T(c.template convert_to<double>()));
    }
  }
  return out;
}

// Applies one update, reading from `src` and writing to `dst`. For the in-place sweep both
// refer to the same buffer.
template <class T>
void apply_update(const GridShape& shape, const SchemeConfig& cfg, const std::vector<T>& alpha, const T* src,
                  T* dst) {
  const int dim = shape.dim();
  const int n_ext = shape.extent();
  const bool zero_max = cfg.band() == FilterBand::ZeroMax;
  const auto& rule = cfg.rule();
  const int order = cfg.filter().order();
  const std::size_t sites = shape.site_count();

  std::array<std::size_t, kMaxDim> stride{};
  for (int a = 0; a < dim; ++a) stride[a] = shape.stride(a);

  Site coord{};
  T acc(0);
  T total(0);
  for (std::size_t i = 0; i < sites; ++i) {
    unsigned parity = 0;
    for (int a = 0; a < dim; ++a) parity |= static_cast<unsigned>(coord[a] & 1) << a;

    total = T(0);
    for (int a = 0; a < dim; ++a) {
      acc = T(0);
      const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(coord[a] * stride[a]);
      for (int m = 1; m <= order; ++m) {
        const int off = 2 * m - 1;
        const auto fwd = base + static_cast<std::ptrdiff_t>(wrap_index(coord[a] + off, n_ext) * stride[a]);
        const auto bwd = base + static_cast<std::ptrdiff_t>(wrap_index(coord[a] - off, n_ext) * stride[a]);
        if (zero_max) {
          acc += alpha[static_cast<std::size_t>(m - 1)] * (src[fwd] - src[bwd]);
        } else {
          acc += alpha[static_cast<std::size_t>(m - 1)] * (src[fwd] + src[bwd]);
        }
      }
      if (rule.multiplier(a, parity) > 0) {
        total += acc;
      } else {
        total -= acc;
      }
    }
    if (src == dst) {
      dst[i] += total;
    } else {
      dst[i] = src[i] + total;
    }

    for (int a = 0; a < dim; ++a) {
      if (++coord[a] < n_ext) break;
      coord[a] = 0;
    }
  }
}

}  // namespace detail

template <class T>
GridField<T> step(const GridField<T>& field, const SchemeConfig& cfg) {
  if (field.shape().dim() != cfg.dim()) {
    throw ConfigError("field dimension " + std::to_string(field.shape().dim()) + " does not match scheme dimension " +
                      std::to_string(cfg.dim()));
  }
  const auto alpha = detail::coefficients_as<T>(cfg.filter());
  GridField<T> out(field.shape(), field.tau() + 1);
  if (cfg.mode() == UpdateMode::Synchronous) {
    detail::apply_update(field.shape(), cfg, alpha, field.values().data(), out.values().data());
  } else {
    std::copy(field.values().begin(), field.values().end(), out.values().begin());
    detail::apply_update(field.shape(), cfg, alpha, out.values().data(), out.values().data());
  }
  return out;
}

/// step() restricted to four-dimensional grids.
template <class T>
GridField<T> step_4d(const GridField<T>& field, const SchemeConfig& cfg) {
  if (field.shape().dim() != 4 || cfg.dim() != 4) throw ConfigError("step_4d needs a 4D field and a 4-axis rule");
  return step(field, cfg);
}

inline constexpr std::uint64_t kDefaultMemoryBudget = 4ull << 30;

struct RunOptions {
  std::uint64_t memory_budget = kDefaultMemoryBudget;
  unsigned digits10 = 0;  ///< precision of multiprecision scalars, for the memory estimate
};

inline std::uint64_t history_bytes(const GridShape& shape, std::size_t frames, std::size_t bytes_per_value) {
  return static_cast<std::uint64_t>(shape.site_count()) * frames * bytes_per_value;
}

inline void check_memory_budget(const GridShape& shape, std::size_t frames, std::size_t bytes_per_value,
                                std::uint64_t budget) {
  const auto need = history_bytes(shape, frames, bytes_per_value);
  if (need > budget) {
    constexpr double kMiB = 1024.0 * 1024.0;
    throw ResourceError("history of " + std::to_string(frames) + " frames of N^" + std::to_string(shape.dim()) +
                            " = " + std::to_string(shape.site_count()) + " sites needs " +
                            std::to_string(static_cast<long long>(need / kMiB)) + " MiB, budget is " +
                            std::to_string(static_cast<long long>(budget / kMiB)) +
                            " MiB; reduce the grid extent or the number of steps",
                        need, budget);
  }
}

/// Calls visit(frame) for the initial frame and after each of `steps` updates, without
/// keeping old frames.
template <class T, class Visitor>
void evolve(const GridField<T>& initial, const SchemeConfig& cfg, std::size_t steps, Visitor&& visit) {
  GridField<T> current = initial;
  current.set_tau(0);
  visit(static_cast<const GridField<T>&>(current));
  for (std::size_t k = 0; k < steps; ++k) {
    current = step(current, cfg);
    visit(static_cast<const GridField<T>&>(current));
  }
}

/// frames[0] = initial, frames[k + 1] = step(frames[k]); returns steps + 1 frames.
template <class T>
History<T> run(const GridField<T>& initial, const SchemeConfig& cfg, std::size_t steps, const RunOptions& opts = {}) {
  if (steps < 1) throw DomainError("run needs at least one step");
  check_memory_budget(initial.shape(), steps + 1, bytes_per_value<T>(opts.digits10), opts.memory_budget);
  History<T> history(initial.shape(), cfg.band());
  evolve(initial, cfg, steps, [&](const GridField<T>& frame) { history.push_back(frame); });
  return history;
}

}  // namespace lwave
