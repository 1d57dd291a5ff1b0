#pragma once

// Working precision for simulations. An amplifying scheme multiplies its
// fastest modes by up to G per step while the [0], [N/2] and [N/4] bands keep
// gains near 1; once G^K exceeds 1/eps the band content drowns in rounding
// noise. Such runs are carried out in MPFR reals with enough digits to hold
// G^K plus a margin.

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <string>

#include "lwave/filter_design.hpp"

namespace lwave {

using ExtendedReal =
    boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>, boost::multiprecision::et_off>;

enum class PrecisionChoice : std::uint8_t { Auto, Double, Extended };

inline std::string_view to_string(PrecisionChoice p) {
  switch (p) {
    case PrecisionChoice::Double: return "double";
    case PrecisionChoice::Extended: return "extended";
    default: return "auto";
  }
}

inline PrecisionChoice parse_precision(std::string_view text) {
  if (text == "auto") return PrecisionChoice::Auto;
  if (text == "double") return PrecisionChoice::Double;
  if (text == "extended") return PrecisionChoice::Extended;
  throw DomainError("unknown precision '" + std::string(text) + "' (expected auto, double or extended)");
}

/// Largest per-step plane-wave gain sqrt(1 + d (2 sum|alpha|)^2) of a scheme whose axis couplings
/// anticommute (the reference rules and every rule accepted by find_multipliers).
inline double growth_bound(const DiffFilter& filter, int dim) {
  double s = 0.0;
  for (double a : filter.coeffs()) s += std::abs(a);
  return std::sqrt(1.0 + dim * (2.0 * s) * (2.0 * s));
}

/// log10 of the worst-case amplification over `steps` updates.
inline double growth_decades(const DiffFilter& filter, int dim, std::size_t steps) {
  return std::log10(growth_bound(filter, dim)) * static_cast<double>(steps);
}

/// Growth that double precision still resolves against unit-gain bands (about 3 digits left).
inline constexpr double kDoubleGrowthDecades = 13.0;
inline constexpr unsigned kGuardDigits = 20;

inline bool needs_extended(const DiffFilter& filter, int dim, std::size_t steps) {
  return growth_decades(filter, dim, steps) > kDoubleGrowthDecades;
}

/// Decimal digits for an extended run: the growth range plus guard digits.
inline unsigned required_digits(const DiffFilter& filter, int dim, std::size_t steps) {
  return static_cast<unsigned>(std::ceil(growth_decades(filter, dim, steps))) + kGuardDigits;
}

/// Sets the default precision of ExtendedReal for the current scope.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned digits10) : saved_(ExtendedReal::default_precision()) {
    ExtendedReal::default_precision(digits10);
  }
  ~PrecisionScope() { ExtendedReal::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

}  // namespace lwave
