#pragma once

// Small helpers that let the grid, stepper and DFT templates run over
// double, std::complex<double> and Boost.Multiprecision reals alike.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <type_traits>

#include <boost/multiprecision/number.hpp>

namespace lwave {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class T>
inline constexpr bool is_multiprecision_v = boost::multiprecision::is_number<T>::value;

/// Real type underlying a scalar (T itself unless T is std::complex).
template <class T>
struct real_of {
  using type = T;
};
template <class T>
struct real_of<std::complex<T>> {
  using type = T;
};
template <class T>
using real_of_t = typename real_of<T>::type;

template <class T>
bool is_finite_value(const T& v) {
  if constexpr (is_complex_v<T>) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  } else if constexpr (std::is_arithmetic_v<T>) {
    return std::isfinite(v);
  } else {
    return static_cast<bool>(boost::multiprecision::isfinite(v));
  }
}

/// Magnitude as a double (|v| for complex values).
template <class T>
double magnitude_of(const T& v) {
  if constexpr (is_complex_v<T>) {
    return std::abs(v);
  } else if constexpr (std::is_arithmetic_v<T>) {
    return std::abs(static_cast<double>(v));
  } else {
    return std::abs(v.template convert_to<double>());
  }
}

template <class T>
double to_double(const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    return static_cast<double>(v);
  } else {
    return v.template convert_to<double>();
  }
}

template <class T>
std::complex<double> to_complex_double(const T& v) {
  if constexpr (is_complex_v<T>) {
    return {to_double(v.real()), to_double(v.imag())};
  } else {
    return {to_double(v), 0.0};
  }
}

/// Convert a real value (double or exact rational) into the scalar type T.
template <class T, class Source>
T scalar_from(const Source& v) {
  if constexpr (is_multiprecision_v<T> && is_multiprecision_v<Source>) {
    if constexpr (std::is_same_v<T, Source>) {
      return v;
    } else {
      // Cross-backend conversion goes through the exact ratio of integers.
      using boost::multiprecision::denominator;
      using boost::multiprecision::numerator;
      return T(numerator(v).str()) / T(denominator(v).str());
    }
  } else if constexpr (is_multiprecision_v<Source>) {
    return T(v.template convert_to<double>());
  } else {
    return T(static_cast<double>(v));
  }
}

/// Approximate storage cost of one value, including heap limbs of multiprecision numbers.
template <class T>
std::size_t bytes_per_value(unsigned digits10 = 0) {
  if constexpr (is_multiprecision_v<T>) {
    return sizeof(T) + 16 + static_cast<std::size_t>(digits10 * 3.33 / 8.0 + 16);
  } else {
    return sizeof(T);
  }
}

}  // namespace lwave
