#pragma once

// Hamilton quaternions w + i x + j y + k z, and biquaternions a + h b with a
// commuting imaginary unit h (h^2 = -1, h q = q h).

#include <cmath>
#include <complex>
#include <ostream>

namespace lwave {

struct Quaternion {
  double w = 0.0, x = 0.0, y = 0.0, z = 0.0;

  static constexpr Quaternion one() { return {1, 0, 0, 0}; }
  static constexpr Quaternion i() { return {0, 1, 0, 0}; }
  static constexpr Quaternion j() { return {0, 0, 1, 0}; }
  static constexpr Quaternion k() { return {0, 0, 0, 1}; }

  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

constexpr Quaternion operator+(const Quaternion& a, const Quaternion& b) {
  return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
}
constexpr Quaternion operator-(const Quaternion& a, const Quaternion& b) {
  return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
}
constexpr Quaternion operator-(const Quaternion& a) { return {-a.w, -a.x, -a.y, -a.z}; }
constexpr Quaternion operator*(double s, const Quaternion& a) { return {s * a.w, s * a.x, s * a.y, s * a.z}; }

/// Hamilton product: ij = k, jk = i, ki = j, i^2 = j^2 = k^2 = -1.
constexpr Quaternion qmul(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,  //
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,  //
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,  //
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}
constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) { return qmul(a, b); }

constexpr Quaternion conj(const Quaternion& q) { return {q.w, -q.x, -q.y, -q.z}; }

inline double norm(const Quaternion& q) { return std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z); }

inline std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
  return os << q.w << (q.x < 0 ? " - " : " + ") << std::abs(q.x) << "i" << (q.y < 0 ? " - " : " + ") << std::abs(q.y)
            << "j" << (q.z < 0 ? " - " : " + ") << std::abs(q.z) << "k";
}

/// re + h im, h commuting with i, j, k.
struct BiQuaternion {
  Quaternion re;
  Quaternion im;

  friend constexpr bool operator==(const BiQuaternion&, const BiQuaternion&) = default;
};

constexpr BiQuaternion operator+(const BiQuaternion& a, const BiQuaternion& b) { return {a.re + b.re, a.im + b.im}; }
constexpr BiQuaternion operator-(const BiQuaternion& a, const BiQuaternion& b) { return {a.re - b.re, a.im - b.im}; }

constexpr BiQuaternion operator*(const BiQuaternion& a, const BiQuaternion& b) {
  return {qmul(a.re, b.re) - qmul(a.im, b.im), qmul(a.re, b.im) + qmul(a.im, b.re)};
}

/// Scaling by a complex number in the commuting unit h.
constexpr BiQuaternion operator*(std::complex<double> c, const BiQuaternion& a) {
  return {c.real() * a.re - c.imag() * a.im, c.real() * a.im + c.imag() * a.re};
}

constexpr BiQuaternion lift(const Quaternion& q) { return {q, Quaternion{}}; }

/// Euclidean norm of all eight components.
inline double norm(const BiQuaternion& q) {
  const double a = norm(q.re), b = norm(q.im);
  return std::sqrt(a * a + b * b);
}

}  // namespace lwave
