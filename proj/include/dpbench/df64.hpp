#pragma once

// Emulated double precision: a value held as the unevaluated sum of two
// binary32 components (high + low). All arithmetic is built on error-free
// transforms and never uses fused multiply-add, so results match what a
// shader without FMA computes.

#include <cmath>
#include <compare>
#include <limits>
#include <utility>

#include "dpbench/errors.hpp"

namespace dpbench {

struct Df64 {
  float high = 0.0f;
  float low = 0.0f;

  friend bool operator==(const Df64&, const Df64&) = default;
};

namespace df64 {

// Result of an error-free transform: value + error is exact.
struct FloatPair {
  float value;
  float error;
};

inline constexpr float kVeltkampFactor = 4097.0f;  // 2^12 + 1

inline float ulp32(float x) {
  const float ax = std::fabs(x);
  if (ax == std::numeric_limits<float>::max()) {
    return ax - std::nextafter(ax, 0.0f);
  }
  return std::nextafter(ax, std::numeric_limits<float>::infinity()) - ax;
}

inline void check_finite(float x, const char* what) {
  if (!std::isfinite(x)) throw RangeError(std::string(what) + ": result outside binary32 range");
}

/// Decomposes a binary64 value into its nearest binary32 and the rounded
/// residual. Rejects NaN and magnitudes above the largest finite binary32.
inline Df64 split(double value) {
  if (std::isnan(value)) throw RangeError("split: NaN cannot be emulated");
  if (std::fabs(value) > static_cast<double>(std::numeric_limits<float>::max())) {
    throw RangeError("split: magnitude exceeds binary32 range; rescale first");
  }
  const float high = static_cast<float>(value);
  const double high_double = static_cast<double>(high);
  const float low = static_cast<float>(value - high_double);
  return {high, low};
}

inline double to_f64(Df64 x) { return static_cast<double>(x.high) + static_cast<double>(x.low); }

// Knuth's branch-free two-sum.
inline FloatPair two_sum(float a, float b) {
  const float s = a + b;
  check_finite(s, "two_sum");
  const float bb = s - a;
  const float e = (a - (s - bb)) + (b - bb);
  return {s, e};
}

// Dekker's fast two-sum; requires exponent(a) >= exponent(b) or a == 0.
inline FloatPair fast_two_sum(float a, float b) {
  const float s = a + b;
  const float e = b - (s - a);
  return {s, e};
}

inline FloatPair veltkamp_split(float a) {
  const float c = kVeltkampFactor * a;
  check_finite(c, "veltkamp_split");
  const float hi = c - (c - a);
  return {hi, a - hi};
}

// Dekker's two-product on Veltkamp halves. Exact whenever the partial
// products stay in the normal range.
inline FloatPair two_prod(float a, float b) {
  const float p = a * b;
  check_finite(p, "two_prod");
  const auto [ah, al] = veltkamp_split(a);
  const auto [bh, bl] = veltkamp_split(b);
  const float e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
  return {p, e};
}

inline Df64 renormalize(float high, float low, const char* what) {
  const auto [h, l] = fast_two_sum(high, low);
  check_finite(h, what);
  return {h, l};
}

inline Df64 neg(Df64 x) { return {-x.high, -x.low}; }

inline Df64 add(Df64 a, Df64 b) {
  const auto [s1, s2] = two_sum(a.high, b.high);
  const auto [t1, t2] = two_sum(a.low, b.low);
  const auto [h, l] = fast_two_sum(s1, s2 + t1);
  return renormalize(h, l + t2, "add");
}

inline Df64 sub(Df64 a, Df64 b) { return add(a, neg(b)); }

inline Df64 mul(Df64 a, Df64 b) {
  const auto [p, e] = two_prod(a.high, b.high);
  const float cross = a.high * b.low + a.low * b.high;
  Df64 r = renormalize(p, e + cross, "mul");
  if (r.high == 0.0f && (a.high != 0.0f && b.high != 0.0f)) {
    throw RangeError("mul: product underflows binary32");
  }
  return r;
}

inline Df64 mul(Df64 a, float b) {
  const auto [p, e] = two_prod(a.high, b);
  return renormalize(p, e + a.low * b, "mul");
}

/// Quotient estimate from the high parts, refined once against the exact
/// residual a - q*b.
inline Df64 div(Df64 a, Df64 b) {
  if (b.high == 0.0f && b.low == 0.0f) throw DivideByZero("div: divisor is zero");
  const float q1 = a.high / b.high;
  check_finite(q1, "div");
  const Df64 residual = sub(a, mul(b, q1));
  const float q2 = residual.high / b.high;
  return renormalize(q1, q2, "div");
}

/// Lexicographic on (high, low); agrees with binary64 ordering of canonical
/// values.
inline std::weak_ordering compare(Df64 a, Df64 b) {
  if (a.high < b.high) return std::weak_ordering::less;
  if (a.high > b.high) return std::weak_ordering::greater;
  if (a.low < b.low) return std::weak_ordering::less;
  if (a.low > b.low) return std::weak_ordering::greater;
  return std::weak_ordering::equivalent;
}

inline bool is_canonical(Df64 x) {
  if (!std::isfinite(x.high) || !std::isfinite(x.low)) return false;
  if (x.high == 0.0f) return x.low == 0.0f;
  return std::fabs(static_cast<double>(x.low)) <= 0.5 * static_cast<double>(ulp32(x.high));
}

}  // namespace df64

inline Df64 operator+(Df64 a, Df64 b) { return df64::add(a, b); }
inline Df64 operator-(Df64 a, Df64 b) { return df64::sub(a, b); }
inline Df64 operator-(Df64 a) { return df64::neg(a); }
inline Df64 operator*(Df64 a, Df64 b) { return df64::mul(a, b); }
inline Df64 operator/(Df64 a, Df64 b) { return df64::div(a, b); }
inline std::weak_ordering operator<=>(Df64 a, Df64 b) { return df64::compare(a, b); }

}  // namespace dpbench
