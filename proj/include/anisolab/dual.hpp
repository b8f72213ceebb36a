#pragma once
// Forward-mode dual numbers and a minimal complex-over-scalar type.
//
// Every integral evaluator in this library is templated over its scalar, so
// the same code path runs on plain doubles and on Dual coordinates. Seeding
// one coordinate's infinitesimal channel per pass gives first derivatives
// exact to rounding — the Poisson-bracket engine and the Jacobian builder
// both depend on that (bracket residuals of conserved pairs sit far below
// finite-difference noise).

#include <cmath>

namespace aniso {

struct Dual {
  double v = 0.0;  // value
  double d = 0.0;  // derivative channel

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value) {}  // NOLINT: implicit by design
  constexpr Dual(double value, double deriv) : v(value), d(deriv) {}
};

constexpr Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
constexpr Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
constexpr Dual operator-(Dual a) { return {-a.v, -a.d}; }
constexpr Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
constexpr Dual operator/(Dual a, Dual b) {
  return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}
constexpr Dual& operator+=(Dual& a, Dual b) { return a = a + b; }
constexpr Dual& operator-=(Dual& a, Dual b) { return a = a - b; }
constexpr Dual& operator*=(Dual& a, Dual b) { return a = a * b; }
constexpr Dual& operator/=(Dual& a, Dual b) { return a = a / b; }

constexpr bool operator<(Dual a, Dual b) { return a.v < b.v; }
constexpr bool operator>(Dual a, Dual b) { return a.v > b.v; }
constexpr bool operator<=(Dual a, Dual b) { return a.v <= b.v; }
constexpr bool operator>=(Dual a, Dual b) { return a.v >= b.v; }

inline Dual abs(Dual a) { return a.v < 0.0 ? -a : a; }
inline Dual sqrt(Dual a) {
  const double r = std::sqrt(a.v);
  return {r, a.d / (2.0 * r)};
}

// The value part of a scalar, uniformly for double and Dual.
constexpr double value_of(double s) { return s; }
constexpr double value_of(Dual s) { return s.v; }

// ---------------------------------------------------------------------------
// Complex numbers over an arbitrary scalar. std::complex<Dual> is undefined
// behaviour territory (the standard only guarantees float/double/long
// double), hence this small substitute. Scalar factors mix in either as
// double constants or wrapped in CVal — scalar-typed overloads would be
// ambiguous at S = double.

template <class S>
struct CVal {
  S re{};
  S im{};

  constexpr CVal() = default;
  constexpr CVal(S real) : re(real) {}  // NOLINT: implicit by design
  constexpr CVal(S real, S imag) : re(real), im(imag) {}
};

template <class S>
constexpr CVal<S> operator+(CVal<S> a, CVal<S> b) {
  return {a.re + b.re, a.im + b.im};
}
template <class S>
constexpr CVal<S> operator-(CVal<S> a, CVal<S> b) {
  return {a.re - b.re, a.im - b.im};
}
template <class S>
constexpr CVal<S> operator-(CVal<S> a) {
  return {-a.re, -a.im};
}
template <class S>
constexpr CVal<S> operator*(CVal<S> a, CVal<S> b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class S>
constexpr CVal<S> operator*(double s, CVal<S> a) {
  return {S(s) * a.re, S(s) * a.im};
}
template <class S>
constexpr CVal<S> operator*(CVal<S> a, double s) {
  return s * a;
}
template <class S>
constexpr CVal<S> operator/(CVal<S> a, double s) {
  return {a.re / S(s), a.im / S(s)};
}
template <class S>
constexpr CVal<S> operator/(CVal<S> a, CVal<S> b) {
  const S n = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
}
template <class S>
constexpr CVal<S>& operator+=(CVal<S>& a, CVal<S> b) {
  return a = a + b;
}
template <class S>
constexpr CVal<S>& operator-=(CVal<S>& a, CVal<S> b) {
  return a = a - b;
}
template <class S>
constexpr CVal<S>& operator*=(CVal<S>& a, CVal<S> b) {
  return a = a * b;
}

template <class S>
constexpr CVal<S> conj(CVal<S> a) {
  return {a.re, -a.im};
}
template <class S>
constexpr S norm2(CVal<S> a) {
  return a.re * a.re + a.im * a.im;
}

// Integer powers by squaring; e >= 0.
template <class T>
constexpr T pow_int(T base, int e) {
  T acc(1.0);
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

}  // namespace aniso
