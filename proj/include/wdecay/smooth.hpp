#pragma once

#include <cmath>
#include <type_traits>

namespace wdecay {

// Second-order forward jet: value, first and second derivative in one variable.
struct Jet2 {
  double v = 0.0;
  double d = 0.0;
  double dd = 0.0;

  static Jet2 constant(double c) { return {c, 0.0, 0.0}; }
  static Jet2 variable(double x) { return {x, 1.0, 0.0}; }
};

inline Jet2 operator+(Jet2 a, Jet2 b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
inline Jet2 operator-(Jet2 a, Jet2 b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
inline Jet2 operator-(Jet2 a) { return {-a.v, -a.d, -a.dd}; }
inline Jet2 operator*(Jet2 a, Jet2 b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2.0 * a.d * b.d + a.v * b.dd};
}
inline Jet2 operator*(double s, Jet2 a) { return {s * a.v, s * a.d, s * a.dd}; }
inline Jet2 operator*(Jet2 a, double s) { return s * a; }
inline Jet2 operator+(Jet2 a, double s) { return {a.v + s, a.d, a.dd}; }
inline Jet2 operator+(double s, Jet2 a) { return a + s; }
inline Jet2 operator-(double s, Jet2 a) { return {s - a.v, -a.d, -a.dd}; }
inline Jet2 operator-(Jet2 a, double s) { return {a.v - s, a.d, a.dd}; }

// chain rule with outer derivatives f, f', f''
inline Jet2 compose(Jet2 a, double f, double f1, double f2) {
  return {f, f1 * a.d, f2 * a.d * a.d + f1 * a.dd};
}

inline Jet2 inverse(Jet2 a) {
  const double r = 1.0 / a.v;
  return compose(a, r, -r * r, 2.0 * r * r * r);
}
inline Jet2 operator/(Jet2 a, Jet2 b) { return a * inverse(b); }
inline Jet2 operator/(Jet2 a, double s) { return (1.0 / s) * a; }
inline Jet2 operator/(double s, Jet2 a) { return s * inverse(a); }

inline Jet2 exp(Jet2 a) {
  const double e = std::exp(a.v);
  return compose(a, e, e, e);
}
inline Jet2 sqrt(Jet2 a) {
  const double s = std::sqrt(a.v);
  return compose(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet2 pow(Jet2 a, double p) {
  const double f = std::pow(a.v, p);
  return compose(a, f, p * f / a.v, p * (p - 1.0) * f / (a.v * a.v));
}

inline double value_of(double x) { return x; }
inline double value_of(const Jet2& x) { return x.v; }

template <class T>
T constant_like(double c) {
  if constexpr (std::is_same_v<T, double>) {
    return c;
  } else {
    return T::constant(c);
  }
}

// exp(-1/(k u)) for u > 0, else 0
template <class T>
T flat_exp(T u, double k = 1.0) {
  using std::exp;
  if (value_of(u) <= 0.0) return constant_like<T>(0.0);
  return exp(-1.0 / (k * u));
}

// C-infinity ramp: 0 for u <= 0, 1 for u >= 1.
template <class T>
T smooth_step(T u) {
  if (value_of(u) <= 0.0) return constant_like<T>(0.0);
  if (value_of(u) >= 1.0) return constant_like<T>(1.0);
  const T a = flat_exp(u);
  const T b = flat_exp(1.0 - u);
  return a / (a + b);
}

// chi_0(x)^2 = 1 - S(x - 1)
template <class T>
T chi0_squared(T x) {
  const T u = x - 1.0;
  if (value_of(u) <= 0.0) return constant_like<T>(1.0);
  if (value_of(u) >= 1.0) return constant_like<T>(0.0);
  const T a = flat_exp(u);
  const T b = flat_exp(1.0 - u);
  return b / (a + b);
}

template <class T>
T chi_inf_squared(T x) {
  const T u = x - 1.0;
  if (value_of(u) <= 0.0) return constant_like<T>(0.0);
  if (value_of(u) >= 1.0) return constant_like<T>(1.0);
  const T a = flat_exp(u);
  const T b = flat_exp(1.0 - u);
  return a / (a + b);
}

template <class T>
T chi0(T x) {
  using std::sqrt;
  const T u = x - 1.0;
  if (value_of(u) <= 0.0) return constant_like<T>(1.0);
  if (value_of(u) >= 1.0) return constant_like<T>(0.0);
  return flat_exp(1.0 - u, 2.0) / sqrt(flat_exp(u) + flat_exp(1.0 - u));
}

template <class T>
T chi_inf(T x) {
  using std::sqrt;
  const T u = x - 1.0;
  if (value_of(u) <= 0.0) return constant_like<T>(0.0);
  if (value_of(u) >= 1.0) return constant_like<T>(1.0);
  return flat_exp(u, 2.0) / sqrt(flat_exp(u) + flat_exp(1.0 - u));
}

enum class Cutoff { Lower, Upper, TildeUpper };

// chi_sigma, chi^sigma and 1 - chi_sigma at radius r
template <class T>
T cutoff_value(Cutoff which, double sigma, T r) {
  const T x = r / sigma;
  switch (which) {
    case Cutoff::Lower: return chi0(x);
    case Cutoff::Upper: return chi_inf(x);
    case Cutoff::TildeUpper: return 1.0 - chi0(x);
  }
  return constant_like<T>(0.0);
}

// Plateau bump: 1 on [a1, b0], 0 outside (a0, b1), C-infinity in between.
struct Bump {
  double a0, a1, b0, b1;

  double operator()(double x) const {
    if (x <= a0 || x >= b1) return 0.0;
    if (x < a1) return smooth_step((x - a0) / (a1 - a0));
    if (x > b0) return 1.0 - smooth_step((x - b0) / (b1 - b0));
    return 1.0;
  }
};

}  // namespace wdecay
