#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace wdecay {

// Closed interval with outward rounding: every operation widens its round-to-nearest result by one ulp.
class Interval {
 public:
  Interval() = default;
  Interval(double x) : lo_(x), hi_(x) {}  // NOLINT: implicit from exact doubles
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {}

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mid() const { return 0.5 * (lo_ + hi_); }
  double width() const { return hi_ - lo_; }
  bool contains(double x) const { return lo_ <= x && x <= hi_; }

  static Interval outward(double lo, double hi) {
    return {std::nextafter(lo, -std::numeric_limits<double>::infinity()),
            std::nextafter(hi, std::numeric_limits<double>::infinity())};
  }

  friend Interval operator+(Interval a, Interval b) { return outward(a.lo_ + b.lo_, a.hi_ + b.hi_); }
  friend Interval operator-(Interval a, Interval b) { return outward(a.lo_ - b.hi_, a.hi_ - b.lo_); }
  friend Interval operator-(Interval a) { return {-a.hi_, -a.lo_}; }
  friend Interval operator*(Interval a, Interval b) {
    const double p[4] = {a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
    return outward(*std::min_element(p, p + 4), *std::max_element(p, p + 4));
  }
  friend Interval operator/(Interval a, Interval b) {
    if (b.lo_ <= 0.0 && b.hi_ >= 0.0) {
      return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }
    const double p[4] = {a.lo_ / b.lo_, a.lo_ / b.hi_, a.hi_ / b.lo_, a.hi_ / b.hi_};
    return outward(*std::min_element(p, p + 4), *std::max_element(p, p + 4));
  }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

inline Interval sqrt(Interval a) { return Interval::outward(std::sqrt(std::max(0.0, a.lo())), std::sqrt(a.hi())); }
inline Interval min(Interval a, Interval b) { return {std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi())}; }
inline Interval max(Interval a, Interval b) { return {std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi())}; }

inline double upper(double x) { return x; }
inline double upper(Interval x) { return x.hi(); }
inline double lower(double x) { return x; }
inline double lower(Interval x) { return x.lo(); }

}  // namespace wdecay
