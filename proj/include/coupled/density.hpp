#pragma once

#include <functional>
#include <limits>

namespace coupled {

/// Integration domain of a density. Either end may be infinite; `center` is
/// where a doubly infinite range is split and `scale` sets the width of the
/// tail substitution x = end +/- scale*(1-s)/s.
struct Support {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  double center = 0.0;
  double scale = 1.0;

  static Support half_line(double lower, double scale) {
    return {lower, std::numeric_limits<double>::infinity(), lower, scale};
  }
  static Support interval(double lower, double upper) {
    return {lower, upper, 0.5 * (lower + upper), upper - lower};
  }
  static Support real_line(double center, double scale) {
    return {-std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity(), center, scale};
  }

  bool contains(double x) const { return x >= lower && x <= upper; }
};

/// A pointwise density evaluator together with the domain it lives on.
struct DensityFunction {
  std::function<double(double)> pdf;
  Support support;

  double operator()(double x) const { return pdf(x); }
};

}  // namespace coupled
