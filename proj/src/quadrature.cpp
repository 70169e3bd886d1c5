#include "coupled/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <fmt/format.h>

#include "coupled/compensated_sum.hpp"
#include "coupled/errors.hpp"

namespace coupled::quadrature {
namespace {

// QUADPACK qk21 abscissae (positive half) and weights.
constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525860000, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss 10-point weights for the odd-indexed Kronrod nodes.
constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod21(const Integrand& f, double a, double b, std::size_t& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = 0.0;
  double resk = fc * kWgk[10];
  double resabs = std::abs(resk);
  double fv1[10], fv2[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  evals += 21;
  const double mean = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fc - mean);
  for (int j = 0; j < 10; ++j) {
    resasc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
  }
  const double ahalf = std::abs(half);
  resk *= half;
  resabs *= ahalf;
  resasc *= ahalf;
  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  if (!std::isfinite(resk)) err = std::numeric_limits<double>::infinity();
  return {a, b, resk, err};
}

Result adaptive(const Integrand& f, double a, double b, const Options& opts) {
  Result out;
  std::priority_queue<Segment> heap;
  Segment first = kronrod21(f, a, b, out.evaluations);
  heap.push(first);
  double total = first.value;
  double total_err = first.error;
  while (true) {
    if (!std::isfinite(total)) break;
    if (total_err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
      out.converged = true;
      break;
    }
    if (heap.size() >= opts.max_intervals) break;
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) break;
    heap.pop();
    Segment left = kronrod21(f, worst.a, mid, out.evaluations);
    Segment right = kronrod21(f, mid, worst.b, out.evaluations);
    total += (left.value + right.value) - worst.value;
    total_err += (left.error + right.error) - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-add from the segments to shed drift in the running totals.
  CompensatedSum value, error;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value.value();
  out.error = error.value();
  if (out.converged) {
    out.converged =
        out.error <= 2.0 * std::max(opts.abs_tol, opts.rel_tol * std::abs(out.value));
  }
  return out;
}

// Integral of f over [end, +inf) (direction +1) or (-inf, end] (direction -1).
Result half_line(const Integrand& f, double end, double scale, int direction,
                 const Options& opts) {
  const Integrand g = [&](double s) {
    const double t = (1.0 - s) / s;
    const double x = end + direction * scale * t;
    const double v = f(x);
    if (v == 0.0) return 0.0;
    return v * scale / (s * s);
  };
  return adaptive(g, 0.0, 1.0, opts);
}

Result combine(const Result& l, const Result& r) {
  return {l.value + r.value, l.error + r.error, l.evaluations + r.evaluations,
          l.converged && r.converged};
}

Result dispatch(const Integrand& f, double a, double b, double center, double scale,
                const Options& opts) {
  if (std::isnan(a) || std::isnan(b)) throw DomainError("integration bound is NaN");
  if (a == b) return {0.0, 0.0, 0, true};
  if (a > b) {
    Result r = dispatch(f, b, a, center, scale, opts);
    r.value = -r.value;
    return r;
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
  const bool lo_inf = std::isinf(a);
  const bool hi_inf = std::isinf(b);
  if (!lo_inf && !hi_inf) return adaptive(f, a, b, opts);
  if (!lo_inf) return half_line(f, a, scale, +1, opts);
  if (!hi_inf) return half_line(f, b, scale, -1, opts);
  if (!std::isfinite(center)) center = 0.0;
  return combine(half_line(f, center, scale, -1, opts), half_line(f, center, scale, +1, opts));
}

// Power-law decay exponent of |f| far out on an infinite end, or +inf when
// the tail vanishes faster than any power.
double tail_exponent(const Integrand& f, double end, double scale, int direction) {
  const double d1 = 1e6 * scale, d2 = 1e9 * scale;
  const double f1 = std::abs(f(end + direction * d1));
  const double f2 = std::abs(f(end + direction * d2));
  if (f2 == 0.0 || !(f1 > 0.0)) return std::numeric_limits<double>::infinity();
  return -std::log(f2 / f1) / std::log(d2 / d1);
}

bool tail_diverges(const Integrand& f, const Support& s) {
  const double scale = (s.scale > 0.0 && std::isfinite(s.scale)) ? s.scale : 1.0;
  const double center = std::isfinite(s.center) ? s.center : 0.0;
  constexpr double kMargin = 1.02;
  if (std::isinf(s.upper)) {
    const double end = std::isfinite(s.lower) ? s.lower : center;
    if (tail_exponent(f, end, scale, +1) <= kMargin) return true;
  }
  if (std::isinf(s.lower)) {
    const double end = std::isfinite(s.upper) ? s.upper : center;
    if (tail_exponent(f, end, scale, -1) <= kMargin) return true;
  }
  return false;
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, const Options& opts) {
  const double center = std::isfinite(a) ? a : (std::isfinite(b) ? b : 0.0);
  return dispatch(f, a, b, center, 1.0, opts);
}

Result integrate(const Integrand& f, const Support& support, const Options& opts) {
  return dispatch(f, support.lower, support.upper, support.center, support.scale, opts);
}

double integrate_or_throw(const Integrand& f, const Support& support, std::string_view what,
                          const Options& opts) {
  const Result r = integrate(f, support, opts);
  if (!std::isfinite(r.value)) {
    throw DivergenceError(fmt::format("{}: integral is not finite", what));
  }
  if (!r.converged && tail_diverges(f, support)) {
    throw DivergenceError(fmt::format("{}: integrand decays too slowly to be integrable", what));
  }
  if (!r.converged) {
    throw ConvergenceError(fmt::format("{}: quadrature did not converge (value {}, error {})",
                                       what, r.value, r.error));
  }
  return r.value;
}

}  // namespace coupled::quadrature
