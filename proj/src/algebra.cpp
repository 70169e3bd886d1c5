#include "coupled/algebra.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "coupled/errors.hpp"

namespace coupled {

CouplingContext::CouplingContext(double kappa, double alpha, int dim)
    : kappa_(kappa), alpha_(alpha), dim_(dim) {
  if (!(kappa > -1.0) || !std::isfinite(kappa)) {
    throw DomainError(fmt::format("coupling must be finite and > -1, got {}", kappa));
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError(fmt::format("alpha must be positive, got {}", alpha));
  }
  if (dim < 1) {
    throw DomainError(fmt::format("dimension must be >= 1, got {}", dim));
  }
  if (one_plus_dk() == 0.0) {
    throw SingularityError("1 + d*kappa = 0");
  }
}

void CouplingContext::require_escort_range() const {
  if (!(one_plus_dk() > 0.0)) {
    throw DomainError(
        fmt::format("escort exponents need kappa > -1/d (kappa={}, d={})", kappa_, dim_));
  }
}

double coupled_exp(double x, double kappa) {
  return coupled_exp_power(x, kappa, 1.0);
}

double coupled_exp_power(double x, double kappa, double a) {
  const double kx = kappa * x;
  if (std::abs(kx) < kSeriesThreshold) {
    // ln(1 + kx)/k = x - k x^2/2 + O(k^2 x^3)
    return std::exp(a * x * (1.0 - 0.5 * kx));
  }
  if (1.0 + kx <= 0.0) {
    const double exponent = a / kappa;
    if (exponent > 0.0) return 0.0;
    if (exponent < 0.0) return std::numeric_limits<double>::infinity();
    return 1.0;
  }
  return std::exp(a * std::log1p(kx) / kappa);
}

double coupled_log(double x, double kappa) {
  if (!(x > 0.0)) {
    throw DomainError(fmt::format("coupled_log needs x > 0, got {}", x));
  }
  return coupled_log_from_log(std::log(x), kappa);
}

double coupled_log_from_log(double log_x, double kappa) {
  const double kl = kappa * log_x;
  if (std::abs(kl) < kSeriesThreshold) {
    return log_x * (1.0 + 0.5 * kl);
  }
  return std::expm1(kl) / kappa;
}

double coupled_log_pow(double x, double a, double kappa) {
  if (x == 0.0 && a * kappa > 0.0) {
    return -1.0 / kappa;
  }
  if (!(x > 0.0)) {
    throw DomainError(fmt::format("coupled_log_pow needs x > 0, got {}", x));
  }
  return coupled_log_from_log(a * std::log(x), kappa);
}

double coupled_sum(double x, double y, double kappa) {
  return x + y + kappa * (x * y);
}

double coupled_diff(double x, double y, double kappa) {
  const double denom = 1.0 + kappa * y;
  if (denom == 0.0) {
    throw SingularityError(fmt::format("coupled_diff singular at 1 + {}*{} = 0", kappa, y));
  }
  return (x - y) / denom;
}

double q_of(const CouplingContext& ctx) {
  return 1.0 + ctx.alpha() * ctx.kappa() / ctx.one_plus_dk();
}

double kappa_of_q(double q) {
  if (q == 2.0) {
    throw SingularityError("kappa_of_q is singular at q = 2");
  }
  return (q - 1.0) / (2.0 - q);
}

namespace {

void check_gpd_pair(double positive, const char* name, double kappa) {
  if (!(positive > 0.0)) {
    throw DomainError(fmt::format("{} must be positive, got {}", name, positive));
  }
  if (!(kappa > -1.0)) {
    throw DomainError(fmt::format("coupling must be > -1, got {}", kappa));
  }
}

}  // namespace

double beta_q_of(double sigma, double kappa) {
  check_gpd_pair(sigma, "sigma", kappa);
  return (1.0 + kappa) / sigma;
}

double sigma_of_beta_q(double beta_q, double kappa) {
  check_gpd_pair(beta_q, "beta_q", kappa);
  return (1.0 + kappa) / beta_q;
}

double risk_aversion(const CouplingContext& ctx) {
  return ctx.alpha() * ctx.kappa() / ctx.one_plus_dk();
}

}  // namespace coupled
