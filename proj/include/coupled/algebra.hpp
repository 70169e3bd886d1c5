#pragma once

// Deformed exponential/logarithm, coupled arithmetic and the conversions
// between the (kappa, alpha, d, sigma) and (q, beta_q) parameterizations.

namespace coupled {

/// |kappa * x| below this evaluates exp_k / ln_k through the second-order
/// series around kappa = 0.
inline constexpr double kSeriesThreshold = 1e-8;

/// The triple (kappa, alpha, d) shared by every coupled formula.
///
/// Construction enforces kappa > -1, alpha > 0, dim >= 1 and 1 + dim*kappa != 0.
/// Operations that build escort exponents additionally call
/// require_escort_range(), which rejects kappa <= -1/dim.
class CouplingContext {
 public:
  CouplingContext() = default;
  explicit CouplingContext(double kappa, double alpha = 1.0, int dim = 1);

  double kappa() const { return kappa_; }
  double alpha() const { return alpha_; }
  int dim() const { return dim_; }

  /// 1 + d*kappa, the denominator of every coupled exponent.
  double one_plus_dk() const { return 1.0 + dim_ * kappa_; }

  /// Throws DomainError unless kappa > -1/dim.
  void require_escort_range() const;

 private:
  double kappa_ = 0.0;
  double alpha_ = 1.0;
  int dim_ = 1;
};

/// exp_k(x) = (1 + kappa*x)_+^(1/kappa).
///
/// Total on the reals: at the clamp boundary the result is exactly 0 for
/// kappa > 0 and +inf for kappa < 0.
double coupled_exp(double x, double kappa);

/// (1 + kappa*x)_+^(a/kappa), i.e. exp_k(x)^a; e^(a*x) at kappa = 0.
double coupled_exp_power(double x, double kappa, double a);

/// ln_k(x) = (x^kappa - 1)/kappa. Throws DomainError for x <= 0.
double coupled_log(double x, double kappa);

/// ln_k(e^log_x): the coupled logarithm of a value given by its natural log.
/// Stays finite where x itself would under- or overflow.
double coupled_log_from_log(double log_x, double kappa);

/// ln_k(x^a) without forming x^a. x = 0 is allowed when the result is
/// finite in the limit (a*kappa > 0 gives -1/kappa); otherwise DomainError.
double coupled_log_pow(double x, double a, double kappa);

/// x (+)_k y = x + y + kappa*x*y.
double coupled_sum(double x, double y, double kappa);

/// x (-)_k y = (x - y)/(1 + kappa*y); inverse of coupled_sum in y.
/// Throws SingularityError when 1 + kappa*y = 0.
double coupled_diff(double x, double y, double kappa);

/// q = 1 + alpha*kappa/(1 + d*kappa).
double q_of(const CouplingContext& ctx);

/// kappa = (q - 1)/(2 - q); the GPD case alpha = d = 1.
double kappa_of_q(double q);

/// beta_q = (1 + kappa)/sigma.
double beta_q_of(double sigma, double kappa);

/// sigma = (1 + kappa)/beta_q, i.e. (beta_q (2 - q))^-1.
double sigma_of_beta_q(double beta_q, double kappa);

/// Information relative risk aversion r = alpha*kappa/(1 + d*kappa).
double risk_aversion(const CouplingContext& ctx);

}  // namespace coupled
