#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "coupled/algebra.hpp"
#include "coupled/density.hpp"
#include "coupled/distributions.hpp"
#include "coupled/independent_equals.hpp"

// Generalized entropies in nats. Discrete forms take a DiscreteDist, the
// continuous forms a DensityFunction integrated by the adaptive quadrature.
// With q = 1 + alpha kappa/(1 + d kappa) and Z = sum p^q:
//   coupled_I = normalized_tsallis/(1 + d kappa) = tsallis/((1 + d kappa) Z).

namespace coupled {

struct EntropyReport {
  double shannon = 0.0;
  double tsallis = 0.0;
  double normalized_tsallis = 0.0;
  double coupled = 0.0;
};

double shannon(const DiscreteDist& p);
double shannon(const DensityFunction& f);

/// ((1 + d kappa)/(alpha kappa)) (1 - sum p^q); Shannon when |alpha kappa| < 1e-8.
double tsallis(const DiscreteDist& p, const CouplingContext& ctx);
double tsallis(const DensityFunction& f, const CouplingContext& ctx);

/// tsallis / sum p^q.
double normalized_tsallis(const DiscreteDist& p, const CouplingContext& ctx);
double normalized_tsallis(const DensityFunction& f, const CouplingContext& ctx);

/// Escort average of ln_k p^(-1/(1 + d kappa)) at q = 1 + kappa/(1 + d kappa).
/// Requires alpha = 1.
double coupled_entropy_I(const DiscreteDist& p, const CouplingContext& ctx);
double coupled_entropy_I(const DensityFunction& f, const CouplingContext& ctx);

/// Escort (q = 1 + kappa/(1 + d kappa)) average of
/// (ln_k p^(-alpha/(1 + d kappa)))^(1/alpha). kappa < 0 is unsupported.
double coupled_entropy_II(const DiscreteDist& p, const CouplingContext& ctx);

/// Escort (q = 1 + alpha kappa/(1 + d kappa)) average of
/// ln_{alpha kappa} p^(-1/(1 + d kappa)). Requires kappa >= 0.
double coupled_entropy_III(const DiscreteDist& p, const CouplingContext& ctx);
double coupled_entropy_III(const DensityFunction& f, const CouplingContext& ctx);

/// Escort of p against ln_k r^(-1/(1 + d kappa)). DivergenceError where the
/// escort has mass but r does not.
double coupled_cross_entropy(const DiscreteDist& p, const DiscreteDist& r,
                             const CouplingContext& ctx);

enum class DivergenceForm {
  kEntropyDifference,  // H(p) - H(p || r)
  kCoupledRatio,       // escort mean of ln_k (p/r)^(1/(1 + d kappa)); KL at kappa = 0
};

double coupled_divergence(const DiscreteDist& p, const DiscreteDist& r,
                          const CouplingContext& ctx, DivergenceForm form);

/// Closed forms for the coupled exponential (alpha = d = 1), r = kappa/(1+kappa):
/// Shannon 1 + kappa + ln sigma, coupled 1 + ln_r sigma,
/// normalized Tsallis 1 + kappa + (1 + kappa) ln_r sigma,
/// Tsallis 1 - ln_r(1/sigma)/(1 + kappa).
EntropyReport closed_form_entropies_gpd(double sigma, double kappa);

/// The same four entropies by quadrature, with ctx = (kappa of dist, 1, 1).
EntropyReport numeric_entropies(const CoupledDistribution& dist);

/// ln_{alpha kappa} N^(rho/(1 + d kappa)): entropy of N equiprobable states
/// whose count grows like N^rho. Linear in N when rho * r = 1.
double extensivity_curve(std::uint64_t n, double rho, const CouplingContext& ctx);

/// Monte-Carlo coupled free energy over draws z_i of the escorted latent:
///   F = 1/2 mean[ ln_{2k} q(z)^(-1/(1+dk)) + ln_{2k} p(x|z)^(-1/(1+dk)) ],
/// i.e. each density enters through (y^(-2k/(1+dk)) - 1)/(2k). At kappa = 0
/// this is 1/2 mean[-ln q - ln p]. Evaluators return natural-log densities.
double coupled_free_energy_mc(std::span<const double> latent_samples,
                              const std::function<double(double)>& log_q,
                              const std::function<double(double)>& log_p_x_given_z,
                              const CouplingContext& ctx);

/// Parameters of the escort (exponent 1 + 2 kappa/(1 + kappa)) of a
/// one-dimensional coupled Gaussian: (sigma/sqrt(1 + 2 kappa), kappa/(1 + 2 kappa)).
ScaleShape escort_gaussian_latent(double sigma, double kappa);

}  // namespace coupled
