#pragma once

#include "citedyn/random.hpp"

namespace citedyn {

/// Hyperparameters of the hierarchical prior.
///
///   beta_i    ~ InvGamma(beta_shape, beta_scale)
///   Phi_j     ~ Normal(Phi_mean, Phi_sd)
///   epsilon_j ~ InvGamma(epsilon_shape, epsilon_scale)
///   theta_j   ~ Gamma(theta_shape, theta_rate)     (rate, so the mean is shape/rate)
///   phi_i     ~ LogNormal(Phi_j, epsilon_j)
struct Priors {
  double beta_shape = 2.0;
  double beta_scale = 3.0 * 365.0;
  double Phi_mean = 0.0;
  double Phi_sd = 1.0;
  double epsilon_shape = 2.0;
  double epsilon_scale = 1.0;
  double theta_shape = 2.0;
  double theta_rate = 2.0;

  void validate() const;
};

// Log densities in constrained space, normalised.
double log_inv_gamma_pdf(double x, double shape, double scale);
double log_gamma_pdf(double x, double shape, double rate);
double log_normal_pdf(double x, double mean, double sd);
double log_lognormal_pdf(double x, double location, double scale);

double sample_inv_gamma(Rng& rng, double shape, double scale);
double sample_gamma(Rng& rng, double shape, double rate);

}  // namespace citedyn
