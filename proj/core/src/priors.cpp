#include "citedyn/priors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace citedyn {

void Priors::validate() const {
  if (!(beta_shape > 0 && beta_scale > 0 && Phi_sd > 0 && epsilon_shape > 0 &&
        epsilon_scale > 0 && theta_shape > 0 && theta_rate > 0)) {
    throw std::domain_error("prior hyperparameters must be positive");
  }
}

double log_inv_gamma_pdf(double x, double shape, double scale) {
  if (!(x > 0)) return -INFINITY;
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) -
         scale / x;
}

double log_gamma_pdf(double x, double shape, double rate) {
  if (!(x > 0)) return -INFINITY;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) -
         rate * x;
}

double log_normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double log_lognormal_pdf(double x, double location, double scale) {
  if (!(x > 0)) return -INFINITY;
  return log_normal_pdf(std::log(x), location, scale) - std::log(x);
}

double sample_inv_gamma(Rng& rng, double shape, double scale) {
  return 1.0 / std::gamma_distribution<double>(shape, 1.0 / scale)(rng);
}

double sample_gamma(Rng& rng, double shape, double rate) {
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

}  // namespace citedyn
