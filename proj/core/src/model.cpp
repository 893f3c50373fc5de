#include "citedyn/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace citedyn {

namespace {

void require_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::domain_error("decay inverse rate beta must be positive, got " +
                            std::to_string(beta));
  }
}

void require_day(int t) {
  if (t < 0) throw std::domain_error("day index must be non-negative");
}

}  // namespace

void ArticleParams::validate() const {
  if (!(phi >= 0.0) || !std::isfinite(phi)) throw std::domain_error("phi must be >= 0");
  require_beta(beta);
  if (preprint_duration < 0 || horizon < preprint_duration) {
    throw std::domain_error("require 0 <= preprint_duration <= horizon");
  }
}

void JournalParams::validate() const {
  if (!std::isfinite(Phi)) throw std::domain_error("Phi must be finite");
  if (!(epsilon > 0.0)) throw std::domain_error("epsilon must be positive");
  if (!(theta > 0.0)) throw std::domain_error("theta must be positive");
}

double JournalParams::median_latent_rate() const { return std::exp(Phi); }

void ModelConfig::validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) throw std::domain_error("m must be positive");
}

double decay_density(int t, double beta) {
  require_beta(beta);
  require_day(t);
  // e^{-t/b} - e^{-(t+1)/b} = e^{-t/b} (1 - e^{-1/b})
  return std::exp(-t / beta) * -std::expm1(-1.0 / beta);
}

double log_decay_density(int t, double beta) {
  require_beta(beta);
  require_day(t);
  return -t / beta + std::log(-std::expm1(-1.0 / beta));
}

double decay_cumulative(int t, double beta) {
  require_beta(beta);
  require_day(t);
  return -std::expm1(-(t + 1.0) / beta);
}

double decay_mass(int first, int last, double beta) {
  if (last < first) return 0.0;
  return std::exp(-first / beta) * -std::expm1(-(last - first + 1.0) / beta);
}

double decay_mass_dlog_beta(int first, int last, double beta) {
  if (last < first) return 0.0;
  const double a = first;
  const double b = last + 1.0;
  return (a * std::exp(-a / beta) - b * std::exp(-b / beta)) / beta;
}

double effective_rate(int t, const ArticleParams& article, double theta) {
  return t <= article.preprint_duration ? article.phi : article.phi * theta;
}

double log_effective_rate(int t, const ArticleParams& article, double theta) {
  const double log_phi = std::log(article.phi);
  return t <= article.preprint_duration ? log_phi : log_phi + std::log(theta);
}

double expected_citations_exact(int t, const ArticleParams& article, double theta,
                                double m) {
  require_day(t);
  require_beta(article.beta);
  double log_prod = 0.0;
  for (int tau = 0; tau <= t; ++tau) {
    log_prod += std::log1p(effective_rate(tau, article, theta) *
                           decay_density(tau, article.beta));
  }
  return m * std::expm1(log_prod);
}

double expected_citations_recursive(int t, const ArticleParams& article, double theta,
                                    double m) {
  require_day(t);
  require_beta(article.beta);
  double mean = 0.0;
  for (int tau = 0; tau <= t; ++tau) {
    mean += effective_rate(tau, article, theta) * decay_density(tau, article.beta) *
            (m + mean);
  }
  return mean;
}

MomentCurve exact_moment_curve(const ArticleParams& article, double theta, double m) {
  article.validate();
  MomentCurve curve;
  curve.mean.reserve(article.horizon + 1);
  curve.variance.reserve(article.horizon + 1);
  double mean = 0.0;
  double var = 0.0;
  for (int t = 0; t <= article.horizon; ++t) {
    const double rate = effective_rate(t, article, theta);
    const double decay = decay_density(t, article.beta);
    const double cov = attachment_covariance(var, rate, decay);
    var = variance_recursion_step(var, mean, rate, decay, m, cov);
    mean += rate * decay * (m + mean);
    curve.mean.push_back(mean);
    curve.variance.push_back(var);
  }
  return curve;
}

ApproxExpectation expected_citations_approx(const ArticleParams& article, double theta,
                                            double m) {
  article.validate();
  const double pre_mass = decay_cumulative(article.preprint_duration, article.beta);
  const double post_mass =
      decay_mass(article.preprint_duration + 1, article.horizon, article.beta);
  const double pre_exponent = article.phi * pre_mass;
  ApproxExpectation out;
  out.pre_publication = m * std::expm1(pre_exponent);
  out.post_publication =
      m * std::exp(pre_exponent) * std::expm1(article.phi * theta * post_mass);
  out.long_term = m * std::expm1(article.phi * theta);
  return out;
}

double expected_citations_taylor(int t, const ArticleParams& article, double theta,
                                 double m) {
  require_day(t);
  require_beta(article.beta);
  const int tp = article.preprint_duration;
  const double pre = article.phi * decay_mass(0, std::min(t, tp), article.beta);
  const double post = article.phi * theta * decay_mass(tp + 1, t, article.beta);
  return m * std::expm1(pre + post);
}

double instantaneous_mean_approx(double t, double phi, double beta, double m) {
  require_beta(beta);
  return m * phi / beta * std::exp(phi * -std::expm1(-t / beta) - t / beta);
}

std::optional<double> peak_day(double phi, double beta) {
  require_beta(beta);
  if (!(phi > 1.0)) return std::nullopt;
  return beta * std::log(phi);
}

double attachment_covariance(double prev_var, double rate, double decay) {
  return rate * decay * prev_var;
}

double variance_recursion_step(double prev_var, double prev_mean, double rate,
                               double decay, double m, double covariance_term) {
  if (prev_var < 0.0) throw std::domain_error("variance must be non-negative");
  if (prev_mean < 0.0) throw std::domain_error("mean must be non-negative");
  const double intensity = rate * decay;
  const double increment_var = intensity * (m + prev_mean) + intensity * intensity * prev_var;
  return prev_var + increment_var + 2.0 * covariance_term;
}

}  // namespace citedyn
