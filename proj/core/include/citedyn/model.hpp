#pragma once

#include <optional>
#include <vector>

namespace citedyn {

/// Per-article parameters. Day 0 is the preprint posting day; days
/// `0..preprint_duration` run at the latent rate, later days at `phi * theta`.
struct ArticleParams {
  double phi = 0.0;           // latent citation rate
  double beta = 1095.0;       // decay inverse rate, in days
  int preprint_duration = 0;  // T': publication day offset
  int horizon = 0;            // T: last observed day offset

  void validate() const;
};

/// Per-journal hyperparameters. Latent rates of the journal's articles are
/// LogNormal(Phi, epsilon); theta multiplies the rate after publication.
struct JournalParams {
  double Phi = 0.0;
  double epsilon = 1.0;
  double theta = 1.0;

  void validate() const;
  double median_latent_rate() const;
};

/// Initial attractiveness: an uncited article still draws citations at rate
/// proportional to `m`.
struct ModelConfig {
  double m = 30.0;

  void validate() const;
};

// Exponential decay discretised per day.
double decay_density(int t, double beta);
double log_decay_density(int t, double beta);
double decay_cumulative(int t, double beta);

/// Mass of the decay over the closed day range [first, last]; 0 when
/// `last < first`. Equals F(last) - F(first - 1) without cancellation.
double decay_mass(int first, int last, double beta);
/// Derivative of `decay_mass` with respect to log(beta).
double decay_mass_dlog_beta(int first, int last, double beta);

double effective_rate(int t, const ArticleParams& article, double theta);
double log_effective_rate(int t, const ArticleParams& article, double theta);

/// E[C(t)] via the closed product form m * (prod_{tau<=t} (1 + lambda f) - 1),
/// accumulated as a sum of log1p terms.
double expected_citations_exact(int t, const ArticleParams& article, double theta,
                                double m);
/// E[C(t)] by iterating E[C(t)] = E[C(t-1)] + lambda f (m + E[C(t-1)]).
double expected_citations_recursive(int t, const ArticleParams& article, double theta,
                                    double m);
/// Exact mean and variance of C(t) for t = 0..article.horizon.
struct MomentCurve {
  std::vector<double> mean;
  std::vector<double> variance;
};
MomentCurve exact_moment_curve(const ArticleParams& article, double theta, double m);

struct ApproxExpectation {
  double pre_publication = 0.0;   // E[C'] ~ m (e^{phi F(T')} - 1)
  double post_publication = 0.0;  // E[C]  ~ m e^{phi F(T')} (e^{phi theta (F(T) - F(T'))} - 1)
  double long_term = 0.0;         // m (e^{phi theta} - 1)
};
ApproxExpectation expected_citations_approx(const ArticleParams& article, double theta,
                                            double m);
/// First-order approximation of E[C(t)] (log(1 + x) ~ x) at an arbitrary day.
double expected_citations_taylor(int t, const ArticleParams& article, double theta,
                                 double m);

/// Continuous-time approximation of the expected daily citations for
/// theta = 1: (m phi / beta) exp(phi (1 - e^{-t/beta}) - t/beta).
double instantaneous_mean_approx(double t, double phi, double beta, double m);

/// Day of maximal expected daily citations, beta * log(phi); empty when
/// phi <= 1 (the curve is then monotone decreasing).
std::optional<double> peak_day(double phi, double beta);

/// One step of Var(C(t)) = Var(C(t-1)) + Var(c(t)) + 2 Cov(C(t-1), c(t)) with
/// Var(c(t)) = rate*decay*(m + E[C(t-1)]) + (rate*decay)^2 Var(C(t-1)).
/// `covariance_term` is Cov(C(t-1), c(t)); the exact model value is
/// rate * decay * prev_var (see `attachment_covariance`).
double variance_recursion_step(double prev_var, double prev_mean, double rate,
                               double decay, double m, double covariance_term);
double attachment_covariance(double prev_var, double rate, double decay);

}  // namespace citedyn
