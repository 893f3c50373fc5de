#include "citedyn/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "citedyn/random.hpp"

namespace citedyn {

CitationTrajectory simulate_trajectory(const ArticleParams& article, double theta, double m,
                                       std::uint64_t seed, Day preprint_day) {
  article.validate();
  Rng rng(seed);
  CitationTrajectory traj;
  traj.preprint_day = preprint_day;
  traj.publication_day = preprint_day + std::chrono::days{article.preprint_duration};
  traj.horizon_day = preprint_day + std::chrono::days{article.horizon};

  long long cumulative = 0;
  for (int t = 0; t <= article.horizon; ++t) {
    const double mean = effective_rate(t, article, theta) * decay_density(t, article.beta) *
                        (m + static_cast<double>(cumulative));
    if (!(mean > 0.0)) continue;
    const long long count = std::poisson_distribution<long long>(mean)(rng);
    if (count > 0) {
      traj.events.push_back({t, static_cast<int>(count)});
      cumulative += count;
    }
  }
  return traj;
}

void SyntheticJournal::validate() const {
  params.validate();
  if (n_articles < 1) throw std::domain_error("n_articles must be >= 1");
  if (min_duration < 0 || max_duration < min_duration)
    throw std::domain_error("invalid preprint duration range");
  if (last_preprint_day < first_preprint_day)
    throw std::domain_error("invalid preprint posting range");
  if (database_end) {
    if (last_preprint_day + std::chrono::days{max_duration} > *database_end)
      throw std::domain_error("publications could fall after the database end");
  } else if (horizon_days < max_duration) {
    throw std::domain_error("horizon shorter than the longest preprint duration");
  }
  if (fixed_beta && !(*fixed_beta > 0.0)) throw std::domain_error("beta must be positive");
  if (fixed_phi && !(*fixed_phi >= 0.0)) throw std::domain_error("phi must be >= 0");
}

std::vector<SimulatedArticle> simulate_journal(const SyntheticJournal& spec, double m,
                                               std::uint64_t seed, const Priors& priors) {
  spec.validate();
  Rng rng(derive_seed(seed, 0));
  std::lognormal_distribution<double> latent(spec.params.Phi, spec.params.epsilon);
  std::uniform_int_distribution<int> duration(spec.min_duration, spec.max_duration);
  std::uniform_int_distribution<int> posting(
      0, days_between(spec.first_preprint_day, spec.last_preprint_day));

  std::vector<SimulatedArticle> out;
  out.reserve(spec.n_articles);
  for (int i = 0; i < spec.n_articles; ++i) {
    SimulatedArticle sim;
    const double drawn = latent(rng);
    sim.phi = spec.fixed_phi ? *spec.fixed_phi : drawn;
    sim.beta = spec.fixed_beta ? *spec.fixed_beta
                               : sample_inv_gamma(rng, priors.beta_shape, priors.beta_scale);
    const Day preprint = spec.first_preprint_day + std::chrono::days{posting(rng)};
    ArticleParams article;
    article.phi = sim.phi;
    article.beta = sim.beta;
    article.preprint_duration = duration(rng);
    article.horizon =
        spec.database_end ? days_between(preprint, *spec.database_end) : spec.horizon_days;
    sim.trajectory = simulate_trajectory(article, spec.params.theta, m,
                                         derive_seed(seed, 1 + static_cast<std::uint64_t>(i)),
                                         preprint);
    out.push_back(std::move(sim));
  }
  return out;
}

MonteCarloCurve monte_carlo_mean_curve(const ArticleParams& article, double theta, double m,
                                       int n_reps, std::uint64_t seed) {
  if (n_reps < 2) throw std::domain_error("need at least two replicates");
  std::vector<std::uint64_t> seeds(n_reps);
  for (int r = 0; r < n_reps; ++r) seeds[r] = derive_seed(seed, static_cast<std::uint64_t>(r));
  return monte_carlo_mean_curve(article, theta, m, seeds);
}

MonteCarloCurve monte_carlo_mean_curve(const ArticleParams& article, double theta, double m,
                                       std::span<const std::uint64_t> seeds) {
  if (seeds.size() < 2) throw std::domain_error("need at least two replicates");
  article.validate();
  const std::size_t days = static_cast<std::size_t>(article.horizon) + 1;
  // Welford per day.
  std::vector<double> mean(days, 0.0);
  std::vector<double> m2(days, 0.0);
  long long n = 0;
  for (std::uint64_t s : seeds) {
    const auto cumulative = simulate_trajectory(article, theta, m, s).cumulative();
    ++n;
    for (std::size_t t = 0; t < days; ++t) {
      const double x = static_cast<double>(cumulative[t]);
      const double delta = x - mean[t];
      mean[t] += delta / static_cast<double>(n);
      m2[t] += delta * (x - mean[t]);
    }
  }
  MonteCarloCurve out;
  out.replicates = static_cast<int>(n);
  out.mean = std::move(mean);
  out.variance.resize(days);
  for (std::size_t t = 0; t < days; ++t) out.variance[t] = m2[t] / static_cast<double>(n - 1);
  return out;
}

}  // namespace citedyn
