#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "citedyn/dates.hpp"
#include "citedyn/model.hpp"
#include "citedyn/priors.hpp"
#include "citedyn/trajectory.hpp"

namespace citedyn {

/// Day-by-day forward simulation: c(t) ~ Poisson(lambda(t) f(t) (m + C(t-1))).
/// Every day in [0, horizon] is drawn; the result depends only on the seed.
CitationTrajectory simulate_trajectory(const ArticleParams& article, double theta, double m,
                                       std::uint64_t seed, Day preprint_day = Day{});

struct SyntheticJournal {
  std::string id = "J0";
  JournalParams params;
  int n_articles = 50;
  // T' ~ Uniform{min_duration..max_duration} days.
  int min_duration = 30;
  int max_duration = 730;
  // Preprints are posted uniformly between these days (inclusive).
  Day first_preprint_day = parse_iso_date("2005-01-01");
  Day last_preprint_day = parse_iso_date("2005-12-31");
  // Observation ends at database_end when set, otherwise horizon_days after
  // the preprint posting.
  std::optional<Day> database_end;
  int horizon_days = 5 * 365;
  // Drawn from the prior when unset.
  std::optional<double> fixed_beta;
  // Overrides the LogNormal(Phi, epsilon) draw; 0 gives uncited articles.
  std::optional<double> fixed_phi;

  void validate() const;
};

struct SimulatedArticle {
  CitationTrajectory trajectory;
  double phi = 0.0;
  double beta = 0.0;
};

/// Draws phi_i ~ LogNormal(Phi, epsilon), beta_i (fixed or from the prior),
/// T' and the posting day, then simulates each article.
std::vector<SimulatedArticle> simulate_journal(const SyntheticJournal& spec, double m,
                                               std::uint64_t seed,
                                               const Priors& priors = {});

struct MonteCarloCurve {
  std::vector<double> mean;      // per day, 0..horizon
  std::vector<double> variance;  // unbiased (n - 1 denominator)
  int replicates = 0;
};

MonteCarloCurve monte_carlo_mean_curve(const ArticleParams& article, double theta, double m,
                                       int n_reps, std::uint64_t seed);
/// Same, with one explicit seed per replicate.
MonteCarloCurve monte_carlo_mean_curve(const ArticleParams& article, double theta, double m,
                                       std::span<const std::uint64_t> seeds);

}  // namespace citedyn
