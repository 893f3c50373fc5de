#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "citedyn/dates.hpp"
#include "citedyn/likelihood.hpp"
#include "citedyn/random.hpp"
#include "citedyn/trajectory.hpp"

namespace testing_support {

inline bool rel_close(double a, double b, double rel, double abs_floor = 0.0) {
  return std::abs(a - b) <= std::max(rel * std::max(std::abs(a), std::abs(b)), abs_floor);
}

// Random trajectory with clustered, multi-citation days. When `straddle` is
// set, the publication day falls inside a long gap between two events.
inline citedyn::CitationTrajectory random_trajectory(citedyn::Rng& rng, bool straddle) {
  using namespace citedyn;
  std::uniform_int_distribution<int> horizon_d(40, 2500);
  const int horizon = horizon_d(rng);
  const int duration = std::uniform_int_distribution<int>(0, horizon)(rng);
  std::vector<int> days;
  const int n = std::uniform_int_distribution<int>(0, 60)(rng);
  for (int k = 0; k < n; ++k) {
    int d = std::uniform_int_distribution<int>(0, horizon)(rng);
    if (straddle && std::abs(d - duration) < 25) continue;
    days.push_back(d);
    if (uniform01(rng) < 0.2) days.push_back(d);  // same-day repeats
  }
  CitationTrajectory traj;
  traj.preprint_day = parse_iso_date("2004-03-01") + std::chrono::days{
                                                         std::uniform_int_distribution<int>(0, 900)(rng)};
  traj.publication_day = traj.preprint_day + std::chrono::days{duration};
  traj.horizon_day = traj.preprint_day + std::chrono::days{horizon};
  traj.events = events_from_days(days);
  return traj;
}

// Subset of random trajectories; with `with_empty` every fourth article is
// unobserved.
inline citedyn::SubsetData random_subset(citedyn::Rng& rng, int n_articles, int n_journals, bool with_empty) {
  citedyn::SubsetData d;
  for (int j = 0; j < n_journals; ++j) d.journal_ids.push_back("J" + std::to_string(j));
  for (int i = 0; i < n_articles; ++i) {
    citedyn::ArticleData a;
    a.id = "a" + std::to_string(i);
    a.journal = static_cast<std::size_t>(i % n_journals);
    if (!(with_empty && i % 4 == 3)) a.observation = random_trajectory(rng, i % 2 == 0);
    d.articles.push_back(std::move(a));
  }
  return d;
}

// Unconstrained point in a plausible region of the posterior.
inline std::vector<double> random_point(citedyn::Rng& rng, const citedyn::ParameterLayout& layout) {
  std::vector<double> x(layout.size());
  std::normal_distribution<double> z(0.0, 1.0);
  for (std::size_t i = 0; i < layout.n_articles(); ++i) {
    x[layout.log_phi(i)] = -1.0 + 0.8 * z(rng);
    x[layout.log_beta(i)] = std::log(600.0) + 0.7 * z(rng);
  }
  for (std::size_t j = 0; j < layout.n_journals(); ++j) {
    x[layout.Phi(j)] = -1.0 + 0.5 * z(rng);
    x[layout.log_epsilon(j)] = std::log(0.5) + 0.3 * z(rng);
    x[layout.log_theta(j)] = 0.5 * z(rng);
  }
  return x;
}

}  // namespace testing_support
