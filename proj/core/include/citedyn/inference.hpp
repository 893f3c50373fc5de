#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "citedyn/likelihood.hpp"
#include "citedyn/priors.hpp"

namespace citedyn {

struct ChainConfig {
  int n_chains = 4;
  int n_iterations = 1000;  // per chain, warmup included
  double warmup_fraction = 0.5;
  double target_accept = 0.98;
  int max_tree_depth = 20;
  std::uint64_t seed = 1;
  int max_init_attempts = 100;
  double init_jitter = 0.5;  // half-width of the uniform jitter added to prior draws
  bool parallel_chains = true;

  void validate() const;
  int n_warmup() const;
  int n_draws() const { return n_iterations - n_warmup(); }
};

/// Post-warmup output of all chains, in constrained space.
struct PosteriorDraws {
  std::vector<std::string> names;  // one per parameter, layout order
  int n_chains = 0;
  int n_draws = 0;  // per chain
  // values[chain][draw * names.size() + k]
  std::vector<std::vector<double>> values;
  std::vector<std::vector<char>> divergent;  // [chain][draw]
  std::vector<std::vector<double>> accept_stat;
  std::vector<std::vector<int>> tree_depth;
  std::vector<double> step_size;  // per chain, after adaptation
  int warmup_divergences = 0;

  std::size_t n_params() const { return names.size(); }
  double at(int chain, int draw, std::size_t k) const {
    return values[chain][static_cast<std::size_t>(draw) * names.size() + k];
  }
  std::optional<std::size_t> index_of(const std::string& name) const;
  /// All chains' draws of one parameter, chain-major.
  std::vector<double> column(std::size_t k) const;
  /// Draws of one parameter split by chain.
  std::vector<std::vector<double>> chains_of(std::size_t k) const;
  int divergence_count() const;
};

/// Constrained parameter names in layout order: phi[id], beta[id] per
/// article, then Phi[j], epsilon[j], theta[j] per journal.
std::vector<std::string> parameter_names(const SubsetData& data);
/// exp() of the positive parameters; Phi passes through.
std::vector<double> constrain(std::span<const double> unconstrained, const ParameterLayout& layout);
std::vector<double> unconstrain(std::span<const double> constrained, const ParameterLayout& layout);

/// Unconstrained point drawn from the priors and jittered.
std::vector<double> draw_initial_point(const SubsetData& data, const Priors& priors, Rng& rng,
                                       double jitter);

PosteriorDraws sample_posterior(const SubsetData& data, const Priors& priors,
                                const ChainConfig& config, double m);

/// Split-chain potential scale reduction. Empty for fewer than two chains.
std::optional<double> split_rhat(const std::vector<std::vector<double>>& chains);
/// Multi-chain effective sample size (Geyer initial monotone sequence).
double effective_sample_size(const std::vector<std::vector<double>>& chains);

struct Diagnostics {
  std::vector<std::optional<double>> rhat;  // per parameter
  std::vector<double> ess;
  int divergences = 0;
  bool rhat_available = false;
  bool excluded = false;     // any divergence excludes the subset
  bool rhat_warning = false;  // some R-hat above the advisory threshold
};

inline constexpr double kRhatWarning = 1.01;

Diagnostics diagnostics(const PosteriorDraws& draws);

/// Linear-interpolation quantile (sample positions (n - 1) p). Sorts a copy.
double quantile(std::vector<double> values, double p);

struct Interval {
  double median = 0.0;
  double lower = 0.0;  // 2.5 %
  double upper = 0.0;  // 97.5 %
};
Interval percentile_interval(const std::vector<double>& values);

struct ParameterSummary {
  std::string name;
  Interval interval;
  std::optional<double> rhat;
  double ess = 0.0;
};

struct JournalSummary {
  std::string journal;
  Interval theta;
  Interval exp_Phi;  // median latent citation rate
  Interval Phi;
  Interval epsilon;
  Interval effective_rate;  // exp(Phi) * theta, per draw
  int n_articles = 0;
};

struct FitSummary {
  std::string field;
  int year = 0;
  std::vector<ParameterSummary> parameters;
  std::vector<JournalSummary> journals;
  int divergences = 0;
  bool excluded = false;
  bool rhat_warning = false;
  int n_chains = 0;
  int n_draws = 0;
};

FitSummary summarize(const PosteriorDraws& draws, const SubsetData& data);

struct MapResult {
  std::vector<double> unconstrained;
  std::vector<double> constrained;
  double log_density = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct MapOptions {
  int max_iterations = 2000;
  double gradient_tolerance = 1e-6;  // scaled by max(1, |log density|)
  int history = 8;
  // include: mode of the density the sampler targets (log-scale positives).
  // exclude: mode in the original parameterisation.
  Jacobian jacobian = Jacobian::include;
};

/// Posterior mode by limited-memory quasi-Newton ascent with backtracking
/// line search. When it does not converge the result is flagged and carries
/// the prior-based start.
MapResult map_estimate(const SubsetData& data, const Priors& priors, double m,
                       const MapOptions& options = {});

}  // namespace citedyn
