#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "citedyn/model.hpp"
#include "citedyn/priors.hpp"
#include "citedyn/trajectory.hpp"

namespace citedyn {

/// Log-likelihood of a trajectory summing the Poisson pmf over every day in
/// [0, horizon]. Used as the reference for the sparse evaluation.
double log_likelihood_dense(const CitationTrajectory& traj, const ArticleParams& article,
                            double theta, double m);

/// Same value as the dense form, but zero-citation stretches between events
/// are collapsed into one term each (split at the publication day), so the
/// cost scales with the number of cited days.
double log_likelihood_sparse(const CitationTrajectory& traj, const ArticleParams& article,
                             double theta, double m);

/// Sparse log-likelihood together with its partial derivatives with respect
/// to log(phi), log(beta) and log(theta).
struct ArticleLikelihood {
  double value = 0.0;
  double d_log_phi = 0.0;
  double d_log_beta = 0.0;
  double d_log_theta = 0.0;
};
ArticleLikelihood article_log_likelihood(const CitationTrajectory& traj, double phi,
                                         double beta, double theta, double m);

/// One article of a fitting subset. Articles without an observation
/// contribute only their prior terms.
struct ArticleData {
  std::string id;
  std::size_t journal = 0;
  std::optional<CitationTrajectory> observation;
};

struct SubsetData {
  std::vector<std::string> journal_ids;
  std::vector<ArticleData> articles;

  /// Throws InputError on an out-of-range journal index or an invalid
  /// trajectory.
  void validate() const;
};

/// Position of each model parameter in the flat unconstrained vector:
/// [log_phi_0, log_beta_0, log_phi_1, log_beta_1, ...,
///  Phi_0, log_epsilon_0, log_theta_0, Phi_1, ...].
class ParameterLayout {
 public:
  ParameterLayout() = default;
  ParameterLayout(std::size_t n_articles, std::size_t n_journals)
      : n_articles_(n_articles), n_journals_(n_journals) {}
  explicit ParameterLayout(const SubsetData& data)
      : ParameterLayout(data.articles.size(), data.journal_ids.size()) {}

  std::size_t size() const { return 2 * n_articles_ + 3 * n_journals_; }
  std::size_t n_articles() const { return n_articles_; }
  std::size_t n_journals() const { return n_journals_; }

  std::size_t log_phi(std::size_t i) const { return 2 * i; }
  std::size_t log_beta(std::size_t i) const { return 2 * i + 1; }
  std::size_t Phi(std::size_t j) const { return 2 * n_articles_ + 3 * j; }
  std::size_t log_epsilon(std::size_t j) const { return Phi(j) + 1; }
  std::size_t log_theta(std::size_t j) const { return Phi(j) + 2; }

 private:
  std::size_t n_articles_ = 0;
  std::size_t n_journals_ = 0;
};

/// Parameters in unconstrained space; positives are stored as logarithms.
struct UnconstrainedParams {
  std::vector<double> log_phi;
  std::vector<double> log_beta;
  std::vector<double> Phi;
  std::vector<double> log_epsilon;
  std::vector<double> log_theta;

  std::vector<double> flatten() const;
  static UnconstrainedParams unflatten(std::span<const double> flat,
                                       const ParameterLayout& layout);
};

/// Whether the log-Jacobian of the exp transforms is added. Sampling needs
/// it; a posterior mode in the original parameterisation must omit it.
enum class Jacobian { include, exclude };

double log_posterior(const SubsetData& data, std::span<const double> params,
                     const Priors& priors, double m, Jacobian jacobian = Jacobian::include);

/// Value and gradient in one pass; `gradient` is resized to the layout size.
double log_posterior_gradient(const SubsetData& data, std::span<const double> params,
                              const Priors& priors, double m, std::vector<double>& gradient,
                              Jacobian jacobian = Jacobian::include);

inline double log_posterior(const SubsetData& data, const UnconstrainedParams& params,
                            const Priors& priors, double m,
                            Jacobian jacobian = Jacobian::include) {
  const auto flat = params.flatten();
  return log_posterior(data, flat, priors, m, jacobian);
}

}  // namespace citedyn
