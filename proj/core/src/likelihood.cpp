#include "citedyn/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "citedyn/errors.hpp"

namespace citedyn {

namespace {

double poisson_log_pmf_from_log_rate(long long count, double log_rate) {
  if (count == 0) return -std::exp(log_rate);
  return static_cast<double>(count) * log_rate - std::exp(log_rate) -
         std::lgamma(static_cast<double>(count) + 1.0);
}

// d log f(t) / d log(beta)
double dlog_decay_dlog_beta(int t, double beta) {
  return (t - 1.0 / std::expm1(1.0 / beta)) / beta;
}

void check_article(const CitationTrajectory& traj, const ArticleParams& article) {
  traj.validate();
  if (article.preprint_duration != traj.preprint_duration() ||
      article.horizon != traj.horizon()) {
    throw InputError("article timeline does not match the trajectory dates");
  }
}

}  // namespace

double log_likelihood_dense(const CitationTrajectory& traj, const ArticleParams& article,
                            double theta, double m) {
  check_article(traj, article);
  article.validate();
  const double log_phi = std::log(article.phi);
  const double log_theta = std::log(theta);
  double total = 0.0;
  long long cumulative = 0;
  auto next = traj.events.begin();
  for (int t = 0; t <= article.horizon; ++t) {
    long long count = 0;
    if (next != traj.events.end() && next->day == t) {
      count = next->count;
      ++next;
    }
    const double log_rate = log_phi + (t > article.preprint_duration ? log_theta : 0.0) +
                            log_decay_density(t, article.beta) +
                            std::log(m + static_cast<double>(cumulative));
    total += poisson_log_pmf_from_log_rate(count, log_rate);
    cumulative += count;
  }
  return total;
}

ArticleLikelihood article_log_likelihood(const CitationTrajectory& traj, double phi,
                                         double beta, double theta, double m) {
  const int tp = traj.preprint_duration();
  const int horizon = traj.horizon();
  const double log_phi = std::log(phi);
  const double log_theta = std::log(theta);
  const double log_unit_decay = std::log(-std::expm1(-1.0 / beta));
  const double post_rate = phi * theta;

  ArticleLikelihood out;
  double base = m;  // m + C(t - 1)

  // Zero-citation days [first, last] at the current cumulative count.
  auto gap = [&](int first, int last) {
    if (last < first) return;
    const int pre_last = std::min(last, tp);
    const int post_first = std::max(first, tp + 1);
    const double pre_mass = decay_mass(first, pre_last, beta);
    const double post_mass = decay_mass(post_first, last, beta);
    const double pre = base * phi * pre_mass;
    const double post = base * post_rate * post_mass;
    out.value -= pre + post;
    out.d_log_phi -= pre + post;
    out.d_log_theta -= post;
    out.d_log_beta -= base * (phi * decay_mass_dlog_beta(first, pre_last, beta) +
                              post_rate * decay_mass_dlog_beta(post_first, last, beta));
  };

  int previous = -1;
  for (const auto& e : traj.events) {
    gap(previous + 1, e.day - 1);
    const bool published = e.day > tp;
    const double log_rate = log_phi + (published ? log_theta : 0.0) - e.day / beta +
                            log_unit_decay + std::log(base);
    const double rate = std::exp(log_rate);
    const double c = e.count;
    out.value += c * log_rate - rate - std::lgamma(c + 1.0);
    const double residual = c - rate;
    out.d_log_phi += residual;
    if (published) out.d_log_theta += residual;
    out.d_log_beta += residual * dlog_decay_dlog_beta(e.day, beta);
    base += c;
    previous = e.day;
  }
  gap(previous + 1, horizon);
  return out;
}

double log_likelihood_sparse(const CitationTrajectory& traj, const ArticleParams& article,
                             double theta, double m) {
  check_article(traj, article);
  article.validate();
  return article_log_likelihood(traj, article.phi, article.beta, theta, m).value;
}

void SubsetData::validate() const {
  for (const auto& a : articles) {
    if (a.journal >= journal_ids.size()) {
      throw InputError("article '" + a.id + "' refers to unknown journal index " +
                       std::to_string(a.journal));
    }
    if (a.observation) a.observation->validate();
  }
}

std::vector<double> UnconstrainedParams::flatten() const {
  const ParameterLayout layout(log_phi.size(), Phi.size());
  if (log_beta.size() != log_phi.size() || log_epsilon.size() != Phi.size() ||
      log_theta.size() != Phi.size()) {
    throw InputError("inconsistent parameter dimensions");
  }
  std::vector<double> flat(layout.size());
  for (std::size_t i = 0; i < log_phi.size(); ++i) {
    flat[layout.log_phi(i)] = log_phi[i];
    flat[layout.log_beta(i)] = log_beta[i];
  }
  for (std::size_t j = 0; j < Phi.size(); ++j) {
    flat[layout.Phi(j)] = Phi[j];
    flat[layout.log_epsilon(j)] = log_epsilon[j];
    flat[layout.log_theta(j)] = log_theta[j];
  }
  return flat;
}

UnconstrainedParams UnconstrainedParams::unflatten(std::span<const double> flat,
                                                   const ParameterLayout& layout) {
  if (flat.size() != layout.size()) throw InputError("parameter vector has the wrong size");
  UnconstrainedParams p;
  for (std::size_t i = 0; i < layout.n_articles(); ++i) {
    p.log_phi.push_back(flat[layout.log_phi(i)]);
    p.log_beta.push_back(flat[layout.log_beta(i)]);
  }
  for (std::size_t j = 0; j < layout.n_journals(); ++j) {
    p.Phi.push_back(flat[layout.Phi(j)]);
    p.log_epsilon.push_back(flat[layout.log_epsilon(j)]);
    p.log_theta.push_back(flat[layout.log_theta(j)]);
  }
  return p;
}

namespace {

double evaluate(const SubsetData& data, std::span<const double> x, const Priors& priors,
                double m, Jacobian jacobian, std::vector<double>* gradient) {
  const ParameterLayout layout(data);
  if (x.size() != layout.size()) {
    throw InputError("parameter vector of size " + std::to_string(x.size()) +
                     " does not match subset layout of size " + std::to_string(layout.size()));
  }
  for (const auto& a : data.articles) {
    if (a.journal >= layout.n_journals()) throw InputError("article journal index out of range");
  }
  const bool with_jacobian = jacobian == Jacobian::include;
  const double log_sqrt_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  if (gradient) gradient->assign(layout.size(), 0.0);

  double lp = 0.0;
  for (std::size_t j = 0; j < layout.n_journals(); ++j) {
    const double Phi = x[layout.Phi(j)];
    const double log_eps = x[layout.log_epsilon(j)];
    const double log_theta = x[layout.log_theta(j)];
    const double eps = std::exp(log_eps);
    const double theta = std::exp(log_theta);

    lp += log_normal_pdf(Phi, priors.Phi_mean, priors.Phi_sd);
    lp += log_inv_gamma_pdf(eps, priors.epsilon_shape, priors.epsilon_scale);
    lp += log_gamma_pdf(theta, priors.theta_shape, priors.theta_rate);
    if (with_jacobian) lp += log_eps + log_theta;

    if (gradient) {
      auto& g = *gradient;
      g[layout.Phi(j)] += -(Phi - priors.Phi_mean) / (priors.Phi_sd * priors.Phi_sd);
      g[layout.log_epsilon(j)] +=
          -(priors.epsilon_shape + 1.0) + priors.epsilon_scale / eps + (with_jacobian ? 1.0 : 0.0);
      g[layout.log_theta(j)] +=
          (priors.theta_shape - 1.0) - priors.theta_rate * theta + (with_jacobian ? 1.0 : 0.0);
    }
  }

  for (std::size_t i = 0; i < data.articles.size(); ++i) {
    const auto& article = data.articles[i];
    const std::size_t j = article.journal;
    const double log_phi = x[layout.log_phi(i)];
    const double log_beta = x[layout.log_beta(i)];
    const double Phi = x[layout.Phi(j)];
    const double log_eps = x[layout.log_epsilon(j)];
    const double eps = std::exp(log_eps);
    const double beta = std::exp(log_beta);

    // phi | Phi, eps ~ LogNormal; its density in phi carries a 1/phi that the
    // log-transform Jacobian cancels.
    const double z = (log_phi - Phi) / eps;
    lp += -0.5 * z * z - log_eps - log_sqrt_2pi;
    if (!with_jacobian) lp -= log_phi;
    lp += log_inv_gamma_pdf(beta, priors.beta_shape, priors.beta_scale);
    if (with_jacobian) lp += log_beta;

    if (gradient) {
      auto& g = *gradient;
      g[layout.log_phi(i)] += -z / eps - (with_jacobian ? 0.0 : 1.0);
      g[layout.Phi(j)] += z / eps;
      g[layout.log_epsilon(j)] += z * z - 1.0;
      g[layout.log_beta(i)] +=
          -(priors.beta_shape + 1.0) + priors.beta_scale / beta + (with_jacobian ? 1.0 : 0.0);
    }

    if (article.observation) {
      const double theta = std::exp(x[layout.log_theta(j)]);
      const auto ll =
          article_log_likelihood(*article.observation, std::exp(log_phi), beta, theta, m);
      lp += ll.value;
      if (gradient) {
        auto& g = *gradient;
        g[layout.log_phi(i)] += ll.d_log_phi;
        g[layout.log_beta(i)] += ll.d_log_beta;
        g[layout.log_theta(j)] += ll.d_log_theta;
      }
    }
  }
  return lp;
}

}  // namespace

double log_posterior(const SubsetData& data, std::span<const double> params,
                     const Priors& priors, double m, Jacobian jacobian) {
  return evaluate(data, params, priors, m, jacobian, nullptr);
}

double log_posterior_gradient(const SubsetData& data, std::span<const double> params,
                              const Priors& priors, double m, std::vector<double>& gradient,
                              Jacobian jacobian) {
  return evaluate(data, params, priors, m, jacobian, &gradient);
}

}  // namespace citedyn
