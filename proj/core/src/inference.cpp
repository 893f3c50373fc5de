#include "citedyn/inference.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "citedyn/errors.hpp"
#include "citedyn/nuts.hpp"

namespace citedyn {

void ChainConfig::validate() const {
  if (n_chains < 1) throw InputError("n_chains must be >= 1");
  if (!(warmup_fraction > 0.0 && warmup_fraction < 1.0))
    throw InputError("warmup fraction must lie in (0, 1)");
  if (!(target_accept > 0.0 && target_accept < 1.0))
    throw InputError("target acceptance must lie in (0, 1)");
  if (max_tree_depth < 1) throw InputError("max tree depth must be >= 1");
  if (n_iterations < 2 || n_draws() < 1) throw InputError("too few iterations");
  if (max_init_attempts < 1) throw InputError("need at least one initialisation attempt");
}

int ChainConfig::n_warmup() const {
  return static_cast<int>(std::floor(n_iterations * warmup_fraction));
}

std::optional<std::size_t> PosteriorDraws::index_of(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

std::vector<double> PosteriorDraws::column(std::size_t k) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_chains) * n_draws);
  for (int c = 0; c < n_chains; ++c)
    for (int d = 0; d < n_draws; ++d) out.push_back(at(c, d, k));
  return out;
}

std::vector<std::vector<double>> PosteriorDraws::chains_of(std::size_t k) const {
  std::vector<std::vector<double>> out(n_chains);
  for (int c = 0; c < n_chains; ++c) {
    out[c].reserve(n_draws);
    for (int d = 0; d < n_draws; ++d) out[c].push_back(at(c, d, k));
  }
  return out;
}

int PosteriorDraws::divergence_count() const {
  int total = 0;
  for (const auto& chain : divergent)
    for (char flag : chain) total += flag ? 1 : 0;
  return total;
}

std::vector<std::string> parameter_names(const SubsetData& data) {
  const ParameterLayout layout(data);
  std::vector<std::string> names(layout.size());
  for (std::size_t i = 0; i < data.articles.size(); ++i) {
    names[layout.log_phi(i)] = "phi[" + data.articles[i].id + "]";
    names[layout.log_beta(i)] = "beta[" + data.articles[i].id + "]";
  }
  for (std::size_t j = 0; j < data.journal_ids.size(); ++j) {
    names[layout.Phi(j)] = "Phi[" + data.journal_ids[j] + "]";
    names[layout.log_epsilon(j)] = "epsilon[" + data.journal_ids[j] + "]";
    names[layout.log_theta(j)] = "theta[" + data.journal_ids[j] + "]";
  }
  return names;
}

std::vector<double> constrain(std::span<const double> x, const ParameterLayout& layout) {
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::exp(out[k]);
  for (std::size_t j = 0; j < layout.n_journals(); ++j) out[layout.Phi(j)] = x[layout.Phi(j)];
  return out;
}

std::vector<double> unconstrain(std::span<const double> y, const ParameterLayout& layout) {
  std::vector<double> out(y.begin(), y.end());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::log(out[k]);
  for (std::size_t j = 0; j < layout.n_journals(); ++j) out[layout.Phi(j)] = y[layout.Phi(j)];
  return out;
}

std::vector<double> draw_initial_point(const SubsetData& data, const Priors& priors, Rng& rng,
                                       double jitter) {
  const ParameterLayout layout(data);
  std::vector<double> x(layout.size());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> shake(-jitter, jitter);
  for (std::size_t j = 0; j < layout.n_journals(); ++j) {
    x[layout.Phi(j)] = priors.Phi_mean + priors.Phi_sd * normal(rng) + shake(rng);
    x[layout.log_epsilon(j)] =
        std::log(sample_inv_gamma(rng, priors.epsilon_shape, priors.epsilon_scale)) + shake(rng);
    x[layout.log_theta(j)] =
        std::log(sample_gamma(rng, priors.theta_shape, priors.theta_rate)) + shake(rng);
  }
  for (std::size_t i = 0; i < data.articles.size(); ++i) {
    const std::size_t j = data.articles[i].journal;
    const double eps = std::exp(x[layout.log_epsilon(j)]);
    x[layout.log_phi(i)] = x[layout.Phi(j)] + eps * normal(rng) + shake(rng);
    x[layout.log_beta(i)] =
        std::log(sample_inv_gamma(rng, priors.beta_shape, priors.beta_scale)) + shake(rng);
  }
  return x;
}

namespace {

struct ChainOutput {
  std::vector<double> values;
  std::vector<char> divergent;
  std::vector<double> accept_stat;
  std::vector<int> tree_depth;
  double step_size = 0.0;
  int warmup_divergences = 0;
};

ChainOutput run_chain(const SubsetData& data, const Priors& priors, const ChainConfig& config,
                      double m, int chain) {
  const ParameterLayout layout(data);
  LogDensityFn density = [&](std::span<const double> x, std::vector<double>& grad) {
    return log_posterior_gradient(data, x, priors, m, grad, Jacobian::include);
  };

  NutsSettings settings;
  settings.target_accept = config.target_accept;
  settings.max_tree_depth = config.max_tree_depth;

  Rng init_rng(derive_seed(config.seed, 2 * static_cast<std::uint64_t>(chain)));
  const std::uint64_t sampler_seed = derive_seed(config.seed, 2 * static_cast<std::uint64_t>(chain) + 1);

  std::optional<NutsSampler> sampler;
  std::vector<double> grad;
  for (int attempt = 0; attempt < config.max_init_attempts && !sampler; ++attempt) {
    auto x0 = draw_initial_point(data, priors, init_rng, config.init_jitter);
    const double lp = log_posterior_gradient(data, x0, priors, m, grad);
    if (!std::isfinite(lp) ||
        !std::all_of(grad.begin(), grad.end(), [](double g) { return std::isfinite(g); })) {
      continue;
    }
    try {
      sampler.emplace(density, std::move(x0), settings, sampler_seed);
    } catch (const NumericalError&) {
      sampler.reset();
    }
  }
  if (!sampler) {
    throw NumericalError("chain " + std::to_string(chain) + ": no finite starting point after " +
                         std::to_string(config.max_init_attempts) + " attempts");
  }

  ChainOutput out;
  const int n_warmup = config.n_warmup();
  sampler->begin_warmup(n_warmup);
  for (int it = 0; it < n_warmup; ++it) {
    if (sampler->step().divergent) ++out.warmup_divergences;
  }
  sampler->end_warmup();
  out.step_size = sampler->step_size();

  const int n_draws = config.n_draws();
  out.values.reserve(static_cast<std::size_t>(n_draws) * layout.size());
  for (int it = 0; it < n_draws; ++it) {
    const Transition t = sampler->step();
    out.divergent.push_back(t.divergent ? 1 : 0);
    out.accept_stat.push_back(t.accept_stat);
    out.tree_depth.push_back(t.tree_depth);
    const auto y = constrain(sampler->position(), layout);
    out.values.insert(out.values.end(), y.begin(), y.end());
  }
  return out;
}

}  // namespace

PosteriorDraws sample_posterior(const SubsetData& data, const Priors& priors,
                                const ChainConfig& config, double m) {
  config.validate();
  priors.validate();
  data.validate();
  if (data.articles.empty() && data.journal_ids.empty()) throw InputError("empty subset");

  std::vector<ChainOutput> outputs(config.n_chains);
  std::vector<std::exception_ptr> errors(config.n_chains);
  auto work = [&](int c) {
    try {
      outputs[c] = run_chain(data, priors, config, m, c);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  if (config.parallel_chains && config.n_chains > 1) {
    std::vector<std::jthread> threads;
    for (int c = 0; c < config.n_chains; ++c) threads.emplace_back(work, c);
  } else {
    for (int c = 0; c < config.n_chains; ++c) work(c);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  PosteriorDraws draws;
  draws.names = parameter_names(data);
  draws.n_chains = config.n_chains;
  draws.n_draws = config.n_draws();
  for (auto& o : outputs) {
    draws.values.push_back(std::move(o.values));
    draws.divergent.push_back(std::move(o.divergent));
    draws.accept_stat.push_back(std::move(o.accept_stat));
    draws.tree_depth.push_back(std::move(o.tree_depth));
    draws.step_size.push_back(o.step_size);
    draws.warmup_divergences += o.warmup_divergences;
  }
  return draws;
}

std::optional<double> split_rhat(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) return std::nullopt;
  std::vector<std::vector<double>> halves;
  for (const auto& chain : chains) {
    const std::size_t half = chain.size() / 2;
    if (half < 2) return std::nullopt;
    halves.emplace_back(chain.begin(), chain.begin() + half);
    halves.emplace_back(chain.end() - half, chain.end());
  }
  const double n = static_cast<double>(halves.front().size());
  const double k = static_cast<double>(halves.size());
  std::vector<double> means, vars;
  for (const auto& h : halves) {
    const double mean = std::accumulate(h.begin(), h.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : h) ss += (v - mean) * (v - mean);
    means.push_back(mean);
    vars.push_back(ss / (n - 1.0));
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / k;
  double between = 0.0;
  for (double mu : means) between += (mu - grand) * (mu - grand);
  between *= n / (k - 1.0);
  const double within = std::accumulate(vars.begin(), vars.end(), 0.0) / k;
  if (within <= 0.0) return between <= 0.0 ? std::optional<double>(1.0) : std::nullopt;
  const double var_plus = (n - 1.0) / n * within + between / n;
  return std::sqrt(var_plus / within);
}

double effective_sample_size(const std::vector<std::vector<double>>& chains) {
  const std::size_t n_chains = chains.size();
  if (n_chains == 0) return 0.0;
  std::size_t n = chains.front().size();
  for (const auto& c : chains) n = std::min(n, c.size());
  if (n < 4) return static_cast<double>(n * n_chains);

  std::vector<double> means(n_chains), vars(n_chains);
  for (std::size_t c = 0; c < n_chains; ++c) {
    means[c] = std::accumulate(chains[c].begin(), chains[c].begin() + n, 0.0) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (chains[c][i] - means[c]) * (chains[c][i] - means[c]);
    vars[c] = ss / (n - 1.0);
  }
  const double mean_var = std::accumulate(vars.begin(), vars.end(), 0.0) / n_chains;
  double var_plus = mean_var * (n - 1.0) / n;
  if (n_chains > 1) {
    const double grand = std::accumulate(means.begin(), means.end(), 0.0) / n_chains;
    double b = 0.0;
    for (double mu : means) b += (mu - grand) * (mu - grand);
    var_plus += b / (n_chains - 1.0);
  }
  if (!(var_plus > 0.0)) return static_cast<double>(n * n_chains);

  // Mean over chains of the biased autocovariance at a given lag.
  auto acov = [&](std::size_t lag) {
    double total = 0.0;
    for (std::size_t c = 0; c < n_chains; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i + lag < n; ++i)
        s += (chains[c][i] - means[c]) * (chains[c][i + lag] - means[c]);
      total += s / n;
    }
    return total / n_chains;
  };
  std::vector<double> rho(n, 0.0);
  double rho_even = 1.0;
  double rho_odd = 1.0 - (mean_var - acov(1)) / var_plus;
  rho[0] = rho_even;
  rho[1] = rho_odd;
  std::size_t s = 1;
  while (s < n - 4 && rho_even + rho_odd > 0.0) {
    rho_even = 1.0 - (mean_var - acov(s + 1)) / var_plus;
    rho_odd = 1.0 - (mean_var - acov(s + 2)) / var_plus;
    if (rho_even + rho_odd >= 0.0) {
      rho[s + 1] = rho_even;
      rho[s + 2] = rho_odd;
    }
    s += 2;
  }
  const std::size_t max_s = s;
  if (rho[max_s] > 0.0) rho[max_s + 1] = rho[max_s];
  for (std::size_t t = 1; t + 3 <= max_s; t += 2) {
    if (rho[t + 1] + rho[t + 2] > rho[t - 1] + rho[t]) {
      rho[t + 1] = (rho[t - 1] + rho[t]) / 2.0;
      rho[t + 2] = rho[t + 1];
    }
  }
  const double total = static_cast<double>(n * n_chains);
  double tau = -1.0 + rho[max_s + 1];
  for (std::size_t t = 0; t < max_s; ++t) tau += 2.0 * rho[t];
  return total / std::max(tau, 1.0 / std::log10(total));
}

Diagnostics diagnostics(const PosteriorDraws& draws) {
  Diagnostics out;
  out.rhat_available = draws.n_chains >= 2;
  for (std::size_t k = 0; k < draws.n_params(); ++k) {
    const auto chains = draws.chains_of(k);
    const auto r = split_rhat(chains);
    out.rhat.push_back(r);
    out.ess.push_back(effective_sample_size(chains));
    if (r && (*r > kRhatWarning || !std::isfinite(*r))) out.rhat_warning = true;
  }
  out.divergences = draws.divergence_count();
  out.excluded = out.divergences > 0;
  return out;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InputError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Interval percentile_interval(const std::vector<double>& values) {
  return {quantile(values, 0.5), quantile(values, 0.025), quantile(values, 0.975)};
}

FitSummary summarize(const PosteriorDraws& draws, const SubsetData& data) {
  if (draws.n_chains < 1 || draws.n_draws < 1) throw InputError("no draws to summarise");
  const Diagnostics diag = diagnostics(draws);
  FitSummary out;
  out.divergences = diag.divergences;
  out.excluded = diag.excluded;
  out.rhat_warning = diag.rhat_warning;
  out.n_chains = draws.n_chains;
  out.n_draws = draws.n_draws;
  for (std::size_t k = 0; k < draws.n_params(); ++k) {
    out.parameters.push_back(
        {draws.names[k], percentile_interval(draws.column(k)), diag.rhat[k], diag.ess[k]});
  }
  for (std::size_t j = 0; j < data.journal_ids.size(); ++j) {
    const std::string& id = data.journal_ids[j];
    const auto phi_k = draws.index_of("Phi[" + id + "]");
    const auto eps_k = draws.index_of("epsilon[" + id + "]");
    const auto theta_k = draws.index_of("theta[" + id + "]");
    if (!phi_k || !eps_k || !theta_k) throw InputError("draws lack journal '" + id + "'");
    const auto Phi = draws.column(*phi_k);
    const auto theta = draws.column(*theta_k);
    std::vector<double> exp_Phi(Phi.size()), effective(Phi.size());
    for (std::size_t d = 0; d < Phi.size(); ++d) {
      exp_Phi[d] = std::exp(Phi[d]);
      effective[d] = exp_Phi[d] * theta[d];
    }
    JournalSummary js;
    js.journal = id;
    js.theta = percentile_interval(theta);
    js.Phi = percentile_interval(Phi);
    js.exp_Phi = percentile_interval(exp_Phi);
    js.epsilon = percentile_interval(draws.column(*eps_k));
    js.effective_rate = percentile_interval(effective);
    js.n_articles = static_cast<int>(std::count_if(
        data.articles.begin(), data.articles.end(), [j](const ArticleData& a) { return a.journal == j; }));
    out.journals.push_back(std::move(js));
  }
  return out;
}

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> prior_centre(const SubsetData& data, const Priors& priors) {
  const ParameterLayout layout(data);
  std::vector<double> x(layout.size());
  const double theta_mode = priors.theta_shape > 1.0
                                ? (priors.theta_shape - 1.0) / priors.theta_rate
                                : priors.theta_shape / priors.theta_rate;
  for (std::size_t j = 0; j < layout.n_journals(); ++j) {
    x[layout.Phi(j)] = priors.Phi_mean;
    x[layout.log_epsilon(j)] = std::log(priors.epsilon_scale / (priors.epsilon_shape + 1.0));
    x[layout.log_theta(j)] = std::log(theta_mode);
  }
  for (std::size_t i = 0; i < data.articles.size(); ++i) {
    x[layout.log_phi(i)] = priors.Phi_mean;
    x[layout.log_beta(i)] = std::log(priors.beta_scale / (priors.beta_shape + 1.0));
  }
  return x;
}

}  // namespace

MapResult map_estimate(const SubsetData& data, const Priors& priors, double m,
                       const MapOptions& options) {
  priors.validate();
  data.validate();
  if (data.articles.empty() && data.journal_ids.empty()) throw InputError("empty subset");
  const ParameterLayout layout(data);

  // Minimise f = -log p.
  auto objective = [&](const std::vector<double>& x, std::vector<double>& g) {
    const double lp = log_posterior_gradient(data, x, priors, m, g, options.jacobian);
    for (double& v : g) v = -v;
    return -lp;
  };

  const std::vector<double> start = prior_centre(data, priors);
  std::vector<double> x = start;
  std::vector<double> g;
  double f = objective(x, g);

  MapResult result;
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  const std::size_t n = x.size();
  int it = 0;
  for (; it < options.max_iterations && std::isfinite(f); ++it) {
    if (norm2(g) <= options.gradient_tolerance) break;

    // Two-loop recursion for the quasi-Newton direction.
    std::vector<double> d(g);
    std::vector<double> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      double a = 0.0;
      for (std::size_t i = 0; i < n; ++i) a += s_hist[k][i] * d[i];
      a *= rho_hist[k];
      alpha[k] = a;
      for (std::size_t i = 0; i < n; ++i) d[i] -= a * y_hist[k][i];
    }
    if (!s_hist.empty()) {
      double sy = 0.0, yy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sy += s_hist.back()[i] * y_hist.back()[i];
        yy += y_hist.back()[i] * y_hist.back()[i];
      }
      for (double& v : d) v *= sy / yy;
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      double b = 0.0;
      for (std::size_t i = 0; i < n; ++i) b += y_hist[k][i] * d[i];
      b *= rho_hist[k];
      for (std::size_t i = 0; i < n; ++i) d[i] += s_hist[k][i] * (alpha[k] - b);
    }
    for (double& v : d) v = -v;

    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += g[i] * d[i];
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      slope = -norm2(g) * norm2(g);
    }

    // Backtracking (Armijo) line search.
    double step = s_hist.empty() ? std::min(1.0, 1.0 / norm2(g)) : 1.0;
    std::vector<double> x_new(n), g_new;
    double f_new = f;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * d[i];
      f_new = objective(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || f - f_new <= 1e-15 * std::abs(f)) {
      if (accepted) {
        x = std::move(x_new);
        g = std::move(g_new);
        f = f_new;
      }
      break;
    }

    std::vector<double> s(n), y(n);
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
      sy += s[i] * y[i];
    }
    if (sy > 1e-12) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x = std::move(x_new);
    g = std::move(g_new);
    f = f_new;
  }

  result.iterations = it;
  result.gradient_norm = norm2(g);
  // Round-off limits the attainable gradient norm to roughly eps * |f|.
  result.converged = std::isfinite(f) &&
                     result.gradient_norm <= options.gradient_tolerance * std::max(1.0, std::abs(f));
  if (!result.converged) {
    x = start;
    f = objective(x, g);
  }
  result.unconstrained = x;
  result.constrained = constrain(x, layout);
  result.log_density = -f;
  return result;
}

}  // namespace citedyn
