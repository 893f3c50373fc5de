#include "citedyn/nuts.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "citedyn/errors.hpp"

namespace citedyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_sum_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

void add_into(std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

bool no_turn(const std::vector<double>& p_sharp_minus, const std::vector<double>& p_sharp_plus,
             const std::vector<double>& rho) {
  return dot(p_sharp_plus, rho) > 0.0 && dot(p_sharp_minus, rho) > 0.0;
}

}  // namespace

NutsSampler::NutsSampler(LogDensityFn log_density, std::vector<double> initial,
                         NutsSettings settings, std::uint64_t seed)
    : log_density_(std::move(log_density)),
      settings_(settings),
      rng_(seed),
      q_(std::move(initial)),
      inv_metric_(q_.size(), 1.0) {
  logp_ = log_density_(q_, grad_);
  if (!std::isfinite(logp_)) throw NumericalError("log density is not finite at the initial point");
  init_step_size();
}

double NutsSampler::hamiltonian(const State& z) const {
  double kinetic = 0.0;
  for (std::size_t i = 0; i < z.p.size(); ++i) kinetic += inv_metric_[i] * z.p[i] * z.p[i];
  return -z.logp + 0.5 * kinetic;
}

void NutsSampler::sample_momentum(State& z) {
  std::normal_distribution<double> normal(0.0, 1.0);
  z.p.resize(z.q.size());
  for (std::size_t i = 0; i < z.p.size(); ++i) z.p[i] = normal(rng_) / std::sqrt(inv_metric_[i]);
}

std::vector<double> NutsSampler::p_sharp(const State& z) const {
  std::vector<double> out(z.p.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = inv_metric_[i] * z.p[i];
  return out;
}

void NutsSampler::leapfrog(State& z, double epsilon) {
  const std::size_t n = z.q.size();
  for (std::size_t i = 0; i < n; ++i) z.p[i] += 0.5 * epsilon * z.grad[i];
  for (std::size_t i = 0; i < n; ++i) z.q[i] += epsilon * inv_metric_[i] * z.p[i];
  z.logp = log_density_(z.q, z.grad);
  if (!std::isfinite(z.logp)) {
    z.logp = -kInf;
    return;
  }
  for (std::size_t i = 0; i < n; ++i) z.p[i] += 0.5 * epsilon * z.grad[i];
}

void NutsSampler::init_step_size() {
  if (step_size_ == 0.0 || step_size_ > 1e7 || std::isnan(step_size_)) return;
  const State origin{q_, {}, grad_, logp_};
  auto delta_h = [&] {
    State z = origin;
    sample_momentum(z);
    const double h0 = hamiltonian(z);
    leapfrog(z, step_size_);
    double h = hamiltonian(z);
    if (std::isnan(h)) h = kInf;
    return h0 - h;
  };
  const double threshold = std::log(0.8);
  const int direction = delta_h() > threshold ? 1 : -1;
  while (true) {
    const double dh = delta_h();
    if (direction == 1 && !(dh > threshold)) break;
    if (direction == -1 && !(dh < threshold)) break;
    step_size_ = direction == 1 ? 2.0 * step_size_ : 0.5 * step_size_;
    if (step_size_ > 1e7) throw NumericalError("step size diverged during initialisation");
    if (step_size_ == 0.0) throw NumericalError("step size collapsed to zero");
  }
}

bool NutsSampler::build_tree(int depth, State& z, State& z_propose,
                             std::vector<double>& p_sharp_beg, std::vector<double>& p_sharp_end,
                             std::vector<double>& rho, std::vector<double>& p_beg,
                             std::vector<double>& p_end, double H0, double sign, int& n_leapfrog,
                             double& log_sum_weight, double& sum_metro_prob, bool& divergent) {
  if (depth == 0) {
    leapfrog(z, sign * step_size_);
    ++n_leapfrog;
    double h = hamiltonian(z);
    if (std::isnan(h)) h = kInf;
    if (h - H0 > settings_.max_delta_h) divergent = true;
    log_sum_weight = log_sum_exp(log_sum_weight, H0 - h);
    sum_metro_prob += H0 - h > 0.0 ? 1.0 : std::exp(H0 - h);
    z_propose = z;
    p_sharp_beg = p_sharp(z);
    p_sharp_end = p_sharp_beg;
    add_into(rho, z.p);
    p_beg = z.p;
    p_end = p_beg;
    return !divergent;
  }

  const std::size_t n = z.q.size();

  // Initial subtree.
  double log_sum_weight_init = -kInf;
  std::vector<double> p_init_end(n), p_sharp_init_end(n), rho_init(n, 0.0);
  if (!build_tree(depth - 1, z, z_propose, p_sharp_beg, p_sharp_init_end, rho_init, p_beg,
                  p_init_end, H0, sign, n_leapfrog, log_sum_weight_init, sum_metro_prob,
                  divergent)) {
    return false;
  }

  // Final subtree.
  State z_propose_final = z;
  double log_sum_weight_final = -kInf;
  std::vector<double> p_final_beg(n), p_sharp_final_beg(n), rho_final(n, 0.0);
  if (!build_tree(depth - 1, z, z_propose_final, p_sharp_final_beg, p_sharp_end, rho_final,
                  p_final_beg, p_end, H0, sign, n_leapfrog, log_sum_weight_final,
                  sum_metro_prob, divergent)) {
    return false;
  }

  // Multinomial sample from the right subtree, biased towards it.
  const double log_sum_weight_subtree = log_sum_exp(log_sum_weight_init, log_sum_weight_final);
  log_sum_weight = log_sum_exp(log_sum_weight, log_sum_weight_subtree);
  if (log_sum_weight_final > log_sum_weight_subtree) {
    z_propose = std::move(z_propose_final);
  } else if (uniform01(rng_) < std::exp(log_sum_weight_final - log_sum_weight_subtree)) {
    z_propose = std::move(z_propose_final);
  }

  const std::vector<double> rho_subtree = add(rho_init, rho_final);
  add_into(rho, rho_subtree);

  bool persist = no_turn(p_sharp_beg, p_sharp_end, rho_subtree);
  persist = persist && no_turn(p_sharp_beg, p_sharp_final_beg, add(rho_init, p_final_beg));
  persist = persist && no_turn(p_sharp_init_end, p_sharp_end, add(rho_final, p_init_end));
  return persist;
}

Transition NutsSampler::step() {
  State z{q_, {}, grad_, logp_};
  sample_momentum(z);
  const std::size_t n = z.q.size();

  State z_fwd = z;
  State z_bck = z;
  State z_sample = z;
  State z_propose = z;

  std::vector<double> p_fwd_fwd = z.p;
  std::vector<double> p_sharp_fwd_fwd = p_sharp(z);
  std::vector<double> p_fwd_bck = z.p;
  std::vector<double> p_sharp_fwd_bck = p_sharp_fwd_fwd;
  std::vector<double> p_bck_fwd = z.p;
  std::vector<double> p_sharp_bck_fwd = p_sharp_fwd_fwd;
  std::vector<double> p_bck_bck = z.p;
  std::vector<double> p_sharp_bck_bck = p_sharp_fwd_fwd;
  std::vector<double> rho = z.p;

  double log_sum_weight = 0.0;
  const double H0 = hamiltonian(z);
  int n_leapfrog = 0;
  double sum_metro_prob = 0.0;
  int depth = 0;
  bool divergent = false;

  while (depth < settings_.max_tree_depth) {
    std::vector<double> rho_fwd(n, 0.0), rho_bck(n, 0.0);
    bool valid_subtree = false;
    double log_sum_weight_subtree = -kInf;

    if (uniform01(rng_) > 0.5) {
      z = z_fwd;
      rho_bck = rho;
      p_bck_fwd = p_fwd_fwd;
      p_sharp_bck_fwd = p_sharp_fwd_fwd;
      valid_subtree = build_tree(depth, z, z_propose, p_sharp_fwd_bck, p_sharp_fwd_fwd, rho_fwd,
                                 p_fwd_bck, p_fwd_fwd, H0, 1.0, n_leapfrog,
                                 log_sum_weight_subtree, sum_metro_prob, divergent);
      z_fwd = z;
    } else {
      z = z_bck;
      rho_fwd = rho;
      p_fwd_bck = p_bck_bck;
      p_sharp_fwd_bck = p_sharp_bck_bck;
      valid_subtree = build_tree(depth, z, z_propose, p_sharp_bck_fwd, p_sharp_bck_bck, rho_bck,
                                 p_bck_fwd, p_bck_bck, H0, -1.0, n_leapfrog,
                                 log_sum_weight_subtree, sum_metro_prob, divergent);
      z_bck = z;
    }

    if (!valid_subtree) break;
    ++depth;

    if (log_sum_weight_subtree > log_sum_weight) {
      z_sample = z_propose;
    } else if (uniform01(rng_) < std::exp(log_sum_weight_subtree - log_sum_weight)) {
      z_sample = z_propose;
    }
    log_sum_weight = log_sum_exp(log_sum_weight, log_sum_weight_subtree);

    rho = add(rho_bck, rho_fwd);
    bool persist = no_turn(p_sharp_bck_bck, p_sharp_fwd_fwd, rho);
    persist = persist && no_turn(p_sharp_bck_bck, p_sharp_fwd_bck, add(rho_bck, p_fwd_bck));
    persist = persist && no_turn(p_sharp_bck_fwd, p_sharp_fwd_fwd, add(rho_fwd, p_bck_fwd));
    if (!persist) break;
  }

  q_ = std::move(z_sample.q);
  grad_ = std::move(z_sample.grad);
  logp_ = z_sample.logp;

  Transition out;
  out.tree_depth = depth;
  out.n_leapfrog = n_leapfrog;
  out.divergent = divergent;
  out.accept_stat = n_leapfrog > 0 ? sum_metro_prob / n_leapfrog : 0.0;
  out.energy = hamiltonian(State{q_, z_sample.p, grad_, logp_});

  if (adapting_) {
    // Dual averaging on log step size.
    ++adapt_counter_;
    const double stat = std::min(1.0, out.accept_stat);
    const double eta = 1.0 / (adapt_counter_ + settings_.t0);
    s_bar_ = (1.0 - eta) * s_bar_ + eta * (settings_.target_accept - stat);
    const double x = mu_ - s_bar_ * std::sqrt(static_cast<double>(adapt_counter_)) / settings_.gamma;
    const double x_eta = std::pow(static_cast<double>(adapt_counter_), -settings_.kappa);
    x_bar_ = (1.0 - x_eta) * x_bar_ + x_eta * x;
    step_size_ = std::exp(x);

    // Metric: accumulate inside windows, refresh at window ends.
    bool metric_updated = false;
    if (in_adaptation_window()) {
      ++welford_n_;
      for (std::size_t i = 0; i < n; ++i) {
        const double delta = q_[i] - welford_mean_[i];
        welford_mean_[i] += delta / static_cast<double>(welford_n_);
        welford_m2_[i] += delta * (q_[i] - welford_mean_[i]);
      }
    }
    if (at_window_end()) {
      compute_next_window();
      const double count = static_cast<double>(welford_n_);
      for (std::size_t i = 0; i < n; ++i) {
        const double var = welford_n_ > 1 ? welford_m2_[i] / (count - 1.0) : 1.0;
        inv_metric_[i] = (count / (count + 5.0)) * var + 1e-3 * (5.0 / (count + 5.0));
      }
      welford_n_ = 0;
      std::fill(welford_mean_.begin(), welford_mean_.end(), 0.0);
      std::fill(welford_m2_.begin(), welford_m2_.end(), 0.0);
      metric_updated = true;
    }
    ++window_counter_;
    if (metric_updated) {
      init_step_size();
      mu_ = std::log(10.0 * step_size_);
      s_bar_ = 0.0;
      x_bar_ = 0.0;
      adapt_counter_ = 0;
    }
  }
  return out;
}

void NutsSampler::begin_warmup(int num_warmup) {
  adapting_ = num_warmup > 0;
  num_warmup_ = num_warmup;
  if (num_warmup < 20) {
    // Too short for metric windows; adapt the step size only.
    settings_.init_buffer = num_warmup;
    settings_.term_buffer = 0;
    settings_.base_window = 0;
  } else if (settings_.init_buffer + settings_.base_window + settings_.term_buffer > num_warmup) {
    settings_.init_buffer = static_cast<int>(0.15 * num_warmup);
    settings_.term_buffer = static_cast<int>(0.1 * num_warmup);
    settings_.base_window = num_warmup - (settings_.init_buffer + settings_.term_buffer);
  }
  window_counter_ = 0;
  window_size_ = settings_.base_window;
  next_window_ = settings_.base_window > 0 ? settings_.init_buffer + window_size_ - 1 : -1;
  welford_n_ = 0;
  welford_mean_.assign(q_.size(), 0.0);
  welford_m2_.assign(q_.size(), 0.0);
  mu_ = std::log(10.0 * step_size_);
  s_bar_ = 0.0;
  x_bar_ = 0.0;
  adapt_counter_ = 0;
}

void NutsSampler::end_warmup() {
  if (adapting_ && adapt_counter_ > 0) step_size_ = std::exp(x_bar_);
  adapting_ = false;
}

bool NutsSampler::in_adaptation_window() const {
  return settings_.base_window > 0 && window_counter_ >= settings_.init_buffer &&
         window_counter_ < num_warmup_ - settings_.term_buffer && window_counter_ != num_warmup_;
}

bool NutsSampler::at_window_end() const {
  return settings_.base_window > 0 && window_counter_ == next_window_ &&
         window_counter_ != num_warmup_;
}

void NutsSampler::compute_next_window() {
  const int last = num_warmup_ - settings_.term_buffer - 1;
  if (next_window_ == last) return;
  window_size_ *= 2;
  next_window_ = window_counter_ + window_size_;
  if (next_window_ != last && next_window_ + 2 * window_size_ >= num_warmup_ - settings_.term_buffer) {
    next_window_ = last;
  }
}

}  // namespace citedyn
