#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "citedyn/random.hpp"

namespace citedyn {

/// Log density with gradient: returns log p(x) and writes d log p / dx.
using LogDensityFn = std::function<double(std::span<const double>, std::vector<double>&)>;

struct NutsSettings {
  double target_accept = 0.8;
  int max_tree_depth = 10;
  double max_delta_h = 1000.0;  // energy error that marks a divergence
  // Dual averaging constants.
  double gamma = 0.05;
  double kappa = 0.75;
  double t0 = 10.0;
  // Warmup windows for the diagonal metric.
  int init_buffer = 75;
  int term_buffer = 50;
  int base_window = 25;
};

struct Transition {
  double accept_stat = 0.0;
  int tree_depth = 0;
  int n_leapfrog = 0;
  bool divergent = false;
  double energy = 0.0;
};

/// No-U-turn Hamiltonian sampler with multinomial sampling along the
/// trajectory, the generalised turn criterion (checked across merged
/// subtrees), a diagonal metric and dual-averaging step-size adaptation.
class NutsSampler {
 public:
  NutsSampler(LogDensityFn log_density, std::vector<double> initial, NutsSettings settings,
              std::uint64_t seed);

  /// Prepares the windowed adaptation schedule for `num_warmup` iterations.
  void begin_warmup(int num_warmup);
  /// One transition; adapts step size and metric while warmup is active.
  Transition step();
  /// Freezes the step size at its dual-averaging average.
  void end_warmup();

  std::span<const double> position() const { return q_; }
  double log_density() const { return logp_; }
  double step_size() const { return step_size_; }
  std::span<const double> inverse_metric() const { return inv_metric_; }

 private:
  struct State {
    std::vector<double> q;
    std::vector<double> p;
    std::vector<double> grad;
    double logp = 0.0;
  };

  double hamiltonian(const State& z) const;
  void leapfrog(State& z, double epsilon);
  void sample_momentum(State& z);
  std::vector<double> p_sharp(const State& z) const;
  void init_step_size();
  bool build_tree(int depth, State& z, State& z_propose, std::vector<double>& p_sharp_beg,
                  std::vector<double>& p_sharp_end, std::vector<double>& rho,
                  std::vector<double>& p_beg, std::vector<double>& p_end, double H0, double sign,
                  int& n_leapfrog, double& log_sum_weight, double& sum_metro_prob,
                  bool& divergent);

  // Stan-style windowed adaptation bookkeeping.
  bool in_adaptation_window() const;
  bool at_window_end() const;
  void compute_next_window();

  LogDensityFn log_density_;
  NutsSettings settings_;
  Rng rng_;

  std::vector<double> q_;
  std::vector<double> grad_;
  double logp_ = 0.0;
  std::vector<double> inv_metric_;
  double step_size_ = 1.0;

  // Warmup state.
  bool adapting_ = false;
  int num_warmup_ = 0;
  int window_counter_ = 0;
  int window_size_ = 0;
  int next_window_ = 0;
  double mu_ = 0.0;
  double s_bar_ = 0.0;
  double x_bar_ = 0.0;
  int adapt_counter_ = 0;
  long long welford_n_ = 0;
  std::vector<double> welford_mean_;
  std::vector<double> welford_m2_;
};

}  // namespace citedyn
