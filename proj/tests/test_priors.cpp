#include <doctest.h>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/inverse_gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <vector>

#include "citedyn/inference.hpp"
#include "citedyn/priors.hpp"

using namespace citedyn;

TEST_CASE("log densities agree with Boost.Math") {
  const boost::math::inverse_gamma_distribution<> ig(2.0, 1095.0);
  const boost::math::gamma_distribution<> g(2.0, 0.5);  // Boost takes a scale
  const boost::math::normal_distribution<> n(0.3, 1.7);
  const boost::math::lognormal_distribution<> ln(-1.0, 0.6);
  // Points where every density is representable in double precision.
  for (double x : {0.3, 1.0, 2.5, 7.0, 12.0}) {
    CHECK(log_gamma_pdf(x, 2.0, 2.0) == doctest::Approx(std::log(pdf(g, x))).epsilon(1e-12));
    CHECK(log_normal_pdf(x, 0.3, 1.7) == doctest::Approx(std::log(pdf(n, x))).epsilon(1e-12));
    CHECK(log_lognormal_pdf(x, -1.0, 0.6) == doctest::Approx(std::log(pdf(ln, x))).epsilon(1e-12));
  }
  for (double x : {20.0, 300.0, 1095.0, 5000.0, 1e5})
    CHECK(log_inv_gamma_pdf(x, 2.0, 1095.0) == doctest::Approx(std::log(pdf(ig, x))).epsilon(1e-12));
}

TEST_CASE("prior samplers reproduce Boost quantiles") {
  Rng rng(5);
  std::vector<double> ig, ga;
  for (int i = 0; i < 40000; ++i) {
    ig.push_back(sample_inv_gamma(rng, 2.0, 1.0));
    ga.push_back(sample_gamma(rng, 2.0, 2.0));
  }
  const boost::math::inverse_gamma_distribution<> ig_d(2.0, 1.0);
  const boost::math::gamma_distribution<> g_d(2.0, 0.5);
  for (double p : {0.1, 0.5, 0.9}) {
    CHECK(quantile(ig, p) == doctest::Approx(boost::math::quantile(ig_d, p)).epsilon(0.03));
    CHECK(quantile(ga, p) == doctest::Approx(boost::math::quantile(g_d, p)).epsilon(0.03));
  }
}

TEST_CASE("prior modes follow the standard formulas") {
  // argmax over a fine grid, compared to (shape - 1) / rate and scale / (shape + 1)
  double best_theta = 0.0, best_beta = 0.0;
  double lt = -1e300, lb = -1e300;
  for (double x = 0.001; x < 5.0; x += 0.001) {
    if (log_gamma_pdf(x, 2.0, 2.0) > lt) {
      lt = log_gamma_pdf(x, 2.0, 2.0);
      best_theta = x;
    }
  }
  for (double x = 1.0; x < 3000.0; x += 0.5) {
    if (log_inv_gamma_pdf(x, 2.0, 1095.0) > lb) {
      lb = log_inv_gamma_pdf(x, 2.0, 1095.0);
      best_beta = x;
    }
  }
  CHECK(best_theta == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(best_beta == doctest::Approx(365.0).epsilon(1e-3));
}

TEST_CASE("invalid hyperparameters are rejected") {
  Priors p;
  p.theta_rate = 0.0;
  CHECK_THROWS(p.validate());
  Priors q;
  q.Phi_sd = -1.0;
  CHECK_THROWS(q.validate());
  CHECK_NOTHROW(Priors{}.validate());
}
