#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "citedyn/model.hpp"
#include "citedyn/random.hpp"
#include "support.hpp"

using namespace citedyn;
using testing_support::rel_close;

namespace {

ArticleParams article(double phi, double beta, int duration, int horizon) {
  ArticleParams a;
  a.phi = phi;
  a.beta = beta;
  a.preprint_duration = duration;
  a.horizon = horizon;
  return a;
}

}  // namespace

TEST_CASE("decay density and cumulative match high-precision values") {
  // Reference values computed with 40-digit arithmetic.
  CHECK(decay_density(0, 1095.0) == doctest::Approx(0.0009128251305621295729872).epsilon(1e-14));
  CHECK(decay_density(400, 365.0) == doctest::Approx(0.0009144778468097643962480).epsilon(1e-14));
  CHECK(decay_cumulative(729, 365.0) == doctest::Approx(0.8646647167633873081060).epsilon(1e-14));
  CHECK(decay_mass(10, 20, 365.0) == doctest::Approx(0.0288850825679295124243).epsilon(1e-13));
  CHECK(std::exp(log_decay_density(400, 365.0)) ==
        doctest::Approx(decay_density(400, 365.0)).epsilon(1e-13));
}

TEST_CASE("decay sums telescope to the cumulative") {
  for (double beta : {1.0, 30.0, 365.0, 1095.0, 1e5}) {
    double sum = 0.0;
    for (int t = 0; t <= 800; ++t) sum += decay_density(t, beta);
    CHECK(sum == doctest::Approx(decay_cumulative(800, beta)).epsilon(1e-12));
    CHECK(decay_mass(0, 800, beta) == doctest::Approx(sum).epsilon(1e-12));
    CHECK(decay_mass(5, 4, beta) == 0.0);
    CHECK(decay_mass(7, 7, beta) == doctest::Approx(decay_density(7, beta)).epsilon(1e-13));
  }
}

TEST_CASE("decay mass derivative matches finite differences in log beta") {
  for (double beta : {20.0, 365.0, 4000.0}) {
    for (auto [a, b] : {std::pair{0, 0}, std::pair{3, 90}, std::pair{200, 1900}}) {
      const double h = 1e-5;
      const double fd = (decay_mass(a, b, beta * std::exp(h)) - decay_mass(a, b, beta * std::exp(-h))) /
                        (2 * h);
      CHECK(decay_mass_dlog_beta(a, b, beta) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("invalid decay arguments are rejected") {
  CHECK_THROWS_AS(decay_density(0, 0.0), std::domain_error);
  CHECK_THROWS_AS(decay_density(0, -3.0), std::domain_error);
  CHECK_THROWS_AS(decay_cumulative(3, std::nan("")), std::domain_error);
  CHECK_THROWS_AS(article(-1.0, 10.0, 0, 5).validate(), std::domain_error);
  CHECK_THROWS_AS(article(1.0, 10.0, 6, 5).validate(), std::domain_error);
  JournalParams j;
  j.epsilon = 0.0;
  CHECK_THROWS_AS(j.validate(), std::domain_error);
}

TEST_CASE("effective rate switches at the publication day, which is pre-publication") {
  const auto a = article(0.7, 365.0, 10, 50);
  CHECK(effective_rate(10, a, 3.0) == doctest::Approx(0.7));
  CHECK(effective_rate(11, a, 3.0) == doctest::Approx(2.1));
  CHECK(log_effective_rate(11, a, 3.0) == doctest::Approx(std::log(2.1)));
}

TEST_CASE("exact expectation matches high-precision product values") {
  CHECK(expected_citations_exact(1825, article(0.5, 1095, 200, 1825), 2.0, 30.0) ==
        doctest::Approx(32.08329592202862297938).epsilon(1e-12));
  CHECK(expected_citations_exact(100, article(2.0, 365, 30, 100), 3.0, 30.0) ==
        doctest::Approx(61.73174639561939785574).epsilon(1e-12));
  CHECK(expected_citations_exact(0, article(0.5, 1095, 200, 1825), 2.0, 30.0) ==
        doctest::Approx(0.01369237695843194359).epsilon(1e-12));
}

TEST_CASE("property: product form equals the recursion on random parameters") {
  Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    const double phi = std::exp(std::uniform_real_distribution<double>(-4, 2)(rng));
    const double beta = std::exp(std::uniform_real_distribution<double>(2, 9)(rng));
    const double theta = std::exp(std::uniform_real_distribution<double>(-2, 2.5)(rng));
    const int horizon = std::uniform_int_distribution<int>(0, 3000)(rng);
    const int duration = std::uniform_int_distribution<int>(0, horizon)(rng);
    const auto a = article(phi, beta, duration, horizon);
    const double exact = expected_citations_exact(horizon, a, theta, 30.0);
    const double rec = expected_citations_recursive(horizon, a, theta, 30.0);
    CHECK(rel_close(exact, rec, 1e-12, 1e-300));
  }
}

TEST_CASE("property: expectations are monotone in t, phi and theta") {
  const auto a = article(0.8, 365, 100, 1000);
  double prev = -1.0;
  for (int t = 0; t <= 1000; t += 50) {
    const double e = expected_citations_exact(t, a, 2.0, 30.0);
    CHECK(e > prev);
    prev = e;
  }
  CHECK(expected_citations_exact(1000, article(0.9, 365, 100, 1000), 2.0, 30.0) >
        expected_citations_exact(1000, a, 2.0, 30.0));
  CHECK(expected_citations_exact(1000, a, 2.5, 30.0) > expected_citations_exact(1000, a, 2.0, 30.0));
  // theta has no influence before publication
  CHECK(expected_citations_exact(100, a, 9.0, 30.0) ==
        doctest::Approx(expected_citations_exact(100, a, 0.1, 30.0)).epsilon(1e-14));
}

TEST_CASE("zero latent rate gives no citations") {
  const auto a = article(0.0, 365, 20, 400);
  CHECK(expected_citations_exact(400, a, 3.0, 30.0) == 0.0);
  const auto curve = exact_moment_curve(a, 3.0, 30.0);
  CHECK(curve.mean.back() == 0.0);
  CHECK(curve.variance.back() == 0.0);
}

TEST_CASE("approximations agree with the exact expectation for small decay mass") {
  // log(1 + x) ~ x is accurate when lambda f << 1, i.e. long decay.
  const auto a = article(0.6, 5000, 300, 1825);
  const auto approx = expected_citations_approx(a, 2.0, 30.0);
  const double exact_pre = expected_citations_exact(300, a, 2.0, 30.0);
  const double exact_total = expected_citations_exact(1825, a, 2.0, 30.0);
  CHECK(approx.pre_publication == doctest::Approx(exact_pre).epsilon(1e-3));
  CHECK(approx.pre_publication + approx.post_publication == doctest::Approx(exact_total).epsilon(1e-3));
  CHECK(expected_citations_taylor(1825, a, 2.0, 30.0) == doctest::Approx(exact_total).epsilon(1e-3));
  CHECK(approx.long_term == doctest::Approx(30.0 * std::expm1(1.2)));
}

TEST_CASE("long-term limit is approached as the horizon grows") {
  const auto a = article(0.4, 100, 50, 20000);
  // Pre-publication days carry mass 1 - exp(-(T' + 1) / beta).
  const double tail = std::exp(-51.0 / 100.0);
  const double limit = 30.0 * std::expm1(0.4 * (1.0 - tail) + 0.4 * 5.0 * tail);
  CHECK(expected_citations_taylor(20000, a, 5.0, 30.0) == doctest::Approx(limit).epsilon(1e-9));
  // The exact product stays below its first-order counterpart.
  CHECK(expected_citations_exact(20000, a, 5.0, 30.0) < limit);
}

TEST_CASE("long-term anecdote: 200 citations at theta 5 map to about 15 at theta 1") {
  const double m = 30.0;
  const double phi = std::log1p(200.0 / m) / 5.0;
  CHECK(phi == doctest::Approx(0.4073763854522080).epsilon(1e-14));
  CHECK(m * std::expm1(phi) == doctest::Approx(15.08608972494537).epsilon(1e-13));
}

TEST_CASE("peak day is beta log phi and absent for phi <= 1") {
  CHECK(peak_day(std::exp(1.0), 365.0).value() == doctest::Approx(365.0));
  CHECK(peak_day(5.0, 180.0).value() == doctest::Approx(180.0 * std::log(5.0)));
  CHECK_FALSE(peak_day(1.0, 365.0).has_value());
  CHECK_FALSE(peak_day(0.3, 365.0).has_value());
  // Daily argmax of the continuous curve.
  const double phi = 1.5, beta = 1095.0;
  int best = 0;
  for (int t = 1; t < 5000; ++t)
    if (instantaneous_mean_approx(t, phi, beta, 30.0) > instantaneous_mean_approx(best, phi, beta, 30.0))
      best = t;
  CHECK(std::abs(best - beta * std::log(phi)) <= 1.0);
}

TEST_CASE("variance recursion matches the closed form and rejects bad input") {
  const auto a = article(1.2, 200, 40, 600);
  const auto curve = exact_moment_curve(a, 2.5, 30.0);
  REQUIRE(curve.mean.size() == 601);
  // Replay the recursion by hand.
  double mean = 0.0, var = 0.0;
  for (int t = 0; t <= 600; ++t) {
    const double r = effective_rate(t, a, 2.5);
    const double f = decay_density(t, 200);
    const double cov = attachment_covariance(var, r, f);
    var = variance_recursion_step(var, mean, r, f, 30.0, cov);
    mean += r * f * (30.0 + mean);
    CHECK(var == doctest::Approx(curve.variance[t]).epsilon(1e-12));
    CHECK(mean == doctest::Approx(curve.mean[t]).epsilon(1e-12));
  }
  CHECK(curve.mean.back() == doctest::Approx(expected_citations_exact(600, a, 2.5, 30.0)).epsilon(1e-12));
  CHECK_THROWS_AS(variance_recursion_step(-1.0, 0.0, 1.0, 0.1, 30.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(variance_recursion_step(1.0, -2.0, 1.0, 0.1, 30.0, 0.0), std::domain_error);
}

TEST_CASE("variance exceeds the Poisson value under attachment") {
  const auto curve = exact_moment_curve(article(1.5, 365, 100, 1500), 3.0, 30.0);
  CHECK(curve.variance.back() > curve.mean.back());
}
