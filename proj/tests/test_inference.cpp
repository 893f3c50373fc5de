#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "citedyn/errors.hpp"
#include "citedyn/inference.hpp"
#include "citedyn/simulate.hpp"

using namespace citedyn;

#ifndef CITEDYN_TEST_DATA
#error "CITEDYN_TEST_DATA must point at tests/data"
#endif

namespace {

SubsetData synthetic_subset(double theta, std::uint64_t seed, int n = 25) {
  SyntheticJournal j;
  j.params = {std::log(0.3), 0.5, theta};
  j.n_articles = n;
  const auto sims = simulate_journal(j, 30.0, seed);
  SubsetData d;
  d.journal_ids = {"J"};
  for (std::size_t i = 0; i < sims.size(); ++i)
    d.articles.push_back({"a" + std::to_string(i), 0, sims[i].trajectory});
  return d;
}

}  // namespace

TEST_CASE("split R-hat and ESS match the reference implementation") {
  std::ifstream in(std::string(CITEDYN_TEST_DATA) + "/diagnostics_fixture.json");
  REQUIRE(in);
  const auto cases = nlohmann::json::parse(in);
  REQUIRE(cases.size() == 4);
  for (const auto& c : cases) {
    const auto chains = c.at("chains").get<std::vector<std::vector<double>>>();
    CHECK(split_rhat(chains).value() == doctest::Approx(c.at("rhat").get<double>()).epsilon(1e-10));
    CHECK(effective_sample_size(chains) == doctest::Approx(c.at("ess").get<double>()).epsilon(1e-8));
  }
}

TEST_CASE("R-hat is unavailable for a single chain") {
  CHECK_FALSE(split_rhat({{1.0, 2.0, 3.0, 4.0, 5.0}}).has_value());
  CHECK(split_rhat({{1, 2, 3, 4, 5, 6, 2.5, 1.5}, {2, 2.2, 2.9, 3.1, 3.3, 4.8, 5.1, 0.7}}).value() ==
        doctest::Approx(0.9520990887117804).epsilon(1e-12));
}

TEST_CASE("quantiles interpolate linearly") {
  std::vector<double> a(101), b(100);
  std::iota(a.begin(), a.end(), 1.0);
  std::iota(b.begin(), b.end(), 1.0);
  CHECK(quantile(a, 0.5) == 51.0);
  CHECK(quantile(b, 0.025) == doctest::Approx(3.475));
  CHECK(quantile({7.0}, 0.3) == 7.0);
  CHECK_THROWS_AS(quantile({}, 0.5), InputError);
  const auto i = percentile_interval(b);
  CHECK(i.lower <= i.median);
  CHECK(i.median <= i.upper);
}

TEST_CASE("constrain and unconstrain are inverse maps") {
  const ParameterLayout layout(2, 1);
  const std::vector<double> x = {-0.3, 6.0, 0.2, 5.5, -1.2, -0.7, 0.4};
  const auto y = constrain(x, layout);
  CHECK(y[layout.Phi(0)] == -1.2);
  CHECK(y[layout.log_phi(0)] == doctest::Approx(std::exp(-0.3)));
  const auto back = unconstrain(y, layout);
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(back[k] == doctest::Approx(x[k]).epsilon(1e-14));
}

TEST_CASE("parameter names follow the layout") {
  SubsetData d;
  d.journal_ids = {"PRL"};
  d.articles = {{"1108.2700", 0, std::nullopt}};
  CHECK(parameter_names(d) ==
        std::vector<std::string>{"phi[1108.2700]", "beta[1108.2700]", "Phi[PRL]", "epsilon[PRL]", "theta[PRL]"});
}

TEST_CASE("sampling is deterministic and independent of chain parallelism") {
  const auto d = synthetic_subset(2.0, 3, 8);
  ChainConfig c;
  c.n_chains = 3;
  c.n_iterations = 200;
  c.target_accept = 0.9;
  c.seed = 11;
  const auto a = sample_posterior(d, Priors{}, c, 30.0);
  c.parallel_chains = false;
  const auto b = sample_posterior(d, Priors{}, c, 30.0);
  CHECK(a.values == b.values);
  CHECK(a.n_draws == 100);
  CHECK(a.n_chains == 3);
  c.seed = 12;
  const auto e = sample_posterior(d, Priors{}, c, 30.0);
  CHECK_FALSE(a.values == e.values);
}

TEST_CASE("summaries derive exp(Phi) and the effective rate per draw") {
  const auto d = synthetic_subset(2.0, 5, 10);
  ChainConfig c;
  c.n_chains = 2;
  c.n_iterations = 300;
  c.target_accept = 0.9;
  const auto draws = sample_posterior(d, Priors{}, c, 30.0);
  const auto s = summarize(draws, d);
  REQUIRE(s.journals.size() == 1);
  const auto& j = s.journals[0];
  // Quantiles commute with exp up to interpolation between adjacent draws.
  CHECK(j.exp_Phi.median == doctest::Approx(std::exp(j.Phi.median)).epsilon(1e-3));
  CHECK(j.exp_Phi.lower == doctest::Approx(std::exp(j.Phi.lower)).epsilon(1e-3));
  CHECK(j.exp_Phi.upper == doctest::Approx(std::exp(j.Phi.upper)).epsilon(1e-3));
  std::vector<double> product;
  const auto Phi_k = *draws.index_of("Phi[J]");
  const auto theta_k = *draws.index_of("theta[J]");
  for (int ch = 0; ch < draws.n_chains; ++ch)
    for (int i = 0; i < draws.n_draws; ++i)
      product.push_back(std::exp(draws.at(ch, i, Phi_k)) * draws.at(ch, i, theta_k));
  CHECK(j.effective_rate.median == doctest::Approx(quantile(product, 0.5)).epsilon(1e-12));
  for (const auto& p : s.parameters) {
    CHECK(p.interval.lower <= p.interval.median);
    CHECK(p.interval.median <= p.interval.upper);
    CHECK(p.rhat.has_value());
  }
  CHECK(j.n_articles == 10);
}

TEST_CASE("any divergence excludes a subset") {
  PosteriorDraws draws;
  draws.names = {"x"};
  draws.n_chains = 2;
  draws.n_draws = 4;
  draws.values = {{1, 2, 3, 4}, {1, 2, 3, 4}};
  draws.divergent = {{0, 0, 0, 0}, {0, 1, 0, 0}};
  const auto diag = diagnostics(draws);
  CHECK(diag.divergences == 1);
  CHECK(diag.excluded);
  draws.divergent[1][1] = 0;
  CHECK_FALSE(diagnostics(draws).excluded);
}

TEST_CASE("chain configuration is validated") {
  ChainConfig c;
  c.target_accept = 1.0;
  CHECK_THROWS_AS(c.validate(), InputError);
  ChainConfig d;
  d.n_chains = 0;
  CHECK_THROWS_AS(d.validate(), InputError);
  ChainConfig e;
  e.n_iterations = 1;
  CHECK_THROWS_AS(e.validate(), InputError);
  CHECK(ChainConfig{}.n_draws() == 500);
}

TEST_CASE("MAP with empty data reaches the prior mode") {
  MapOptions original;
  original.jacobian = Jacobian::exclude;
  SubsetData journals_only;
  journals_only.journal_ids = {"A", "B"};
  const auto r = map_estimate(journals_only, Priors{}, 30.0, original);
  CHECK(r.converged);
  CHECK(r.gradient_norm <= 1e-6);
  const ParameterLayout layout(journals_only);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(r.constrained[layout.log_theta(j)] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r.constrained[layout.Phi(j)] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(r.constrained[layout.log_epsilon(j)] == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  }

  SubsetData unobserved;
  unobserved.journal_ids = {"A"};
  for (int i = 0; i < 3; ++i) unobserved.articles.push_back({"a" + std::to_string(i), 0, std::nullopt});
  const auto u = map_estimate(unobserved, Priors{}, 30.0, original);
  CHECK(u.converged);
  CHECK(u.gradient_norm <= 1e-6);
  const ParameterLayout ul(unobserved);
  CHECK(u.constrained[ul.log_theta(0)] == doctest::Approx(0.5).epsilon(1e-6));
  for (int i = 0; i < 3; ++i) CHECK(u.constrained[ul.log_beta(i)] == doctest::Approx(365.0).epsilon(1e-6));
  CHECK(u.constrained[ul.Phi(0)] == doctest::Approx(-3.0).epsilon(1e-6));
}

TEST_CASE("MAP on the log scale with empty data reaches the transformed prior mode") {
  SubsetData unobserved;
  unobserved.journal_ids = {"A"};
  for (int i = 0; i < 3; ++i) unobserved.articles.push_back({"a" + std::to_string(i), 0, std::nullopt});
  const auto u = map_estimate(unobserved, Priors{}, 30.0);
  CHECK(u.converged);
  const ParameterLayout ul(unobserved);
  // Gamma(2, 2) times theta peaks at 1; InvGamma(2, 1095) times beta at 1095 / 2.
  CHECK(u.constrained[ul.log_theta(0)] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(u.constrained[ul.Phi(0)] == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
  CHECK(u.constrained[ul.log_epsilon(0)] == doctest::Approx(1.0 / 5.0).epsilon(1e-6));
  for (int i = 0; i < 3; ++i) {
    CHECK(u.constrained[ul.log_beta(i)] == doctest::Approx(547.5).epsilon(1e-6));
    CHECK(u.constrained[ul.log_phi(i)] == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("MAP theta lies inside the posterior interval on synthetic data") {
  const auto d = synthetic_subset(2.0, 21, 30);
  const auto r = map_estimate(d, Priors{}, 30.0);
  CHECK(r.converged);
  ChainConfig c;
  c.n_chains = 2;
  c.n_iterations = 600;
  c.target_accept = 0.9;
  const auto s = summarize(sample_posterior(d, Priors{}, c, 30.0), d);
  const double theta_map = r.constrained[ParameterLayout(d).log_theta(0)];
  CHECK(theta_map >= s.journals[0].theta.lower);
  CHECK(theta_map <= s.journals[0].theta.upper);
}
