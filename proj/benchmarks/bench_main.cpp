#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "citedyn/inference.hpp"
#include "citedyn/ingest.hpp"
#include "citedyn/likelihood.hpp"
#include "citedyn/model.hpp"
#include "citedyn/simulate.hpp"

using namespace citedyn;

namespace {

SubsetData subset(int n_articles) {
  SyntheticJournal j;
  j.id = "J";
  j.params = {std::log(0.2), 0.5, 2.0};
  j.n_articles = n_articles;
  j.fixed_beta = 1095.0;
  const auto sims = simulate_journal(j, 30.0, 11);
  SubsetData d;
  d.journal_ids = {"J"};
  for (std::size_t i = 0; i < sims.size(); ++i)
    d.articles.push_back({"a" + std::to_string(i), 0, sims[i].trajectory});
  return d;
}

ArticleParams article_for(const CitationTrajectory& t) {
  ArticleParams a;
  a.phi = 0.5;
  a.beta = 800.0;
  a.preprint_duration = t.preprint_duration();
  a.horizon = t.horizon();
  return a;
}

void BM_LikelihoodSparse(benchmark::State& state) {
  const auto d = subset(1);
  const auto& t = *d.articles[0].observation;
  const auto a = article_for(t);
  for (auto _ : state) benchmark::DoNotOptimize(log_likelihood_sparse(t, a, 2.0, 30.0));
}
BENCHMARK(BM_LikelihoodSparse);

void BM_LikelihoodDense(benchmark::State& state) {
  const auto d = subset(1);
  const auto& t = *d.articles[0].observation;
  const auto a = article_for(t);
  for (auto _ : state) benchmark::DoNotOptimize(log_likelihood_dense(t, a, 2.0, 30.0));
}
BENCHMARK(BM_LikelihoodDense);

void BM_LogPosteriorGradient(benchmark::State& state) {
  const auto d = subset(static_cast<int>(state.range(0)));
  const ParameterLayout layout(d);
  std::vector<double> x(layout.size(), 0.0);
  for (std::size_t i = 0; i < layout.n_articles(); ++i) x[layout.log_beta(i)] = std::log(900.0);
  std::vector<double> g;
  for (auto _ : state) benchmark::DoNotOptimize(log_posterior_gradient(d, x, Priors{}, 30.0, g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogPosteriorGradient)->Arg(20)->Arg(50)->Arg(200);

void BM_SimulateTrajectory(benchmark::State& state) {
  ArticleParams a;
  a.phi = 0.5;
  a.beta = 1095.0;
  a.preprint_duration = 300;
  a.horizon = 1825;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_trajectory(a, 2.0, 30.0, ++seed));
}
BENCHMARK(BM_SimulateTrajectory);

void BM_ExpectedCitationsExact(benchmark::State& state) {
  ArticleParams a;
  a.phi = 0.5;
  a.beta = 1095.0;
  a.preprint_duration = 300;
  a.horizon = 1825;
  for (auto _ : state) benchmark::DoNotOptimize(expected_citations_exact(1825, a, 2.0, 30.0));
}
BENCHMARK(BM_ExpectedCitationsExact);

void BM_SamplePosterior(benchmark::State& state) {
  const auto d = subset(20);
  ChainConfig c;
  c.n_chains = 1;
  c.n_iterations = 200;
  c.parallel_chains = false;
  for (auto _ : state) benchmark::DoNotOptimize(sample_posterior(d, Priors{}, c, 30.0));
}
BENCHMARK(BM_SamplePosterior)->Unit(benchmark::kMillisecond);

void BM_ExtractIdentifiers(benchmark::State& state) {
  const ReferenceString ref{"A. Author, Phys. Rev. D 70, 1 (2004), astro-ph/0405353, doi:10.1103/PhysRevD.70.043528",
                            std::nullopt};
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_arxiv_id(ref));
    benchmark::DoNotOptimize(extract_doi(ref));
  }
}
BENCHMARK(BM_ExtractIdentifiers);

}  // namespace

BENCHMARK_MAIN();
