#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "citedyn/inference.hpp"
#include "citedyn/ingest.hpp"
#include "citedyn/likelihood.hpp"

namespace citedyn {

/// Fitting input for one subset: journals in sorted order, articles grouped by
/// journal. Throws InputError when an article id is missing from the corpus.
SubsetData make_subset_data(const std::map<std::string, std::vector<std::string>>& journals,
                            std::span<const CorpusArticle> corpus);

/// Filesystem-safe, collision-free directory name for a subset.
std::string subset_directory_name(const SubsetKey& key);

/// Seed of one subset's fit, independent of which other subsets are fitted.
std::uint64_t subset_seed(std::uint64_t root, const SubsetKey& key);

struct SubsetFit {
  PosteriorDraws draws;
  FitSummary summary;
};

SubsetFit fit_subset(const SubsetKey& key, const SubsetData& data, const Priors& priors,
                     ChainConfig config, double m);

/// Runs task(i) for i in [0, n) on at most `jobs` threads. The first
/// exception thrown by any task is rethrown after all workers stop.
void run_work_queue(std::size_t n, int jobs, const std::function<void(std::size_t)>& task);

}  // namespace citedyn
