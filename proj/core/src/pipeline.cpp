#include "citedyn/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "citedyn/errors.hpp"
#include "citedyn/random.hpp"

namespace citedyn {

SubsetData make_subset_data(const std::map<std::string, std::vector<std::string>>& journals,
                            std::span<const CorpusArticle> corpus) {
  std::map<std::string, const CorpusArticle*> by_id;
  for (const auto& a : corpus) by_id[a.arxiv_id] = &a;

  SubsetData data;
  for (const auto& [journal, ids] : journals) {
    const std::size_t j = data.journal_ids.size();
    data.journal_ids.push_back(journal);
    for (const auto& id : ids) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) throw InputError("subset article '" + id + "' is not in the corpus");
      data.articles.push_back({id, j, it->second->trajectory});
    }
  }
  data.validate();
  return data;
}

std::string subset_directory_name(const SubsetKey& key) {
  std::string name;
  for (char c : key.field) {
    const auto u = static_cast<unsigned char>(c);
    name += std::isalnum(u) ? static_cast<char>(std::tolower(u)) : '_';
  }
  char suffix[32];
  std::snprintf(suffix, sizeof suffix, "_%d_%08llx", key.year,
                static_cast<unsigned long long>(stable_hash(key.field) & 0xffffffffULL));
  return name + suffix;
}

std::uint64_t subset_seed(std::uint64_t root, const SubsetKey& key) {
  return derive_seed(root, stable_hash(to_string(key)));
}

SubsetFit fit_subset(const SubsetKey& key, const SubsetData& data, const Priors& priors,
                     ChainConfig config, double m) {
  config.seed = subset_seed(config.seed, key);
  SubsetFit fit;
  fit.draws = sample_posterior(data, priors, config, m);
  fit.summary = summarize(fit.draws, data);
  fit.summary.field = key.field;
  fit.summary.year = key.year;
  return fit;
}

void run_work_queue(std::size_t n, int jobs, const std::function<void(std::size_t)>& task) {
  if (jobs < 1) throw InputError("jobs must be >= 1");
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n && !failed; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed = true;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace citedyn
