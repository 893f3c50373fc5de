#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "citedyn/inference.hpp"
#include "citedyn/ingest.hpp"
#include "citedyn/trajectory.hpp"

namespace citedyn {

struct PredictiveBands {
  std::string article;
  std::vector<long long> observed;  // cumulative, per day
  std::vector<double> lower;        // 2.5 %
  std::vector<double> median;
  std::vector<double> upper;        // 97.5 %
  std::vector<std::vector<long long>> samples;  // cumulative per sampled draw
};

/// Simulates `n_samples` trajectories over the article's observed timeline,
/// each from a posterior draw (phi, beta, theta) picked uniformly at random.
/// Throws InputError when the article or journal is absent from the draws.
PredictiveBands posterior_predictive(const PosteriorDraws& draws, const std::string& article_id,
                                     const std::string& journal_id,
                                     const CitationTrajectory& timeline, double m, int n_samples,
                                     std::uint64_t seed);

struct JournalResultRow {
  std::string journal;
  std::string field;
  int year = 0;
  std::optional<double> impact;  // empty when the journal has no impact value
  Interval theta;
  Interval exp_Phi;
  Interval epsilon;
  Interval effective_rate;
  int n_articles = 0;
  bool excluded = false;
};

/// Joins fitted journal summaries with impacts. Rows are sorted by impact
/// (ascending, ties by field, year, journal), rows without impact last.
std::vector<JournalResultRow> journal_table(std::span<const FitSummary> summaries,
                                            std::span<const JournalImpact> impacts);

enum class GroupKey { field, year, journal };

struct GroupSummary {
  std::string key;
  int n_rows = 0;
  Interval theta;           // median and 95 % spread of the per-row medians
  Interval exp_Phi;
  Interval epsilon;
  Interval effective_rate;
};

std::vector<GroupSummary> aggregate_by(std::span<const JournalResultRow> rows, GroupKey key);

/// Per-journal averages across subsets: unweighted means of the medians and
/// of the interval bounds.
struct JournalAverage {
  std::string journal;
  std::optional<double> impact;
  int n_subsets = 0;
  Interval theta;
  Interval exp_Phi;
  Interval epsilon;
  Interval effective_rate;
};
std::vector<JournalAverage> average_by_journal(std::span<const JournalResultRow> rows);

void write_journal_table_csv(std::ostream& out, std::span<const JournalResultRow> rows);
void write_journal_table_json(std::ostream& out, std::span<const JournalResultRow> rows);
void write_groups_csv(std::ostream& out, std::span<const GroupSummary> groups);
void write_journal_averages_csv(std::ostream& out, std::span<const JournalAverage> rows);
/// day, observed, lower, median, upper
void write_predictive_csv(std::ostream& out, const PredictiveBands& bands);

}  // namespace citedyn
