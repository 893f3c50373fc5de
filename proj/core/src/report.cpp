#include "citedyn/report.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include <json.hpp>

#include "citedyn/csv.hpp"
#include "citedyn/errors.hpp"
#include "citedyn/random.hpp"
#include "citedyn/simulate.hpp"

namespace citedyn {

PredictiveBands posterior_predictive(const PosteriorDraws& draws, const std::string& article_id,
                                     const std::string& journal_id,
                                     const CitationTrajectory& timeline, double m, int n_samples,
                                     std::uint64_t seed) {
  if (n_samples < 1) throw InputError("need at least one predictive sample");
  const auto phi_k = draws.index_of("phi[" + article_id + "]");
  const auto beta_k = draws.index_of("beta[" + article_id + "]");
  const auto theta_k = draws.index_of("theta[" + journal_id + "]");
  if (!phi_k || !beta_k) throw InputError("article '" + article_id + "' is not part of the fit");
  if (!theta_k) throw InputError("journal '" + journal_id + "' is not part of the fit");
  const int total = draws.n_chains * draws.n_draws;
  if (total < 1) throw InputError("no posterior draws");
  timeline.validate();

  PredictiveBands bands;
  bands.article = article_id;
  bands.observed = timeline.cumulative();
  const std::size_t days = bands.observed.size();

  Rng rng(seed);
  std::uniform_int_distribution<int> pick(0, total - 1);
  for (int s = 0; s < n_samples; ++s) {
    const int flat = pick(rng);
    const int chain = flat / draws.n_draws;
    const int draw = flat % draws.n_draws;
    ArticleParams article;
    article.phi = draws.at(chain, draw, *phi_k);
    article.beta = draws.at(chain, draw, *beta_k);
    article.preprint_duration = timeline.preprint_duration();
    article.horizon = timeline.horizon();
    const double theta = draws.at(chain, draw, *theta_k);
    const auto sim = simulate_trajectory(article, theta, m, derive_seed(seed, 1 + s),
                                         timeline.preprint_day);
    bands.samples.push_back(sim.cumulative());
  }

  bands.lower.resize(days);
  bands.median.resize(days);
  bands.upper.resize(days);
  std::vector<double> column(n_samples);
  for (std::size_t t = 0; t < days; ++t) {
    for (int s = 0; s < n_samples; ++s) column[s] = static_cast<double>(bands.samples[s][t]);
    const Interval i = percentile_interval(column);
    bands.lower[t] = i.lower;
    bands.median[t] = i.median;
    bands.upper[t] = i.upper;
  }
  return bands;
}

std::vector<JournalResultRow> journal_table(std::span<const FitSummary> summaries,
                                            std::span<const JournalImpact> impacts) {
  std::map<std::string, double> impact_of;
  for (const auto& i : impacts) impact_of[i.journal] = i.impact;

  std::vector<JournalResultRow> rows;
  for (const auto& s : summaries) {
    for (const auto& js : s.journals) {
      JournalResultRow row;
      row.journal = js.journal;
      row.field = s.field;
      row.year = s.year;
      if (const auto it = impact_of.find(js.journal); it != impact_of.end()) row.impact = it->second;
      row.theta = js.theta;
      row.exp_Phi = js.exp_Phi;
      row.epsilon = js.epsilon;
      row.effective_rate = js.effective_rate;
      row.n_articles = js.n_articles;
      row.excluded = s.excluded;
      rows.push_back(std::move(row));
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const JournalResultRow& a, const JournalResultRow& b) {
    if (a.impact.has_value() != b.impact.has_value()) return a.impact.has_value();
    if (a.impact && *a.impact != *b.impact) return *a.impact < *b.impact;
    return std::tie(a.field, a.year, a.journal) < std::tie(b.field, b.year, b.journal);
  });
  return rows;
}

namespace {

Interval spread(const std::vector<double>& medians) { return percentile_interval(medians); }

std::string group_key(const JournalResultRow& row, GroupKey key) {
  switch (key) {
    case GroupKey::field:
      return row.field;
    case GroupKey::year:
      return std::to_string(row.year);
    case GroupKey::journal:
      return row.journal;
  }
  return {};
}

Interval mean_interval(const std::vector<Interval>& xs) {
  Interval out;
  for (const auto& i : xs) {
    out.median += i.median;
    out.lower += i.lower;
    out.upper += i.upper;
  }
  const double n = static_cast<double>(xs.size());
  out.median /= n;
  out.lower /= n;
  out.upper /= n;
  return out;
}

}  // namespace

std::vector<GroupSummary> aggregate_by(std::span<const JournalResultRow> rows, GroupKey key) {
  if (rows.empty()) throw InputError("no rows to aggregate");
  std::map<std::string, std::vector<const JournalResultRow*>> groups;
  for (const auto& row : rows) groups[group_key(row, key)].push_back(&row);
  std::vector<GroupSummary> out;
  for (const auto& [name, members] : groups) {
    std::vector<double> theta, exp_Phi, eps, eff;
    for (const auto* r : members) {
      theta.push_back(r->theta.median);
      exp_Phi.push_back(r->exp_Phi.median);
      eps.push_back(r->epsilon.median);
      eff.push_back(r->effective_rate.median);
    }
    out.push_back({name, static_cast<int>(members.size()), spread(theta), spread(exp_Phi),
                   spread(eps), spread(eff)});
  }
  return out;
}

std::vector<JournalAverage> average_by_journal(std::span<const JournalResultRow> rows) {
  std::map<std::string, std::vector<const JournalResultRow*>> groups;
  for (const auto& row : rows) groups[row.journal].push_back(&row);
  std::vector<JournalAverage> out;
  for (const auto& [journal, members] : groups) {
    std::vector<Interval> theta, exp_Phi, eps, eff;
    for (const auto* r : members) {
      theta.push_back(r->theta);
      exp_Phi.push_back(r->exp_Phi);
      eps.push_back(r->epsilon);
      eff.push_back(r->effective_rate);
    }
    JournalAverage avg;
    avg.journal = journal;
    avg.impact = members.front()->impact;
    avg.n_subsets = static_cast<int>(members.size());
    avg.theta = mean_interval(theta);
    avg.exp_Phi = mean_interval(exp_Phi);
    avg.epsilon = mean_interval(eps);
    avg.effective_rate = mean_interval(eff);
    out.push_back(std::move(avg));
  }
  std::stable_sort(out.begin(), out.end(), [](const JournalAverage& a, const JournalAverage& b) {
    if (a.impact.has_value() != b.impact.has_value()) return a.impact.has_value();
    return a.impact && *a.impact < *b.impact;
  });
  return out;
}

namespace {

void append_interval(std::vector<std::string>& row, const Interval& i) {
  row.push_back(csv::format_number(i.median));
  row.push_back(csv::format_number(i.lower));
  row.push_back(csv::format_number(i.upper));
}

void append_interval_header(std::vector<std::string>& row, const std::string& name) {
  row.push_back(name + "_median");
  row.push_back(name + "_lower");
  row.push_back(name + "_upper");
}

std::vector<std::string> interval_columns() {
  std::vector<std::string> h;
  append_interval_header(h, "theta");
  append_interval_header(h, "exp_Phi");
  append_interval_header(h, "epsilon");
  append_interval_header(h, "effective_rate");
  return h;
}

}  // namespace

void write_journal_table_csv(std::ostream& out, std::span<const JournalResultRow> rows) {
  std::vector<std::string> header = {"journal", "field", "year", "impact"};
  const auto cols = interval_columns();
  header.insert(header.end(), cols.begin(), cols.end());
  header.push_back("n_articles");
  header.push_back("excluded");
  csv::write_row(out, header);
  for (const auto& r : rows) {
    std::vector<std::string> row = {r.journal, r.field, std::to_string(r.year),
                                    r.impact ? csv::format_number(*r.impact) : ""};
    append_interval(row, r.theta);
    append_interval(row, r.exp_Phi);
    append_interval(row, r.epsilon);
    append_interval(row, r.effective_rate);
    row.push_back(std::to_string(r.n_articles));
    row.push_back(r.excluded ? "1" : "0");
    csv::write_row(out, row);
  }
}

void write_journal_table_json(std::ostream& out, std::span<const JournalResultRow> rows) {
  auto interval = [](const Interval& i) {
    return nlohmann::ordered_json{{"median", i.median}, {"lower", i.lower}, {"upper", i.upper}};
  };
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["journal"] = r.journal;
    j["field"] = r.field;
    j["year"] = r.year;
    j["impact"] = r.impact ? nlohmann::ordered_json(*r.impact) : nlohmann::ordered_json(nullptr);
    j["theta"] = interval(r.theta);
    j["exp_Phi"] = interval(r.exp_Phi);
    j["epsilon"] = interval(r.epsilon);
    j["effective_rate"] = interval(r.effective_rate);
    j["n_articles"] = r.n_articles;
    j["excluded"] = r.excluded;
    arr.push_back(std::move(j));
  }
  out << arr.dump(2) << '\n';
}

void write_groups_csv(std::ostream& out, std::span<const GroupSummary> groups) {
  std::vector<std::string> header = {"key", "n_rows"};
  const auto cols = interval_columns();
  header.insert(header.end(), cols.begin(), cols.end());
  csv::write_row(out, header);
  for (const auto& g : groups) {
    std::vector<std::string> row = {g.key, std::to_string(g.n_rows)};
    append_interval(row, g.theta);
    append_interval(row, g.exp_Phi);
    append_interval(row, g.epsilon);
    append_interval(row, g.effective_rate);
    csv::write_row(out, row);
  }
}

void write_journal_averages_csv(std::ostream& out, std::span<const JournalAverage> rows) {
  std::vector<std::string> header = {"journal", "impact", "n_subsets"};
  const auto cols = interval_columns();
  header.insert(header.end(), cols.begin(), cols.end());
  csv::write_row(out, header);
  for (const auto& a : rows) {
    std::vector<std::string> row = {a.journal, a.impact ? csv::format_number(*a.impact) : "",
                                    std::to_string(a.n_subsets)};
    append_interval(row, a.theta);
    append_interval(row, a.exp_Phi);
    append_interval(row, a.epsilon);
    append_interval(row, a.effective_rate);
    csv::write_row(out, row);
  }
}

void write_predictive_csv(std::ostream& out, const PredictiveBands& bands) {
  csv::write_row(out, {"day", "observed", "lower", "median", "upper"});
  for (std::size_t t = 0; t < bands.observed.size(); ++t) {
    csv::write_row(out, {std::to_string(t), std::to_string(bands.observed[t]),
                         csv::format_number(bands.lower[t]), csv::format_number(bands.median[t]),
                         csv::format_number(bands.upper[t])});
  }
}

}  // namespace citedyn
