#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "citedyn/csv.hpp"
#include "citedyn/errors.hpp"
#include "citedyn/fit_io.hpp"
#include "citedyn/ingest.hpp"
#include "citedyn/pipeline.hpp"
#include "citedyn/random.hpp"
#include "citedyn/report.hpp"
#include "citedyn/synthetic_corpus.hpp"

namespace fs = std::filesystem;
using namespace citedyn;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInternal = 1;

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::string out;
  int jobs = 1;
};

struct PriorOptions {
  Priors priors;
  double m = 30.0;
};


// ---- configuration ------------------------------------------------------

std::string toml_value(const std::string& v) {
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}
std::string toml_value(bool v) { return v ? "true" : "false"; }
std::string toml_value(double v) { return csv::format_number(v); }
template <typename T>
  requires std::is_integral_v<T>
std::string toml_value(T v) {
  return std::to_string(v);
}
template <typename T>
std::string toml_value(const std::vector<T>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + toml_value(v[i]);
  return out + "]";
}

template <typename T>
std::optional<std::string> toml_entry(const T& v) {
  return toml_value(v);
}
template <typename T>
std::optional<std::string> toml_entry(const std::optional<T>& v) {
  if (!v) return std::nullopt;
  return toml_value(*v);
}
template <typename T>
std::optional<std::string> toml_entry(const std::vector<T>& v) {
  if (v.empty()) return std::nullopt;
  return toml_value(v);
}

// Registers options and remembers how to print their final values, so the
// effective configuration can be persisted in a form `--config` reads back.
class ConfigRecorder {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* cmd, const std::string& flag, T& var, const std::string& desc = "") {
    auto* opt = cmd->add_option(flag, var, desc);
    if constexpr (!is_container<T>::value) opt->capture_default_str();
    const std::string section = cmd->get_parent() ? cmd->get_name() : "";
    entries_.push_back({section, flag.substr(2), [&var] { return toml_entry(var); }});
    return opt;
  }

  std::string render(const std::string& section) const {
    std::string out;
    for (const auto& e : entries_) {
      if (!e.section.empty()) continue;
      if (const auto v = e.value()) out += e.key + " = " + *v + '\n';
    }
    out += "\n[" + section + "]\n";
    for (const auto& e : entries_) {
      if (e.section != section) continue;
      if (const auto v = e.value()) out += e.key + " = " + *v + '\n';
    }
    return out;
  }

 private:
  template <typename T>
  struct is_container : std::false_type {};
  template <typename T>
  struct is_container<std::vector<T>> : std::true_type {};
  template <typename T>
  struct is_container<std::optional<T>> : std::true_type {};

  struct Entry {
    std::string section;
    std::string key;
    std::function<std::optional<std::string>()> value;
  };
  std::vector<Entry> entries_;
};

void add_model_options(ConfigRecorder& rec, CLI::App* cmd, PriorOptions& p) {
  rec.add(cmd, "--m", p.m, "Initial attractiveness");
  rec.add(cmd, "--beta-shape", p.priors.beta_shape);
  rec.add(cmd, "--beta-scale", p.priors.beta_scale);
  rec.add(cmd, "--Phi-mean", p.priors.Phi_mean);
  rec.add(cmd, "--Phi-sd", p.priors.Phi_sd);
  rec.add(cmd, "--epsilon-shape", p.priors.epsilon_shape);
  rec.add(cmd, "--epsilon-scale", p.priors.epsilon_scale);
  rec.add(cmd, "--theta-shape", p.priors.theta_shape);
  rec.add(cmd, "--theta-rate", p.priors.theta_rate);
}

// ---- filesystem helpers -------------------------------------------------

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw InputError("cannot create output directory '" + dir.string() + "'");
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

// Writes through a temporary file so an interrupted run never leaves a
// truncated output that a later resume would trust.
template <typename Fn>
void write_file(const fs::path& path, Fn&& fill) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    fill(out);
    out.flush();
    if (!out) throw InputError("failed writing '" + path.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw InputError("cannot move '" + tmp.string() + "' into place");
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const nlohmann::ordered_json& extra = {}) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), dir);
    if (rel == "manifest.json" || rel.extension() == ".tmp") continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  nlohmann::ordered_json root;
  root["tool"] = "citedyn";
  root["command"] = command;
  if (!extra.is_null()) root["details"] = extra;
  auto list = nlohmann::ordered_json::array();
  for (const auto& rel : files) {
    auto in = open_input(dir / rel);
    const std::string content{std::istreambuf_iterator<char>(in), {}};
    list.push_back({{"path", rel.generic_string()},
                    {"bytes", content.size()},
                    {"fnv1a64", hex64(stable_hash(content))}});
  }
  root["files"] = std::move(list);
  write_file(dir / "manifest.json", [&](std::ostream& out) { out << root.dump(2) << '\n'; });
}

void persist_config(const ConfigRecorder& config, const std::string& command,
                    const fs::path& dir) {
  const std::string text = config.render(command);
  write_file(dir / "config.toml", [&](std::ostream& out) { out << text; });
}

std::string safe_file_stem(const std::string& id) {
  std::string out;
  for (char c : id) {
    const auto u = static_cast<unsigned char>(c);
    out += (std::isalnum(u) || c == '.' || c == '-') ? c : '_';
  }
  return out;
}

// ---- simulate -----------------------------------------------------------

struct SimulateOptions {
  std::vector<std::string> journals = {"J1,2,-1.6094379124341003,0.5"};
  std::vector<std::string> subjects = {"Physics - General"};
  int n_articles = 50;
  int min_duration = 30;
  int max_duration = 730;
  std::string first_preprint = "2005-01-01";
  std::string last_preprint = "2005-12-31";
  std::string database_end = "2018-12-31";
  std::optional<double> fixed_beta;
  std::optional<double> fixed_phi;
  int noisy_subject_every = 5;
  int noise_references = 1;
  std::string document_type = "ar";
  PriorOptions model;
};

// "id,theta,Phi,epsilon[,n_articles]"
SyntheticCorpusJournal parse_journal(const std::string& text, const SimulateOptions& o) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.size() != 4 && parts.size() != 5)
    throw InputError("journal spec '" + text + "' must be id,theta,Phi,epsilon[,n_articles]");
  SyntheticCorpusJournal j;
  j.subjects = o.subjects;
  j.document_type = o.document_type;
  auto& s = j.journal;
  s.id = parts[0];
  try {
    s.params.theta = std::stod(parts[1]);
    s.params.Phi = std::stod(parts[2]);
    s.params.epsilon = std::stod(parts[3]);
    s.n_articles = parts.size() == 5 ? std::stoi(parts[4]) : o.n_articles;
  } catch (const std::logic_error&) {
    throw InputError("journal spec '" + text + "' has a malformed number");
  }
  s.min_duration = o.min_duration;
  s.max_duration = o.max_duration;
  s.first_preprint_day = parse_iso_date(o.first_preprint);
  s.last_preprint_day = parse_iso_date(o.last_preprint);
  s.fixed_beta = o.fixed_beta;
  s.fixed_phi = o.fixed_phi;
  return j;
}

void cmd_simulate(const GlobalOptions& g, const SimulateOptions& o, const ConfigRecorder& config) {
  SyntheticCorpusSpec spec;
  for (const auto& text : o.journals) spec.journals.push_back(parse_journal(text, o));
  spec.database_end = parse_iso_date(o.database_end);
  spec.m = o.model.m;
  spec.seed = g.seed;
  spec.priors = o.model.priors;
  spec.noisy_subject_every = o.noisy_subject_every;
  spec.noise_references_per_article = o.noise_references;
  spec.priors.validate();
  const SyntheticCorpus corpus = generate_synthetic_corpus(spec);

  const fs::path dir = g.out;
  ensure_directory(dir);
  persist_config(config, "simulate", dir);
  write_file(dir / "preprints.jsonl", [&](std::ostream& out) { write_preprints(out, corpus.preprints); });
  write_file(dir / "publications.jsonl",
             [&](std::ostream& out) { write_publications(out, corpus.publications); });
  write_file(dir / "references.jsonl",
             [&](std::ostream& out) { write_references(out, corpus.references); });
  write_file(dir / "citations.jsonl", [&](std::ostream& out) { write_citations(out, {}); });
  write_file(dir / "truth.json", [&](std::ostream& out) { write_truth_json(out, corpus); });
  write_manifest(dir, "simulate",
                 {{"seed", g.seed},
                  {"preprints", corpus.preprints.size()},
                  {"references", corpus.references.size()}});
  std::cerr << "simulated " << corpus.preprints.size() << " articles, "
            << corpus.references.size() << " references -> " << dir.string() << '\n';
}

// ---- ingest -------------------------------------------------------------

struct IngestCliOptions {
  std::string input;
  std::size_t subject_threshold = 1000;
  int window_years = 5;
  std::string database_end = "2018-12-31";
  std::size_t min_articles = 20;
  int min_duration = 30;
  int first_year = 2000;
  int last_year = 2016;
};

void write_anomalies_csv(std::ostream& out, std::span<const Anomaly> anomalies) {
  csv::write_row(out, {"arxiv_id", "kind", "detail"});
  for (const auto& a : anomalies) csv::write_row(out, {a.arxiv_id, a.kind, a.detail});
}

void cmd_ingest(const GlobalOptions& g, const IngestCliOptions& o, const ConfigRecorder& config) {
  const fs::path in_dir = o.input;
  auto preprints_in = open_input(in_dir / "preprints.jsonl");
  auto publications_in = open_input(in_dir / "publications.jsonl");
  const auto preprints = read_preprints(preprints_in);
  const auto publications = read_publications(publications_in);
  std::vector<ReferenceRecord> references;
  std::vector<CitationRecord> citations;
  if (fs::exists(in_dir / "references.jsonl")) {
    auto in = open_input(in_dir / "references.jsonl");
    references = read_references(in);
  }
  if (fs::exists(in_dir / "citations.jsonl")) {
    auto in = open_input(in_dir / "citations.jsonl");
    citations = read_citations(in);
  }

  IngestOptions options;
  options.subject_threshold = o.subject_threshold;
  options.impact_window_years = o.window_years;
  options.database_end = parse_iso_date(o.database_end);
  options.subsets = {o.min_articles, o.min_duration, o.first_year, o.last_year};
  const IngestResult result = ingest(preprints, publications, references, citations, options);

  const fs::path dir = g.out;
  ensure_directory(dir);
  persist_config(config, "ingest", dir);
  write_file(dir / "corpus.jsonl", [&](std::ostream& out) { write_corpus_articles(out, result.corpus); });
  write_file(dir / "impact.csv", [&](std::ostream& out) { write_impact_csv(out, result.impacts); });
  write_file(dir / "subsets.csv",
             [&](std::ostream& out) { write_subset_manifest_csv(out, result.subsets.subsets); });
  write_file(dir / "decisions.csv",
             [&](std::ostream& out) { write_decisions_csv(out, result.subsets.decisions); });
  write_file(dir / "anomalies.csv", [&](std::ostream& out) { write_anomalies_csv(out, result.anomalies); });
  write_manifest(dir, "ingest",
                 {{"articles", result.corpus.size()},
                  {"subsets", result.subsets.subsets.size()},
                  {"unassigned_preprints", result.unassigned_preprints},
                  {"unmatched_references", result.unmatched_references},
                  {"anomalies", result.anomalies.size()}});
  std::cerr << "ingested " << result.corpus.size() << " articles into "
            << result.subsets.subsets.size() << " subsets -> " << dir.string() << '\n';
}

// ---- fit ----------------------------------------------------------------

struct FitCliOptions {
  std::string input;
  std::vector<std::string> fields;
  std::vector<int> years;
  ChainConfig chains;
  PriorOptions model;
};

bool selected(const SubsetKey& key, const std::vector<std::string>& fields,
              const std::vector<int>& years) {
  const bool field_ok = fields.empty() || std::find(fields.begin(), fields.end(), key.field) != fields.end();
  const bool year_ok = years.empty() || std::find(years.begin(), years.end(), key.year) != years.end();
  return field_ok && year_ok;
}

void cmd_fit(const GlobalOptions& g, FitCliOptions o, const ConfigRecorder& config) {
  const fs::path in_dir = o.input;
  auto corpus_in = open_input(in_dir / "corpus.jsonl");
  auto subsets_in = open_input(in_dir / "subsets.csv");
  const auto corpus = read_corpus_articles(corpus_in);
  const auto subsets = read_subset_manifest_csv(subsets_in);

  std::vector<std::pair<SubsetKey, const std::map<std::string, std::vector<std::string>>*>> work;
  for (const auto& [key, journals] : subsets)
    if (selected(key, o.fields, o.years)) work.emplace_back(key, &journals);
  if (work.empty()) throw InputError("no subsets to fit");

  o.chains.seed = g.seed;
  o.chains.validate();
  o.model.priors.validate();

  const fs::path dir = g.out;
  ensure_directory(dir / "fits");
  persist_config(config, "fit", dir);

  std::vector<FitSummary> summaries(work.size());
  std::vector<char> resumed(work.size(), 0);
  std::mutex log_mutex;
  run_work_queue(work.size(), g.jobs, [&](std::size_t i) {
    const auto& [key, journals] = work[i];
    const fs::path sub = dir / "fits" / subset_directory_name(key);
    const fs::path summary_path = sub / "summary.json";
    if (fs::exists(summary_path) && fs::exists(sub / "draws.csv")) {
      auto in = open_input(summary_path);
      summaries[i] = read_summary_json(in);
      resumed[i] = 1;
    } else {
      const SubsetData data = make_subset_data(*journals, corpus);
      const SubsetFit fit = fit_subset(key, data, o.model.priors, o.chains, o.model.m);
      ensure_directory(sub);
      write_file(sub / "draws.csv", [&](std::ostream& out) { write_draws_csv(out, fit.draws); });
      write_file(summary_path, [&](std::ostream& out) { write_summary_json(out, fit.summary); });
      summaries[i] = fit.summary;
    }
    std::lock_guard lock(log_mutex);
    std::cerr << (resumed[i] ? "skipped " : "fitted ") << to_string(key)
              << " divergences=" << summaries[i].divergences
              << (summaries[i].excluded ? " (excluded)" : "") << '\n';
  });

  write_file(dir / "fit_index.csv", [&](std::ostream& out) {
    csv::write_row(out, {"field", "year", "directory", "n_journals", "divergences", "excluded",
                         "rhat_warning"});
    for (std::size_t i = 0; i < work.size(); ++i) {
      const auto& s = summaries[i];
      csv::write_row(out, {s.field, std::to_string(s.year), subset_directory_name(work[i].first),
                           std::to_string(s.journals.size()), std::to_string(s.divergences),
                           s.excluded ? "1" : "0", s.rhat_warning ? "1" : "0"});
    }
  });
  write_file(dir / "excluded.csv", [&](std::ostream& out) {
    csv::write_row(out, {"field", "year", "divergences"});
    for (const auto& s : summaries)
      if (s.excluded) csv::write_row(out, {s.field, std::to_string(s.year), std::to_string(s.divergences)});
  });
  const auto n_excluded = std::count_if(summaries.begin(), summaries.end(),
                                        [](const FitSummary& s) { return s.excluded; });
  write_manifest(dir, "fit", {{"subsets", work.size()}, {"excluded", n_excluded}});
}

// ---- report -------------------------------------------------------------

struct ReportCliOptions {
  std::string fits;
  std::string ingest_dir;
  std::vector<std::string> articles;
  std::vector<std::string> fields;
  std::vector<int> years;
  int n_samples = 200;
  double m = 30.0;
};

struct FitIndexEntry {
  SubsetKey key;
  std::string directory;
};

std::vector<FitIndexEntry> read_fit_index(const fs::path& fits_dir) {
  auto in = open_input(fits_dir / "fit_index.csv");
  const auto table = csv::read_table(in);
  const auto field = table.column("field");
  const auto year = table.column("year");
  const auto directory = table.column("directory");
  std::vector<FitIndexEntry> out;
  for (const auto& row : table.rows) {
    FitIndexEntry e;
    e.key.field = row[field];
    try {
      e.key.year = std::stoi(row[year]);
    } catch (const std::logic_error&) {
      throw InputError("malformed year '" + row[year] + "' in fit index");
    }
    e.directory = row[directory];
    out.push_back(std::move(e));
  }
  return out;
}

void cmd_report(const GlobalOptions& g, const ReportCliOptions& o, const ConfigRecorder& config) {
  const fs::path fits_dir = o.fits;
  const fs::path ingest_dir = o.ingest_dir;
  const auto index = read_fit_index(fits_dir);

  std::vector<FitSummary> summaries;
  std::map<SubsetKey, FitIndexEntry> by_key;
  for (const auto& e : index) {
    if (!selected(e.key, o.fields, o.years)) continue;
    auto in = open_input(fits_dir / "fits" / e.directory / "summary.json");
    summaries.push_back(read_summary_json(in));
    by_key[e.key] = e;
  }
  auto impact_in = open_input(ingest_dir / "impact.csv");
  const auto impacts = read_impact_csv(impact_in);

  const auto rows = journal_table(summaries, impacts);
  std::vector<JournalResultRow> retained;
  std::copy_if(rows.begin(), rows.end(), std::back_inserter(retained),
               [](const JournalResultRow& r) { return !r.excluded; });

  // Predictive bands: validate every requested id before writing anything.
  struct Target {
    std::string id;
    std::string journal;
    FitIndexEntry fit;
    CitationTrajectory trajectory;
  };
  std::vector<Target> targets;
  if (!o.articles.empty()) {
    auto corpus_in = open_input(ingest_dir / "corpus.jsonl");
    auto subsets_in = open_input(ingest_dir / "subsets.csv");
    const auto corpus = read_corpus_articles(corpus_in);
    const auto subsets = read_subset_manifest_csv(subsets_in);
    std::set<SubsetKey> excluded;
    for (const auto& s : summaries)
      if (s.excluded) excluded.insert({s.field, s.year});
    for (const auto& id : o.articles) {
      std::optional<Target> found;
      for (const auto& [key, journals] : subsets) {
        if (!by_key.count(key) || excluded.count(key)) continue;
        for (const auto& [journal, ids] : journals) {
          if (std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
          const auto article = std::find_if(corpus.begin(), corpus.end(),
                                            [&](const CorpusArticle& a) { return a.arxiv_id == id; });
          if (article == corpus.end()) throw InputError("article '" + id + "' missing from the corpus");
          found = Target{id, journal, by_key.at(key), article->trajectory};
          break;
        }
        if (found) break;
      }
      if (!found) throw InputError("article '" + id + "' is not part of any retained fit");
      targets.push_back(std::move(*found));
    }
  }

  const fs::path dir = g.out;
  ensure_directory(dir);
  persist_config(config, "report", dir);
  write_file(dir / "journal_table.csv", [&](std::ostream& out) { write_journal_table_csv(out, rows); });
  write_file(dir / "journal_table.json", [&](std::ostream& out) { write_journal_table_json(out, rows); });
  if (!retained.empty()) {
    const auto by_field = aggregate_by(retained, GroupKey::field);
    const auto by_year = aggregate_by(retained, GroupKey::year);
    const auto averages = average_by_journal(retained);
    write_file(dir / "by_field.csv", [&](std::ostream& out) { write_groups_csv(out, by_field); });
    write_file(dir / "by_year.csv", [&](std::ostream& out) { write_groups_csv(out, by_year); });
    write_file(dir / "journal_averages.csv",
               [&](std::ostream& out) { write_journal_averages_csv(out, averages); });
  }
  if (!targets.empty()) ensure_directory(dir / "predictive");
  for (const auto& t : targets) {
    auto in = open_input(fits_dir / "fits" / t.fit.directory / "draws.csv");
    const auto draws = read_draws_csv(in);
    const auto bands = posterior_predictive(draws, t.id, t.journal, t.trajectory, o.m, o.n_samples,
                                            derive_seed(g.seed, stable_hash(t.id)));
    write_file(dir / "predictive" / (safe_file_stem(t.id) + ".csv"),
               [&](std::ostream& out) { write_predictive_csv(out, bands); });
  }
  write_manifest(dir, "report",
                 {{"rows", rows.size()}, {"retained_rows", retained.size()}, {"articles", targets.size()}});
  std::cerr << "report: " << rows.size() << " journal rows -> " << dir.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pre- and post-publication citation dynamics: simulate, ingest, fit, report"};
  app.set_config("--config", "", "TOML/INI configuration file");
  app.require_subcommand(1);

  ConfigRecorder rec;
  GlobalOptions global;
  rec.add(&app, "--seed", global.seed, "Root random seed");
  app.add_option("--out", global.out, "Run directory")->required();
  app.add_option("--jobs", global.jobs, "Concurrent subset fits")->capture_default_str()->check(CLI::PositiveNumber);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic corpus and its ground truth");
  rec.add(simulate, "--journal", sim.journals, "id,theta,Phi,epsilon[,n_articles]");
  rec.add(simulate, "--subjects", sim.subjects);
  rec.add(simulate, "--n-articles", sim.n_articles);
  rec.add(simulate, "--min-duration", sim.min_duration);
  rec.add(simulate, "--max-duration", sim.max_duration);
  rec.add(simulate, "--first-preprint", sim.first_preprint);
  rec.add(simulate, "--last-preprint", sim.last_preprint);
  rec.add(simulate, "--database-end", sim.database_end);
  rec.add(simulate, "--fixed-beta", sim.fixed_beta, "Use this beta for every article");
  rec.add(simulate, "--fixed-phi", sim.fixed_phi, "Use this latent rate for every article");
  rec.add(simulate, "--noisy-subject-every", sim.noisy_subject_every);
  rec.add(simulate, "--noise-references", sim.noise_references);
  rec.add(simulate, "--document-type", sim.document_type);
  add_model_options(rec, simulate, sim.model);

  IngestCliOptions ing;
  auto* ingest_cmd = app.add_subcommand("ingest", "Build trajectories, impacts and fitting subsets");
  rec.add(ingest_cmd, "--input", ing.input, "Directory with the JSONL inputs")->required();
  rec.add(ingest_cmd, "--subject-threshold", ing.subject_threshold);
  rec.add(ingest_cmd, "--window-years", ing.window_years);
  rec.add(ingest_cmd, "--database-end", ing.database_end);
  rec.add(ingest_cmd, "--min-articles", ing.min_articles);
  rec.add(ingest_cmd, "--min-duration", ing.min_duration);
  rec.add(ingest_cmd, "--first-year", ing.first_year);
  rec.add(ingest_cmd, "--last-year", ing.last_year);

  FitCliOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Sample the posterior of every selected subset");
  rec.add(fit_cmd, "--input", fit.input, "Ingest run directory")->required();
  rec.add(fit_cmd, "--fields", fit.fields, "Only these fields");
  rec.add(fit_cmd, "--years", fit.years, "Only these publication years");
  rec.add(fit_cmd, "--chains", fit.chains.n_chains);
  rec.add(fit_cmd, "--iterations", fit.chains.n_iterations, "Per chain, warmup included");
  rec.add(fit_cmd, "--warmup-fraction", fit.chains.warmup_fraction);
  rec.add(fit_cmd, "--target-accept", fit.chains.target_accept);
  rec.add(fit_cmd, "--max-tree-depth", fit.chains.max_tree_depth);
  rec.add(fit_cmd, "--init-jitter", fit.chains.init_jitter);
  rec.add(fit_cmd, "--parallel-chains", fit.chains.parallel_chains);
  add_model_options(rec, fit_cmd, fit.model);

  ReportCliOptions rep;
  auto* report_cmd = app.add_subcommand("report", "Journal tables, aggregates and predictive bands");
  rec.add(report_cmd, "--fits", rep.fits, "Fit run directory")->required();
  rec.add(report_cmd, "--ingest", rep.ingest_dir, "Ingest run directory")->required();
  rec.add(report_cmd, "--articles", rep.articles, "Articles to draw predictive bands for");
  rec.add(report_cmd, "--fields", rep.fields);
  rec.add(report_cmd, "--years", rep.years);
  rec.add(report_cmd, "--n-samples", rep.n_samples);
  rec.add(report_cmd, "--m", rep.m);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (simulate->parsed()) cmd_simulate(global, sim, rec);
    if (ingest_cmd->parsed()) cmd_ingest(global, ing, rec);
    if (fit_cmd->parsed()) cmd_fit(global, fit, rec);
    if (report_cmd->parsed()) cmd_report(global, rep, rec);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}
