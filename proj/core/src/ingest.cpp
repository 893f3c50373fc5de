#include "citedyn/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "citedyn/csv.hpp"
#include "citedyn/errors.hpp"

namespace citedyn {

using nlohmann::json;

namespace {

const std::regex& arxiv_regex() {
  static const std::regex re(std::string(kArxivPattern), std::regex::ECMAScript);
  return re;
}

const std::regex& doi_regex() {
  static const std::regex re(std::string(kDoiPattern), std::regex::ECMAScript);
  return re;
}

const std::regex& msc_regex() {
  static const std::regex re("^[0-9]{2}[A-Z-][0-9x-]{2}", std::regex::ECMAScript);
  return re;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::optional<std::string> extract_arxiv_id(const ReferenceString& ref) {
  std::smatch match;
  if (!std::regex_search(ref.raw, match, arxiv_regex())) return std::nullopt;
  std::string id = match.str(0);
  if (id.size() > 6 && lowercase(id.substr(0, 6)) == "arxiv:") id = id.substr(6);
  return id;
}

std::optional<std::string> extract_doi(const ReferenceString& ref) {
  if (ref.resolved_doi && !ref.resolved_doi->empty()) return ref.resolved_doi;
  std::smatch match;
  if (!std::regex_search(ref.raw, match, doi_regex())) return std::nullopt;
  return match.str(0);
}

std::string normalize_arxiv_id(std::string_view id) {
  std::string out;
  for (char c : id)
    if (c != ' ') out += c;
  return out;
}

Day resolve_publication_date(const PublicationRecord& rec) {
  std::optional<Day> best;
  for (const auto& d : {rec.published_online, rec.published_print, rec.created, rec.issued}) {
    if (d && (!best || *d < *best)) best = d;
  }
  if (!best) throw InputError("publication '" + rec.doi + "' has no date to resolve");
  return *best;
}

std::string major_subject(std::string_view raw) {
  const auto pos = raw.find(" - ");
  return trim(pos == std::string_view::npos ? raw : raw.substr(0, pos));
}

bool is_msc_subject(std::string_view raw) {
  const std::string s = trim(raw);
  if (std::regex_search(s, msc_regex())) return true;
  const std::string lower = lowercase(s);
  return lower.starts_with("msc") || lower.find("mathematics subject classification") != std::string::npos;
}

std::vector<std::vector<std::string>> assign_subjects(std::span<const PreprintRecord> preprints,
                                                      std::size_t threshold) {
  if (threshold < 1) throw InputError("subject threshold must be >= 1");
  std::vector<std::set<std::string>> majors(preprints.size());
  std::map<std::string, std::size_t> usage;
  for (std::size_t i = 0; i < preprints.size(); ++i) {
    for (const auto& raw : preprints[i].subjects) {
      if (is_msc_subject(raw)) continue;
      auto major = major_subject(raw);
      if (!major.empty()) majors[i].insert(std::move(major));
    }
    for (const auto& m : majors[i]) ++usage[m];
  }
  std::vector<std::vector<std::string>> out(preprints.size());
  for (std::size_t i = 0; i < preprints.size(); ++i) {
    for (const auto& m : majors[i])
      if (usage[m] >= threshold) out[i].push_back(m);
  }
  return out;
}

CitationSplit split_citations(std::span<const Day> citation_dates, Day preprint_day,
                              Day publication_day) {
  CitationSplit split;
  for (Day d : citation_dates) {
    if (d < preprint_day) {
      split.anomalies.push_back(d);
    } else if (d <= publication_day) {
      split.pre.push_back(d);
    } else {
      split.post.push_back(d);
    }
  }
  return split;
}

std::vector<JournalImpact> compute_journal_impact(
    std::span<const PublicationRecord> publications,
    const std::map<std::string, std::vector<Day>>& citations_by_doi, int window_years,
    Day database_end) {
  if (window_years < 1) throw InputError("impact window must be at least one year");
  std::map<std::string, const std::vector<Day>*> cited;
  for (const auto& [doi, dates] : citations_by_doi) cited[lowercase(doi)] = &dates;
  std::map<std::string, JournalImpact> by_journal;
  for (const auto& pub : publications) {
    if (pub.document_type != "ar" && pub.document_type != "re") continue;
    const Day start = resolve_publication_date(pub);
    const Day window_end = start + std::chrono::days{365 * window_years};  // exclusive
    long long count = 0;
    if (const auto it = cited.find(lowercase(pub.doi)); it != cited.end()) {
      for (Day d : *it->second) {
        if (d >= start && d < window_end && d <= database_end) ++count;
      }
    }
    auto& entry = by_journal[pub.journal];
    entry.journal = pub.journal;
    ++entry.n_documents;
    entry.n_citations += count;
  }
  std::vector<JournalImpact> out;
  for (auto& [id, entry] : by_journal) {
    entry.impact = static_cast<double>(entry.n_citations) / entry.n_documents;
    out.push_back(entry);
  }
  return out;
}

std::string to_string(const SubsetKey& key) { return key.field + "/" + std::to_string(key.year); }

SubsetResult build_subsets(std::span<const CorpusArticle> corpus, const SubsetOptions& options) {
  struct Tally {
    std::vector<std::string> qualifying;
    int short_duration = 0;
  };
  std::map<std::pair<SubsetKey, std::string>, Tally> tallies;
  for (const auto& article : corpus) {
    const int year = year_of(article.trajectory.publication_day);
    if (year < options.first_year || year > options.last_year) continue;
    const bool long_enough = article.trajectory.preprint_duration() >= options.min_duration_days;
    for (const auto& field : article.fields) {
      auto& tally = tallies[{SubsetKey{field, year}, article.journal}];
      if (long_enough) {
        tally.qualifying.push_back(article.arxiv_id);
      } else {
        ++tally.short_duration;
      }
    }
  }
  SubsetResult result;
  for (auto& [key, tally] : tallies) {
    std::sort(tally.qualifying.begin(), tally.qualifying.end());
    SubsetDecision decision;
    decision.key = key.first;
    decision.journal = key.second;
    decision.qualifying_articles = static_cast<int>(tally.qualifying.size());
    decision.short_duration_articles = tally.short_duration;
    decision.retained = tally.qualifying.size() >= options.min_articles;
    if (decision.retained) result.subsets[key.first][key.second] = tally.qualifying;
    result.decisions.push_back(std::move(decision));
  }
  return result;
}

IngestResult ingest(std::span<const PreprintRecord> preprints,
                    std::span<const PublicationRecord> publications,
                    std::span<const ReferenceRecord> references,
                    std::span<const CitationRecord> citations, const IngestOptions& options) {
  IngestResult result;
  const auto subjects = assign_subjects(preprints, options.subject_threshold);

  std::unordered_map<std::string, std::size_t> by_arxiv;
  std::unordered_map<std::string, std::size_t> preprint_by_doi;
  for (std::size_t i = 0; i < preprints.size(); ++i) {
    if (preprints[i].arxiv_id.empty()) throw InputError("preprint record without arXiv id");
    if (!by_arxiv.emplace(normalize_arxiv_id(preprints[i].arxiv_id), i).second)
      throw InputError("duplicate arXiv id '" + preprints[i].arxiv_id + "'");
    if (preprints[i].doi) preprint_by_doi.emplace(lowercase(*preprints[i].doi), i);
    if (subjects[i].empty()) ++result.unassigned_preprints;
  }
  std::unordered_map<std::string, std::size_t> publication_by_doi;
  for (std::size_t k = 0; k < publications.size(); ++k) {
    if (!publication_by_doi.emplace(lowercase(publications[k].doi), k).second)
      throw InputError("duplicate publication DOI '" + publications[k].doi + "'");
  }

  // Citation dates per preprint (either identifier) and per publication DOI.
  std::vector<std::vector<Day>> cited_dates(preprints.size());
  std::map<std::string, std::vector<Day>> by_publication;
  auto credit = [&](const std::optional<std::string>& arxiv, const std::optional<std::string>& doi,
                    Day date) {
    std::optional<std::size_t> preprint;
    std::optional<std::string> publication;
    if (arxiv) {
      if (const auto it = by_arxiv.find(normalize_arxiv_id(*arxiv)); it != by_arxiv.end())
        preprint = it->second;
    }
    if (!preprint && doi) {
      const std::string key = lowercase(*doi);
      if (const auto it = preprint_by_doi.find(key); it != preprint_by_doi.end())
        preprint = it->second;
      if (publication_by_doi.count(key)) publication = key;
    }
    if (preprint && !publication && preprints[*preprint].doi) {
      const std::string key = lowercase(*preprints[*preprint].doi);
      if (publication_by_doi.count(key)) publication = key;
    }
    if (!preprint && !publication) return false;
    if (preprint) cited_dates[*preprint].push_back(date);
    if (publication) by_publication[*publication].push_back(date);
    return true;
  };
  for (const auto& ref : references) {
    if (!credit(extract_arxiv_id(ref.reference), extract_doi(ref.reference), ref.citing_date))
      ++result.unmatched_references;
  }
  for (const auto& c : citations) {
    const bool looks_like_doi = c.cited.starts_with("10.");
    if (!credit(looks_like_doi ? std::nullopt : std::optional<std::string>(c.cited),
                looks_like_doi ? std::optional<std::string>(c.cited) : std::nullopt, c.date))
      ++result.unmatched_references;
  }

  for (std::size_t i = 0; i < preprints.size(); ++i) {
    const auto& pre = preprints[i];
    if (!pre.doi) continue;
    const auto pub_it = publication_by_doi.find(lowercase(*pre.doi));
    if (pub_it == publication_by_doi.end()) continue;
    const auto& pub = publications[pub_it->second];
    Day published;
    try {
      published = resolve_publication_date(pub);
    } catch (const InputError& e) {
      result.anomalies.push_back({pre.arxiv_id, "unresolved_publication_date", e.what()});
      continue;
    }
    if (published < pre.preprint_date) {
      result.anomalies.push_back({pre.arxiv_id, "publication_before_preprint",
                                  format_iso_date(published)});
      continue;
    }
    if (published > options.database_end) {
      result.anomalies.push_back({pre.arxiv_id, "publication_after_database_end",
                                  format_iso_date(published)});
      continue;
    }
    const auto split = split_citations(cited_dates[i], pre.preprint_date, published);
    for (Day d : split.anomalies)
      result.anomalies.push_back({pre.arxiv_id, "citation_before_preprint", format_iso_date(d)});

    CorpusArticle article;
    article.arxiv_id = pre.arxiv_id;
    article.doi = pub.doi;
    article.journal = pub.journal;
    article.document_type = pub.document_type;
    article.fields = subjects[i];
    article.trajectory.preprint_day = pre.preprint_date;
    article.trajectory.publication_day = published;
    article.trajectory.horizon_day = options.database_end;
    std::vector<int> days;
    for (const auto* group : {&split.pre, &split.post}) {
      for (Day d : *group) {
        if (d > options.database_end) {
          result.anomalies.push_back(
              {pre.arxiv_id, "citation_after_database_end", format_iso_date(d)});
          continue;
        }
        days.push_back(days_between(pre.preprint_date, d));
      }
    }
    article.trajectory.events = events_from_days(std::move(days));
    result.corpus.push_back(std::move(article));
  }
  std::sort(result.corpus.begin(), result.corpus.end(),
            [](const CorpusArticle& a, const CorpusArticle& b) { return a.arxiv_id < b.arxiv_id; });
  std::sort(result.anomalies.begin(), result.anomalies.end(), [](const Anomaly& a, const Anomaly& b) {
    return std::tie(a.arxiv_id, a.kind, a.detail) < std::tie(b.arxiv_id, b.kind, b.detail);
  });

  for (auto& [doi, dates] : by_publication) std::sort(dates.begin(), dates.end());
  result.impacts = compute_journal_impact(publications, by_publication,
                                          options.impact_window_years, options.database_end);
  result.subsets = build_subsets(result.corpus, options.subsets);
  return result;
}

// ---------------------------------------------------------------------------
// JSON lines

namespace {

template <typename F>
void for_each_json_line(std::istream& in, F&& handle) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      handle(json::parse(line));
    } catch (const json::exception& e) {
      throw InputError("line " + std::to_string(number) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(number) + ": " + e.what());
    }
  }
}

std::optional<Day> optional_date(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return parse_iso_date(j.at(key).get<std::string>());
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

void put_date(json& j, const char* key, const std::optional<Day>& d) {
  if (d) j[key] = format_iso_date(*d);
}

}  // namespace

std::vector<PreprintRecord> read_preprints(std::istream& in) {
  std::vector<PreprintRecord> out;
  for_each_json_line(in, [&](const json& j) {
    PreprintRecord r;
    r.arxiv_id = j.at("arxiv_id").get<std::string>();
    if (r.arxiv_id.empty()) throw InputError("empty arxiv_id");
    r.doi = optional_string(j, "doi");
    r.preprint_date = parse_iso_date(j.at("date").get<std::string>());
    if (j.contains("subjects")) r.subjects = j.at("subjects").get<std::vector<std::string>>();
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<PublicationRecord> read_publications(std::istream& in) {
  std::vector<PublicationRecord> out;
  for_each_json_line(in, [&](const json& j) {
    PublicationRecord r;
    r.doi = j.at("doi").get<std::string>();
    r.journal = j.at("journal").get<std::string>();
    r.published_online = optional_date(j, "published_online");
    r.published_print = optional_date(j, "published_print");
    r.created = optional_date(j, "created");
    r.issued = optional_date(j, "issued");
    if (j.contains("type")) r.document_type = j.at("type").get<std::string>();
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<ReferenceRecord> read_references(std::istream& in) {
  std::vector<ReferenceRecord> out;
  for_each_json_line(in, [&](const json& j) {
    ReferenceRecord r;
    r.citing_date = parse_iso_date(j.at("citing_date").get<std::string>());
    r.reference.raw = j.at("raw").get<std::string>();
    r.reference.resolved_doi = optional_string(j, "doi");
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<CitationRecord> read_citations(std::istream& in) {
  std::vector<CitationRecord> out;
  for_each_json_line(in, [&](const json& j) {
    out.push_back({j.at("cited").get<std::string>(), parse_iso_date(j.at("date").get<std::string>())});
  });
  return out;
}

void write_preprints(std::ostream& out, std::span<const PreprintRecord> records) {
  for (const auto& r : records) {
    json j;
    j["arxiv_id"] = r.arxiv_id;
    if (r.doi) j["doi"] = *r.doi;
    j["date"] = format_iso_date(r.preprint_date);
    j["subjects"] = r.subjects;
    out << j.dump() << '\n';
  }
}

void write_publications(std::ostream& out, std::span<const PublicationRecord> records) {
  for (const auto& r : records) {
    json j;
    j["doi"] = r.doi;
    j["journal"] = r.journal;
    j["type"] = r.document_type;
    put_date(j, "published_online", r.published_online);
    put_date(j, "published_print", r.published_print);
    put_date(j, "created", r.created);
    put_date(j, "issued", r.issued);
    out << j.dump() << '\n';
  }
}

void write_references(std::ostream& out, std::span<const ReferenceRecord> records) {
  for (const auto& r : records) {
    json j;
    j["citing_date"] = format_iso_date(r.citing_date);
    j["raw"] = r.reference.raw;
    if (r.reference.resolved_doi) j["doi"] = *r.reference.resolved_doi;
    out << j.dump() << '\n';
  }
}

void write_citations(std::ostream& out, std::span<const CitationRecord> records) {
  for (const auto& r : records) {
    json j;
    j["cited"] = r.cited;
    j["date"] = format_iso_date(r.date);
    out << j.dump() << '\n';
  }
}

void write_corpus_articles(std::ostream& out, std::span<const CorpusArticle> corpus) {
  for (const auto& a : corpus) {
    json j;
    j["arxiv_id"] = a.arxiv_id;
    j["doi"] = a.doi;
    j["journal"] = a.journal;
    j["type"] = a.document_type;
    j["fields"] = a.fields;
    j["preprint_date"] = format_iso_date(a.trajectory.preprint_day);
    j["publication_date"] = format_iso_date(a.trajectory.publication_day);
    j["horizon_date"] = format_iso_date(a.trajectory.horizon_day);
    json events = json::array();
    for (const auto& e : a.trajectory.events) events.push_back({e.day, e.count});
    j["events"] = std::move(events);
    out << j.dump() << '\n';
  }
}

std::vector<CorpusArticle> read_corpus_articles(std::istream& in) {
  std::vector<CorpusArticle> out;
  for_each_json_line(in, [&](const json& j) {
    CorpusArticle a;
    a.arxiv_id = j.at("arxiv_id").get<std::string>();
    a.doi = j.at("doi").get<std::string>();
    a.journal = j.at("journal").get<std::string>();
    if (j.contains("type")) a.document_type = j.at("type").get<std::string>();
    a.fields = j.at("fields").get<std::vector<std::string>>();
    a.trajectory.preprint_day = parse_iso_date(j.at("preprint_date").get<std::string>());
    a.trajectory.publication_day = parse_iso_date(j.at("publication_date").get<std::string>());
    a.trajectory.horizon_day = parse_iso_date(j.at("horizon_date").get<std::string>());
    for (const auto& e : j.at("events")) {
      a.trajectory.events.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    }
    a.trajectory.validate();
    out.push_back(std::move(a));
  });
  return out;
}

void write_impact_csv(std::ostream& out, std::span<const JournalImpact> impacts) {
  csv::write_row(out, {"journal", "impact", "n_documents", "n_citations"});
  for (const auto& i : impacts) {
    csv::write_row(out, {i.journal, csv::format_number(i.impact), std::to_string(i.n_documents),
                         std::to_string(i.n_citations)});
  }
}

std::vector<JournalImpact> read_impact_csv(std::istream& in) {
  const auto table = csv::read_table(in);
  const auto c_journal = table.column("journal");
  const auto c_impact = table.column("impact");
  const auto c_docs = table.column("n_documents");
  const auto c_cits = table.column("n_citations");
  std::vector<JournalImpact> out;
  for (const auto& row : table.rows) {
    try {
      out.push_back({row[c_journal], std::stod(row[c_impact]), std::stoi(row[c_docs]),
                     std::stoll(row[c_cits])});
    } catch (const std::logic_error&) {
      throw InputError("malformed impact row for journal '" + row[c_journal] + "'");
    }
  }
  return out;
}

void write_subset_manifest_csv(std::ostream& out, const SubsetMap& subsets) {
  csv::write_row(out, {"field", "year", "journal", "arxiv_id"});
  for (const auto& [key, journals] : subsets)
    for (const auto& [journal, ids] : journals)
      for (const auto& id : ids) csv::write_row(out, {key.field, std::to_string(key.year), journal, id});
}

SubsetMap read_subset_manifest_csv(std::istream& in) {
  const auto table = csv::read_table(in);
  const auto c_field = table.column("field");
  const auto c_year = table.column("year");
  const auto c_journal = table.column("journal");
  const auto c_id = table.column("arxiv_id");
  SubsetMap out;
  for (const auto& row : table.rows) {
    int year = 0;
    try {
      year = std::stoi(row[c_year]);
    } catch (const std::logic_error&) {
      throw InputError("malformed year '" + row[c_year] + "' in subset manifest");
    }
    out[SubsetKey{row[c_field], year}][row[c_journal]].push_back(row[c_id]);
  }
  for (auto& [key, journals] : out)
    for (auto& [journal, ids] : journals) std::sort(ids.begin(), ids.end());
  return out;
}

void write_decisions_csv(std::ostream& out, std::span<const SubsetDecision> decisions) {
  csv::write_row(out, {"field", "year", "journal", "qualifying_articles",
                       "short_duration_articles", "retained"});
  for (const auto& d : decisions) {
    csv::write_row(out, {d.key.field, std::to_string(d.key.year), d.journal,
                         std::to_string(d.qualifying_articles),
                         std::to_string(d.short_duration_articles), d.retained ? "1" : "0"});
  }
}

}  // namespace citedyn
