#pragma once

#include <compare>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citedyn/dates.hpp"
#include "citedyn/trajectory.hpp"

namespace citedyn {

struct PreprintRecord {
  std::string arxiv_id;
  std::optional<std::string> doi;
  Day preprint_date{};
  std::vector<std::string> subjects;  // raw, "Major - Minor" or bare major
};

struct PublicationRecord {
  std::string doi;
  std::string journal;
  std::optional<Day> published_online;
  std::optional<Day> published_print;
  std::optional<Day> created;
  std::optional<Day> issued;
  std::string document_type = "ar";  // "ar" article, "re" review, ...
};

struct ReferenceString {
  std::string raw;
  std::optional<std::string> resolved_doi;  // DOI of the matched cited work, if any
};

/// A reference made by a citing document dated `citing_date`.
struct ReferenceRecord {
  Day citing_date{};
  ReferenceString reference;
};

/// An already-resolved citation of a work identified by arXiv id or DOI.
struct CitationRecord {
  std::string cited;
  Day date{};
};

// Normative patterns, bit-exact.
inline constexpr std::string_view kArxivPattern =
    R"([a-zA-Z\-\.]+ ?/ ?[0-9]{7,}|[aA][rR][xX][iI][vV]:[0-1][0-9]([0][0-9]|[1][0-2])\.[0-9]{4,5})";
inline constexpr std::string_view kDoiPattern = R"(\b10\.[0-9]{4,}(\.[0-9]+)*/\S*\b)";

/// Leftmost match of the arXiv pattern; the "arXiv:" prefix of new-style
/// identifiers is stripped.
std::optional<std::string> extract_arxiv_id(const ReferenceString& ref);
/// The resolver-matched DOI when present, else the leftmost pattern match.
std::optional<std::string> extract_doi(const ReferenceString& ref);
/// Canonical form used for identifier lookups: spaces removed from
/// old-style ids.
std::string normalize_arxiv_id(std::string_view id);

/// Earliest of the available dates; throws InputError when none is set.
Day resolve_publication_date(const PublicationRecord& rec);

/// Major part of a raw subject ("Major - Minor" -> "Major").
std::string major_subject(std::string_view raw);
bool is_msc_subject(std::string_view raw);

/// Majors retained per preprint: used by at least `threshold` preprints and
/// not an MSC code. Output is parallel to the input, each list sorted.
std::vector<std::vector<std::string>> assign_subjects(std::span<const PreprintRecord> preprints,
                                                      std::size_t threshold = 1000);

struct CitationSplit {
  std::vector<Day> pre;        // on or before the publication day
  std::vector<Day> post;       // after the publication day
  std::vector<Day> anomalies;  // before the preprint was posted
};
CitationSplit split_citations(std::span<const Day> citation_dates, Day preprint_day,
                              Day publication_day);

struct JournalImpact {
  std::string journal;
  double impact = 0.0;
  int n_documents = 0;
  long long n_citations = 0;
};

/// Mean number of citations per qualifying document ("ar"/"re") within
/// [publication, publication + window_years * 365 days), truncated at
/// `database_end` (inclusive). Journals without qualifying documents are
/// omitted. `citations_by_doi` maps publication DOI to citation dates.
std::vector<JournalImpact> compute_journal_impact(
    std::span<const PublicationRecord> publications,
    const std::map<std::string, std::vector<Day>>& citations_by_doi, int window_years,
    Day database_end);

struct SubsetKey {
  std::string field;
  int year = 0;
  auto operator<=>(const SubsetKey&) const = default;
};
std::string to_string(const SubsetKey& key);

/// A preprint joined with its published version and its citations.
struct CorpusArticle {
  std::string arxiv_id;
  std::string doi;
  std::string journal;
  std::vector<std::string> fields;  // retained major subjects
  std::string document_type = "ar";
  CitationTrajectory trajectory;    // horizon = database end
};

struct SubsetOptions {
  std::size_t min_articles = 20;
  int min_duration_days = 30;
  int first_year = 2000;
  int last_year = 2016;
};

struct SubsetDecision {
  SubsetKey key;
  std::string journal;
  int qualifying_articles = 0;  // T' >= min_duration
  int short_duration_articles = 0;
  bool retained = false;
};

/// field/year -> journal -> articles (T' >= min duration only), all sorted.
using SubsetMap = std::map<SubsetKey, std::map<std::string, std::vector<std::string>>>;

struct SubsetResult {
  SubsetMap subsets;
  std::vector<SubsetDecision> decisions;  // one per (field, year, journal) seen
};

SubsetResult build_subsets(std::span<const CorpusArticle> corpus, const SubsetOptions& options = {});

struct IngestOptions {
  std::size_t subject_threshold = 1000;
  int impact_window_years = 5;
  Day database_end = parse_iso_date("2018-12-31");
  SubsetOptions subsets;
};

struct Anomaly {
  std::string arxiv_id;
  std::string kind;  // "citation_before_preprint", "publication_before_preprint", ...
  std::string detail;
};

struct IngestResult {
  std::vector<CorpusArticle> corpus;  // sorted by arXiv id
  SubsetResult subsets;
  std::vector<JournalImpact> impacts;
  std::vector<Anomaly> anomalies;
  std::size_t unassigned_preprints = 0;  // no retained subject
  std::size_t unmatched_references = 0;
};

/// Joins preprints with publications (by DOI), resolves references to
/// citations by either identifier, splits them around the publication day,
/// and builds impacts and fitting subsets.
IngestResult ingest(std::span<const PreprintRecord> preprints,
                    std::span<const PublicationRecord> publications,
                    std::span<const ReferenceRecord> references,
                    std::span<const CitationRecord> citations, const IngestOptions& options);

// Line-delimited JSON. Readers throw InputError with the line number.
std::vector<PreprintRecord> read_preprints(std::istream& in);
std::vector<PublicationRecord> read_publications(std::istream& in);
std::vector<ReferenceRecord> read_references(std::istream& in);
std::vector<CitationRecord> read_citations(std::istream& in);
void write_preprints(std::ostream& out, std::span<const PreprintRecord> records);
void write_publications(std::ostream& out, std::span<const PublicationRecord> records);
void write_references(std::ostream& out, std::span<const ReferenceRecord> records);
void write_citations(std::ostream& out, std::span<const CitationRecord> records);

// Ingest outputs.
void write_corpus_articles(std::ostream& out, std::span<const CorpusArticle> corpus);
std::vector<CorpusArticle> read_corpus_articles(std::istream& in);
void write_impact_csv(std::ostream& out, std::span<const JournalImpact> impacts);
std::vector<JournalImpact> read_impact_csv(std::istream& in);
void write_subset_manifest_csv(std::ostream& out, const SubsetMap& subsets);
SubsetMap read_subset_manifest_csv(std::istream& in);
void write_decisions_csv(std::ostream& out, std::span<const SubsetDecision> decisions);

}  // namespace citedyn
