#include <doctest.h>

#include <map>
#include <sstream>

#include "citedyn/ingest.hpp"
#include "citedyn/synthetic_corpus.hpp"

using namespace citedyn;

namespace {

SyntheticCorpusSpec corpus_spec() {
  SyntheticCorpusSpec spec;
  spec.seed = 77;
  spec.database_end = parse_iso_date("2011-12-31");
  for (int j = 0; j < 3; ++j) {
    SyntheticCorpusJournal sj;
    sj.journal.id = "J" + std::to_string(j);
    sj.journal.params.theta = 1.0 + j;
    sj.journal.params.Phi = -1.0;
    sj.journal.params.epsilon = 0.5;
    sj.journal.n_articles = 25;
    sj.journal.first_preprint_day = parse_iso_date("2006-01-01");
    sj.journal.last_preprint_day = parse_iso_date("2006-12-31");
    sj.journal.database_end = spec.database_end;
    sj.subjects = {j == 2 ? "Mathematics - Algebra" : "Physics - Optics"};
    spec.journals.push_back(sj);
  }
  return spec;
}

template <class Write, class Read, class T>
auto round_trip(Write write, Read read, const std::vector<T>& xs) {
  std::stringstream ss;
  write(ss, std::span<const T>(xs));
  return read(ss);
}

}  // namespace

TEST_CASE("ingest recovers every simulated trajectory exactly") {
  const auto corpus = generate_synthetic_corpus(corpus_spec());
  // Through the on-disk formats, as the command-line tool does.
  const auto pre = round_trip(write_preprints, read_preprints, corpus.preprints);
  const auto pub = round_trip(write_publications, read_publications, corpus.publications);
  const auto refs = round_trip(write_references, read_references, corpus.references);

  IngestOptions opts;
  opts.subject_threshold = 10;
  opts.database_end = corpus.database_end;
  opts.subsets.min_articles = 10;
  const auto result = ingest(pre, pub, refs, {}, opts);

  REQUIRE(result.corpus.size() == corpus.truth.size());
  std::map<std::string, const ArticleTruth*> truth;
  for (const auto& t : corpus.truth) truth[t.arxiv_id] = &t;
  long long total = 0;
  for (const auto& a : result.corpus) {
    const auto* t = truth.at(a.arxiv_id);
    CHECK(a.journal == t->journal);
    CHECK(a.doi == t->doi);
    CHECK(a.trajectory == t->trajectory);
    total += a.trajectory.total_citations();
  }
  CHECK(total > 0);
  CHECK(result.anomalies.empty());
  CHECK(result.unassigned_preprints == 0);
  CHECK(result.unmatched_references > 0);

  // Noisy subjects are dropped; journals land in the expected subsets.
  REQUIRE(result.subsets.subsets.size() == 2);
  for (const auto& [key, journals] : result.subsets.subsets) {
    if (key.field == "Physics") {
      CHECK(journals.size() == 2);
    } else {
      CHECK(key.field == "Mathematics");
      CHECK(journals.size() == 1);
    }
  }
}

TEST_CASE("ingest outputs round-trip through their file formats") {
  const auto corpus = generate_synthetic_corpus(corpus_spec());
  IngestOptions opts;
  opts.subject_threshold = 10;
  opts.database_end = corpus.database_end;
  opts.subsets.min_articles = 10;
  const auto result = ingest(corpus.preprints, corpus.publications, corpus.references, {}, opts);

  CHECK(round_trip(write_corpus_articles, read_corpus_articles, result.corpus).size() ==
        result.corpus.size());
  const auto articles = round_trip(write_corpus_articles, read_corpus_articles, result.corpus);
  for (std::size_t i = 0; i < articles.size(); ++i) CHECK(articles[i].trajectory == result.corpus[i].trajectory);

  const auto impacts = round_trip(write_impact_csv, read_impact_csv, result.impacts);
  REQUIRE(impacts.size() == result.impacts.size());
  for (std::size_t i = 0; i < impacts.size(); ++i) {
    CHECK(impacts[i].journal == result.impacts[i].journal);
    CHECK(impacts[i].impact == doctest::Approx(result.impacts[i].impact));
  }

  std::stringstream ss;
  write_subset_manifest_csv(ss, result.subsets.subsets);
  CHECK(read_subset_manifest_csv(ss) == result.subsets.subsets);
}
