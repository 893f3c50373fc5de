#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "citedyn/ingest.hpp"
#include "citedyn/priors.hpp"
#include "citedyn/simulate.hpp"

namespace citedyn {

struct SyntheticCorpusJournal {
  SyntheticJournal journal;
  std::vector<std::string> subjects = {"Physics - General"};
  std::string document_type = "ar";
};

/// A synthetic bibliographic corpus: every citation of a simulated trajectory
/// becomes one reference record in the ingest input format.
struct SyntheticCorpusSpec {
  std::vector<SyntheticCorpusJournal> journals;
  Day database_end = parse_iso_date("2018-12-31");
  double m = 30.0;
  std::uint64_t seed = 1;
  Priors priors;
  // Every n-th article also lists an MSC code and a rare subject, which
  // subject assignment must drop. 0 disables.
  int noisy_subject_every = 5;
  // Unmatched references added per article.
  int noise_references_per_article = 1;

  void validate() const;
};

struct ArticleTruth {
  std::string arxiv_id;
  std::string doi;
  std::string journal;
  double phi = 0.0;
  double beta = 0.0;
  std::vector<std::string> subjects;  // raw
  CitationTrajectory trajectory;
};

struct SyntheticCorpus {
  std::vector<PreprintRecord> preprints;
  std::vector<PublicationRecord> publications;
  std::vector<ReferenceRecord> references;
  std::vector<ArticleTruth> truth;
  std::vector<SyntheticCorpusJournal> journals;
  Day database_end{};
  double m = 30.0;
};

SyntheticCorpus generate_synthetic_corpus(const SyntheticCorpusSpec& spec);

/// Ground-truth manifest (journal parameters and per-article phi, beta, T').
void write_truth_json(std::ostream& out, const SyntheticCorpus& corpus);

}  // namespace citedyn
