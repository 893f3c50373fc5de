#include "citedyn/synthetic_corpus.hpp"

#include <cctype>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "citedyn/random.hpp"

namespace citedyn {

namespace {

std::string yymm(Day day) {
  const std::chrono::year_month_day ymd{day};
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d%02u", static_cast<int>(ymd.year()) % 100,
                static_cast<unsigned>(ymd.month()));
  return buf;
}

std::string padded(std::size_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, value);
  return buf;
}

std::string slug(const std::string& id) {
  std::string out;
  for (char c : id)
    if (std::isalnum(static_cast<unsigned char>(c)))
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out.empty() ? "j" : out;
}

}  // namespace

void SyntheticCorpusSpec::validate() const {
  if (journals.empty()) throw std::domain_error("synthetic corpus needs at least one journal");
  if (!(m > 0.0)) throw std::domain_error("m must be positive");
  for (const auto& j : journals) {
    if (year_of(j.journal.first_preprint_day) < 2000 || year_of(j.journal.last_preprint_day) > 2019)
      throw std::domain_error("synthetic preprint dates must fall in 2000-2019");
  }
}

SyntheticCorpus generate_synthetic_corpus(const SyntheticCorpusSpec& spec) {
  spec.validate();
  SyntheticCorpus corpus;
  corpus.journals = spec.journals;
  corpus.database_end = spec.database_end;
  corpus.m = spec.m;

  std::size_t serial = 0;
  for (std::size_t jn = 0; jn < spec.journals.size(); ++jn) {
    const auto& entry = spec.journals[jn];
    SyntheticJournal journal = entry.journal;
    journal.database_end = spec.database_end;
    const auto simulated = simulate_journal(journal, spec.m, derive_seed(spec.seed, jn), spec.priors);

    for (const auto& sim : simulated) {
      ++serial;
      const auto& traj = sim.trajectory;
      const bool old_style = serial % 3 == 0;
      const std::string id = old_style ? "synth-ph/" + yymm(traj.preprint_day) + padded(serial, 4)
                                       : yymm(traj.preprint_day) + "." + padded(serial, 5);
      const std::string doi = "10.5555/" + slug(journal.id) + "." + padded(serial, 6);

      PreprintRecord pre;
      pre.arxiv_id = id;
      pre.doi = doi;
      pre.preprint_date = traj.preprint_day;
      pre.subjects = entry.subjects;
      if (spec.noisy_subject_every > 0 && serial % spec.noisy_subject_every == 0) {
        pre.subjects.push_back("60J80");
        pre.subjects.push_back("Rare Topic - Sub" + std::to_string(serial));
      }

      const Day p = traj.publication_day;
      PublicationRecord pub;
      pub.doi = doi;
      pub.journal = journal.id;
      pub.document_type = entry.document_type;
      switch (serial % 4) {
        case 0:
          pub.published_online = p;
          pub.published_print = p + std::chrono::days{30};
          pub.created = p + std::chrono::days{2};
          pub.issued = p + std::chrono::days{15};
          break;
        case 1:
          pub.created = p;
          break;
        case 2:
          pub.published_print = p + std::chrono::days{10};
          pub.issued = p;
          break;
        default:
          pub.published_online = p;
          pub.issued = p + std::chrono::days{60};
          break;
      }

      const std::string cited_arxiv = old_style ? id : "arXiv:" + id;
      std::size_t ref_serial = 0;
      for (const auto& e : traj.events) {
        const Day citing = traj.preprint_day + std::chrono::days{e.day};
        const std::string year = std::to_string(year_of(citing));
        for (int c = 0; c < e.count; ++c, ++ref_serial) {
          ReferenceRecord ref;
          ref.citing_date = citing;
          if (e.day <= traj.preprint_duration()) {
            ref.reference.raw = ref_serial % 2 == 0
                                    ? "A. Author et al., " + cited_arxiv + " (" + year + ")"
                                    : "B. Writer, preprint " + cited_arxiv;
          } else {
            switch (ref_serial % 3) {
              case 0:
                ref.reference.raw = "C. Someone, Synth. J. 12, 345 (" + year + "), doi:" + doi;
                break;
              case 1:
                ref.reference.raw = "C. Someone, Synth. J. (" + year + ")";
                ref.reference.resolved_doi = doi;
                break;
              default:
                ref.reference.raw = "D. Other, " + cited_arxiv + ", published version";
                break;
            }
          }
          corpus.references.push_back(std::move(ref));
        }
      }
      for (int k = 0; k < spec.noise_references_per_article; ++k) {
        ReferenceRecord noise;
        noise.citing_date = traj.preprint_day + std::chrono::days{k};
        noise.reference.raw = "E. Nobody, Unrelated Results in Synthetic Studies (1999)";
        corpus.references.push_back(std::move(noise));
      }

      ArticleTruth truth;
      truth.arxiv_id = id;
      truth.doi = doi;
      truth.journal = journal.id;
      truth.phi = sim.phi;
      truth.beta = sim.beta;
      truth.subjects = pre.subjects;
      truth.trajectory = traj;

      corpus.preprints.push_back(std::move(pre));
      corpus.publications.push_back(std::move(pub));
      corpus.truth.push_back(std::move(truth));
    }
  }
  return corpus;
}

void write_truth_json(std::ostream& out, const SyntheticCorpus& corpus) {
  nlohmann::ordered_json root;
  root["database_end"] = format_iso_date(corpus.database_end);
  root["m"] = corpus.m;
  auto journals = nlohmann::ordered_json::array();
  for (const auto& j : corpus.journals) {
    nlohmann::ordered_json item;
    item["journal"] = j.journal.id;
    item["Phi"] = j.journal.params.Phi;
    item["epsilon"] = j.journal.params.epsilon;
    item["theta"] = j.journal.params.theta;
    item["n_articles"] = j.journal.n_articles;
    item["subjects"] = j.subjects;
    journals.push_back(std::move(item));
  }
  root["journals"] = std::move(journals);
  auto articles = nlohmann::ordered_json::array();
  for (const auto& a : corpus.truth) {
    nlohmann::ordered_json item;
    item["arxiv_id"] = a.arxiv_id;
    item["doi"] = a.doi;
    item["journal"] = a.journal;
    item["phi"] = a.phi;
    item["beta"] = a.beta;
    item["preprint_date"] = format_iso_date(a.trajectory.preprint_day);
    item["publication_date"] = format_iso_date(a.trajectory.publication_day);
    item["preprint_duration"] = a.trajectory.preprint_duration();
    item["pre_publication_citations"] = a.trajectory.pre_publication_citations();
    item["post_publication_citations"] = a.trajectory.post_publication_citations();
    articles.push_back(std::move(item));
  }
  root["articles"] = std::move(articles);
  out << root.dump(2) << '\n';
}

}  // namespace citedyn
