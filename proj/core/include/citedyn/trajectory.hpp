#pragma once

#include <string>
#include <vector>

#include "citedyn/dates.hpp"

namespace citedyn {

struct CitationEvent {
  int day = 0;    // offset from the preprint posting day
  int count = 1;  // citations received that day, >= 1

  friend bool operator==(const CitationEvent&, const CitationEvent&) = default;
};

/// Day-resolved citation history of one article, observed from the preprint
/// posting day up to and including `horizon_day`.
struct CitationTrajectory {
  Day preprint_day{};
  Day publication_day{};
  Day horizon_day{};
  std::vector<CitationEvent> events;  // strictly increasing in day

  int preprint_duration() const { return days_between(preprint_day, publication_day); }
  int horizon() const { return days_between(preprint_day, horizon_day); }

  long long pre_publication_citations() const;
  long long post_publication_citations() const;
  long long total_citations() const;

  /// Cumulative citations C(t) for t = 0..horizon.
  std::vector<long long> cumulative() const;

  /// Throws InputError when dates are out of order, an event falls outside
  /// [0, horizon], counts are < 1, or days are not strictly increasing.
  void validate() const;

  friend bool operator==(const CitationTrajectory&, const CitationTrajectory&) = default;
};

/// Collapses day offsets (any order, repeats allowed) into sorted events.
std::vector<CitationEvent> events_from_days(std::vector<int> days);

}  // namespace citedyn
