#include "citedyn/trajectory.hpp"

#include <algorithm>

#include "citedyn/errors.hpp"

namespace citedyn {

long long CitationTrajectory::pre_publication_citations() const {
  const int tp = preprint_duration();
  long long total = 0;
  for (const auto& e : events)
    if (e.day <= tp) total += e.count;
  return total;
}

long long CitationTrajectory::post_publication_citations() const {
  return total_citations() - pre_publication_citations();
}

long long CitationTrajectory::total_citations() const {
  long long total = 0;
  for (const auto& e : events) total += e.count;
  return total;
}

std::vector<long long> CitationTrajectory::cumulative() const {
  std::vector<long long> out(static_cast<std::size_t>(std::max(horizon() + 1, 0)), 0);
  for (const auto& e : events) {
    if (e.day >= 0 && e.day < static_cast<int>(out.size())) out[e.day] += e.count;
  }
  long long running = 0;
  for (auto& v : out) {
    running += v;
    v = running;
  }
  return out;
}

void CitationTrajectory::validate() const {
  if (publication_day < preprint_day) throw InputError("publication precedes preprint");
  if (horizon_day < publication_day) throw InputError("horizon precedes publication");
  const int end = horizon();
  int previous = -1;
  for (const auto& e : events) {
    if (e.day < 0 || e.day > end) {
      throw InputError("citation event on day " + std::to_string(e.day) +
                       " lies outside the observation window [0, " + std::to_string(end) +
                       "]");
    }
    if (e.count < 1) throw InputError("citation event with count < 1");
    if (e.day <= previous) throw InputError("citation events must be strictly increasing");
    previous = e.day;
  }
}

std::vector<CitationEvent> events_from_days(std::vector<int> days) {
  std::sort(days.begin(), days.end());
  std::vector<CitationEvent> events;
  for (int d : days) {
    if (!events.empty() && events.back().day == d) {
      ++events.back().count;
    } else {
      events.push_back({d, 1});
    }
  }
  return events;
}

}  // namespace citedyn
