#pragma once

#include <istream>
#include <ostream>

#include "citedyn/inference.hpp"

namespace citedyn {

/// Columnar CSV: chain, draw, divergent, then one column per parameter.
void write_draws_csv(std::ostream& out, const PosteriorDraws& draws);
PosteriorDraws read_draws_csv(std::istream& in);

/// One JSON document per subset; each journal entry repeats field and year so
/// records can be keyed by (field, year, journal).
void write_summary_json(std::ostream& out, const FitSummary& summary);
FitSummary read_summary_json(std::istream& in);

}  // namespace citedyn
