#include "citedyn/fit_io.hpp"

#include <string>

#include <json.hpp>

#include "citedyn/csv.hpp"
#include "citedyn/errors.hpp"

namespace citedyn {

using nlohmann::ordered_json;

void write_draws_csv(std::ostream& out, const PosteriorDraws& draws) {
  std::vector<std::string> row = {"chain", "draw", "divergent"};
  row.insert(row.end(), draws.names.begin(), draws.names.end());
  csv::write_row(out, row);
  for (int c = 0; c < draws.n_chains; ++c) {
    for (int d = 0; d < draws.n_draws; ++d) {
      row.clear();
      row.push_back(std::to_string(c));
      row.push_back(std::to_string(d));
      row.push_back(draws.divergent[c][d] ? "1" : "0");
      for (std::size_t k = 0; k < draws.n_params(); ++k) row.push_back(csv::format_number(draws.at(c, d, k)));
      csv::write_row(out, row);
    }
  }
}

PosteriorDraws read_draws_csv(std::istream& in) {
  const auto table = csv::read_table(in);
  if (table.header.size() < 3 || table.header[0] != "chain" || table.header[1] != "draw" ||
      table.header[2] != "divergent") {
    throw InputError("draws CSV must start with chain,draw,divergent");
  }
  PosteriorDraws draws;
  draws.names.assign(table.header.begin() + 3, table.header.end());
  for (const auto& row : table.rows) {
    int chain = 0;
    try {
      chain = std::stoi(row[0]);
    } catch (const std::logic_error&) {
      throw InputError("malformed chain index '" + row[0] + "'");
    }
    if (chain < 0) throw InputError("negative chain index");
    if (chain >= static_cast<int>(draws.values.size())) {
      draws.values.resize(chain + 1);
      draws.divergent.resize(chain + 1);
    }
    draws.divergent[chain].push_back(row[2] == "1" ? 1 : 0);
    for (std::size_t k = 3; k < row.size(); ++k) {
      try {
        draws.values[chain].push_back(std::stod(row[k]));
      } catch (const std::logic_error&) {
        throw InputError("malformed draw value '" + row[k] + "'");
      }
    }
  }
  draws.n_chains = static_cast<int>(draws.values.size());
  draws.n_draws = draws.n_chains ? static_cast<int>(draws.divergent.front().size()) : 0;
  for (const auto& d : draws.divergent) {
    if (static_cast<int>(d.size()) != draws.n_draws) throw InputError("chains of unequal length");
  }
  return draws;
}

namespace {

ordered_json interval_json(const Interval& i) {
  ordered_json j;
  j["median"] = i.median;
  j["lower"] = i.lower;
  j["upper"] = i.upper;
  return j;
}

Interval interval_from(const ordered_json& j) {
  return {j.at("median").get<double>(), j.at("lower").get<double>(), j.at("upper").get<double>()};
}

}  // namespace

void write_summary_json(std::ostream& out, const FitSummary& s) {
  ordered_json root;
  root["field"] = s.field;
  root["year"] = s.year;
  root["n_chains"] = s.n_chains;
  root["n_draws"] = s.n_draws;
  root["divergences"] = s.divergences;
  root["excluded"] = s.excluded;
  root["rhat_warning"] = s.rhat_warning;
  auto journals = ordered_json::array();
  for (const auto& js : s.journals) {
    ordered_json j;
    j["field"] = s.field;
    j["year"] = s.year;
    j["journal"] = js.journal;
    j["n_articles"] = js.n_articles;
    j["theta"] = interval_json(js.theta);
    j["Phi"] = interval_json(js.Phi);
    j["exp_Phi"] = interval_json(js.exp_Phi);
    j["epsilon"] = interval_json(js.epsilon);
    j["effective_rate"] = interval_json(js.effective_rate);
    journals.push_back(std::move(j));
  }
  root["journals"] = std::move(journals);
  auto params = ordered_json::array();
  for (const auto& p : s.parameters) {
    ordered_json j;
    j["name"] = p.name;
    j["median"] = p.interval.median;
    j["lower"] = p.interval.lower;
    j["upper"] = p.interval.upper;
    j["rhat"] = p.rhat ? ordered_json(*p.rhat) : ordered_json(nullptr);
    j["ess"] = p.ess;
    params.push_back(std::move(j));
  }
  root["parameters"] = std::move(params);
  out << root.dump(2) << '\n';
}

FitSummary read_summary_json(std::istream& in) {
  try {
    const auto root = ordered_json::parse(in);
    FitSummary s;
    s.field = root.at("field").get<std::string>();
    s.year = root.at("year").get<int>();
    s.n_chains = root.at("n_chains").get<int>();
    s.n_draws = root.at("n_draws").get<int>();
    s.divergences = root.at("divergences").get<int>();
    s.excluded = root.at("excluded").get<bool>();
    s.rhat_warning = root.at("rhat_warning").get<bool>();
    for (const auto& j : root.at("journals")) {
      JournalSummary js;
      js.journal = j.at("journal").get<std::string>();
      js.n_articles = j.at("n_articles").get<int>();
      js.theta = interval_from(j.at("theta"));
      js.Phi = interval_from(j.at("Phi"));
      js.exp_Phi = interval_from(j.at("exp_Phi"));
      js.epsilon = interval_from(j.at("epsilon"));
      js.effective_rate = interval_from(j.at("effective_rate"));
      s.journals.push_back(std::move(js));
    }
    for (const auto& j : root.at("parameters")) {
      ParameterSummary p;
      p.name = j.at("name").get<std::string>();
      p.interval = {j.at("median").get<double>(), j.at("lower").get<double>(),
                    j.at("upper").get<double>()};
      if (!j.at("rhat").is_null()) p.rhat = j.at("rhat").get<double>();
      p.ess = j.at("ess").get<double>();
      s.parameters.push_back(std::move(p));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed fit summary: ") + e.what());
  }
}

}  // namespace citedyn
