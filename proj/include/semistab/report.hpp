#pragma once

// Structured reports (JSON) and their plain-text rendering.

#include <map>
#include <optional>
#include <string>

#include "json.hpp"
#include "semistab/lasota.hpp"
#include "semistab/partition.hpp"
#include "semistab/stability.hpp"

namespace semistab {

using json = nlohmann::ordered_json;

struct Report {
  ProblemSpec problem;
  std::optional<ValidationReport> validation;
  std::map<std::string, Verdict> verdicts;  // keyed by space name
  std::optional<AdmissibilityFit> admissibility;
  std::string grid;
  double horizon = 0.0;
  double wall_time = 0.0;  // seconds; the only field that varies between identical runs
  int threads = 1;
};

json to_json(const DecayEvidence& e);
json to_json(const CriterionResult& c);
json to_json(const Verdict& v);
json to_json(const AdmissibilityFit& f, bool with_curve = true);
json to_json(const ValidationReport& r);
json to_json(const ThresholdPrediction& t);
json to_json(const HypercyclicityEvidence& e);
json to_json(const TrichotomyReport& r);
json tolerances_json(const Tolerances& t);
/// The config echo as an object; numeric values become numbers.
json problem_json(const ProblemSpec& spec);
json to_json(const Report& r);

std::string render_text(const Verdict& v, const std::string& title = {});
std::string render_text(const AdmissibilityFit& f);
std::string render_text(const ValidationReport& r);
std::string render_text(const Report& r);

/// Shortest round-trip decimal form, "." separator, no locale.
std::string csv_number(double v);

}  // namespace semistab
