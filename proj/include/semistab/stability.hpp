#pragma once

// Stability classifiers.
//
//   classify_stability_1d       boundedness + pointwise decay on Omega1 (or escape) + sign of h on Omega0
//   classify_stability_rho1     rho = 1, F nonvanishing: integral criteria, surjective vs escaping flow
//   classify_stability_general  boundedness + decay of int_Q rho_{t,p} over bounded boxes Q (N <= 3)
//
// Every verdict keeps its criteria with numeric evidence, the grid and the horizon.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semistab/decay.hpp"
#include "semistab/partition.hpp"
#include "semistab/weights.hpp"

namespace semistab {

enum class Status { Stable, Unstable, Inconclusive };
enum class Outcome { Pass, Fail, Unknown };

std::string to_string(Status s);
std::string to_string(Outcome o);

struct CriterionResult {
  std::string id;
  Outcome outcome = Outcome::Unknown;
  std::string detail;
  std::vector<std::pair<std::string, double>> evidence;
  std::optional<std::string> witness;
  std::vector<std::pair<std::vector<double>, DecayEvidence>> decay;  // per point / per box
  bool low_confidence = false;

  bool passed() const { return outcome == Outcome::Pass; }
};

struct Verdict {
  Status status = Status::Inconclusive;
  std::string method;
  std::vector<CriterionResult> criteria;
  std::optional<std::string> witness;
  std::string grid;
  double horizon = 0.0;
  std::optional<AdmissibilityFit> admissibility;
  std::vector<std::string> notes;

  /// Stable iff all pass; Unstable iff one failed (it carries a witness); Inconclusive otherwise.
  void fold();
};

CriterionResult check_boundedness(const WeightEvolution& we, double horizon, const SampleGrid& grid);
CriterionResult check_pointwise_decay(const WeightEvolution& we, double horizon,
                                      const std::vector<std::vector<double>>& points);
CriterionResult check_omega0_sign(const ProblemSpec& problem, const DomainPartition& partition,
                                  const std::vector<std::vector<double>>& points);
/// Passes when every point has a finite escape time (closed forms: exact, any size; otherwise <= horizon).
CriterionResult check_escape(const Semiflow& flow, double horizon, const std::vector<std::vector<double>>& points);

Verdict classify_stability_1d(const ProblemSpec& problem, double horizon, const SampleGrid& grid);

/// int_y^{phi(t,y)} (h - F'/p)/F ds, computed as int_0^t (h - F'/p)(phi(s,y)) ds.
double stability_integral(const WeightEvolution& we, double y, double t);
double stability_integral(const ProblemSpec& problem, double y, double t);

Verdict classify_stability_rho1(const ProblemSpec& problem, double horizon, const SampleGrid& grid);
Verdict classify_stability_rho1(const WeightEvolution& we, double horizon, const SampleGrid& grid);

/// t -> int_Q rho_{t,p} by composite Gauss-Legendre tensor quadrature. N <= 3.
CriterionResult check_wstar_integral(const WeightEvolution& we, const Box& Q, double horizon);

Verdict classify_stability_general(const WeightEvolution& we, double horizon, const std::vector<Box>& boxes,
                                   const SampleGrid& grid);
Verdict classify_stability_general(const ProblemSpec& problem, double horizon, const std::vector<Box>& boxes,
                                   const SampleGrid& grid);

/// Bounded boxes for the w*-criterion: the domain boxes themselves when bounded, else [-k,k]^N cut to them.
std::vector<Box> default_test_boxes(const Domain& domain);

/// Picks the classifier for an L^p problem: three-condition classifier for N = 1, the general one otherwise.
Verdict classify_stability(const ProblemSpec& problem, double horizon, const SampleGrid& grid);

}  // namespace semistab
