#pragma once

// Bifurcation diagrams lambda(d) in the amplitude d = -u(0), fold detection,
// solution counting and the existence/multiplicity predicates of the
// (f0, finf) classification.

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "hessbif/nonlinearity.hpp"
#include "hessbif/problem.hpp"
#include "hessbif/shooting.hpp"

namespace hessbif {

struct BranchPoint {
  double d = 0.0;
  double lambda = 0.0;
  double residual = 0.0;  // u(R) of the accepted profile
  bool admissible = false;
};

struct LimitEstimate {
  enum class Kind { Finite, Zero, Infinite, Undetermined };
  Kind kind = Kind::Undetermined;
  double value = std::numeric_limits<double>::quiet_NaN();  // Finite only

  std::string to_string() const;
};

enum class FoldKind { Max, Min };

struct Fold {
  std::size_t index = 0;
  double lambda = 0.0;
  FoldKind kind = FoldKind::Max;
};

struct Branch {
  std::vector<BranchPoint> points;  // d strictly increasing
  std::vector<double> gaps;         // amplitudes where no root was found
  std::vector<Fold> folds;
  LimitEstimate lambda_at_zero;
  LimitEstimate lambda_at_infinity;

  double lambda_min() const;
  double lambda_max() const;
};

struct TraceOptions {
  bool refine_folds = true;        // golden-section polish of every discrete extremum
  int max_refine_levels = 3;       // continuity refinement depth
  double max_relative_jump = 0.2;  // neighbouring lambdas may differ by this much
  double max_gap_fraction = 0.1;
  int threads = 0;                 // 0: HB_THREADS from the environment, else 1
};

/// Number of worker threads allowed by HB_THREADS (>= 1).
int threads_from_environment();

Branch trace_branch(const ProblemSpec& spec, double d_min, double d_max, int n_points, const ShootingConfig& cfg,
                    const TraceOptions& opts = {});

/// Strict local extrema of lambda over d; neighbours must differ by more
/// than plateau_tol * lambda. Flat runs are collapsed before comparing.
std::vector<Fold> detect_folds(const Branch& branch, double plateau_tol = 1e-6);

struct SolutionCount {
  int count = 0;
  bool at_fold = false;
  int fold_multiplicity = 0;
  std::vector<double> crossings_d;  // log-linear interpolated amplitudes
};

/// Crossings of the horizontal line lambda = const by the branch.
SolutionCount count_solutions(const Branch& branch, double lambda, double plateau_tol = 1e-6);

/// Recomputes folds and, when the branch spans at least 4 decades of d,
/// the asymptote estimates (shared with the system tracer and CSV reader).
void finalize_branch(Branch& branch);

struct Interval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double x) const { return x > lo && x < hi; }
  std::string to_string() const;
};

enum class MultiplicityProfile {
  AtLeastOne,   // one table cell: at least one solution inside the interval
  TwoBelowMax,  // f0 = finf = inf: two below lambda*, none above
  TwoAboveMin,  // f0 = finf = 0 with coercive f: two above lambda_*, none below
  OutOfTable,   // finite f0 == finf: eigenvalue-like case
};

std::string to_string(MultiplicityProfile p);

struct TheoremPrediction {
  LimitClass f0;
  LimitClass finf;
  double lambda1 = 0.0;
  MultiplicityProfile multiplicity = MultiplicityProfile::AtLeastOne;
  Interval existence;             // valid for AtLeastOne
  bool hypotheses_met = true;     // e.g. coercivity for TwoAboveMin
  std::string label;
};

/// Table cell for (f0, finf). Throws OutOfTable for finite f0 == finf.
TheoremPrediction predicted_interval(const LimitClass& f0, const LimitClass& finf, double lambda1,
                                     bool coercive = true);

/// Prediction marker for the blank finite-equal cell (linear-like f); the
/// branch is expected to be flat at lambda1 / f0.
TheoremPrediction eigen_case_prediction(const LimitClass& f0, double lambda1);

/// Throws InvalidInput when the branch spans fewer than 4 decades of d.
std::pair<LimitEstimate, LimitEstimate> asymptote_estimates(const Branch& branch);

struct Check {
  std::string name;
  std::string predicted;
  std::string observed;
  bool pass = false;
  double tol = 0.0;
};

struct VerificationReport {
  std::vector<Check> checks;
  std::vector<std::string> notes;

  bool pass() const;
  void add(std::string name, std::string predicted, std::string observed, bool pass, double tol);
};

struct VerifyOptions {
  double asymptote_rtol = 1e-3;  // finite asymptote estimates, relative
  double plateau_tol = 1e-6;
  double flat_tol = 1e-6;  // eigen-case flatness, relative
};

VerificationReport verify_predictions(const Branch& branch, const TheoremPrediction& prediction, int lambda_samples,
                                      const VerifyOptions& opts = {});

/// {"schema_version":1,"checks":[{"name","predicted","observed","pass","tol"}],"notes":[..],"pass":bool}
nlohmann::json to_json(const VerificationReport& report);

/// "index,d,lambda,residual,is_fold", 17 significant digits.
void write_branch_csv(std::ostream& os, const Branch& branch);
Branch read_branch_csv(std::istream& is);

/// f(s) keeps growing over the decades 1e4 .. 1e8 and the growth per decade does not die out.
bool looks_coercive(const NonlinearitySpec& spec);

}  // namespace hessbif
