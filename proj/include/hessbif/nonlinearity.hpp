#pragma once

// Registry of right-hand sides f : [0, inf) -> [0, inf) with f(0) = 0 and
// f > 0 elsewhere, plus numeric classification of the limits of f(s)/s.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace hessbif {

struct LimitClass {
  enum class Kind { Zero, Finite, Infinite };

  Kind kind = Kind::Zero;
  double value = 0.0;  // meaningful only for Finite

  static LimitClass zero() { return {Kind::Zero, 0.0}; }
  static LimitClass infinite() { return {Kind::Infinite, 0.0}; }
  static LimitClass finite(double v);

  bool is_zero() const { return kind == Kind::Zero; }
  bool is_finite() const { return kind == Kind::Finite; }
  bool is_infinite() const { return kind == Kind::Infinite; }

  /// Same kind, and for Finite the values agree to `rtol`.
  bool matches(const LimitClass& other, double rtol = 1e-3) const;

  std::string to_string() const;
};

LimitClass limit_class_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LimitClass& c);

enum class NonlinearityKind {
  Linear,               // s
  Saturating,           // s / (1 + s)
  Superlinear,          // s (1 + s)
  QuadraticOverLinear,  // s^2 / (1 + s)
  Power,                // s^p
  SumOfPowers,          // s^p + c s^q
  LogBump,              // log(1 + s^2)
  Tabulated,            // log-log interpolation of user points
  Custom,               // programmatic only; not serialisable
};

std::string kind_name(NonlinearityKind kind);

/// Every kind accepts an optional multiplicative "scale" parameter (default 1).
struct NonlinearitySpec {
  NonlinearityKind kind = NonlinearityKind::Linear;
  std::map<std::string, double> params;
  std::vector<std::pair<double, double>> table;  // Tabulated: (s, f(s)), s ascending
  std::function<double(double)> custom;
  std::optional<LimitClass> declared_f0;
  std::optional<LimitClass> declared_finf;

  double param(const std::string& name, double fallback) const;
  double scale() const { return param("scale", 1.0); }

  static NonlinearitySpec linear(double scale = 1.0);
  static NonlinearitySpec saturating(double scale = 1.0);
  static NonlinearitySpec superlinear(double scale = 1.0);
  static NonlinearitySpec quadratic_over_linear(double scale = 1.0);
  static NonlinearitySpec power(double p, double scale = 1.0);
  static NonlinearitySpec sum_of_powers(double p, double q, double c, double scale = 1.0);
  static NonlinearitySpec log_bump(double scale = 1.0);
  static NonlinearitySpec tabulated(std::vector<std::pair<double, double>> points);
  static NonlinearitySpec from_function(std::function<double(double)> f);
};

/// f(s); exactly 0 at s = 0. Throws InvalidInput for s < 0 or NaN.
double eval_nonlinearity(const NonlinearitySpec& spec, double s);

/// Same as eval_nonlinearity without argument checks; s must be >= 0.
double eval_nonlinearity_unchecked(const NonlinearitySpec& spec, double s);

/// Checks parameters, f(0) = 0 and f(s) > 0 on a geometric grid of [1e-8, 1e8].
void validate_nonlinearity(const NonlinearitySpec& spec);

struct LimitClassification {
  LimitClass f0;
  LimitClass finf;
  bool conflict = false;  // a declared class disagrees with the estimate
  std::string detail;
};

/// Classifies f0 = lim_{s->0+} f(s)/s and finf = lim_{s->inf} f(s)/s from
/// ratios on decades 1e-8 .. 1e8. Throws Unclassifiable when an end does not
/// settle.
LimitClassification classify_limits(const NonlinearitySpec& spec);

/// Classification of a ratio function rho(s) sampled on decades (shared with
/// the system module, which classifies along the diagonal s = t).
LimitClassification classify_ratio(const std::function<double(double)>& ratio);

/// Schema: {"kind": string, "params": {name: number}, "f0": opt, "finf": opt,
///          "points": [[s, f], ...] (tabulated only)}.
NonlinearitySpec nonlinearity_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NonlinearitySpec& spec);

}  // namespace hessbif
