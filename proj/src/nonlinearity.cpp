#include "hessbif/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hessbif/errors.hpp"

namespace hessbif {

LimitClass LimitClass::finite(double v) {
  if (!(v > 0) || !std::isfinite(v)) throw InvalidInput("Finite limit class needs a positive value");
  return {Kind::Finite, v};
}

bool LimitClass::matches(const LimitClass& other, double rtol) const {
  if (kind != other.kind) return false;
  if (kind != Kind::Finite) return true;
  return std::abs(value - other.value) <= rtol * std::max(value, other.value);
}

std::string LimitClass::to_string() const {
  switch (kind) {
    case Kind::Zero: return "zero";
    case Kind::Infinite: return "infinite";
    case Kind::Finite: {
      std::ostringstream os;
      os.precision(10);
      os << "finite(" << value << ")";
      return os.str();
    }
  }
  return "?";
}

LimitClass limit_class_from_json(const nlohmann::json& j) {
  if (j.is_number()) return LimitClass::finite(j.get<double>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "zero" || s == "0") return LimitClass::zero();
    if (s == "infinite" || s == "inf" || s == "+inf") return LimitClass::infinite();
  }
  if (j.is_object() && j.contains("finite")) return LimitClass::finite(j.at("finite").get<double>());
  throw InvalidInput("limit class must be \"zero\", \"infinite\" or a positive number, got " + j.dump());
}

nlohmann::json to_json(const LimitClass& c) {
  switch (c.kind) {
    case LimitClass::Kind::Zero: return "zero";
    case LimitClass::Kind::Infinite: return "infinite";
    case LimitClass::Kind::Finite: return c.value;
  }
  return nullptr;
}

namespace {

struct KindEntry {
  NonlinearityKind kind;
  const char* name;
};

constexpr KindEntry kKinds[] = {
    {NonlinearityKind::Linear, "linear"},
    {NonlinearityKind::Saturating, "saturating"},
    {NonlinearityKind::Superlinear, "superlinear"},
    {NonlinearityKind::QuadraticOverLinear, "quadratic_over_linear"},
    {NonlinearityKind::Power, "power"},
    {NonlinearityKind::SumOfPowers, "sum_of_powers"},
    {NonlinearityKind::LogBump, "log_bump"},
    {NonlinearityKind::Tabulated, "tabulated"},
    {NonlinearityKind::Custom, "custom"},
};

NonlinearityKind kind_from_name(const std::string& name) {
  for (const auto& e : kKinds)
    if (name == e.name && e.kind != NonlinearityKind::Custom) return e.kind;
  throw InvalidInput("unknown nonlinearity kind '" + name + "'");
}

// Log-log interpolation with power-law extension past both ends.
double eval_table(const std::vector<std::pair<double, double>>& t, double s) {
  if (s == 0.0) return 0.0;
  const double ls = std::log(s);
  auto seg = [&](std::size_t i) {
    const double x0 = std::log(t[i].first), x1 = std::log(t[i + 1].first);
    const double y0 = std::log(t[i].second), y1 = std::log(t[i + 1].second);
    return std::exp(y0 + (y1 - y0) * (ls - x0) / (x1 - x0));
  };
  if (s <= t.front().first) return seg(0);
  if (s >= t.back().first) return seg(t.size() - 2);
  auto it = std::upper_bound(t.begin(), t.end(), s, [](double v, const auto& p) { return v < p.first; });
  return seg(static_cast<std::size_t>(it - t.begin()) - 1);
}

}  // namespace

std::string kind_name(NonlinearityKind kind) {
  for (const auto& e : kKinds)
    if (e.kind == kind) return e.name;
  return "?";
}

double NonlinearitySpec::param(const std::string& name, double fallback) const {
  auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

NonlinearitySpec NonlinearitySpec::linear(double scale) {
  return {NonlinearityKind::Linear, {{"scale", scale}}, {}, {}, {}, {}};
}
NonlinearitySpec NonlinearitySpec::saturating(double scale) {
  return {NonlinearityKind::Saturating, {{"scale", scale}}, {}, {}, {}, {}};
}
NonlinearitySpec NonlinearitySpec::superlinear(double scale) {
  return {NonlinearityKind::Superlinear, {{"scale", scale}}, {}, {}, {}, {}};
}
NonlinearitySpec NonlinearitySpec::quadratic_over_linear(double scale) {
  return {NonlinearityKind::QuadraticOverLinear, {{"scale", scale}}, {}, {}, {}, {}};
}
NonlinearitySpec NonlinearitySpec::power(double p, double scale) {
  return {NonlinearityKind::Power, {{"p", p}, {"scale", scale}}, {}, {}, {}, {}};
}
NonlinearitySpec NonlinearitySpec::sum_of_powers(double p, double q, double c, double scale) {
  return {NonlinearityKind::SumOfPowers, {{"p", p}, {"q", q}, {"c", c}, {"scale", scale}}, {}, {}, {}, {}};
}
NonlinearitySpec NonlinearitySpec::log_bump(double scale) {
  return {NonlinearityKind::LogBump, {{"scale", scale}}, {}, {}, {}, {}};
}
NonlinearitySpec NonlinearitySpec::tabulated(std::vector<std::pair<double, double>> points) {
  NonlinearitySpec s;
  s.kind = NonlinearityKind::Tabulated;
  s.table = std::move(points);
  return s;
}
NonlinearitySpec NonlinearitySpec::from_function(std::function<double(double)> f) {
  NonlinearitySpec s;
  s.kind = NonlinearityKind::Custom;
  s.custom = std::move(f);
  return s;
}

double eval_nonlinearity_unchecked(const NonlinearitySpec& spec, double s) {
  double v = 0.0;
  switch (spec.kind) {
    case NonlinearityKind::Linear: v = s; break;
    case NonlinearityKind::Saturating: v = s / (1.0 + s); break;
    case NonlinearityKind::Superlinear: v = s * (1.0 + s); break;
    case NonlinearityKind::QuadraticOverLinear: v = s * s / (1.0 + s); break;
    case NonlinearityKind::Power: v = std::pow(s, spec.param("p", 1.0)); break;
    case NonlinearityKind::SumOfPowers:
      v = std::pow(s, spec.param("p", 1.0)) + spec.param("c", 1.0) * std::pow(s, spec.param("q", 2.0));
      break;
    case NonlinearityKind::LogBump: v = std::log1p(s * s); break;
    case NonlinearityKind::Tabulated: return eval_table(spec.table, s);
    case NonlinearityKind::Custom: return spec.custom(s);
  }
  return spec.scale() * v;
}

double eval_nonlinearity(const NonlinearitySpec& spec, double s) {
  if (!(s >= 0)) throw InvalidInput("eval_nonlinearity: argument must be >= 0");
  if (s == 0.0 && spec.kind != NonlinearityKind::Custom) return 0.0;
  return eval_nonlinearity_unchecked(spec, s);
}

void validate_nonlinearity(const NonlinearitySpec& spec) {
  if (!(spec.scale() > 0) || !std::isfinite(spec.scale())) throw InvalidInput("scale must be positive");
  switch (spec.kind) {
    case NonlinearityKind::Power:
      if (!(spec.param("p", 1.0) > 0)) throw InvalidInput("power: exponent p must be > 0");
      break;
    case NonlinearityKind::SumOfPowers:
      if (!(spec.param("p", 1.0) > 0) || !(spec.param("q", 2.0) > 0))
        throw InvalidInput("sum_of_powers: exponents p, q must be > 0");
      if (!(spec.param("c", 1.0) >= 0)) throw InvalidInput("sum_of_powers: c must be >= 0");
      break;
    case NonlinearityKind::Tabulated: {
      const auto& t = spec.table;
      if (t.size() < 2) throw InvalidInput("tabulated: need at least two points with s > 0");
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i].first > 0) || !(t[i].second > 0) || !std::isfinite(t[i].first) || !std::isfinite(t[i].second))
          throw InvalidInput("tabulated: points need s > 0 and f(s) > 0");
        if (i > 0 && !(t[i].first > t[i - 1].first)) throw InvalidInput("tabulated: s must be strictly ascending");
      }
      break;
    }
    case NonlinearityKind::Custom:
      if (!spec.custom) throw InvalidInput("custom nonlinearity without a function");
      break;
    default: break;
  }
  const double f_at_zero = spec.kind == NonlinearityKind::Custom ? spec.custom(0.0) : eval_nonlinearity_unchecked(spec, 0.0);
  if (f_at_zero != 0.0) throw InvalidInput("nonlinearity must vanish at s = 0 (f(0) = " + std::to_string(f_at_zero) + ")");
  for (int i = -64; i <= 64; ++i) {
    const double s = std::pow(10.0, i / 8.0);
    const double v = eval_nonlinearity_unchecked(spec, s);
    if (!(v > 0) || !std::isfinite(v))
      throw InvalidInput("nonlinearity must be positive and finite for s > 0 (fails at s = " + std::to_string(s) + ")");
  }
}

namespace {

constexpr double kFlatSlope = 1e-3;      // decadal log-change treated as converged
constexpr double kExtrapDecades = 20.0;  // how far past the grid the trend is pushed

LimitClass classify_end(double a, double b, double c, const char* which) {
  for (double x : {a, b, c})
    if (!(x > 0) || !std::isfinite(x))
      throw Unclassifiable(std::string("ratio f(s)/s is not positive and finite near ") + which);
  const double e1 = std::log10(b / a);
  const double e2 = std::log10(c / b);
  const double extrapolated = c * std::pow(10.0, e2 * kExtrapDecades);
  if (extrapolated > 1e6 && e1 > 0 && e2 > 0) return LimitClass::infinite();
  if (extrapolated < 1e-6 && e1 < 0 && e2 < 0) return LimitClass::zero();
  if (std::abs(e2) <= kFlatSlope) {
    // Aitken / Richardson with unknown geometric rate.
    const double d1 = b - a, d2 = c - b;
    double value = c;
    const double denom = d2 - d1;
    if (denom != 0.0) {
      const double corr = d2 * d2 / denom;
      if (std::abs(corr) <= 10.0 * std::abs(d2)) value = c - corr;
    }
    if (!(value > 0)) value = c;
    return LimitClass::finite(value);
  }
  throw Unclassifiable(std::string("ratio f(s)/s does not settle near ") + which);
}

}  // namespace

LimitClassification classify_ratio(const std::function<double(double)>& ratio) {
  LimitClassification out;
  out.f0 = classify_end(ratio(1e-6), ratio(1e-7), ratio(1e-8), "s = 0");
  out.finf = classify_end(ratio(1e6), ratio(1e7), ratio(1e8), "s = infinity");
  return out;
}

LimitClassification classify_limits(const NonlinearitySpec& spec) {
  auto out = classify_ratio([&](double s) { return eval_nonlinearity_unchecked(spec, s) / s; });
  std::ostringstream detail;
  if (spec.declared_f0 && !spec.declared_f0->matches(out.f0)) {
    out.conflict = true;
    detail << "declared f0 " << spec.declared_f0->to_string() << " vs estimated " << out.f0.to_string() << "; ";
  }
  if (spec.declared_finf && !spec.declared_finf->matches(out.finf)) {
    out.conflict = true;
    detail << "declared finf " << spec.declared_finf->to_string() << " vs estimated " << out.finf.to_string();
  }
  out.detail = detail.str();
  return out;
}

NonlinearitySpec nonlinearity_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw InvalidInput("nonlinearity JSON needs a string field \"kind\"");
  NonlinearitySpec spec;
  spec.kind = kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw InvalidInput("\"params\" must be an object");
    for (const auto& [name, value] : j.at("params").items()) {
      if (!value.is_number()) throw InvalidInput("parameter '" + name + "' must be a number");
      spec.params[name] = value.get<double>();
    }
  }
  if (spec.kind == NonlinearityKind::Tabulated) {
    if (!j.contains("points") || !j.at("points").is_array()) throw InvalidInput("tabulated: \"points\" array required");
    for (const auto& p : j.at("points")) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw InvalidInput("tabulated: each point must be [s, f]");
      const double s = p[0].get<double>(), f = p[1].get<double>();
      if (s == 0.0) {
        if (f != 0.0) throw InvalidInput("tabulated: f(0) must be 0");
        continue;
      }
      spec.table.emplace_back(s, f);
    }
  }
  if (j.contains("f0") && !j.at("f0").is_null()) spec.declared_f0 = limit_class_from_json(j.at("f0"));
  if (j.contains("finf") && !j.at("finf").is_null()) spec.declared_finf = limit_class_from_json(j.at("finf"));
  return spec;
}

nlohmann::json to_json(const NonlinearitySpec& spec) {
  if (spec.kind == NonlinearityKind::Custom) throw InvalidInput("custom nonlinearities cannot be serialised");
  nlohmann::json j;
  j["kind"] = kind_name(spec.kind);
  j["params"] = nlohmann::json::object();
  for (const auto& [k, v] : spec.params) j["params"][k] = v;
  if (spec.kind == NonlinearityKind::Tabulated) {
    j["points"] = nlohmann::json::array();
    for (const auto& [s, f] : spec.table) j["points"].push_back({s, f});
  }
  if (spec.declared_f0) j["f0"] = to_json(*spec.declared_f0);
  if (spec.declared_finf) j["finf"] = to_json(*spec.declared_finf);
  return j;
}

}  // namespace hessbif
