#include "hessbif/problem.hpp"

#include <cmath>

#include "hessbif/errors.hpp"
#include "hessbif/hessian.hpp"

namespace hessbif {

void ProblemSpec::validate() const {
  check_order(dimension, order);
  if (!(radius > 0) || !std::isfinite(radius)) throw InvalidInput("radius R must be positive");
  validate_nonlinearity(nonlinearity);
}

namespace {

int read_int(const nlohmann::json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw InvalidInput(std::string("\"") + key + "\" must be an integer");
  return v.get<int>();
}

}  // namespace

ProblemSpec problem_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidInput("problem spec must be a JSON object");
  ProblemSpec spec;
  spec.dimension = read_int(j, "N", 1);
  spec.order = read_int(j, "k", 1);
  if (j.contains("R")) {
    if (!j.at("R").is_number()) throw InvalidInput("\"R\" must be a number");
    spec.radius = j.at("R").get<double>();
  }
  spec.nonlinearity = nonlinearity_from_json(j.contains("nonlinearity") ? j.at("nonlinearity") : j);
  return spec;
}

nlohmann::json to_json(const ProblemSpec& spec) {
  return {{"N", spec.dimension}, {"k", spec.order}, {"R", spec.radius}, {"nonlinearity", to_json(spec.nonlinearity)}};
}

}  // namespace hessbif
