#pragma once

#include "hessbif/nonlinearity.hpp"

namespace hessbif {

/// Radial Dirichlet problem (S_k(D^2 u))^(1/k) = lambda f(-u) on the ball B_R in R^N.
struct ProblemSpec {
  int dimension = 1;  // N
  int order = 1;      // k; k == N is the Monge-Ampere case
  double radius = 1.0;
  NonlinearitySpec nonlinearity;

  bool monge_ampere() const { return order == dimension; }
  /// Throws InvalidInput on 1 <= k <= N <= 60, R > 0 violations or a bad f.
  void validate() const;
};

/// Accepts either a bare nonlinearity object (N, k, R default to 1) or
/// {"N":.., "k":.., "R":.., "nonlinearity": {...}}.
ProblemSpec problem_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProblemSpec& spec);

}  // namespace hessbif
