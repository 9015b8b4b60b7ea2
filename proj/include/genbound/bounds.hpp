#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "genbound/info_measures.hpp"

namespace genbound {

// Scalar inputs of a bound evaluation. Which fields are required depends on
// the bound; see bound_registry().
struct BoundQuery {
  long long n = 0;
  std::optional<double> delta;       // confidence parameter in (0,1)
  std::optional<double> sigma;       // sub-Gaussian parameter
  std::optional<double> train_loss;  // in [0,1] where required
  std::vector<double> info;          // divergence value(s) in nats
  std::map<std::string, double> params;  // gamma, lambda, alpha, m, L, ...
  std::vector<double> eta;   // step sizes (iterative bounds)
  std::vector<double> rho2;  // per-step noise variances (iterative bounds)
  bool conditional = false;  // selects the supersample-form constants

  double info_scalar() const;
  std::optional<double> param(const std::string& name) const;
};

struct BoundValue {
  std::string name;
  double value = 0.0;  // >= 0 or +infinity
  bool vacuous = false;
  std::map<std::string, double> components;
};

struct MissingFieldError : std::invalid_argument {
  explicit MissingFieldError(const std::string& f)
      : std::invalid_argument("missing field: " + f), field(f) {}
  std::string field;
};

struct InfeasibleError : std::invalid_argument {
  InfeasibleError(const std::string& msg, double c)
      : std::invalid_argument(msg), constraint(c) {}
  double constraint;
};

struct BoundSpec {
  std::string id;
  std::string summary;
  std::vector<std::string> required;  // field names for cmd_list / diagnostics
  bool bounded_loss;  // value > 1 flags vacuity; otherwise only infinity does
  std::function<BoundValue(const BoundQuery&)> eval;
};

// Immutable after first use; safe for concurrent lookups.
const std::vector<BoundSpec>& bound_registry();
const BoundSpec* find_bound(const std::string& id);
BoundValue evaluate_bound(const std::string& id, const BoundQuery& q);

// Heuristic: minimizes the parametric bound over a fixed gamma grid. No
// union-bound correction is applied, so the result is a search aid rather
// than a high-probability guarantee.
BoundValue catoni_grid_search(const BoundQuery& q, int grid_size = 2000);

// Feasibility constraint of the fast-rate supersample bound; the bound
// requires the returned value to be <= 0.
double cmi_fast_constraint(double gamma, double lambda);

}  // namespace genbound
