#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace genbound {

// All divergences are reported in natural-log units. Infinity is a valid
// divergence value (absolute continuity failure), not an error.
using Nats = double;

struct AlignmentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Finite distribution over distinct opaque labels. Probabilities must be
// nonnegative and sum to 1 within 1e-12; out-of-tolerance inputs are
// rejected rather than renormalized.
struct DiscreteDist {
  std::vector<std::string> labels;
  std::vector<double> probs;

  DiscreteDist(std::vector<std::string> labels, std::vector<double> probs);

  // Labels "0", "1", ... in order.
  static DiscreteDist from_probs(std::vector<double> probs);

  std::size_t size() const { return probs.size(); }
};

// Joint distribution over a finite product alphabet, row-major |X| x |Y|.
struct JointDist {
  std::vector<std::string> x_labels;
  std::vector<std::string> y_labels;
  std::vector<double> probs;

  JointDist(std::vector<std::string> x_labels, std::vector<std::string> y_labels,
            std::vector<double> probs);

  static JointDist from_probs(std::size_t nx, std::size_t ny,
                              std::vector<double> probs);

  double at(std::size_t i, std::size_t j) const {
    return probs[i * y_labels.size() + j];
  }
  std::vector<double> x_marginal() const;
  std::vector<double> y_marginal() const;
};

Nats kl(const DiscreteDist& p, const DiscreteDist& q);
Nats mutual_information(const JointDist& j);

Nats binary_kl(double q, double p);
double binary_kl_gamma(double q, double p, double gamma);

// sup{ mu in [0,1] : binary_kl(s, mu) <= c }, bisection on [s, 1] to
// absolute tolerance 1e-10.
double binary_kl_inverse_upper(double s, double c);
// min(1, s + sqrt(2*s*c) + 2*c); always >= binary_kl_inverse_upper(s, c).
double binary_kl_inverse_relaxed(double s, double c);

double total_variation(const DiscreteDist& p, const DiscreteDist& q);
double pinsker_bound(Nats klv);
double bh_bound(Nats klv);

Nats renyi_divergence(const DiscreteDist& p, const DiscreteDist& q, double alpha);

// Order-alpha mutual information for alpha > 1, oriented so that the
// alpha -> infinity limit is maximal_leakage(j); nondecreasing in alpha and
// lower-bounded by mutual_information(j).
Nats alpha_mutual_information(const JointDist& j, double alpha);

// ln sum_y max_{x : P_X(x) > 0} P_{Y|X}(y|x).
Nats maximal_leakage(const JointDist& j);

// Conditional variants: a distribution over z together with one joint per z
// (shared x/y alphabets). Same orientation convention as the unconditional
// functions.
Nats conditional_alpha_mutual_information(const std::vector<double>& z_probs,
                                          const std::vector<JointDist>& per_z,
                                          double alpha);
Nats conditional_maximal_leakage(const std::vector<double>& z_probs,
                                 const std::vector<JointDist>& per_z);

// Exact W1 between two equal-size empirical measures on the line: average
// absolute difference of order statistics.
double wasserstein1_1d(std::vector<double> xs, std::vector<double> ys);
// Under the discrete metric, W1 coincides with total variation.
double wasserstein1_discrete_metric(const DiscreteDist& p, const DiscreteDist& q);

Nats symmetrized_kl(const DiscreteDist& p, const DiscreteDist& q);

}  // namespace genbound
