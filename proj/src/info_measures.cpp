#include "genbound/info_measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace genbound {

namespace {

constexpr double kProbSumTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_probs(const std::vector<double>& probs, const char* what) {
  if (probs.empty())
    throw std::invalid_argument(std::string(what) + ": empty support");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0))
      throw std::invalid_argument(std::string(what) + ": negative probability");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > kProbSumTol)
    throw std::invalid_argument(std::string(what) +
                                ": probabilities do not sum to 1");
}

void check_distinct(const std::vector<std::string>& labels, const char* what) {
  std::unordered_map<std::string, int> seen;
  for (const auto& l : labels)
    if (++seen[l] > 1)
      throw std::invalid_argument(std::string(what) + ": duplicate label '" + l +
                                  "'");
}

// Aligns q's probabilities to p's label order. The two supports must be
// identical as sets.
std::vector<double> align(const DiscreteDist& p, const DiscreteDist& q) {
  if (p.size() != q.size())
    throw AlignmentError("mismatched support sizes");
  std::unordered_map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < q.labels.size(); ++i) idx[q.labels[i]] = i;
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.labels.size(); ++i) {
    auto it = idx.find(p.labels[i]);
    if (it == idx.end())
      throw AlignmentError("label '" + p.labels[i] + "' missing from support");
    out[i] = q.probs[it->second];
  }
  return out;
}

}  // namespace

DiscreteDist::DiscreteDist(std::vector<std::string> l, std::vector<double> pr)
    : labels(std::move(l)), probs(std::move(pr)) {
  if (labels.size() != probs.size())
    throw std::invalid_argument("DiscreteDist: labels/probs length mismatch");
  check_distinct(labels, "DiscreteDist");
  check_probs(probs, "DiscreteDist");
}

DiscreteDist DiscreteDist::from_probs(std::vector<double> probs) {
  std::vector<std::string> labels(probs.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = std::to_string(i);
  return DiscreteDist(std::move(labels), std::move(probs));
}

JointDist::JointDist(std::vector<std::string> xl, std::vector<std::string> yl,
                     std::vector<double> pr)
    : x_labels(std::move(xl)), y_labels(std::move(yl)), probs(std::move(pr)) {
  if (x_labels.empty() || y_labels.empty())
    throw std::invalid_argument("JointDist: empty alphabet");
  if (probs.size() != x_labels.size() * y_labels.size())
    throw std::invalid_argument("JointDist: matrix shape mismatch");
  check_distinct(x_labels, "JointDist");
  check_distinct(y_labels, "JointDist");
  check_probs(probs, "JointDist");
}

JointDist JointDist::from_probs(std::size_t nx, std::size_t ny,
                                std::vector<double> probs) {
  std::vector<std::string> xl(nx), yl(ny);
  for (std::size_t i = 0; i < nx; ++i) xl[i] = "x" + std::to_string(i);
  for (std::size_t j = 0; j < ny; ++j) yl[j] = "y" + std::to_string(j);
  return JointDist(std::move(xl), std::move(yl), std::move(probs));
}

std::vector<double> JointDist::x_marginal() const {
  std::vector<double> m(x_labels.size(), 0.0);
  for (std::size_t i = 0; i < x_labels.size(); ++i)
    for (std::size_t j = 0; j < y_labels.size(); ++j) m[i] += at(i, j);
  return m;
}

std::vector<double> JointDist::y_marginal() const {
  std::vector<double> m(y_labels.size(), 0.0);
  for (std::size_t i = 0; i < x_labels.size(); ++i)
    for (std::size_t j = 0; j < y_labels.size(); ++j) m[j] += at(i, j);
  return m;
}

Nats kl(const DiscreteDist& p, const DiscreteDist& q) {
  std::vector<double> qa = align(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double pi = p.probs[i];
    if (pi == 0.0) continue;  // 0 ln(0/.) = 0
    if (qa[i] == 0.0) return kInf;
    sum += pi * std::log(pi / qa[i]);
  }
  return std::max(sum, 0.0);
}

Nats mutual_information(const JointDist& j) {
  std::vector<double> px = j.x_marginal();
  std::vector<double> py = j.y_marginal();
  double sum = 0.0;
  for (std::size_t x = 0; x < px.size(); ++x)
    for (std::size_t y = 0; y < py.size(); ++y) {
      double pxy = j.at(x, y);
      if (pxy > 0.0) sum += pxy * std::log(pxy / (px[x] * py[y]));
    }
  return std::max(sum, 0.0);
}

Nats binary_kl(double q, double p) {
  if (!(q >= 0.0 && q <= 1.0) || !(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("binary_kl: arguments must lie in [0,1]");
  double sum = 0.0;
  if (q > 0.0) {
    if (p == 0.0) return kInf;
    sum += q * std::log(q / p);
  }
  if (q < 1.0) {
    if (p == 1.0) return kInf;
    sum += (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
  }
  return std::max(sum, 0.0);
}

double binary_kl_gamma(double q, double p, double gamma) {
  if (!(q >= 0.0 && q <= 1.0) || !(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("binary_kl_gamma: arguments must lie in [0,1]");
  // gamma*q - ln(1 - p + p e^gamma), stable for large |gamma|
  double log_term;
  if (gamma > 0.0)
    log_term = gamma + std::log(p + (1.0 - p) * std::exp(-gamma));
  else
    log_term = std::log1p(p * std::expm1(gamma));
  return gamma * q - log_term;
}

double binary_kl_inverse_upper(double s, double c) {
  if (!(s >= 0.0 && s <= 1.0))
    throw std::invalid_argument("binary_kl_inverse_upper: s must lie in [0,1]");
  if (!(c >= 0.0))
    throw std::invalid_argument("binary_kl_inverse_upper: c must be >= 0");
  if (s >= 1.0 || std::isinf(c)) return 1.0;
  if (c == 0.0) return s;
  // binary_kl(s, .) is increasing on [s, 1] and diverges at 1 for s < 1.
  double lo = s, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= 1e-10) return lo;
    double mid = 0.5 * (lo + hi);
    if (binary_kl(s, mid) <= c)
      lo = mid;
    else
      hi = mid;
  }
  throw std::runtime_error("binary_kl_inverse_upper: iteration cap reached");
}

double binary_kl_inverse_relaxed(double s, double c) {
  if (!(s >= 0.0 && s <= 1.0))
    throw std::invalid_argument("binary_kl_inverse_relaxed: s must lie in [0,1]");
  if (!(c >= 0.0))
    throw std::invalid_argument("binary_kl_inverse_relaxed: c must be >= 0");
  return std::min(1.0, s + std::sqrt(2.0 * s * c) + 2.0 * c);
}

double total_variation(const DiscreteDist& p, const DiscreteDist& q) {
  std::vector<double> qa = align(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    sum += std::fabs(p.probs[i] - qa[i]);
  return 0.5 * sum;
}

double pinsker_bound(Nats klv) {
  if (!(klv >= 0.0)) throw std::invalid_argument("pinsker_bound: negative input");
  return std::sqrt(klv / 2.0);
}

double bh_bound(Nats klv) {
  if (!(klv >= 0.0)) throw std::invalid_argument("bh_bound: negative input");
  return std::sqrt(-std::expm1(-klv));
}

Nats renyi_divergence(const DiscreteDist& p, const DiscreteDist& q, double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0)
    throw std::invalid_argument("renyi_divergence: alpha must be positive and != 1");
  std::vector<double> qa = align(p, q);
  // sum_i p_i^alpha q_i^(1-alpha), in log space for stability
  double max_log = -kInf;
  std::vector<double> logs;
  logs.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    double pi = p.probs[i], qi = qa[i];
    if (pi == 0.0) continue;
    if (qi == 0.0) {
      if (alpha > 1.0) return kInf;  // absolute continuity fails
      continue;                      // alpha < 1: zero contribution
    }
    double l = alpha * std::log(pi) + (1.0 - alpha) * std::log(qi);
    logs.push_back(l);
    max_log = std::max(max_log, l);
  }
  if (logs.empty()) return kInf;  // disjoint supports
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - max_log);
  double log_total = max_log + std::log(sum);
  return std::max(log_total / (alpha - 1.0), 0.0);
}

Nats alpha_mutual_information(const JointDist& j, double alpha) {
  if (!(alpha > 1.0) || std::isinf(alpha))
    throw std::invalid_argument(
        "alpha_mutual_information: requires finite alpha > 1");
  std::vector<double> px = j.x_marginal();
  std::size_t ny = j.y_labels.size();
  // (alpha/(alpha-1)) ln sum_y ( sum_x P(x) P(y|x)^alpha )^(1/alpha)
  double outer = 0.0;
  for (std::size_t y = 0; y < ny; ++y) {
    double max_log = -kInf;
    std::vector<double> logs;
    for (std::size_t x = 0; x < px.size(); ++x) {
      if (px[x] == 0.0) continue;
      double cond = j.at(x, y) / px[x];
      if (cond == 0.0) continue;
      double l = std::log(px[x]) + alpha * std::log(cond);
      logs.push_back(l);
      max_log = std::max(max_log, l);
    }
    if (logs.empty()) continue;
    double s = 0.0;
    for (double l : logs) s += std::exp(l - max_log);
    outer += std::exp((max_log + std::log(s)) / alpha);
  }
  return std::max(alpha / (alpha - 1.0) * std::log(outer), 0.0);
}

Nats maximal_leakage(const JointDist& j) {
  std::vector<double> px = j.x_marginal();
  std::size_t ny = j.y_labels.size();
  double sum = 0.0;
  for (std::size_t y = 0; y < ny; ++y) {
    double best = 0.0;
    for (std::size_t x = 0; x < px.size(); ++x)
      if (px[x] > 0.0) best = std::max(best, j.at(x, y) / px[x]);
    sum += best;
  }
  return std::max(std::log(sum), 0.0);
}

namespace {

void check_conditional_family(const std::vector<double>& z_probs,
                              const std::vector<JointDist>& per_z) {
  if (per_z.empty() || z_probs.size() != per_z.size())
    throw std::invalid_argument("conditional measure: need one joint per z");
  check_probs(z_probs, "conditional measure");
  for (const auto& j : per_z)
    if (j.x_labels != per_z.front().x_labels ||
        j.y_labels != per_z.front().y_labels)
      throw AlignmentError("conditional measure: joints must share alphabets");
}

}  // namespace

Nats conditional_alpha_mutual_information(const std::vector<double>& z_probs,
                                          const std::vector<JointDist>& per_z,
                                          double alpha) {
  if (!(alpha > 1.0) || std::isinf(alpha))
    throw std::invalid_argument(
        "conditional_alpha_mutual_information: requires finite alpha > 1");
  check_conditional_family(z_probs, per_z);
  // (1/(alpha-1)) ln E_Z [ ( sum_y P(y|z) ( sum_x P(x|z) r^alpha )^(1/alpha) )^alpha ]
  // with r = P(x,y|z) / (P(x|z) P(y|z)); both powers taken in log space
  std::vector<double> term_logs;
  double term_max = -kInf;
  for (std::size_t z = 0; z < per_z.size(); ++z) {
    if (z_probs[z] == 0.0) continue;
    const JointDist& j = per_z[z];
    std::vector<double> px = j.x_marginal();
    std::vector<double> py = j.y_marginal();
    double mid = 0.0;
    for (std::size_t y = 0; y < py.size(); ++y) {
      if (py[y] == 0.0) continue;
      double max_log = -kInf;
      std::vector<double> logs;
      for (std::size_t x = 0; x < px.size(); ++x) {
        if (px[x] == 0.0 || j.at(x, y) == 0.0) continue;
        double r = j.at(x, y) / (px[x] * py[y]);
        double l = std::log(px[x]) + alpha * std::log(r);
        logs.push_back(l);
        max_log = std::max(max_log, l);
      }
      if (logs.empty()) continue;
      double s = 0.0;
      for (double l : logs) s += std::exp(l - max_log);
      mid += py[y] * std::exp((max_log + std::log(s)) / alpha);
    }
    if (mid == 0.0) continue;
    double l = std::log(z_probs[z]) + alpha * std::log(mid);
    term_logs.push_back(l);
    term_max = std::max(term_max, l);
  }
  if (term_logs.empty()) return 0.0;
  double sum = 0.0;
  for (double l : term_logs) sum += std::exp(l - term_max);
  return std::max((term_max + std::log(sum)) / (alpha - 1.0), 0.0);
}

Nats conditional_maximal_leakage(const std::vector<double>& z_probs,
                                 const std::vector<JointDist>& per_z) {
  check_conditional_family(z_probs, per_z);
  double best = 0.0;
  for (std::size_t z = 0; z < per_z.size(); ++z) {
    if (z_probs[z] == 0.0) continue;
    best = std::max(best, std::exp(maximal_leakage(per_z[z])));
  }
  return std::max(std::log(best), 0.0);
}

double wasserstein1_1d(std::vector<double> xs, std::vector<double> ys) {
  if (xs.empty() || ys.empty())
    throw std::invalid_argument("wasserstein1_1d: empty sample");
  if (xs.size() != ys.size())
    throw std::invalid_argument("wasserstein1_1d: samples must have equal size");
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) sum += std::fabs(xs[i] - ys[i]);
  return sum / static_cast<double>(xs.size());
}

double wasserstein1_discrete_metric(const DiscreteDist& p, const DiscreteDist& q) {
  return total_variation(p, q);
}

Nats symmetrized_kl(const DiscreteDist& p, const DiscreteDist& q) {
  return kl(p, q) + kl(q, p);
}

}  // namespace genbound
