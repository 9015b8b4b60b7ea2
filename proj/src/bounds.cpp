#include "genbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace genbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLn2 = std::log(2.0);

double req(const std::optional<double>& v, const char* name) {
  if (!v) throw MissingFieldError(name);
  return *v;
}

double req_param(const BoundQuery& q, const char* name) {
  auto it = q.params.find(name);
  if (it == q.params.end()) throw MissingFieldError(name);
  return it->second;
}

long long req_n(const BoundQuery& q, long long min_n = 1) {
  if (q.n < min_n)
    throw std::invalid_argument("n must be >= " + std::to_string(min_n));
  return q.n;
}

double req_delta(const BoundQuery& q) {
  double d = req(q.delta, "delta");
  if (!(d > 0.0 && d < 1.0))
    throw std::invalid_argument("delta must lie in (0,1)");
  return d;
}

double req_sigma(const BoundQuery& q) {
  double s = req(q.sigma, "sigma");
  if (!(s >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  return s;
}

double req_train(const BoundQuery& q) {
  double t = req(q.train_loss, "train_loss");
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("train_loss must lie in [0,1]");
  return t;
}

double req_info(const BoundQuery& q, bool allow_negative = false) {
  if (q.info.empty()) throw MissingFieldError("info");
  double v = q.info.front();
  if (!allow_negative && !(v >= 0.0))
    throw std::invalid_argument("info must be >= 0");
  return v;
}

const std::vector<double>& req_info_list(const BoundQuery& q) {
  if (q.info.empty()) throw MissingFieldError("info");
  if (static_cast<long long>(q.info.size()) != q.n)
    throw std::invalid_argument("info list length must equal n");
  for (double v : q.info)
    if (!(v >= 0.0)) throw std::invalid_argument("info entries must be >= 0");
  return q.info;
}

BoundValue finish(std::string id, double value, bool bounded_loss,
                  std::map<std::string, double> components = {}) {
  BoundValue out;
  out.name = std::move(id);
  out.value = value;
  // a bound of 1 on a [0,1] loss carries no information
  out.vacuous = std::isinf(value) || (bounded_loss && value >= 1.0);
  out.components = std::move(components);
  return out;
}

// ---------------------------------------------------------------------
// evaluators
// ---------------------------------------------------------------------

BoundValue eval_avg_mi(const BoundQuery& q) {
  long long n = req_n(q);
  double sigma = req_sigma(q);
  double info = req_info(q);
  return finish("avg_mi", std::sqrt(2.0 * sigma * sigma * info / n), false);
}

BoundValue eval_samplewise_mi(const BoundQuery& q) {
  long long n = req_n(q);
  double sigma = req_sigma(q);
  const auto& infos = req_info_list(q);
  double sum = 0.0;
  for (double v : infos) sum += std::sqrt(2.0 * sigma * sigma * v);
  return finish("samplewise_mi", sum / static_cast<double>(n), false);
}

BoundValue eval_binary_kl_avg(const BoundQuery& q) {
  long long n = req_n(q);
  double train = req_train(q);
  double budget = req_info(q) / static_cast<double>(n);
  double value = binary_kl_inverse_upper(train, budget);
  return finish("binary_kl_avg", value, true,
                {{"budget", budget},
                 {"relaxed", binary_kl_inverse_relaxed(train, budget)}});
}

BoundValue eval_pac_bayes_subgaussian(const BoundQuery& q) {
  long long n = req_n(q, 2);
  double sigma = req_sigma(q);
  double delta = req_delta(q);
  double train = req_train(q);
  double info = req_info(q);
  double penalty = std::sqrt(2.0 * sigma * sigma *
                             (info + std::log(std::sqrt((double)n) / delta)) /
                             (double)(n - 1));
  return finish("pac_bayes_subgaussian", train + penalty, true,
                {{"penalty", penalty}});
}

BoundValue eval_mls(const BoundQuery& q) {
  long long n = req_n(q);
  double delta = req_delta(q);
  double train = req_train(q);
  double info = req_info(q);
  double budget =
      (info + std::log(2.0 * std::sqrt((double)n) / delta)) / (2.0 * (double)n);
  return finish("mls", binary_kl_inverse_upper(train, budget), true,
                {{"budget", budget}});
}

BoundValue eval_catoni_parametric(const BoundQuery& q) {
  long long n = req_n(q);
  double delta = req_delta(q);
  double train = req_train(q);
  double gamma = req_param(q, "gamma");
  double budget = (req_info(q) + std::log(1.0 / delta)) / (double)n;
  std::map<std::string, double> comps{{"budget", budget}, {"infeasible", 0.0}};
  if (gamma >= 0.0) {
    // d_gamma is nonincreasing in the second argument here, so the
    // constraint admits the trivial solution 1.
    return finish("catoni_parametric", 1.0, true, std::move(comps));
  }
  // gamma < 0: d_gamma(train, .) is increasing, closed-form crossing point.
  if (budget < gamma * train) {
    comps["infeasible"] = 1.0;
    return finish("catoni_parametric", 1.0, true, std::move(comps));
  }
  double p = (1.0 - std::exp(gamma * train - budget)) / (1.0 - std::exp(gamma));
  p = std::clamp(p, train, 1.0);
  return finish("catoni_parametric", p, true, std::move(comps));
}

BoundValue eval_catoni_fast_rate(const BoundQuery& q) {
  long long n = req_n(q);
  double delta = req_delta(q);
  double train = req_train(q);
  double info = req_info(q);
  double lambda = req_param(q, "lambda");
  if (!(lambda > 1.0)) throw std::invalid_argument("lambda must be > 1");
  double value = lambda * train + lambda * (info + std::log(1.0 / delta)) /
                                      (2.0 * (double)n * (1.0 - 1.0 / lambda));
  return finish("catoni_fast_rate", value, true);
}

BoundValue eval_renyi_pacbayes(const BoundQuery& q) {
  double sigma = req_sigma(q);
  double delta = req_delta(q);
  double info = req_info(q);
  double alpha = req_param(q, "alpha");
  if (!(alpha > 1.0)) throw std::invalid_argument("alpha must be > 1");
  double m = req_param(q, "m");
  if (!(m >= 1.0)) throw std::invalid_argument("m must be >= 1");
  double value = std::sqrt(2.0 * sigma * sigma / m * std::log(2.0 / delta) *
                           std::pow(alpha * (alpha - 1.0) * info, 1.0 / alpha));
  return finish("renyi_pacbayes", value, false);
}

BoundValue eval_single_draw_subgaussian(const BoundQuery& q) {
  long long n = req_n(q, 2);
  double sigma = req_sigma(q);
  double delta = req_delta(q);
  double train = req_train(q);
  double info = req_info(q, /*allow_negative=*/true);
  double rad = 2.0 * sigma * sigma *
               (info + std::log(std::sqrt((double)n) / delta)) /
               (double)(n - 1);
  double penalty = std::sqrt(std::max(rad, 0.0));
  return finish("single_draw_subgaussian", train + penalty, true,
                {{"penalty", penalty}});
}

BoundValue eval_alpha_mi_single_draw(const BoundQuery& q) {
  long long n = req_n(q);
  double delta = req_delta(q);
  double info = req_info(q);
  double alpha = req_param(q, "alpha");
  double budget;
  if (std::isinf(alpha)) {
    budget = info + std::log(2.0 / delta);
  } else {
    if (!(alpha > 1.0)) throw std::invalid_argument("alpha must be > 1");
    budget = info + kLn2 + alpha / (alpha - 1.0) * std::log(1.0 / delta);
  }
  double scale = q.conditional ? 2.0 : 2.0 * req_sigma(q) * req_sigma(q);
  double value = std::sqrt(scale / (double)n * budget);
  BoundValue out =
      finish("alpha_mi_single_draw", value, q.conditional, {{"budget", budget}});
  return out;
}

BoundValue eval_cmi_slow(const BoundQuery& q) {
  long long n = req_n(q);
  double info = req_info(q);
  return finish("cmi_slow", std::sqrt(2.0 * info / (double)n), true);
}

BoundValue eval_cmi_fast(const BoundQuery& q) {
  long long n = req_n(q);
  double train = req_train(q);
  double info = req_info(q);
  double gamma = req_param(q, "gamma");
  double lambda = req_param(q, "lambda");
  if (!(gamma > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("gamma and lambda must be > 0");
  double c = cmi_fast_constraint(gamma, lambda);
  if (c > 0.0)
    throw InfeasibleError("cmi_fast: (gamma, lambda) violate the constraint", c);
  double value = gamma * train + info / (lambda * (double)n);
  return finish("cmi_fast", value, true, {{"constraint", c}});
}

BoundValue eval_cmi_interpolating(const BoundQuery& q) {
  long long n = req_n(q);
  double info = req_info(q);
  // absent train_loss is the caller asserting interpolation
  if (q.train_loss && *q.train_loss != 0.0)
    throw std::invalid_argument("cmi_interpolating requires train_loss = 0");
  return finish("cmi_interpolating", info / ((double)n * kLn2), true);
}

BoundValue eval_cmi_binary_kl(const BoundQuery& q) {
  long long n = req_n(q);
  double train = req_train(q);
  double budget = req_info(q) / (double)n;
  // largest pop in [train, 1] with binary_kl(train, (train+pop)/2) <= budget;
  // the left-hand side is increasing in pop.
  double value;
  if (binary_kl(train, 0.5 * (train + 1.0)) <= budget) {
    value = 1.0;
  } else {
    double lo = train, hi = 1.0;
    for (int it = 0;; ++it) {
      if (it >= 200)
        throw std::runtime_error("cmi_binary_kl: iteration cap reached");
      if (hi - lo <= 1e-10) break;
      double mid = 0.5 * (lo + hi);
      if (binary_kl(train, 0.5 * (train + mid)) <= budget)
        lo = mid;
      else
        hi = mid;
    }
    value = lo;
  }
  return finish("cmi_binary_kl", value, true, {{"budget", budget}});
}

BoundValue eval_loo_cmi(const BoundQuery& q) {
  long long n = req_n(q);
  double info = req_info(q);
  double value =
      (double)(n + 1) / (double)n * std::sqrt(info / 2.0);
  return finish("loo_cmi", value, true);
}

BoundValue eval_samplewise_cmi(const BoundQuery& q) {
  long long n = req_n(q);
  const auto& infos = req_info_list(q);
  double sum = 0.0;
  for (double v : infos) sum += std::sqrt(2.0 * v / (double)n);
  return finish("samplewise_cmi", sum / (double)n, true);
}

BoundValue eval_samplewise_cmi_factorless(const BoundQuery& q) {
  long long n = req_n(q);
  const auto& infos = req_info_list(q);
  double sum = 0.0;
  for (double v : infos) sum += std::sqrt(v / (double)n);
  return finish("samplewise_cmi_factorless", sum / (double)n, true);
}

BoundValue eval_interp_identity_ldmi(const BoundQuery& q) {
  long long n = req_n(q);
  const auto& infos = req_info_list(q);
  double sum = 0.0;
  for (double v : infos) {
    if (v > kLn2 + 1e-12)
      throw std::invalid_argument(
          "interp_identity_ldmi: per-sample information exceeds ln 2");
    sum += v;
  }
  return finish("interp_identity_ldmi", sum / ((double)n * kLn2), true);
}

BoundValue eval_interp_identity_loo(const BoundQuery& q) {
  long long n = req_n(q);
  double info = req_info(q);
  double cap = std::log((double)n + 1.0);
  if (info > cap + 1e-12)
    throw std::invalid_argument(
        "interp_identity_loo: information exceeds ln(n+1)");
  return finish("interp_identity_loo", info / cap, true);
}

BoundValue eval_wasserstein_gap(const BoundQuery& q) {
  double L = req_param(q, "L");
  if (!(L >= 0.0)) throw std::invalid_argument("L must be >= 0");
  if (q.info.empty()) throw MissingFieldError("info");
  if (q.info.size() == 1)
    return finish("wasserstein_gap", L * req_info(q), false);
  const auto& infos = req_info_list(q);
  double sum = 0.0;
  for (double v : infos) sum += v;
  return finish("wasserstein_gap", L * sum / (double)q.n, false);
}

BoundValue eval_tv_gap(const BoundQuery& q) {
  double sigma_beta = req_param(q, "sigma_beta");
  if (!(sigma_beta >= 0.0))
    throw std::invalid_argument("sigma_beta must be >= 0");
  double alpha = req_param(q, "alpha");
  if (!(alpha >= 1.0)) throw std::invalid_argument("alpha must be >= 1");
  double info = req_info(q);
  return finish("tv_gap", sigma_beta * std::pow(info, 1.0 / alpha), false);
}

BoundValue eval_pjl_iterative(const BoundQuery& q) {
  long long n = req_n(q);
  double sigma = req_sigma(q);
  double L = req_param(q, "L");
  if (!(L >= 0.0)) throw std::invalid_argument("L must be >= 0");
  if (q.eta.empty()) throw MissingFieldError("eta");
  if (q.rho2.size() != q.eta.size())
    throw std::invalid_argument("eta and rho2 schedules must have equal length");
  auto d_it = q.params.find("d");
  double d = d_it == q.params.end() ? 0.0 : d_it->second;
  if (d_it != q.params.end() && !(d >= 1.0))
    throw std::invalid_argument("d must be >= 1");

  double ratio_sum = 0.0;   // sum_t eta^2 L^2 / rho^2
  double log_sum = 0.0;     // sum_t (d/2) ln(1 + eta^2 L^2 / (d rho^2))
  for (std::size_t t = 0; t < q.eta.size(); ++t) {
    double num = q.eta[t] * q.eta[t] * L * L;
    if (q.rho2[t] <= 0.0) {
      if (num == 0.0) continue;  // a step with no update carries no information
      throw std::invalid_argument("pjl_iterative: zero noise at an active step");
    }
    ratio_sum += num / q.rho2[t];
    if (d > 0.0) log_sum += 0.5 * d * std::log1p(num / (d * q.rho2[t]));
  }
  std::map<std::string, double> comps{{"info_quad", 0.5 * ratio_sum}};
  if (d > 0.0) comps["info_log"] = log_sum;
  double value = std::sqrt(sigma * sigma / (double)n * ratio_sum);
  return finish("pjl_iterative", value, false, std::move(comps));
}

BoundValue eval_vc_fcmi_cap(const BoundQuery& q) {
  long long n = req_n(q);
  double d = req_param(q, "d_vc");
  if (!(d >= 1.0)) throw std::invalid_argument("d_vc must be >= 1");
  if (!((double)n > d)) throw std::invalid_argument("requires n > d_vc");
  double value = d * std::log(2.0 * std::exp(1.0) * (double)n / d);
  return finish("vc_fcmi_cap", value, false);
}

BoundValue eval_compression_cmi_cap(const BoundQuery& q) {
  long long n = req_n(q);
  double k = req_param(q, "k");
  if (!(k >= 1.0)) throw std::invalid_argument("k must be >= 1");
  if (!((double)n >= k)) throw std::invalid_argument("requires n >= k");
  return finish("compression_cmi_cap", k * std::log(2.0 * (double)n), false);
}

BoundValue eval_sauer_shelah(const BoundQuery& q) {
  double m = req_param(q, "m");
  double d = req_param(q, "d_vc");
  if (!(m >= 0.0) || !(d >= 0.0))
    throw std::invalid_argument("m and d_vc must be >= 0");
  if (m != std::floor(m) || d != std::floor(d))
    throw std::invalid_argument("m and d_vc must be integers");
  long long mi = (long long)m, di = (long long)d;
  long long top = std::min(mi, di);
  double total = 1.0, binom = 1.0;  // C(m, 0) = 1
  for (long long i = 1; i <= top; ++i) {
    binom *= (double)(mi - i + 1) / (double)i;
    total += binom;
  }
  std::map<std::string, double> comps;
  if (mi < di + 1)
    comps["cap"] = std::pow(2.0, (double)(di + 1));
  else
    comps["cap"] = di == 0
                       ? 1.0
                       : std::pow(std::exp(1.0) * (double)mi / (double)di,
                                  (double)di);
  return finish("sauer_shelah", total, false, std::move(comps));
}

std::vector<BoundSpec> build_registry() {
  std::vector<BoundSpec> r;
  auto add = [&r](std::string id, std::string summary,
                  std::vector<std::string> required, bool bounded,
                  BoundValue (*fn)(const BoundQuery&)) {
    r.push_back({std::move(id), std::move(summary), std::move(required), bounded,
                 fn});
  };
  add("avg_mi", "gap <= sqrt(2 sigma^2 info / n)", {"n", "sigma", "info"}, false,
      eval_avg_mi);
  add("samplewise_mi", "gap <= (1/n) sum_i sqrt(2 sigma^2 info_i)",
      {"n", "sigma", "info[n]"}, false, eval_samplewise_mi);
  add("binary_kl_avg", "pop <= klinv(train, info/n)", {"n", "train", "info"},
      true, eval_binary_kl_avg);
  add("pac_bayes_subgaussian",
      "pop <= train + sqrt(2 sigma^2 (info + ln(sqrt(n)/delta)) / (n-1))",
      {"n>=2", "sigma", "delta", "train", "info"}, true,
      eval_pac_bayes_subgaussian);
  add("mls", "pop <= klinv(train, (info + ln(2 sqrt(n)/delta)) / (2n))",
      {"n", "delta", "train", "info"}, true, eval_mls);
  add("catoni_parametric",
      "largest p with d_gamma(train, p) <= (info + ln(1/delta)) / n",
      {"n", "delta", "train", "info", "gamma"}, true, eval_catoni_parametric);
  add("catoni_fast_rate",
      "pop <= lambda train + lambda (info + ln(1/delta)) / (2n (1 - 1/lambda))",
      {"n", "delta", "train", "info", "lambda>1"}, true, eval_catoni_fast_rate);
  add("renyi_pacbayes",
      "gap <= sqrt((2 sigma^2/m) ln(2/delta) (alpha (alpha-1) info)^(1/alpha))",
      {"sigma", "delta", "info", "alpha>1", "m"}, false, eval_renyi_pacbayes);
  add("single_draw_subgaussian",
      "pop <= train + sqrt(2 sigma^2 (info + ln(sqrt(n)/delta)) / (n-1)), "
      "signed info",
      {"n>=2", "sigma", "delta", "train", "info (signed)"}, true,
      eval_single_draw_subgaussian);
  add("alpha_mi_single_draw",
      "gap <= sqrt((2 sigma^2/n)(info + ln 2 + alpha/(alpha-1) ln(1/delta))); "
      "--conditional swaps in the supersample constants",
      {"n", "delta", "info", "alpha>1 or inf", "sigma (unconditional)"}, false,
      eval_alpha_mi_single_draw);
  add("cmi_slow", "gap <= sqrt(2 info / n)", {"n", "info"}, true, eval_cmi_slow);
  add("cmi_fast",
      "pop <= gamma train + info/(lambda n), requires "
      "lambda(1-gamma)+(e^lambda-1-lambda)(1+gamma^2) <= 0",
      {"n", "train", "info", "gamma>0", "lambda>0"}, true, eval_cmi_fast);
  add("cmi_interpolating", "pop <= info / (n ln 2), zero train loss",
      {"n", "info", "train=0"}, true, eval_cmi_interpolating);
  add("cmi_binary_kl",
      "largest pop with binary_kl(train, (train+pop)/2) <= info/n",
      {"n", "train", "info"}, true, eval_cmi_binary_kl);
  add("loo_cmi", "gap <= ((n+1)/n) sqrt(info / 2)", {"n", "info"}, true,
      eval_loo_cmi);
  add("interp_identity_ldmi",
      "pop = (1/n) sum_i info_i / ln 2 (interpolating, binary loss)",
      {"n", "info[n] <= ln 2"}, true, eval_interp_identity_ldmi);
  add("interp_identity_loo",
      "pop = info / ln(n+1) (interpolating, binary loss)",
      {"n", "info <= ln(n+1)"}, true, eval_interp_identity_loo);
  add("wasserstein_gap", "gap <= L info (scalar) or (L/n) sum_i info_i (list)",
      {"L", "info", "n (list form)"}, false, eval_wasserstein_gap);
  add("tv_gap", "gap <= sigma_beta info^(1/alpha)",
      {"sigma_beta", "alpha>=1", "info"}, false, eval_tv_gap);
  add("pjl_iterative", "gap <= sqrt((sigma^2/n) sum_t eta_t^2 L^2 / rho_t^2)",
      {"n", "sigma", "L", "eta[]", "rho2[]", "d (optional)"}, false,
      eval_pjl_iterative);
  add("vc_fcmi_cap", "information cap d_vc ln(2 e n / d_vc)", {"n>d_vc", "d_vc"},
      false, eval_vc_fcmi_cap);
  add("compression_cmi_cap", "information cap k ln(2n)", {"n>=k", "k"}, false,
      eval_compression_cmi_cap);
  add("sauer_shelah", "growth-function value sum_{i<=d_vc} C(m, i)",
      {"m", "d_vc"}, false, eval_sauer_shelah);
  add("samplewise_cmi", "gap <= (1/n) sum_i sqrt(2 info_i / n)",
      {"n", "info[n]"}, true, eval_samplewise_cmi);
  add("samplewise_cmi_factorless", "gap <= (1/n) sum_i sqrt(info_i / n)",
      {"n", "info[n]"}, true, eval_samplewise_cmi_factorless);
  return r;
}

}  // namespace

double BoundQuery::info_scalar() const {
  if (info.empty()) throw MissingFieldError("info");
  return info.front();
}

std::optional<double> BoundQuery::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

double cmi_fast_constraint(double gamma, double lambda) {
  return lambda * (1.0 - gamma) +
         (std::exp(lambda) - 1.0 - lambda) * (1.0 + gamma * gamma);
}

const std::vector<BoundSpec>& bound_registry() {
  static const std::vector<BoundSpec> registry = build_registry();
  return registry;
}

const BoundSpec* find_bound(const std::string& id) {
  for (const auto& spec : bound_registry())
    if (spec.id == id) return &spec;
  return nullptr;
}

BoundValue evaluate_bound(const std::string& id, const BoundQuery& q) {
  const BoundSpec* spec = find_bound(id);
  if (!spec) throw std::invalid_argument("unknown bound id: " + id);
  return spec->eval(q);
}

BoundValue catoni_grid_search(const BoundQuery& q, int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
  BoundQuery probe = q;
  BoundValue best;
  best.value = kInf;
  for (int i = 1; i <= grid_size; ++i) {
    double gamma = -8.0 * (double)i / (double)grid_size;
    probe.params["gamma"] = gamma;
    BoundValue v = eval_catoni_parametric(probe);
    if (v.value < best.value) {
      best = v;
      best.components["gamma_star"] = gamma;
    }
  }
  best.name = "catoni_grid_search";
  return best;
}

}  // namespace genbound
