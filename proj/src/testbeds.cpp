#include "genbound/testbeds.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "genbound/format.hpp"

namespace genbound {

namespace {

using json = nlohmann::ordered_json;

const double kLn2 = std::log(2.0);

double mean_by_index(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double mean_over(const std::vector<double>& v, std::span<const int> idx) {
  double sum = 0.0;
  for (int t : idx) sum += v[t];
  return sum / static_cast<double>(idx.size());
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

BoundRow row_from(const BoundValue& v, std::string source, double info_value) {
  return BoundRow{v.name, std::move(source), info_value, v.value, v.vacuous};
}

}  // namespace

// ---------------------------------------------------------------------
// report plumbing
// ---------------------------------------------------------------------

double TestbedReport::oracle(const std::string& name) const {
  for (const auto& [k, v] : oracles)
    if (k == name) return v;
  throw std::invalid_argument("report has no oracle value '" + name + "'");
}

Interval TestbedReport::interval(const std::string& name) const {
  for (const auto& [k, v] : intervals)
    if (k == name) return v;
  throw std::invalid_argument("report has no interval '" + name + "'");
}

json TestbedReport::to_json() const {
  json j;
  j["testbed"] = testbed;
  j["n"] = n;
  j["seed"] = seed;
  j["m_trials"] = m_trials;
  j["ci_level"] = ci_level;
  j["empirical_gap"] = empirical_gap;
  j["gap_ci"] = {{"lo", gap_ci.lo}, {"hi", gap_ci.hi}};
  json oj;
  for (const auto& [k, v] : oracles) oj[k] = v;
  j["oracles"] = oj;
  json ij;
  for (const auto& [k, v] : intervals) ij[k] = json{{"lo", v.lo}, {"hi", v.hi}};
  j["intervals"] = ij;
  json bj = json::array();
  for (const auto& b : bounds)
    bj.push_back(json{{"bound_id", b.bound_id},
                      {"info_source", b.info_source},
                      {"info_value", b.info_value},
                      {"bound_value", b.bound_value},
                      {"vacuous", b.vacuous}});
  j["bounds"] = bj;
  j["config"] = config_echo;
  return j;
}

void TestbedReport::write_csv(std::ostream& os) const {
  os << "# genbound-csv v1\n";
  os << "testbed,n,seed,bound_id,info_source,info_value,bound_value,vacuous,"
        "empirical_gap,ci_lo,ci_hi\n";
  for (const auto& b : bounds) {
    os << testbed << ',' << n << ',' << seed << ',' << b.bound_id << ','
       << b.info_source << ',' << format_fixed9(b.info_value) << ','
       << format_fixed9(b.bound_value) << ',' << (b.vacuous ? 1 : 0) << ','
       << format_fixed9(empirical_gap) << ',' << format_fixed9(gap_ci.lo) << ','
       << format_fixed9(gap_ci.hi) << '\n';
  }
}

// ---------------------------------------------------------------------
// Gaussian location model
// ---------------------------------------------------------------------

TestbedReport glm_run(const GLMConfig& cfg, const RunOptions& opt) {
  if (!(cfg.sigma2 > 0.0)) throw std::invalid_argument("glm: sigma2 must be > 0");
  if (cfg.n < 2) throw std::invalid_argument("glm: n must be >= 2");
  if (cfg.m_trials < 1) throw std::invalid_argument("glm: m_trials must be >= 1");
  Timer timer;

  int n = cfg.n, m = cfg.m_trials;
  double sd = std::sqrt(cfg.sigma2);
  std::vector<double> gaps(m);
  detail::for_each_trial(m, opt.mode, [&](int t) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(t), 0);
    double sum = 0.0, sumsq = 0.0;
    for (int j = 0; j < n; ++j) {
      double z = rng.normal(cfg.mu, sd);
      sum += z;
      sumsq += z * z;
    }
    double w = sum / n;
    double pop = (w - cfg.mu) * (w - cfg.mu) + cfg.sigma2;
    double train = sumsq / n - w * w;
    gaps[t] = pop - train;
  });

  double mc_gap = mean_by_index(gaps);
  Interval ci = bootstrap_ci(
      [&gaps](std::span<const int> idx) { return mean_over(gaps, idx); }, m,
      opt.resamples, opt.ci_level, cfg.seed);

  double exact_gap = 2.0 * cfg.sigma2 / n;
  double mi_per_sample = 0.5 * std::log((double)n / (double)(n - 1));
  double cmi = (double)n * kLn2;
  double samplewise_bound = sd * std::sqrt(std::log((double)n / (double)(n - 1)));
  double samplewise_relaxed = sd * std::sqrt(1.0 / (double)(n - 1));

  // closed forms recomputed along an independent algebraic route
  if (std::fabs(mi_per_sample - 0.5 * std::log1p(1.0 / (double)(n - 1))) > 1e-12)
    throw IdentityViolation("glm: per-sample information identity failed");
  if (std::fabs(cmi - (double)n / std::log2(std::exp(1.0))) > 1e-12)
    throw IdentityViolation("glm: supersample information identity failed");

  TestbedReport report;
  report.testbed = "glm";
  report.n = n;
  report.seed = cfg.seed;
  report.m_trials = m;
  report.ci_level = opt.ci_level;
  report.empirical_gap = mc_gap;
  report.gap_ci = ci;
  report.oracles = {{"exact_gap", exact_gap},
                    {"mi_per_sample", mi_per_sample},
                    {"cmi", cmi},
                    {"samplewise_bound", samplewise_bound},
                    {"samplewise_bound_relaxed", samplewise_relaxed},
                    {"mc_gap", mc_gap}};
  report.intervals = {{"gap", ci}};

  BoundQuery sw;
  sw.n = n;
  sw.sigma = sd;  // squared loss; sub-Gaussian parameter taken as given
  sw.info.assign(n, mi_per_sample);
  report.bounds.push_back(row_from(evaluate_bound("samplewise_mi", sw),
                                   "closed_form (sub-gaussianity external)",
                                   (double)n * mi_per_sample));
  BoundQuery cs;
  cs.n = n;
  cs.info = {cmi};
  report.bounds.push_back(
      row_from(evaluate_bound("cmi_slow", cs), "closed_form", cmi));

  report.config_echo = json{{"testbed", "glm"},     {"mu", cfg.mu},
                            {"sigma2", cfg.sigma2}, {"n", cfg.n},
                            {"m_trials", cfg.m_trials}, {"seed", cfg.seed}};
  report.runtime_seconds = timer.seconds();
  return report;
}

// ---------------------------------------------------------------------
// Gibbs posterior, exact enumeration
// ---------------------------------------------------------------------

TestbedReport gibbs_run(const GibbsProblem& problem, const RunOptions& opt) {
  std::size_t nw = problem.w_labels.size(), nz = problem.z_labels.size();
  if (nw < 1 || nw > 8 || nz < 1 || nz > 8)
    throw std::invalid_argument("gibbs: alphabets must have size 1..8");
  if (problem.loss_table.size() != nw * nz)
    throw std::invalid_argument("gibbs: loss table shape mismatch");
  for (double l : problem.loss_table)
    if (!(l >= 0.0)) throw std::invalid_argument("gibbs: losses must be >= 0");
  if (!(problem.lambda >= 0.0))
    throw std::invalid_argument("gibbs: lambda must be >= 0");
  if (problem.n < 1 || problem.n > 6)
    throw std::invalid_argument("gibbs: n must be 1..6");
  DiscreteDist prior(problem.w_labels, problem.prior);
  DiscreteDist data(problem.z_labels, problem.data);
  double datasets = std::pow((double)nz, (double)problem.n);
  if (datasets > 3e5) throw std::invalid_argument("gibbs: enumeration budget exceeded");
  Timer timer;

  int n = problem.n;
  std::size_t num_sets = (std::size_t)std::llround(datasets);
  double lambda = problem.lambda;

  std::vector<double> pop(nw, 0.0);
  for (std::size_t w = 0; w < nw; ++w)
    for (std::size_t z = 0; z < nz; ++z)
      pop[w] += data.probs[z] * problem.loss(w, z);

  std::vector<double> weight(num_sets), psi(num_sets);
  std::vector<std::vector<double>> post(num_sets), train(num_sets);
  std::vector<double> marginal(nw, 0.0);
  std::vector<int> digits(n, 0);
  for (std::size_t s = 0; s < num_sets; ++s) {
    double wgt = 1.0;
    for (int j = 0; j < n; ++j) wgt *= data.probs[digits[j]];
    weight[s] = wgt;

    std::vector<double>& tr = train[s];
    tr.assign(nw, 0.0);
    for (std::size_t w = 0; w < nw; ++w) {
      for (int j = 0; j < n; ++j) tr[w] += problem.loss(w, digits[j]);
      tr[w] /= n;
    }
    // Gibbs weights: prior * exp(-lambda * train), normalized; psi is the
    // log normalizer
    std::vector<double>& po = post[s];
    po.assign(nw, 0.0);
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < nw; ++w) {
      if (prior.probs[w] == 0.0) continue;
      double lg = std::log(prior.probs[w]) - lambda * tr[w];
      po[w] = lg;
      max_log = std::max(max_log, lg);
    }
    double norm = 0.0;
    for (std::size_t w = 0; w < nw; ++w)
      if (prior.probs[w] > 0.0) norm += std::exp(po[w] - max_log);
    psi[s] = max_log + std::log(norm);
    for (std::size_t w = 0; w < nw; ++w)
      po[w] = prior.probs[w] > 0.0 ? std::exp(po[w] - psi[s]) : 0.0;
    for (std::size_t w = 0; w < nw; ++w) marginal[w] += wgt * po[w];

    for (int j = n - 1; j >= 0; --j) {
      if (++digits[j] < (int)nz) break;
      digits[j] = 0;
    }
  }

  double gap = 0.0, train_mean = 0.0, i_skl = 0.0, mi = 0.0, psi_mean = 0.0;
  for (std::size_t s = 0; s < num_sets; ++s) {
    double fwd = 0.0, rev = 0.0;
    for (std::size_t w = 0; w < nw; ++w) {
      gap += weight[s] * post[s][w] * (pop[w] - train[s][w]);
      train_mean += weight[s] * post[s][w] * train[s][w];
      if (prior.probs[w] > 0.0 && post[s][w] > 0.0 && marginal[w] > 0.0) {
        fwd += post[s][w] * std::log(post[s][w] / marginal[w]);
        rev += marginal[w] * std::log(marginal[w] / post[s][w]);
      }
    }
    i_skl += weight[s] * (fwd + rev);
    mi += weight[s] * fwd;
    psi_mean += weight[s] * psi[s];
  }

  double residual = std::fabs(lambda * gap - i_skl);
  if (lambda > 0.0) {
    if (residual > 1e-9)
      throw IdentityViolation("gibbs: lambda * gap != symmetrized information");
  } else {
    if (std::fabs(gap) > 1e-12 || std::fabs(i_skl) > 1e-12)
      throw IdentityViolation("gibbs: lambda = 0 must yield zero gap");
  }

  // minimizer spot-check: the Gibbs posterior attains -psi/lambda on the
  // penalized objective and no sampled posterior does better
  double psi_residual = 0.0, lemma_margin = std::numeric_limits<double>::infinity();
  if (lambda > 0.0) {
    std::vector<std::vector<double>> rivals(32);
    for (int r = 0; r < 32; ++r) {
      CounterRng rng(problem.seed, (std::uint64_t)r, 3);
      std::vector<double>& q = rivals[r];
      q.assign(nw, 0.0);
      double norm = 0.0;
      for (std::size_t w = 0; w < nw; ++w) {
        if (prior.probs[w] == 0.0) continue;
        q[w] = -std::log(1.0 - rng.uniform01());
        norm += q[w];
      }
      for (double& v : q) v /= norm;
    }
    auto objective = [&](const std::vector<double>& q, std::size_t s) {
      double obj = 0.0;
      for (std::size_t w = 0; w < nw; ++w) {
        if (q[w] == 0.0) continue;
        obj += q[w] * train[s][w] + q[w] * std::log(q[w] / prior.probs[w]) / lambda;
      }
      return obj;
    };
    for (std::size_t s = 0; s < num_sets; ++s) {
      double gibbs_obj = objective(post[s], s);
      psi_residual = std::max(psi_residual, std::fabs(gibbs_obj + psi[s] / lambda));
      for (const auto& q : rivals)
        lemma_margin = std::min(lemma_margin, objective(q, s) - gibbs_obj);
    }
    if (psi_residual > 1e-9 || lemma_margin < -1e-9)
      throw IdentityViolation("gibbs: posterior is not the penalized minimizer");
  } else {
    lemma_margin = 0.0;
  }

  TestbedReport report;
  report.testbed = "gibbs";
  report.n = n;
  report.seed = problem.seed;
  report.m_trials = (int)num_sets;  // exact enumeration, no sampling
  report.ci_level = opt.ci_level;
  report.empirical_gap = gap;
  report.gap_ci = Interval{gap, gap};
  report.oracles = {{"exact_gap", gap},
                    {"i_skl", i_skl},
                    {"identity_residual", residual},
                    {"mutual_information", mi},
                    {"train_loss", train_mean},
                    {"log_partition_mean", psi_mean},
                    {"psi_residual", psi_residual},
                    {"lemma_margin", lemma_margin}};
  report.intervals = {{"gap", report.gap_ci}};

  bool bounded = std::all_of(problem.loss_table.begin(), problem.loss_table.end(),
                             [](double l) { return l <= 1.0; });
  if (bounded) {
    BoundQuery q;
    q.n = n;
    q.sigma = 0.5;
    q.info = {mi};
    report.bounds.push_back(
        row_from(evaluate_bound("avg_mi", q), "closed_form", mi));
    BoundQuery bk;
    bk.n = n;
    bk.train_loss = train_mean;
    bk.info = {mi};
    report.bounds.push_back(
        row_from(evaluate_bound("binary_kl_avg", bk), "closed_form", mi));
  }

  report.config_echo = json{{"testbed", "gibbs"},
                            {"w_labels", problem.w_labels},
                            {"z_labels", problem.z_labels},
                            {"loss_table", problem.loss_table},
                            {"prior", problem.prior},
                            {"data", problem.data},
                            {"lambda", problem.lambda},
                            {"n", problem.n},
                            {"seed", problem.seed}};
  report.runtime_seconds = timer.seconds();
  return report;
}

// ---------------------------------------------------------------------
// threshold classifiers on the unit interval
// ---------------------------------------------------------------------

namespace {

struct ThresholdSource {
  double theta;
  int bins;

  struct Point {
    double x;
    std::int8_t y;
  };
  using Model = double;  // learned threshold; >1 means "no positive sample"

  Point sample(CounterRng& rng) const {
    double x = rng.uniform01();
    return Point{x, static_cast<std::int8_t>(x >= theta ? 1 : 0)};
  }
  Model fit(const std::vector<Point>& train) const {
    double w = 2.0;
    for (const Point& pt : train)
      if (pt.y == 1) w = std::min(w, pt.x);
    return w;
  }
  double loss(const Model& w, const Point& pt) const {
    int pred = pt.x >= w ? 1 : 0;
    return pred == pt.y ? 0.0 : 1.0;
  }
  std::int32_t predict(const Model& w, const Point& pt) const {
    return pt.x >= w ? 1 : 0;
  }
  std::int32_t data_key(const Point& pt) const {
    int b = std::min(static_cast<int>(pt.x * bins), bins - 1);
    return static_cast<std::int32_t>(b * 2 + pt.y);
  }
  double trial_stat(const Model& w) const {
    // exact population loss of the learned threshold under uniform features
    return w <= 1.0 ? std::fabs(w - theta) : 1.0 - theta;
  }
  int loss_levels() const { return 2; }
};

}  // namespace

TestbedReport threshold_run(const ThresholdConfig& cfg, const RunOptions& opt) {
  if (!(cfg.theta_star > 0.0 && cfg.theta_star < 1.0))
    throw std::invalid_argument("threshold: theta_star must lie in (0,1)");
  if (cfg.n < 2) throw std::invalid_argument("threshold: n must be >= 2");
  if (cfg.m_trials < 1)
    throw std::invalid_argument("threshold: m_trials must be >= 1");
  if (cfg.cond_bins < 1)
    throw std::invalid_argument("threshold: cond_bins must be >= 1");
  Timer timer;

  ThresholdSource source{cfg.theta_star, cfg.cond_bins};
  SupersampleBatch batch =
      run_supersample_trials(source, cfg.n, cfg.m_trials, cfg.seed, opt.mode);

  std::vector<double> pops(cfg.m_trials);
  for (int t = 0; t < cfg.m_trials; ++t) pops[t] = batch.trials[t].stat;
  double gap = mean_by_index(pops);  // training loss is 0 by realizability
  Interval gap_ci = bootstrap_ci(
      [&pops](std::span<const int> idx) { return mean_over(pops, idx); },
      cfg.m_trials, opt.resamples, opt.ci_level, cfg.seed);

  PerSampleMiStat ldmi_stat(batch, PerSampleMiStat::Kind::ldmi,
                            Conditioning::none);
  PerSampleMiStat emi_stat(batch, PerSampleMiStat::Kind::ecmi,
                           Conditioning::none);
  PerSampleMiStat ecmi_stat(batch, PerSampleMiStat::Kind::ecmi,
                            Conditioning::per_pair);
  PerSampleMiStat fcmi_stat(batch, PerSampleMiStat::Kind::fcmi,
                            Conditioning::per_pair);
  std::vector<int> all(cfg.m_trials);
  std::iota(all.begin(), all.end(), 0);
  double ldmi_total = ldmi_stat.total(all);
  double emi_total = emi_stat.total(all);
  double ecmi_total = ecmi_stat.total(all);
  double fcmi_total = fcmi_stat.total(all);

  auto ci_of = [&](const PerSampleMiStat& stat) {
    return bootstrap_ci(
        [&stat](std::span<const int> idx) { return stat.total(idx); },
        cfg.m_trials, opt.resamples, opt.ci_level, cfg.seed);
  };
  Interval ldmi_ci = ci_of(ldmi_stat);
  Interval emi_ci = ci_of(emi_stat);
  Interval ecmi_ci = ci_of(ecmi_stat);
  Interval fcmi_ci = ci_of(fcmi_stat);

  BoundQuery vc;
  vc.n = cfg.n;
  vc.params["d_vc"] = 1.0;
  BoundValue vc_cap = evaluate_bound("vc_fcmi_cap", vc);
  BoundQuery comp;
  comp.n = cfg.n;
  comp.params["k"] = 1.0;
  BoundValue comp_cap = evaluate_bound("compression_cmi_cap", comp);

  TestbedReport report;
  report.testbed = "threshold";
  report.n = cfg.n;
  report.seed = cfg.seed;
  report.m_trials = cfg.m_trials;
  report.ci_level = opt.ci_level;
  report.empirical_gap = gap;
  report.gap_ci = gap_ci;
  report.oracles = {{"pop_mean", gap},
                    {"ldmi_total", ldmi_total},
                    {"emi_total", emi_total},
                    {"ecmi_total", ecmi_total},
                    {"fcmi_total", fcmi_total},
                    {"fcmi_cap", vc_cap.value},
                    {"compression_cap", comp_cap.value}};
  report.intervals = {{"gap", gap_ci},
                      {"ldmi_total", ldmi_ci},
                      {"emi_total", emi_ci},
                      {"ecmi_total", ecmi_ci},
                      {"fcmi_total", fcmi_ci}};

  BoundQuery slow;
  slow.n = cfg.n;
  slow.info = {fcmi_total};
  report.bounds.push_back(
      row_from(evaluate_bound("cmi_slow", slow), "estimated", fcmi_total));
  slow.info = {ecmi_total};
  report.bounds.push_back(
      row_from(evaluate_bound("cmi_slow", slow), "estimated", ecmi_total));
  report.bounds.push_back(row_from(vc_cap, "cap", 1.0));
  report.bounds.push_back(row_from(comp_cap, "cap", 1.0));

  report.config_echo = json{{"testbed", "threshold"},
                            {"theta_star", cfg.theta_star},
                            {"n", cfg.n},
                            {"m_trials", cfg.m_trials},
                            {"seed", cfg.seed},
                            {"cond_bins", cfg.cond_bins}};
  report.runtime_seconds = timer.seconds();
  return report;
}

// ---------------------------------------------------------------------
// memorizer (interpolating table learner)
// ---------------------------------------------------------------------

namespace {

struct MemorizerSource {
  int alphabet;
  const std::vector<std::uint8_t>* labels;
  std::uint8_t default_label;
  double noise;

  struct Point {
    std::int16_t f;
    std::int8_t y;
  };
  struct Model {
    std::vector<std::int8_t> table;  // -1 = unseen
  };

  Point sample(CounterRng& rng) const {
    int f = static_cast<int>(rng.uniform_int(alphabet));
    int y = (*labels)[f];
    if (noise > 0.0 && rng.bernoulli(noise)) y ^= 1;
    return Point{static_cast<std::int16_t>(f), static_cast<std::int8_t>(y)};
  }
  Model fit(const std::vector<Point>& train) const {
    Model model{std::vector<std::int8_t>(alphabet, -1)};
    for (const Point& pt : train) {
      std::int8_t& slot = model.table[pt.f];
      if (slot >= 0 && slot != pt.y)
        throw std::invalid_argument(
            "memorizer: conflicting training labels; configuration is not "
            "interpolating");
      slot = pt.y;
    }
    return model;
  }
  std::int32_t predict(const Model& model, const Point& pt) const {
    std::int8_t stored = model.table[pt.f];
    return stored >= 0 ? stored : default_label;
  }
  double loss(const Model& model, const Point& pt) const {
    return predict(model, pt) == pt.y ? 0.0 : 1.0;
  }
  std::int32_t data_key(const Point& pt) const {
    return static_cast<std::int32_t>(pt.f) * 2 + pt.y;
  }
  std::int64_t model_key(const Model& model) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::int8_t v : model.table) {
      h ^= static_cast<std::uint8_t>(v);
      h *= 1099511628211ULL;
    }
    return static_cast<std::int64_t>(h >> 1);
  }
  int loss_levels() const { return 2; }
};

}  // namespace

MemorizerConfig MemorizerConfig::collision_construction(double target_pop, int n,
                                                        int m_trials,
                                                        std::uint64_t seed) {
  if (!(target_pop > 0.0 && target_pop < 1.0))
    throw std::invalid_argument("collision_construction: target in (0,1)");
  // unseen-feature rate (1 - 1/A)^n ~= target
  int alphabet = std::clamp(
      (int)std::lround(1.0 / (1.0 - std::pow(target_pop, 1.0 / n))), 2, 64);
  MemorizerConfig cfg;
  cfg.alphabet_size = alphabet;
  cfg.labels.assign(alphabet, 1);  // default label 0 is always wrong
  cfg.default_label = 0;
  cfg.noise = 0.0;
  cfg.n = n;
  cfg.m_trials = m_trials;
  cfg.seed = seed;
  return cfg;
}

TestbedReport memorizer_run(const MemorizerConfig& cfg, const RunOptions& opt) {
  if (cfg.alphabet_size < 1 || cfg.alphabet_size > 64)
    throw std::invalid_argument("memorizer: alphabet size must be 1..64");
  if ((int)cfg.labels.size() != cfg.alphabet_size)
    throw std::invalid_argument("memorizer: one label per symbol required");
  if (!(cfg.noise >= 0.0 && cfg.noise < 0.5))
    throw std::invalid_argument("memorizer: noise must lie in [0, 0.5)");
  if (cfg.n < 2) throw std::invalid_argument("memorizer: n must be >= 2");
  if (cfg.m_trials < 1)
    throw std::invalid_argument("memorizer: m_trials must be >= 1");
  Timer timer;

  MemorizerSource source{cfg.alphabet_size, &cfg.labels, cfg.default_label,
                         cfg.noise};
  SupersampleBatch batch =
      run_supersample_trials(source, cfg.n, cfg.m_trials, cfg.seed, opt.mode);
  int loo_m = cfg.loo_m_trials > 0 ? cfg.loo_m_trials : cfg.m_trials;
  std::uint64_t loo_seed = cfg.seed ^ 0xA5A5A5A5A5A5A5A5ULL;
  LooBatch loo = run_loo_trials(source, cfg.n, loo_m, loo_seed, opt.mode);

  std::vector<double> pops(cfg.m_trials);
  for (int t = 0; t < cfg.m_trials; ++t) {
    if (batch.trials[t].train_loss() != 0.0)
      throw std::invalid_argument("memorizer: training loss must be zero");
    pops[t] = batch.trials[t].test_loss();
  }
  double pop = mean_by_index(pops);
  Interval pop_ci = bootstrap_ci(
      [&pops](std::span<const int> idx) { return mean_over(pops, idx); },
      cfg.m_trials, opt.resamples, opt.ci_level, cfg.seed);

  PerSampleMiStat ldmi_stat(batch, PerSampleMiStat::Kind::ldmi,
                            Conditioning::none);
  PerSampleMiStat emi_stat(batch, PerSampleMiStat::Kind::ecmi,
                           Conditioning::none);
  PerSampleMiStat ecmi_stat(batch, PerSampleMiStat::Kind::ecmi,
                            Conditioning::per_pair);
  PerSampleMiStat fcmi_stat(batch, PerSampleMiStat::Kind::fcmi,
                            Conditioning::per_pair);
  PerSampleMiStat wcmi_stat(batch, PerSampleMiStat::Kind::hypothesis_cmi,
                            Conditioning::per_pair);
  LooEmiStat loo_stat(loo);

  std::vector<int> all(cfg.m_trials);
  std::iota(all.begin(), all.end(), 0);
  std::vector<double> ldmi = ldmi_stat.per_index(all);
  double ldmi_total = 0.0;
  for (double v : ldmi) ldmi_total += v;
  double emi_total = emi_stat.total(all);
  double ecmi_total = ecmi_stat.total(all);
  double fcmi_total = fcmi_stat.total(all);
  double wcmi_total = wcmi_stat.total(all);

  std::vector<int> loo_all(loo_m);
  std::iota(loo_all.begin(), loo_all.end(), 0);
  double loo_emi = loo_stat.value(loo_all);
  double loo_support = loo_support_formula(loo, loo_all);

  double denom_ld = (double)cfg.n * kLn2;
  double denom_loo = std::log((double)cfg.n + 1.0);
  double identity_ldmi = ldmi_total / denom_ld;
  double identity_loo = loo_emi / denom_loo;

  Interval identity_ldmi_ci = bootstrap_ci(
      [&](std::span<const int> idx) { return ldmi_stat.total(idx) / denom_ld; },
      cfg.m_trials, opt.resamples, opt.ci_level, cfg.seed);
  Interval identity_loo_ci = bootstrap_ci(
      [&](std::span<const int> idx) { return loo_stat.value(idx) / denom_loo; },
      loo_m, opt.resamples, opt.ci_level, loo_seed);
  auto ci_of = [&](const PerSampleMiStat& stat) {
    return bootstrap_ci(
        [&stat](std::span<const int> idx) { return stat.total(idx); },
        cfg.m_trials, opt.resamples, opt.ci_level, cfg.seed);
  };
  Interval ldmi_ci = ci_of(ldmi_stat);
  Interval emi_ci = ci_of(emi_stat);
  Interval ecmi_ci = ci_of(ecmi_stat);
  Interval fcmi_ci = ci_of(fcmi_stat);
  Interval wcmi_ci = ci_of(wcmi_stat);

  bool ldmi_within = identity_ldmi_ci.contains(pop);
  bool loo_within = identity_loo_ci.contains(pop);
  double joint_slack =
      0.5 * (identity_ldmi_ci.width() + identity_loo_ci.width());
  bool identities_agree = std::fabs(identity_ldmi - identity_loo) <= joint_slack;

  TestbedReport report;
  report.testbed = "memorizer";
  report.n = cfg.n;
  report.seed = cfg.seed;
  report.m_trials = cfg.m_trials;
  report.ci_level = opt.ci_level;
  report.empirical_gap = pop;  // zero training loss
  report.gap_ci = pop_ci;
  report.oracles = {{"pop_measured", pop},
                    {"identity_ldmi_pop", identity_ldmi},
                    {"identity_loo_pop", identity_loo},
                    {"loo_emi", loo_emi},
                    {"loo_emi_support_route", loo_support},
                    {"ldmi_total", ldmi_total},
                    {"emi_total", emi_total},
                    {"ecmi_total", ecmi_total},
                    {"fcmi_total", fcmi_total},
                    {"wcmi_total", wcmi_total},
                    {"identity_ldmi_within_ci", ldmi_within ? 1.0 : 0.0},
                    {"identity_loo_within_ci", loo_within ? 1.0 : 0.0},
                    {"identities_agree", identities_agree ? 1.0 : 0.0}};
  report.intervals = {{"gap", pop_ci},
                      {"identity_ldmi_pop", identity_ldmi_ci},
                      {"identity_loo_pop", identity_loo_ci},
                      {"ldmi_total", ldmi_ci},
                      {"emi_total", emi_ci},
                      {"ecmi_total", ecmi_ci},
                      {"fcmi_total", fcmi_ci},
                      {"wcmi_total", wcmi_ci}};

  BoundQuery idq;
  idq.n = cfg.n;
  idq.info = ldmi;
  report.bounds.push_back(row_from(evaluate_bound("interp_identity_ldmi", idq),
                                   "estimated", ldmi_total));
  BoundQuery looq;
  looq.n = cfg.n;
  looq.info = {loo_emi};
  report.bounds.push_back(row_from(evaluate_bound("interp_identity_loo", looq),
                                   "estimated", loo_emi));
  report.bounds.push_back(
      row_from(evaluate_bound("loo_cmi", looq), "estimated", loo_emi));
  BoundQuery slow;
  slow.n = cfg.n;
  slow.info = {ecmi_total};
  report.bounds.push_back(
      row_from(evaluate_bound("cmi_slow", slow), "estimated", ecmi_total));

  report.config_echo = json{{"testbed", "memorizer"},
                            {"alphabet_size", cfg.alphabet_size},
                            {"labels", cfg.labels},
                            {"default_label", cfg.default_label},
                            {"noise", cfg.noise},
                            {"n", cfg.n},
                            {"m_trials", cfg.m_trials},
                            {"loo_m_trials", loo_m},
                            {"seed", cfg.seed},
                            {"loo_seed", loo_seed}};
  report.runtime_seconds = timer.seconds();
  return report;
}

// ---------------------------------------------------------------------
// clipped-gradient noisy iterations on a quadratic objective
// ---------------------------------------------------------------------

TestbedReport sgld_run(const SGLDConfig& cfg, const RunOptions& opt) {
  if (cfg.d < 1) throw std::invalid_argument("sgld: d must be >= 1");
  if (cfg.T < 0) throw std::invalid_argument("sgld: T must be >= 0");
  if (!(cfg.beta > 0.0)) throw std::invalid_argument("sgld: beta must be > 0");
  if (!(cfg.clip_L > 0.0)) throw std::invalid_argument("sgld: clip_L must be > 0");
  if (!(cfg.sigma2 > 0.0)) throw std::invalid_argument("sgld: sigma2 must be > 0");
  if (cfg.n < 1) throw std::invalid_argument("sgld: n must be >= 1");
  if (cfg.m_trials < 1)
    throw std::invalid_argument("sgld: m_trials must be >= 1");
  if (!cfg.harmonic_eta && !(cfg.eta_value >= 0.0))
    throw std::invalid_argument("sgld: eta_value must be >= 0");
  Timer timer;

  long long T = cfg.T;
  std::vector<double> eta(T), rho2(T);
  for (long long t = 0; t < T; ++t) {
    eta[t] = cfg.harmonic_eta ? 1.0 / (double)(t + 1) : cfg.eta_value;
    rho2[t] = eta[t] / cfg.beta;
  }

  int n = cfg.n, d = cfg.d, m = cfg.m_trials;
  double sd = std::sqrt(cfg.sigma2);
  std::vector<double> gaps(m);
  detail::for_each_trial(m, opt.mode, [&](int rep) {
    CounterRng data_rng(cfg.seed, (std::uint64_t)rep, 0);
    CounterRng pick_rng(cfg.seed, (std::uint64_t)rep, 1);
    CounterRng noise_rng(cfg.seed, (std::uint64_t)rep, 2);
    std::vector<double> data((std::size_t)n * d);
    for (double& v : data) v = data_rng.normal(cfg.mu, sd);

    std::vector<double> v(d, 0.0), g(d);
    for (long long t = 0; t < T; ++t) {
      const double* z = data.data() + pick_rng.uniform_int(n) * d;
      double norm2 = 0.0;
      for (int c = 0; c < d; ++c) {
        g[c] = 2.0 * (v[c] - z[c]);
        norm2 += g[c] * g[c];
      }
      double scale = 1.0;
      if (norm2 > cfg.clip_L * cfg.clip_L)
        scale = cfg.clip_L / std::sqrt(norm2);
      double noise_sd = std::sqrt(rho2[t]);
      for (int c = 0; c < d; ++c)
        v[c] += -eta[t] * scale * g[c] + noise_sd * noise_rng.normal();
    }

    double pop = (double)d * cfg.sigma2;
    for (int c = 0; c < d; ++c) pop += (v[c] - cfg.mu) * (v[c] - cfg.mu);
    double train = 0.0;
    for (int j = 0; j < n; ++j)
      for (int c = 0; c < d; ++c) {
        double diff = v[c] - data[(std::size_t)j * d + c];
        train += diff * diff;
      }
    train /= (double)n;
    gaps[rep] = pop - train;
  });

  double gap = mean_by_index(gaps);
  Interval gap_ci = bootstrap_ci(
      [&gaps](std::span<const int> idx) { return mean_over(gaps, idx); }, m,
      opt.resamples, opt.ci_level, cfg.seed);

  BoundQuery pjl;
  pjl.n = n;
  pjl.sigma = cfg.sigma_subgauss;
  pjl.params["L"] = cfg.clip_L;
  pjl.params["d"] = (double)d;
  pjl.eta = eta;
  pjl.rho2 = rho2;
  BoundValue bound = evaluate_bound("pjl_iterative", pjl);

  int covered = 0;
  for (double g_t : gaps)
    if (std::fabs(g_t) <= bound.value) ++covered;
  double coverage = m > 0 ? (double)covered / (double)m : 0.0;

  TestbedReport report;
  report.testbed = "sgld";
  report.n = n;
  report.seed = cfg.seed;
  report.m_trials = m;
  report.ci_level = opt.ci_level;
  report.empirical_gap = gap;
  report.gap_ci = gap_ci;
  report.oracles = {{"bound", bound.value}, {"coverage", coverage}};
  if (cfg.harmonic_eta && T > 0 && T % n == 0) {
    double harmonic = 0.0;
    for (long long t = 1; t <= T; ++t) harmonic += 1.0 / (double)t;
    double k = (double)(T / n);
    double harmonic_form = std::sqrt(cfg.beta * cfg.sigma_subgauss *
                                 cfg.sigma_subgauss * cfg.clip_L * cfg.clip_L /
                                 (double)n * harmonic);
    report.oracles.emplace_back("harmonic_sum", harmonic);
    report.oracles.emplace_back("harmonic_cap",
                                std::log((double)n) + std::log(k) + 1.0);
    report.oracles.emplace_back("harmonic_form_bound", harmonic_form);
    report.oracles.emplace_back("harmonic_form_residual",
                                std::fabs(harmonic_form - bound.value));
  }
  report.intervals = {{"gap", gap_ci}};
  double info_value = 2.0 * bound.components.at("info_quad");
  report.bounds.push_back(row_from(bound, "schedule", info_value));

  report.config_echo = json{{"testbed", "sgld"},
                            {"d", cfg.d},
                            {"T", cfg.T},
                            {"harmonic_eta", cfg.harmonic_eta},
                            {"eta_value", cfg.eta_value},
                            {"beta", cfg.beta},
                            {"clip_L", cfg.clip_L},
                            {"n", cfg.n},
                            {"m_trials", cfg.m_trials},
                            {"seed", cfg.seed},
                            {"mu", cfg.mu},
                            {"sigma2", cfg.sigma2},
                            {"sigma_subgauss", cfg.sigma_subgauss}};
  report.runtime_seconds = timer.seconds();
  return report;
}

// ---------------------------------------------------------------------
// registry / JSON dispatch
// ---------------------------------------------------------------------

const std::vector<std::string>& testbed_registry() {
  static const std::vector<std::string> names{"glm", "gibbs", "threshold",
                                              "memorizer", "sgld"};
  return names;
}

TestbedReport run_testbed_json(const std::string& testbed,
                               const nlohmann::json& config,
                               const RunOptions& opt) {
  if (testbed == "glm") {
    GLMConfig cfg;
    cfg.mu = config.value("mu", 0.0);
    cfg.sigma2 = config.value("sigma2", 1.0);
    cfg.n = config.at("n").get<int>();
    cfg.m_trials = config.at("m_trials").get<int>();
    cfg.seed = config.at("seed").get<std::uint64_t>();
    return glm_run(cfg, opt);
  }
  if (testbed == "gibbs") {
    GibbsProblem problem;
    problem.w_labels = config.at("w_labels").get<std::vector<std::string>>();
    problem.z_labels = config.at("z_labels").get<std::vector<std::string>>();
    problem.loss_table = config.at("loss_table").get<std::vector<double>>();
    problem.prior = config.at("prior").get<std::vector<double>>();
    problem.data = config.at("data").get<std::vector<double>>();
    problem.lambda = config.at("lambda").get<double>();
    problem.n = config.at("n").get<int>();
    problem.seed = config.value("seed", (std::uint64_t)0);
    return gibbs_run(problem, opt);
  }
  if (testbed == "threshold") {
    ThresholdConfig cfg;
    cfg.theta_star = config.at("theta_star").get<double>();
    cfg.n = config.at("n").get<int>();
    cfg.m_trials = config.at("m_trials").get<int>();
    cfg.seed = config.at("seed").get<std::uint64_t>();
    cfg.cond_bins = config.value("cond_bins", 4);
    return threshold_run(cfg, opt);
  }
  if (testbed == "memorizer") {
    MemorizerConfig cfg;
    if (config.contains("target_pop")) {
      cfg = MemorizerConfig::collision_construction(
          config.at("target_pop").get<double>(), config.at("n").get<int>(),
          config.at("m_trials").get<int>(),
          config.at("seed").get<std::uint64_t>());
    } else {
      cfg.alphabet_size = config.at("alphabet_size").get<int>();
      cfg.labels = config.at("labels").get<std::vector<std::uint8_t>>();
      cfg.default_label = config.value("default_label", 0);
      cfg.noise = config.value("noise", 0.0);
      cfg.n = config.at("n").get<int>();
      cfg.m_trials = config.at("m_trials").get<int>();
      cfg.seed = config.at("seed").get<std::uint64_t>();
    }
    cfg.loo_m_trials = config.value("loo_m_trials", 0);
    return memorizer_run(cfg, opt);
  }
  if (testbed == "sgld") {
    SGLDConfig cfg;
    cfg.d = config.value("d", 1);
    cfg.n = config.at("n").get<int>();
    if (config.contains("k"))
      cfg.T = (long long)cfg.n * config.at("k").get<long long>();
    else
      cfg.T = config.at("T").get<long long>();
    cfg.harmonic_eta = config.value("harmonic_eta", true);
    cfg.eta_value = config.value("eta_value", 0.0);
    cfg.beta = config.at("beta").get<double>();
    cfg.clip_L = config.value("clip_L", 1.0);
    cfg.m_trials = config.at("m_trials").get<int>();
    cfg.seed = config.at("seed").get<std::uint64_t>();
    cfg.mu = config.value("mu", 0.0);
    cfg.sigma2 = config.value("sigma2", 1.0);
    cfg.sigma_subgauss = config.value("sigma_subgauss", 1.0);
    return sgld_run(cfg, opt);
  }
  throw std::invalid_argument("unknown testbed: " + testbed);
}

}  // namespace genbound
