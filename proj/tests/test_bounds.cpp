#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "genbound/bounds.hpp"
#include "genbound/rng.hpp"

using namespace genbound;

namespace {

BoundQuery query(long long n) {
  BoundQuery q;
  q.n = n;
  return q;
}

double value_of(const std::string& id, const BoundQuery& q) {
  return evaluate_bound(id, q).value;
}

}  // namespace

TEST_CASE("registry is complete and stable") {
  std::set<std::string> ids;
  for (const auto& spec : bound_registry()) {
    CHECK(!spec.required.empty());
    ids.insert(spec.id);
  }
  for (const char* id :
       {"avg_mi", "samplewise_mi", "binary_kl_avg", "pac_bayes_subgaussian",
        "mls", "catoni_parametric", "catoni_fast_rate", "renyi_pacbayes",
        "single_draw_subgaussian", "alpha_mi_single_draw", "cmi_slow",
        "cmi_fast", "cmi_interpolating", "cmi_binary_kl", "loo_cmi",
        "interp_identity_ldmi", "interp_identity_loo", "wasserstein_gap",
        "tv_gap", "pjl_iterative", "vc_fcmi_cap", "compression_cmi_cap",
        "sauer_shelah", "samplewise_cmi", "samplewise_cmi_factorless"})
    CHECK_MESSAGE(ids.count(id) == 1, id);
  CHECK(ids.size() == 25);
  CHECK(find_bound("no_such_bound") == nullptr);
}

TEST_CASE("avg_mi") {
  BoundQuery q = query(100);
  q.sigma = 0.5;
  q.info = {0.0};
  CHECK(value_of("avg_mi", q) == doctest::Approx(0.0));
  q.info = {100.0 * std::log(2.0)};
  CHECK(value_of("avg_mi", q) ==
        doctest::Approx(std::sqrt(std::log(2.0) / 2.0)).epsilon(1e-12));
  q.sigma = 1.0;
  q.info = {0.5};
  CHECK(value_of("avg_mi", q) == doctest::Approx(0.1).epsilon(1e-12));
  q.info.clear();
  CHECK_THROWS_AS((void)value_of("avg_mi", q), MissingFieldError);
}

TEST_CASE("samplewise_mi") {
  BoundQuery q = query(2);
  q.sigma = 0.5;
  q.info = {0.0, 0.0};
  CHECK(value_of("samplewise_mi", q) == doctest::Approx(0.0));
  q.info = {0.02, 0.08};
  CHECK(value_of("samplewise_mi", q) == doctest::Approx(0.15).epsilon(1e-12));
  // location-model closed form: every term is 0.5 ln(n/(n-1))
  BoundQuery g = query(50);
  g.sigma = 1.0;
  g.info.assign(50, 0.5 * std::log(50.0 / 49.0));
  CHECK(value_of("samplewise_mi", g) ==
        doctest::Approx(std::sqrt(std::log(50.0 / 49.0))).epsilon(1e-12));
  g.info.resize(49);
  CHECK_THROWS_AS((void)value_of("samplewise_mi", g), std::invalid_argument);
}

TEST_CASE("samplewise never exceeds the pooled bound") {
  CounterRng rng(3);
  for (int rep = 0; rep < 500; ++rep) {
    int n = 2 + (int)rng.uniform_int(16);
    BoundQuery sw = query(n);
    sw.sigma = 0.1 + rng.uniform01();
    double sum = 0.0;
    sw.info.resize(n);
    for (double& v : sw.info) {
      v = rng.uniform01() * 2.0;
      sum += v;
    }
    BoundQuery pooled = query(n);
    pooled.sigma = sw.sigma;
    pooled.info = {sum};
    CHECK(value_of("samplewise_mi", sw) <= value_of("avg_mi", pooled) + 1e-12);
  }
}

TEST_CASE("binary_kl_avg") {
  BoundQuery q = query(20);
  q.train_loss = 0.0;
  q.info = {1.0};  // budget 0.05
  BoundValue v = evaluate_bound("binary_kl_avg", q);
  CHECK(v.value == doctest::Approx(1.0 - std::exp(-0.05)).epsilon(1e-8));
  CHECK(v.components.at("relaxed") == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(v.components.at("relaxed") >= v.value);

  q.info = {0.0};
  q.train_loss = 0.37;
  CHECK(value_of("binary_kl_avg", q) == doctest::Approx(0.37));

  BoundQuery r = query(1);
  r.train_loss = 0.1;
  r.info = {0.1 * std::log(0.2) + 0.9 * std::log(1.8)};
  CHECK(value_of("binary_kl_avg", r) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("pac_bayes_subgaussian") {
  BoundQuery q = query(101);
  q.sigma = 0.5;
  q.delta = 0.05;
  q.train_loss = 0.2;
  q.info = {1.0};
  double penalty =
      std::sqrt(0.5 * (1.0 + std::log(std::sqrt(101.0) / 0.05)) / 100.0);
  CHECK(value_of("pac_bayes_subgaussian", q) ==
        doctest::Approx(0.2 + penalty).epsilon(1e-12));

  // the penalty fades with n even at weak confidence
  BoundQuery big = query(1000000);
  big.sigma = 0.5;
  big.delta = 0.999999;
  big.train_loss = 0.0;
  big.info = {0.0};
  CHECK(value_of("pac_bayes_subgaussian", big) < 1e-2);

  q.n = 1;
  CHECK_THROWS_AS((void)value_of("pac_bayes_subgaussian", q),
                  std::invalid_argument);
  q.n = 101;
  q.sigma.reset();
  CHECK_THROWS_AS((void)value_of("pac_bayes_subgaussian", q), MissingFieldError);
}

TEST_CASE("mls") {
  BoundQuery q = query(100);
  q.delta = 0.1;
  q.train_loss = 0.0;
  q.info = {2.0};
  double budget = (2.0 + std::log(2.0 * 10.0 / 0.1)) / 200.0;
  CHECK(value_of("mls", q) ==
        doctest::Approx(1.0 - std::exp(-budget)).epsilon(1e-7));

  // closed form at zero information and zero train loss
  q.info = {0.0};
  double budget0 = std::log(2.0 * 10.0 / 0.1) / 200.0;
  CHECK(value_of("mls", q) ==
        doctest::Approx(1.0 - std::exp(-budget0)).epsilon(1e-7));

  // vanishing budget recovers the train loss
  BoundQuery big = query(100000000);
  big.delta = 0.1;
  big.train_loss = 0.3;
  big.info = {0.0};
  CHECK(value_of("mls", big) == doctest::Approx(0.3).epsilon(1e-3));
}

TEST_CASE("catoni_parametric") {
  BoundQuery q = query(100);
  q.delta = 0.1;
  q.train_loss = 0.0;
  q.info = {1.0};
  q.params["gamma"] = 0.0;
  BoundValue degenerate = evaluate_bound("catoni_parametric", q);
  CHECK(degenerate.value == 1.0);
  CHECK(degenerate.vacuous);

  q.params["gamma"] = -0.5;
  double budget = (1.0 + std::log(10.0)) / 100.0;
  double expected = (1.0 - std::exp(-budget)) / (1.0 - std::exp(-0.5));
  BoundValue v = evaluate_bound("catoni_parametric", q);
  CHECK(v.value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(v.components.at("infeasible") == 0.0);
}

TEST_CASE("catoni grid search approaches the nonparametric inverse") {
  BoundQuery q = query(200);
  q.delta = 0.05;
  q.train_loss = 0.1;
  q.info = {3.0};
  double budget = (3.0 + std::log(20.0)) / 200.0;
  double nonparametric = binary_kl_inverse_upper(0.1, budget);
  BoundValue best = catoni_grid_search(q, 4000);
  CHECK(best.value >= nonparametric - 1e-12);
  CHECK(best.value == doctest::Approx(nonparametric).epsilon(2e-3));
  // and the doubled-sample-size budget identity places it below the
  // nonparametric inverse evaluated at the (larger) doubled mls budget
  double mls_budget = (3.0 + std::log(2.0 * std::sqrt(200.0) / 0.05)) / 400.0;
  CHECK(best.value <= binary_kl_inverse_upper(0.1, 2.0 * mls_budget) + 1e-9);
}

TEST_CASE("catoni_fast_rate") {
  BoundQuery q = query(100);
  q.delta = 0.1;
  q.train_loss = 0.0;
  q.info = {0.7};
  q.params["lambda"] = 2.0;
  CHECK(value_of("catoni_fast_rate", q) ==
        doctest::Approx(2.0 * (0.7 + std::log(10.0)) / 100.0).epsilon(1e-12));

  q.train_loss = 0.05;
  q.info = {1.0};
  CHECK(value_of("catoni_fast_rate", q) ==
        doctest::Approx(0.1 + 2.0 * (1.0 + std::log(10.0)) / 100.0)
            .epsilon(1e-12));

  q.params["lambda"] = 1.0 + 1e-9;
  CHECK(value_of("catoni_fast_rate", q) > 1e6);
  q.params["lambda"] = 1.0;
  CHECK_THROWS_AS((void)value_of("catoni_fast_rate", q), std::invalid_argument);
}

TEST_CASE("renyi_pacbayes") {
  BoundQuery q = query(1);
  q.sigma = 0.5;
  q.delta = 0.1;
  q.info = {0.0};
  q.params["alpha"] = 2.0;
  q.params["m"] = 100.0;
  CHECK(value_of("renyi_pacbayes", q) == doctest::Approx(0.0));

  q.info = {0.5};
  CHECK(value_of("renyi_pacbayes", q) ==
        doctest::Approx(std::sqrt(0.005 * std::log(20.0))).epsilon(1e-12));

  // the order-dependent factor tends to 1, so the large-order limit is
  // sqrt((2 sigma^2 / m) ln(2/delta))
  q.params["alpha"] = 1e6;
  CHECK(value_of("renyi_pacbayes", q) ==
        doctest::Approx(std::sqrt(0.005 * std::log(20.0))).epsilon(1e-3));

  q.params["alpha"] = 1.0;
  CHECK_THROWS_AS((void)value_of("renyi_pacbayes", q), std::invalid_argument);
}

TEST_CASE("single_draw_subgaussian") {
  BoundQuery q = query(101);
  q.sigma = 0.5;
  q.delta = 0.05;
  q.train_loss = 0.2;
  q.info = {0.0};
  CHECK(value_of("single_draw_subgaussian", q) ==
        doctest::Approx(value_of("pac_bayes_subgaussian", q)).epsilon(1e-14));

  q.info = {-1.0};
  double penalty =
      std::sqrt(0.5 * (-1.0 + std::log(std::sqrt(101.0) / 0.05)) / 100.0);
  CHECK(value_of("single_draw_subgaussian", q) ==
        doctest::Approx(0.2 + penalty).epsilon(1e-12));

  BoundQuery pos = q;
  pos.info = {1.0};
  CHECK(value_of("single_draw_subgaussian", q) < value_of("single_draw_subgaussian", pos));
}

TEST_CASE("alpha_mi_single_draw") {
  BoundQuery q = query(100);
  q.sigma = 0.5;
  q.delta = 0.1;
  q.info = {0.0};
  q.params["alpha"] = 2.0;
  double budget0 = std::log(2.0) + 2.0 * std::log(10.0);
  CHECK(value_of("alpha_mi_single_draw", q) ==
        doctest::Approx(std::sqrt(0.005 * budget0)).epsilon(1e-12));

  // infinite order composes with a leakage of ln k
  q.params["alpha"] = std::numeric_limits<double>::infinity();
  q.info = {std::log(8.0)};
  CHECK(value_of("alpha_mi_single_draw", q) ==
        doctest::Approx(std::sqrt(0.005 * (std::log(8.0) + std::log(20.0))))
            .epsilon(1e-12));

  // large finite order approaches the infinite-order formula
  BoundQuery big = q;
  big.params["alpha"] = 1e4;
  CHECK(value_of("alpha_mi_single_draw", big) ==
        doctest::Approx(value_of("alpha_mi_single_draw", q)).epsilon(1e-4));

  // supersample form drops sigma and uses the fixed constants
  BoundQuery c = query(100);
  c.delta = 0.1;
  c.info = {0.7};
  c.params["alpha"] = 3.0;
  c.conditional = true;
  double budget = 0.7 + std::log(2.0) + 1.5 * std::log(10.0);
  CHECK(value_of("alpha_mi_single_draw", c) ==
        doctest::Approx(std::sqrt(0.02 * budget)).epsilon(1e-12));

  q.params["alpha"] = 0.9;
  CHECK_THROWS_AS((void)value_of("alpha_mi_single_draw", q),
                  std::invalid_argument);
}

TEST_CASE("cmi_slow") {
  BoundQuery q = query(100);
  q.info = {0.0};
  CHECK(value_of("cmi_slow", q) == doctest::Approx(0.0));
  q.info = {0.5};
  CHECK(value_of("cmi_slow", q) == doctest::Approx(0.1).epsilon(1e-12));
  q.info = {100.0 * std::log(2.0)};
  BoundValue v = evaluate_bound("cmi_slow", q);
  CHECK(v.value == doctest::Approx(std::sqrt(2.0 * std::log(2.0))).epsilon(1e-12));
  CHECK(v.vacuous);
}

TEST_CASE("cmi_fast") {
  CHECK(cmi_fast_constraint(2.0, 0.1) ==
        doctest::Approx(-0.1 + (std::exp(0.1) - 1.1) * 5.0).epsilon(1e-12));
  CHECK(cmi_fast_constraint(2.0, 0.1) < 0.0);
  CHECK(cmi_fast_constraint(1.0, 0.1) ==
        doctest::Approx((std::exp(0.1) - 1.1) * 2.0).epsilon(1e-12));
  CHECK(cmi_fast_constraint(1.0, 0.1) > 0.0);

  BoundQuery q = query(100);
  q.train_loss = 0.05;
  q.info = {1.0};
  q.params["gamma"] = 2.0;
  q.params["lambda"] = 0.1;
  CHECK(value_of("cmi_fast", q) == doctest::Approx(0.1 + 0.1).epsilon(1e-12));

  // tiny steps stay feasible for gamma > 1 but the bound blows up
  q.params["lambda"] = 1e-4;
  CHECK(cmi_fast_constraint(2.0, 1e-4) < 0.0);
  CHECK(value_of("cmi_fast", q) > 100.0);

  q.params["lambda"] = 0.1;
  q.params["gamma"] = 1.0;
  CHECK_THROWS_AS((void)value_of("cmi_fast", q), InfeasibleError);
  try {
    (void)value_of("cmi_fast", q);
  } catch (const InfeasibleError& e) {
    CHECK(e.constraint == doctest::Approx((std::exp(0.1) - 1.1) * 2.0));
  }
}

TEST_CASE("cmi_interpolating") {
  BoundQuery q = query(100);
  q.train_loss = 0.0;
  q.info = {100.0 * std::log(2.0)};
  CHECK(value_of("cmi_interpolating", q) == 1.0);  // sharp constant
  q.info = {0.0};
  CHECK(value_of("cmi_interpolating", q) == doctest::Approx(0.0));
  q.info = {std::log(2.0) * 100.0 / 4.0};
  CHECK(value_of("cmi_interpolating", q) == doctest::Approx(0.25).epsilon(1e-12));
  q.train_loss = 0.01;
  CHECK_THROWS_AS((void)value_of("cmi_interpolating", q), std::invalid_argument);
}

TEST_CASE("cmi_binary_kl") {
  BoundQuery q = query(100);
  q.train_loss = 0.2;
  q.info = {0.0};
  CHECK(value_of("cmi_binary_kl", q) == doctest::Approx(0.2).epsilon(1e-8));

  // zero train loss: binary_kl(0, pop/2) = -ln(1 - pop/2)
  q.train_loss = 0.0;
  q.info = {5.0};  // budget 0.05
  double expected = 2.0 * (1.0 - std::exp(-0.05));
  CHECK(value_of("cmi_binary_kl", q) == doctest::Approx(expected).epsilon(1e-8));

  q.info = {1000.0};  // budget large enough to saturate
  CHECK(value_of("cmi_binary_kl", q) == 1.0);
}

TEST_CASE("loo_cmi and interpolation identities") {
  BoundQuery q = query(99);
  q.info = {0.0};
  CHECK(value_of("loo_cmi", q) == doctest::Approx(0.0));
  q.info = {0.02};
  CHECK(value_of("loo_cmi", q) == doctest::Approx(100.0 / 99.0 * 0.1).epsilon(1e-12));
  q.info = {std::log(100.0)};
  CHECK(value_of("loo_cmi", q) ==
        doctest::Approx(100.0 / 99.0 * std::sqrt(std::log(100.0) / 2.0))
            .epsilon(1e-12));

  BoundQuery idq = query(8);
  idq.info.assign(8, 0.0);
  CHECK(value_of("interp_identity_ldmi", idq) == doctest::Approx(0.0));
  idq.info.assign(8, std::log(2.0));
  CHECK(value_of("interp_identity_ldmi", idq) == doctest::Approx(1.0).epsilon(1e-12));
  idq.info.assign(8, 0.25 * std::log(2.0));
  CHECK(value_of("interp_identity_ldmi", idq) == doctest::Approx(0.25).epsilon(1e-12));
  idq.info[0] = std::log(2.0) + 1e-6;
  CHECK_THROWS_AS((void)value_of("interp_identity_ldmi", idq),
                  std::invalid_argument);

  BoundQuery looq = query(9);
  looq.info = {std::log(10.0)};
  CHECK(value_of("interp_identity_loo", looq) == doctest::Approx(1.0).epsilon(1e-12));
  looq.info = {0.25 * std::log(10.0)};
  CHECK(value_of("interp_identity_loo", looq) == doctest::Approx(0.25).epsilon(1e-12));
  looq.info = {std::log(10.0) + 1e-6};
  CHECK_THROWS_AS((void)value_of("interp_identity_loo", looq),
                  std::invalid_argument);
}

TEST_CASE("wasserstein_gap") {
  BoundQuery q = query(1);
  q.params["L"] = 3.0;
  q.info = {0.0};
  CHECK(value_of("wasserstein_gap", q) == doctest::Approx(0.0));
  q.info = {0.2};
  CHECK(value_of("wasserstein_gap", q) == doctest::Approx(0.6).epsilon(1e-12));

  BoundQuery list = query(4);
  list.params["L"] = 2.0;
  list.info = {0.1, 0.1, 0.2, 0.2};
  CHECK(value_of("wasserstein_gap", list) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("discrete-metric transport bound sits below the kl relaxation") {
  // bounded losses are 1-Lipschitz under the discrete metric, and the
  // per-sample transport distances are dominated by sqrt(kl/2)
  CounterRng rng(37);
  int n = 8;
  BoundQuery q = query(n);
  q.params["L"] = 1.0;
  q.info.resize(n);
  double pinsker_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double a = 0.05 + 0.9 * rng.uniform01();
    double b = 0.05 + 0.9 * rng.uniform01();
    std::vector<double> p{a, 1.0 - a}, pq{b, 1.0 - b};
    DiscreteDist dp = DiscreteDist::from_probs(p);
    DiscreteDist dq = DiscreteDist::from_probs(pq);
    q.info[i] = wasserstein1_discrete_metric(dp, dq);
    pinsker_sum += std::sqrt(kl(dp, dq) / 2.0);
  }
  CHECK(value_of("wasserstein_gap", q) <= pinsker_sum / n + 1e-12);
}

TEST_CASE("tv_gap") {
  BoundQuery q = query(1);
  q.params["sigma_beta"] = 1.0;
  q.params["alpha"] = 1.0;
  q.info = {0.0};
  CHECK(value_of("tv_gap", q) == doctest::Approx(0.0));
  q.info = {0.4};
  CHECK(value_of("tv_gap", q) == doctest::Approx(0.4).epsilon(1e-12));
  q.params["alpha"] = 2.0;
  q.info = {0.25};
  CHECK(value_of("tv_gap", q) == doctest::Approx(0.5).epsilon(1e-12));
  q.params["alpha"] = 0.5;
  CHECK_THROWS_AS((void)value_of("tv_gap", q), std::invalid_argument);
}

TEST_CASE("pjl_iterative") {
  BoundQuery q = query(1);
  q.sigma = 1.0;
  q.params["L"] = 1.0;
  q.eta = {1.0};
  q.rho2 = {1.0};
  CHECK(value_of("pjl_iterative", q) == doctest::Approx(1.0).epsilon(1e-12));

  q.params["L"] = 0.0;
  CHECK(value_of("pjl_iterative", q) == doctest::Approx(0.0));

  // harmonic schedule with noise variance eta/beta collapses to the
  // harmonic-sum form
  int n = 32, k = 2;
  double beta = 4.0;
  BoundQuery sgld = query(n);
  sgld.sigma = 1.0;
  sgld.params["L"] = 1.0;
  sgld.params["d"] = 1.0;
  double harmonic = 0.0;
  for (int t = 1; t <= n * k; ++t) {
    sgld.eta.push_back(1.0 / t);
    sgld.rho2.push_back(1.0 / t / beta);
    harmonic += 1.0 / t;
  }
  BoundValue v = evaluate_bound("pjl_iterative", sgld);
  CHECK(v.value == doctest::Approx(std::sqrt(beta * harmonic / n)).epsilon(1e-12));
  CHECK(harmonic <= std::log((double)n) + std::log((double)k) + 1.0);
  CHECK(v.components.at("info_log") <= v.components.at("info_quad") + 1e-12);

  // the log-form information component never exceeds the quadratic one
  CounterRng rng(43);
  for (int rep = 0; rep < 100; ++rep) {
    BoundQuery sched = query(4);
    sched.sigma = 1.0;
    sched.params["L"] = 0.5 + rng.uniform01();
    sched.params["d"] = 1.0 + (double)rng.uniform_int(8);
    for (int t = 0; t < 10; ++t) {
      sched.eta.push_back(0.01 + rng.uniform01());
      sched.rho2.push_back(0.01 + rng.uniform01());
    }
    BoundValue r = evaluate_bound("pjl_iterative", sched);
    CHECK(r.components.at("info_log") <= r.components.at("info_quad") + 1e-12);
  }

  // a data-carrying step with no noise is rejected; an idle step is fine
  BoundQuery bad = query(1);
  bad.sigma = 1.0;
  bad.params["L"] = 1.0;
  bad.eta = {1.0};
  bad.rho2 = {0.0};
  CHECK_THROWS_AS((void)value_of("pjl_iterative", bad), std::invalid_argument);
  bad.eta = {0.0};
  CHECK(value_of("pjl_iterative", bad) == doctest::Approx(0.0));
}

TEST_CASE("information caps") {
  BoundQuery q = query(10);
  q.params["d_vc"] = 1.0;
  CHECK(value_of("vc_fcmi_cap", q) ==
        doctest::Approx(std::log(20.0 * std::exp(1.0))).epsilon(1e-12));
  q.params["k"] = 1.0;
  CHECK(value_of("compression_cmi_cap", q) ==
        doctest::Approx(std::log(20.0)).epsilon(1e-12));
  BoundQuery small = query(3);
  small.params["d_vc"] = 3.0;
  CHECK_THROWS_AS((void)value_of("vc_fcmi_cap", small), std::invalid_argument);
}

TEST_CASE("sauer_shelah") {
  // full shattering below the dimension
  for (long long m : {0LL, 1LL, 3LL, 6LL}) {
    BoundQuery q = query(1);
    q.params["m"] = (double)m;
    q.params["d_vc"] = 10.0;
    CHECK(value_of("sauer_shelah", q) ==
          doctest::Approx(std::pow(2.0, (double)m)).epsilon(1e-12));
  }

  // enumeration oracle: distinct labellings of 5 points by thresholds,
  // trying one representative threshold per gap between points
  std::set<std::vector<int>> labellings;
  const double pts[5] = {0.1, 0.3, 0.5, 0.7, 0.9};
  for (double w : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
    std::vector<int> lab;
    for (double x : pts) lab.push_back(x >= w ? 1 : 0);
    labellings.insert(lab);
  }
  BoundQuery q = query(1);
  q.params["m"] = 5.0;
  q.params["d_vc"] = 1.0;
  CHECK(value_of("sauer_shelah", q) ==
        doctest::Approx((double)labellings.size()).epsilon(1e-12));

  // Pascal-sum route and the displayed cap
  q.params["m"] = 10.0;
  q.params["d_vc"] = 2.0;
  double pascal = 1.0 + 10.0 + 45.0;
  BoundValue v = evaluate_bound("sauer_shelah", q);
  CHECK(v.value == doctest::Approx(pascal).epsilon(1e-12));
  CHECK(v.components.at("cap") ==
        doctest::Approx(std::pow(5.0 * std::exp(1.0), 2.0)).epsilon(1e-12));
  CHECK(v.value <= v.components.at("cap"));

  q.params["m"] = 2.5;
  CHECK_THROWS_AS((void)value_of("sauer_shelah", q), std::invalid_argument);
}

TEST_CASE("bounds are nondecreasing in information and train loss") {
  CounterRng rng(41);
  for (int rep = 0; rep < 300; ++rep) {
    BoundQuery base = query(50 + (long long)rng.uniform_int(100));
    base.sigma = 0.25 + rng.uniform01();
    base.delta = 0.01 + 0.9 * rng.uniform01();
    base.train_loss = 0.5 * rng.uniform01();
    base.params["gamma"] = -0.1 - rng.uniform01();
    base.params["lambda"] = 1.5 + rng.uniform01();
    base.params["alpha"] = 1.5 + rng.uniform01();
    base.params["m"] = 50.0;
    base.params["L"] = 1.0;
    base.params["sigma_beta"] = 1.0;
    double lo = rng.uniform01(), hi = lo + rng.uniform01();
    for (const char* id :
         {"avg_mi", "binary_kl_avg", "pac_bayes_subgaussian", "mls",
          "catoni_parametric", "catoni_fast_rate", "renyi_pacbayes",
          "single_draw_subgaussian", "alpha_mi_single_draw", "cmi_slow",
          "cmi_binary_kl", "loo_cmi", "wasserstein_gap", "tv_gap"}) {
      BoundQuery a = base, b = base;
      a.info = {lo};
      b.info = {hi};
      CHECK_MESSAGE(value_of(id, a) <= value_of(id, b) + 1e-12, id);
    }
    for (const char* id : {"binary_kl_avg", "pac_bayes_subgaussian", "mls",
                           "catoni_parametric", "catoni_fast_rate",
                           "single_draw_subgaussian", "cmi_binary_kl"}) {
      BoundQuery a = base, b = base;
      a.info = b.info = {lo};
      b.train_loss = *base.train_loss + 0.3;
      CHECK_MESSAGE(value_of(id, a) <= value_of(id, b) + 1e-12, id);
    }
  }
}
