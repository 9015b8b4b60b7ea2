#pragma once

#include <cstdint>
#include <exception>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <vector>

#include "genbound/rng.hpp"

namespace genbound {

enum class RunMode { serial, parallel };

// One draw of the 2n-point construction: the membership bits pick, per
// index i, whether position i or i+n is the training point. The learner is
// handed only the selected half, so the (points, bits) -- train set -- model
// chain holds by construction.
struct SupersampleTrial {
  std::vector<std::uint8_t> s;            // n membership bits
  std::vector<double> losses;             // 2n losses in [0,1]
  std::vector<std::int32_t> predictions;  // 2n symbols; empty when undeclared
  std::vector<std::int32_t> data_keys;    // 2n alphabet ids; empty if continuous
  std::int64_t model_key = -1;            // finite hypothesis id; -1 if none
  double stat = std::numeric_limits<double>::quiet_NaN();  // testbed extra

  double train_loss() const {
    double sum = 0.0;
    std::size_t n = s.size();
    for (std::size_t i = 0; i < n; ++i) sum += losses[i + (s[i] ? n : 0)];
    return sum / static_cast<double>(n);
  }
  double test_loss() const {
    double sum = 0.0;
    std::size_t n = s.size();
    for (std::size_t i = 0; i < n; ++i) sum += losses[i + (s[i] ? 0 : n)];
    return sum / static_cast<double>(n);
  }
};

// Leave-one-out variant: n+1 points, the u-th is held out.
struct LooTrial {
  std::int32_t u = 0;
  std::vector<double> losses;  // n+1
};

struct SupersampleBatch {
  int n = 0;
  int m_trials = 0;
  std::uint64_t seed = 0;
  int loss_levels = 0;  // declared quantization grid; 0 = unquantized
  std::vector<SupersampleTrial> trials;

  bool has_predictions() const {
    return !trials.empty() && !trials.front().predictions.empty();
  }
  bool has_data_keys() const {
    return !trials.empty() && !trials.front().data_keys.empty();
  }
  bool has_model_keys() const {
    return !trials.empty() && trials.front().model_key >= 0;
  }
};

struct LooBatch {
  int n = 0;  // training-set size; trials hold n+1 losses
  int m_trials = 0;
  std::uint64_t seed = 0;
  int loss_levels = 0;
  std::vector<LooTrial> trials;
};

namespace detail {

template <class TB, class Model>
void fill_optional_fields(const TB& tb, const Model& model,
                          const std::vector<typename TB::Point>& points,
                          SupersampleTrial& trial) {
  if constexpr (requires { tb.predict(model, points[0]); }) {
    trial.predictions.resize(points.size());
    for (std::size_t j = 0; j < points.size(); ++j)
      trial.predictions[j] = tb.predict(model, points[j]);
  }
  if constexpr (requires { tb.data_key(points[0]); }) {
    trial.data_keys.resize(points.size());
    for (std::size_t j = 0; j < points.size(); ++j)
      trial.data_keys[j] = tb.data_key(points[j]);
  }
  if constexpr (requires { tb.model_key(model); })
    trial.model_key = tb.model_key(model);
  if constexpr (requires { tb.trial_stat(model); })
    trial.stat = tb.trial_stat(model);
}

template <class TB>
int declared_loss_levels(const TB& tb) {
  if constexpr (requires { tb.loss_levels(); })
    return tb.loss_levels();
  else
    return 0;
}

// Runs the per-trial kernel either serially or under OpenMP. Each trial's
// randomness is keyed by (seed, trial, stream), so both modes produce
// bit-identical batches. Exceptions thrown inside the loop are replayed
// afterwards, lowest trial index first.
template <class Body>
void for_each_trial(int m_trials, RunMode mode, Body&& body) {
  std::vector<std::exception_ptr> errors(m_trials);
  if (mode == RunMode::parallel) {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < m_trials; ++t) {
      try {
        body(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  } else {
    for (int t = 0; t < m_trials; ++t) {
      try {
        body(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  }
  for (int t = 0; t < m_trials; ++t)
    if (errors[t]) std::rethrow_exception(errors[t]);
}

}  // namespace detail

// Streams: 0 data points, 1 membership bits / held-out index.
template <class TB>
SupersampleBatch run_supersample_trials(const TB& tb, int n, int m_trials,
                                        std::uint64_t seed,
                                        RunMode mode = RunMode::parallel) {
  if (n < 1) throw std::invalid_argument("run_supersample_trials: n >= 1");
  if (m_trials < 1)
    throw std::invalid_argument("run_supersample_trials: m_trials >= 1");
  SupersampleBatch batch;
  batch.n = n;
  batch.m_trials = m_trials;
  batch.seed = seed;
  batch.loss_levels = detail::declared_loss_levels(tb);
  batch.trials.resize(m_trials);

  detail::for_each_trial(m_trials, mode, [&](int t) {
    CounterRng data_rng(seed, static_cast<std::uint64_t>(t), 0);
    CounterRng bit_rng(seed, static_cast<std::uint64_t>(t), 1);
    std::vector<typename TB::Point> points;
    points.reserve(2 * n);
    for (int j = 0; j < 2 * n; ++j) points.push_back(tb.sample(data_rng));

    SupersampleTrial& trial = batch.trials[t];
    trial.s.resize(n);
    for (int i = 0; i < n; ++i) trial.s[i] = bit_rng.bernoulli(0.5) ? 1 : 0;

    std::vector<typename TB::Point> train;
    train.reserve(n);
    for (int i = 0; i < n; ++i) train.push_back(points[i + (trial.s[i] ? n : 0)]);
    auto model = tb.fit(train);

    trial.losses.resize(2 * n);
    for (int j = 0; j < 2 * n; ++j) trial.losses[j] = tb.loss(model, points[j]);
    detail::fill_optional_fields(tb, model, points, trial);
  });
  return batch;
}

template <class TB>
LooBatch run_loo_trials(const TB& tb, int n, int m_trials, std::uint64_t seed,
                        RunMode mode = RunMode::parallel) {
  if (n < 1) throw std::invalid_argument("run_loo_trials: n >= 1");
  if (m_trials < 1) throw std::invalid_argument("run_loo_trials: m_trials >= 1");
  LooBatch batch;
  batch.n = n;
  batch.m_trials = m_trials;
  batch.seed = seed;
  batch.loss_levels = detail::declared_loss_levels(tb);
  batch.trials.resize(m_trials);

  detail::for_each_trial(m_trials, mode, [&](int t) {
    CounterRng data_rng(seed, static_cast<std::uint64_t>(t), 0);
    CounterRng u_rng(seed, static_cast<std::uint64_t>(t), 1);
    std::vector<typename TB::Point> points;
    points.reserve(n + 1);
    for (int j = 0; j < n + 1; ++j) points.push_back(tb.sample(data_rng));

    LooTrial& trial = batch.trials[t];
    trial.u = static_cast<std::int32_t>(u_rng.uniform_int(n + 1));

    std::vector<typename TB::Point> train;
    train.reserve(n);
    for (int j = 0; j < n + 1; ++j)
      if (j != trial.u) train.push_back(points[j]);
    auto model = tb.fit(train);

    trial.losses.resize(n + 1);
    for (int j = 0; j < n + 1; ++j) trial.losses[j] = tb.loss(model, points[j]);
  });
  return batch;
}

// Newline-delimited persistence: a header record followed by one record per
// trial; losses are written as fixed 9-decimal strings.
void save_batch(const SupersampleBatch& batch, std::ostream& os);
void save_batch(const LooBatch& batch, std::ostream& os);
SupersampleBatch load_supersample_batch(std::istream& is);
LooBatch load_loo_batch(std::istream& is);

}  // namespace genbound
