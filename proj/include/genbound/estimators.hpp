#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "genbound/trials.hpp"

namespace genbound {

// Mutual information of the normalized empirical joint of a contingency
// table (rows x columns of nonnegative counts, total >= 1). Deterministic.
double plug_in_mi(const std::vector<std::vector<long long>>& counts);

// Per index i, the plug-in mutual information between the loss difference
// losses[i+n] - losses[i] (on the declared quantization grid) and the
// membership bit s[i], pooled over trials. Requires quantized losses.
std::vector<double> estimate_per_sample_ldmi(const SupersampleBatch& batch);
std::vector<double> estimate_per_sample_ldmi(const SupersampleBatch& batch,
                                             std::span<const int> idx);

enum class Conditioning { none, per_pair, full };

struct CmiEstimate {
  std::vector<double> per_index;
  bool reliable = true;  // false when a full-conditioning bin is too thin

  double total() const {
    double s = 0.0;
    for (double v : per_index) s += v;
    return s;
  }
  double mean() const {
    return per_index.empty() ? 0.0 : total() / static_cast<double>(per_index.size());
  }
};

// Per-sample information between the (loss_i, loss_{i+n}) pair and s[i].
// Conditioning::none pools all trials; per_pair bins them by the realized
// data pair; full bins them by the whole supersample (finite alphabets only,
// occupancy floor per bin).
CmiEstimate estimate_ecmi(const SupersampleBatch& batch, Conditioning cond,
                          int occupancy_floor = 25);
CmiEstimate estimate_ecmi(const SupersampleBatch& batch, Conditioning cond,
                          std::span<const int> idx, int occupancy_floor = 25);

// Same with the (prediction_i, prediction_{i+n}) pair.
CmiEstimate estimate_fcmi(const SupersampleBatch& batch, Conditioning cond,
                          int occupancy_floor = 25);
CmiEstimate estimate_fcmi(const SupersampleBatch& batch, Conditioning cond,
                          std::span<const int> idx, int occupancy_floor = 25);

// Same with the hypothesis id itself (requires model keys).
CmiEstimate estimate_hypothesis_cmi(const SupersampleBatch& batch,
                                    Conditioning cond, int occupancy_floor = 25);
CmiEstimate estimate_hypothesis_cmi(const SupersampleBatch& batch,
                                    Conditioning cond, std::span<const int> idx,
                                    int occupancy_floor = 25);

// Plug-in I(loss vector; held-out index) from pooled empirical joints, the
// loss vector treated as an opaque symbol on the quantization grid.
double estimate_loo_emi(const LooBatch& batch);
double estimate_loo_emi(const LooBatch& batch, std::span<const int> idx);

// Entropy-decomposition route for interpolating binary runs: the measured
// held-out loss rate times ln(n+1). Cross-checks estimate_loo_emi.
double loo_support_formula(const LooBatch& batch);
double loo_support_formula(const LooBatch& batch, std::span<const int> idx);

// Preindexed form of the per-sample estimators for repeated evaluation on
// resampled trial subsets (bootstrap). Agrees exactly with the plain
// estimators on the full index set.
class PerSampleMiStat {
 public:
  enum class Kind { ldmi, ecmi, fcmi, hypothesis_cmi };

  PerSampleMiStat(const SupersampleBatch& batch, Kind kind, Conditioning cond);

  std::vector<double> per_index(std::span<const int> idx) const;
  double total(std::span<const int> idx) const;

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<std::vector<std::int32_t>> cell_;       // [i][t] -> cell id
  std::vector<std::vector<std::int32_t>> bin_start_;  // [i] cell offsets per bin
  std::vector<std::uint8_t> sbit_;                    // [i*m + t]
};

class LooEmiStat {
 public:
  explicit LooEmiStat(const LooBatch& batch);
  double value(std::span<const int> idx) const;

 private:
  int n_ = 0;
  int n_syms_ = 0;
  std::vector<std::int32_t> sym_;
  std::vector<std::int32_t> u_;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

// Percentile bootstrap over trial indices. The statistic receives a
// multiset of trial indices drawn with replacement; resample r uses the
// stream (seed, r, 2), so the interval is deterministic given the seed.
Interval bootstrap_ci(const std::function<double(std::span<const int>)>& stat,
                      int m_trials, int resamples = 1000, double level = 0.95,
                      std::uint64_t seed = 0);

}  // namespace genbound
