#include "genbound/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace genbound {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// I(sym; bit) from per-symbol counts of bit = 0 and bit = 1.
double mi_from_bit_counts(
    const std::unordered_map<std::int64_t, std::array<long long, 2>>& counts) {
  long long total = 0, col0 = 0, col1 = 0;
  for (const auto& [sym, c] : counts) {
    total += c[0] + c[1];
    col0 += c[0];
    col1 += c[1];
  }
  if (total == 0) return 0.0;
  double n = static_cast<double>(total);
  // I = H(sym) + H(bit) - H(sym, bit)
  double h_joint = 0.0, h_sym = 0.0;
  for (const auto& [sym, c] : counts) {
    h_joint -= xlogx(c[0] / n) + xlogx(c[1] / n);
    h_sym -= xlogx((c[0] + c[1]) / n);
  }
  double h_bit = -xlogx(col0 / n) - xlogx(col1 / n);
  return std::max(h_sym + h_bit - h_joint, 0.0);
}

int quantize(double loss, int levels) {
  return static_cast<int>(std::lround(loss * (levels - 1)));
}

std::vector<int> identity_indices(int m) {
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

// FNV-1a over the full key vector; used as the full-conditioning bin id.
std::int64_t hash_keys(const std::vector<std::int32_t>& keys) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::int32_t k : keys) {
    h ^= static_cast<std::uint32_t>(k);
    h *= 1099511628211ULL;
  }
  return static_cast<std::int64_t>(h >> 1);
}

std::int64_t pack_pair(std::int64_t a, std::int64_t b) {
  return (a << 21) ^ b;  // symbols are small nonnegative ids
}

// Shared kernel: per index i, the conditional plug-in MI between a
// trial-level symbol and the membership bit, binned by the conditioning key.
template <class SymbolFn>
CmiEstimate conditional_per_sample_mi(const SupersampleBatch& batch,
                                      Conditioning cond,
                                      std::span<const int> idx,
                                      int occupancy_floor, SymbolFn&& symbol) {
  if (cond != Conditioning::none && !batch.has_data_keys())
    throw std::invalid_argument(
        "conditioning requires a finite data alphabet (no data keys in batch)");
  CmiEstimate out;
  out.per_index.assign(batch.n, 0.0);

  std::vector<std::int64_t> full_bins;
  if (cond == Conditioning::full) {
    full_bins.reserve(batch.trials.size());
    for (const auto& trial : batch.trials)
      full_bins.push_back(hash_keys(trial.data_keys));
  }

#pragma omp parallel for schedule(static)
  for (int i = 0; i < batch.n; ++i) {
    std::unordered_map<std::int64_t,
                       std::unordered_map<std::int64_t, std::array<long long, 2>>>
        bins;
    for (int t : idx) {
      const SupersampleTrial& trial = batch.trials[t];
      std::int64_t bin = 0;
      if (cond == Conditioning::per_pair)
        bin = pack_pair(trial.data_keys[i], trial.data_keys[i + batch.n]);
      else if (cond == Conditioning::full)
        bin = full_bins[t];
      auto& cell = bins[bin][symbol(trial, i)];
      ++cell[trial.s[i] ? 1 : 0];
    }
    double total = static_cast<double>(idx.size());
    double value = 0.0;
    for (const auto& [bin, table] : bins) {
      long long bin_count = 0;
      for (const auto& [sym, c] : table) bin_count += c[0] + c[1];
      if (cond == Conditioning::full && bin_count < occupancy_floor) {
#pragma omp critical
        out.reliable = false;
      }
      value += (bin_count / total) * mi_from_bit_counts(table);
    }
    out.per_index[i] = value;
  }
  return out;
}

void require_quantized(const SupersampleBatch& batch, const char* who) {
  if (batch.loss_levels < 2)
    throw std::invalid_argument(std::string(who) +
                                ": losses carry no quantization grid");
}

}  // namespace

double plug_in_mi(const std::vector<std::vector<long long>>& counts) {
  if (counts.empty() || counts.front().empty())
    throw std::invalid_argument("plug_in_mi: empty table");
  std::size_t cols = counts.front().size();
  long long total = 0;
  std::vector<long long> row_sum(counts.size(), 0), col_sum(cols, 0);
  for (std::size_t r = 0; r < counts.size(); ++r) {
    if (counts[r].size() != cols)
      throw std::invalid_argument("plug_in_mi: ragged table");
    for (std::size_t c = 0; c < cols; ++c) {
      if (counts[r][c] < 0)
        throw std::invalid_argument("plug_in_mi: negative count");
      row_sum[r] += counts[r][c];
      col_sum[c] += counts[r][c];
      total += counts[r][c];
    }
  }
  if (total < 1) throw std::invalid_argument("plug_in_mi: empty table");
  double n = static_cast<double>(total);
  double mi = 0.0;
  for (std::size_t r = 0; r < counts.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (counts[r][c] > 0)
        mi += counts[r][c] / n *
              std::log(counts[r][c] * n /
                       (static_cast<double>(row_sum[r]) * col_sum[c]));
  return std::max(mi, 0.0);
}

std::vector<double> estimate_per_sample_ldmi(const SupersampleBatch& batch,
                                             std::span<const int> idx) {
  require_quantized(batch, "estimate_per_sample_ldmi");
  int levels = batch.loss_levels;
  auto diff_symbol = [levels](const SupersampleTrial& trial, int i) {
    int n = static_cast<int>(trial.s.size());
    return static_cast<std::int64_t>(quantize(trial.losses[i + n], levels) -
                                     quantize(trial.losses[i], levels) +
                                     (levels - 1));
  };
  return conditional_per_sample_mi(batch, Conditioning::none, idx, 0,
                                   diff_symbol)
      .per_index;
}

std::vector<double> estimate_per_sample_ldmi(const SupersampleBatch& batch) {
  auto idx = identity_indices(batch.m_trials);
  return estimate_per_sample_ldmi(batch, idx);
}

CmiEstimate estimate_ecmi(const SupersampleBatch& batch, Conditioning cond,
                          std::span<const int> idx, int occupancy_floor) {
  require_quantized(batch, "estimate_ecmi");
  int levels = batch.loss_levels;
  auto pair_symbol = [levels](const SupersampleTrial& trial, int i) {
    int n = static_cast<int>(trial.s.size());
    return pack_pair(quantize(trial.losses[i], levels),
                     quantize(trial.losses[i + n], levels));
  };
  return conditional_per_sample_mi(batch, cond, idx, occupancy_floor,
                                   pair_symbol);
}

CmiEstimate estimate_ecmi(const SupersampleBatch& batch, Conditioning cond,
                          int occupancy_floor) {
  auto idx = identity_indices(batch.m_trials);
  return estimate_ecmi(batch, cond, idx, occupancy_floor);
}

CmiEstimate estimate_fcmi(const SupersampleBatch& batch, Conditioning cond,
                          std::span<const int> idx, int occupancy_floor) {
  if (!batch.has_predictions())
    throw std::invalid_argument("estimate_fcmi: batch carries no predictions");
  auto pair_symbol = [](const SupersampleTrial& trial, int i) {
    int n = static_cast<int>(trial.s.size());
    return pack_pair(trial.predictions[i], trial.predictions[i + n]);
  };
  return conditional_per_sample_mi(batch, cond, idx, occupancy_floor,
                                   pair_symbol);
}

CmiEstimate estimate_fcmi(const SupersampleBatch& batch, Conditioning cond,
                          int occupancy_floor) {
  auto idx = identity_indices(batch.m_trials);
  return estimate_fcmi(batch, cond, idx, occupancy_floor);
}

CmiEstimate estimate_hypothesis_cmi(const SupersampleBatch& batch,
                                    Conditioning cond, std::span<const int> idx,
                                    int occupancy_floor) {
  if (!batch.has_model_keys())
    throw std::invalid_argument(
        "estimate_hypothesis_cmi: batch carries no model keys");
  auto model_symbol = [](const SupersampleTrial& trial, int) {
    return trial.model_key;
  };
  return conditional_per_sample_mi(batch, cond, idx, occupancy_floor,
                                   model_symbol);
}

CmiEstimate estimate_hypothesis_cmi(const SupersampleBatch& batch,
                                    Conditioning cond, int occupancy_floor) {
  auto idx = identity_indices(batch.m_trials);
  return estimate_hypothesis_cmi(batch, cond, idx, occupancy_floor);
}

double estimate_loo_emi(const LooBatch& batch, std::span<const int> idx) {
  if (batch.loss_levels < 2)
    throw std::invalid_argument(
        "estimate_loo_emi: losses carry no quantization grid");
  int levels = batch.loss_levels;
  // joint of (loss vector as opaque symbol, held-out index)
  std::unordered_map<std::int64_t, std::vector<long long>> counts;
  for (int t : idx) {
    const LooTrial& trial = batch.trials[t];
    std::uint64_t h = 1469598103934665603ULL;
    for (double loss : trial.losses) {
      h ^= static_cast<std::uint32_t>(quantize(loss, levels));
      h *= 1099511628211ULL;
    }
    auto& row = counts[static_cast<std::int64_t>(h >> 1)];
    if (row.empty()) row.assign(batch.n + 1, 0);
    ++row[trial.u];
  }
  double total = static_cast<double>(idx.size());
  std::vector<double> u_marginal(batch.n + 1, 0.0);
  for (const auto& [sym, row] : counts)
    for (int u = 0; u <= batch.n; ++u) u_marginal[u] += row[u];
  double h_sym = 0.0, h_joint = 0.0, h_u = 0.0;
  for (const auto& [sym, row] : counts) {
    long long sym_count = 0;
    for (long long c : row) {
      sym_count += c;
      h_joint -= xlogx(c / total);
    }
    h_sym -= xlogx(sym_count / total);
  }
  for (double c : u_marginal) h_u -= xlogx(c / total);
  return std::max(h_sym + h_u - h_joint, 0.0);
}

double estimate_loo_emi(const LooBatch& batch) {
  auto idx = identity_indices(batch.m_trials);
  return estimate_loo_emi(batch, idx);
}

double loo_support_formula(const LooBatch& batch, std::span<const int> idx) {
  double sum = 0.0;
  for (int t : idx) sum += batch.trials[t].losses[batch.trials[t].u];
  return sum / static_cast<double>(idx.size()) *
         std::log(static_cast<double>(batch.n) + 1.0);
}

double loo_support_formula(const LooBatch& batch) {
  auto idx = identity_indices(batch.m_trials);
  return loo_support_formula(batch, idx);
}

namespace {

// Symbol extraction shared with the plain estimators above.
std::int64_t trial_symbol(const SupersampleBatch& batch,
                          PerSampleMiStat::Kind kind,
                          const SupersampleTrial& trial, int i) {
  int levels = batch.loss_levels;
  int n = batch.n;
  switch (kind) {
    case PerSampleMiStat::Kind::ldmi:
      return quantize(trial.losses[i + n], levels) -
             quantize(trial.losses[i], levels) + (levels - 1);
    case PerSampleMiStat::Kind::ecmi:
      return pack_pair(quantize(trial.losses[i], levels),
                       quantize(trial.losses[i + n], levels));
    case PerSampleMiStat::Kind::fcmi:
      return pack_pair(trial.predictions[i], trial.predictions[i + n]);
    case PerSampleMiStat::Kind::hypothesis_cmi:
      return trial.model_key;
  }
  return 0;
}

}  // namespace

PerSampleMiStat::PerSampleMiStat(const SupersampleBatch& batch, Kind kind,
                                 Conditioning cond)
    : n_(batch.n), m_(batch.m_trials) {
  if (kind == Kind::ldmi || kind == Kind::ecmi)
    require_quantized(batch, "PerSampleMiStat");
  if (kind == Kind::fcmi && !batch.has_predictions())
    throw std::invalid_argument("PerSampleMiStat: batch carries no predictions");
  if (kind == Kind::hypothesis_cmi && !batch.has_model_keys())
    throw std::invalid_argument("PerSampleMiStat: batch carries no model keys");
  if (cond != Conditioning::none && !batch.has_data_keys())
    throw std::invalid_argument(
        "PerSampleMiStat: conditioning requires a finite data alphabet");
  std::vector<std::int64_t> full_bins;
  if (cond == Conditioning::full) {
    full_bins.reserve(batch.trials.size());
    for (const auto& trial : batch.trials)
      full_bins.push_back(hash_keys(trial.data_keys));
  }

  cell_.assign(n_, {});
  bin_start_.assign(n_, {});
  sbit_.assign(static_cast<std::size_t>(n_) * m_, 0);

#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_; ++i) {
    std::unordered_map<std::int64_t, std::int32_t> bin_ids;
    std::map<std::pair<std::int32_t, std::int64_t>, std::int32_t> cell_ids;
    std::vector<std::int32_t> raw(m_);
    std::vector<std::pair<std::int32_t, std::int64_t>> cell_keys;  // (bin, sym)
    for (int t = 0; t < m_; ++t) {
      const SupersampleTrial& trial = batch.trials[t];
      std::int64_t bin = 0;
      if (cond == Conditioning::per_pair)
        bin = pack_pair(trial.data_keys[i], trial.data_keys[i + n_]);
      else if (cond == Conditioning::full)
        bin = full_bins[t];
      auto [bit, inserted] = bin_ids.try_emplace(
          bin, static_cast<std::int32_t>(bin_ids.size()));
      std::pair<std::int32_t, std::int64_t> key{
          bit->second, trial_symbol(batch, kind, trial, i)};
      auto [cit, fresh] = cell_ids.try_emplace(
          key, static_cast<std::int32_t>(cell_ids.size()));
      if (fresh) cell_keys.push_back(key);
      raw[t] = cit->second;
      sbit_[static_cast<std::size_t>(i) * m_ + t] = trial.s[i] ? 1 : 0;
    }
    // reorder cells so that same-bin cells are contiguous
    std::vector<std::int32_t> order(cell_keys.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
      return cell_keys[a] < cell_keys[b];
    });
    std::vector<std::int32_t> remap(cell_keys.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) remap[order[pos]] = pos;
    cell_[i].resize(m_);
    for (int t = 0; t < m_; ++t) cell_[i][t] = remap[raw[t]];
    bin_start_[i].clear();
    std::int32_t prev_bin = -1;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      std::int32_t bin = cell_keys[order[pos]].first;
      if (bin != prev_bin) {
        bin_start_[i].push_back(static_cast<std::int32_t>(pos));
        prev_bin = bin;
      }
    }
    bin_start_[i].push_back(static_cast<std::int32_t>(order.size()));
  }
}

std::vector<double> PerSampleMiStat::per_index(std::span<const int> idx) const {
  std::vector<double> out(n_, 0.0);
  double total = static_cast<double>(idx.size());
  for (int i = 0; i < n_; ++i) {
    std::size_t cells = bin_start_[i].back();
    std::vector<std::array<long long, 2>> counts(cells, {0, 0});
    const std::int32_t* cell_row = cell_[i].data();
    const std::uint8_t* s_row = sbit_.data() + static_cast<std::size_t>(i) * m_;
    for (int t : idx) ++counts[cell_row[t]][s_row[t]];
    double value = 0.0;
    for (std::size_t b = 0; b + 1 < bin_start_[i].size(); ++b) {
      long long c0 = 0, c1 = 0;
      for (std::int32_t c = bin_start_[i][b]; c < bin_start_[i][b + 1]; ++c) {
        c0 += counts[c][0];
        c1 += counts[c][1];
      }
      long long bin_total = c0 + c1;
      if (bin_total == 0) continue;
      double bn = static_cast<double>(bin_total);
      double h_sym = 0.0, h_joint = 0.0;
      for (std::int32_t c = bin_start_[i][b]; c < bin_start_[i][b + 1]; ++c) {
        h_joint -= xlogx(counts[c][0] / bn) + xlogx(counts[c][1] / bn);
        h_sym -= xlogx((counts[c][0] + counts[c][1]) / bn);
      }
      double h_bit = -xlogx(c0 / bn) - xlogx(c1 / bn);
      value += bn / total * std::max(h_sym + h_bit - h_joint, 0.0);
    }
    out[i] = value;
  }
  return out;
}

double PerSampleMiStat::total(std::span<const int> idx) const {
  double sum = 0.0;
  for (double v : per_index(idx)) sum += v;
  return sum;
}

LooEmiStat::LooEmiStat(const LooBatch& batch) : n_(batch.n) {
  if (batch.loss_levels < 2)
    throw std::invalid_argument("LooEmiStat: losses carry no quantization grid");
  int levels = batch.loss_levels;
  std::unordered_map<std::int64_t, std::int32_t> sym_ids;
  sym_.reserve(batch.m_trials);
  u_.reserve(batch.m_trials);
  for (const LooTrial& trial : batch.trials) {
    std::uint64_t h = 1469598103934665603ULL;
    for (double loss : trial.losses) {
      h ^= static_cast<std::uint32_t>(quantize(loss, levels));
      h *= 1099511628211ULL;
    }
    auto [it, fresh] = sym_ids.try_emplace(
        static_cast<std::int64_t>(h >> 1),
        static_cast<std::int32_t>(sym_ids.size()));
    sym_.push_back(it->second);
    u_.push_back(trial.u);
  }
  n_syms_ = static_cast<int>(sym_ids.size());
}

double LooEmiStat::value(std::span<const int> idx) const {
  std::vector<long long> counts(static_cast<std::size_t>(n_syms_) * (n_ + 1), 0);
  std::vector<long long> sym_sum(n_syms_, 0);
  std::vector<long long> u_sum(n_ + 1, 0);
  for (int t : idx) {
    ++counts[static_cast<std::size_t>(sym_[t]) * (n_ + 1) + u_[t]];
    ++sym_sum[sym_[t]];
    ++u_sum[u_[t]];
  }
  double total = static_cast<double>(idx.size());
  double h_sym = 0.0, h_u = 0.0, h_joint = 0.0;
  for (long long c : sym_sum) h_sym -= xlogx(c / total);
  for (long long c : u_sum) h_u -= xlogx(c / total);
  for (long long c : counts) h_joint -= xlogx(c / total);
  return std::max(h_sym + h_u - h_joint, 0.0);
}

Interval bootstrap_ci(const std::function<double(std::span<const int>)>& stat,
                      int m_trials, int resamples, double level,
                      std::uint64_t seed) {
  if (resamples < 2)
    throw std::invalid_argument("bootstrap_ci: resamples must be >= 2");
  if (m_trials < 1)
    throw std::invalid_argument("bootstrap_ci: m_trials must be >= 1");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("bootstrap_ci: level must lie in (0,1)");
  std::vector<double> stats(resamples);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < resamples; ++r) {
    CounterRng rng(seed, static_cast<std::uint64_t>(r), 2);
    std::vector<int> idx(m_trials);
    for (int j = 0; j < m_trials; ++j)
      idx[j] = static_cast<int>(rng.uniform_int(m_trials));
    stats[r] = stat(idx);
  }
  std::sort(stats.begin(), stats.end());
  auto quantile = [&stats](double q) {
    double pos = q * (stats.size() - 1);
    std::size_t k = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(k);
    if (k + 1 >= stats.size()) return stats.back();
    return stats[k] * (1.0 - frac) + stats[k + 1] * frac;
  };
  double tail = (1.0 - level) / 2.0;
  return Interval{quantile(tail), quantile(1.0 - tail)};
}

}  // namespace genbound
