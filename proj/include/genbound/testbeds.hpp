#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "genbound/bounds.hpp"
#include "genbound/estimators.hpp"
#include "genbound/info_measures.hpp"
#include "genbound/trials.hpp"
#include "json.hpp"

namespace genbound {

// Raised when a deterministic closed-form identity fails; the CLI maps this
// to its own exit code.
struct IdentityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GLMConfig {
  double mu = 0.0;
  double sigma2 = 1.0;  // > 0
  int n = 2;
  int m_trials = 1000;
  std::uint64_t seed = 0;
};

struct GibbsProblem {
  std::vector<std::string> w_labels;  // <= 8 hypotheses
  std::vector<std::string> z_labels;  // <= 8 data symbols
  std::vector<double> loss_table;     // |W| x |Z| row-major, >= 0
  std::vector<double> prior;          // over W
  std::vector<double> data;           // over Z
  double lambda = 1.0;                // inverse temperature, >= 0
  int n = 2;                          // <= 6, |Z|^n <= 3e5
  std::uint64_t seed = 0;             // drives the minimizer spot-check only

  double loss(std::size_t w, std::size_t z) const {
    return loss_table[w * z_labels.size() + z];
  }
};

struct ThresholdConfig {
  double theta_star = 0.5;  // in (0,1)
  int n = 2;
  int m_trials = 1000;
  std::uint64_t seed = 0;
  int cond_bins = 4;  // feature quantization for conditional estimates
};

struct MemorizerConfig {
  int alphabet_size = 8;             // <= 64
  std::vector<std::uint8_t> labels;  // clean label per symbol
  std::uint8_t default_label = 0;    // prediction on unseen features
  double noise = 0.0;                // label flip probability in [0, 0.5)
  int n = 2;
  int m_trials = 1000;
  int loo_m_trials = 0;  // 0: reuse m_trials
  std::uint64_t seed = 0;

  // target population loss p under the all-wrong-default construction:
  // uniform features collide with the training set at rate 1 - p^(1/n)
  static MemorizerConfig collision_construction(double target_pop, int n,
                                                int m_trials,
                                                std::uint64_t seed);
};

struct SGLDConfig {
  int d = 1;
  long long T = 0;           // steps; n*k for the harmonic relaxation
  bool harmonic_eta = true;  // eta_t = 1/t; otherwise eta_t = eta_value
  double eta_value = 0.0;
  double beta = 1.0;    // > 0; per-step noise variance is eta_t / beta
  double clip_L = 1.0;  // gradient-norm cap, > 0
  int n = 2;
  int m_trials = 100;  // macro-replications
  std::uint64_t seed = 0;
  double mu = 0.0;
  double sigma2 = 1.0;          // data variance per coordinate
  double sigma_subgauss = 1.0;  // loss parameter fed to the bound (external)
};

struct BoundRow {
  std::string bound_id;
  std::string info_source;  // closed_form | estimated | cap | schedule
  double info_value = 0.0;
  double bound_value = 0.0;
  bool vacuous = false;
};

struct TestbedReport {
  std::string testbed;
  int n = 0;
  std::uint64_t seed = 0;
  int m_trials = 0;
  double ci_level = 0.95;
  double empirical_gap = 0.0;
  Interval gap_ci;
  std::vector<std::pair<std::string, double>> oracles;
  std::vector<std::pair<std::string, Interval>> intervals;
  std::vector<BoundRow> bounds;
  nlohmann::ordered_json config_echo;
  double runtime_seconds = 0.0;

  double oracle(const std::string& name) const;
  Interval interval(const std::string& name) const;
  nlohmann::ordered_json to_json() const;
  void write_csv(std::ostream& os) const;
};

struct RunOptions {
  RunMode mode = RunMode::parallel;
  double ci_level = 0.95;
  int resamples = 1000;
};

TestbedReport glm_run(const GLMConfig& cfg, const RunOptions& opt = {});
TestbedReport gibbs_run(const GibbsProblem& problem, const RunOptions& opt = {});
TestbedReport threshold_run(const ThresholdConfig& cfg,
                            const RunOptions& opt = {});
TestbedReport memorizer_run(const MemorizerConfig& cfg,
                            const RunOptions& opt = {});
TestbedReport sgld_run(const SGLDConfig& cfg, const RunOptions& opt = {});

const std::vector<std::string>& testbed_registry();

// Builds the matching config from JSON and runs it.
TestbedReport run_testbed_json(const std::string& testbed,
                               const nlohmann::json& config,
                               const RunOptions& opt = {});

}  // namespace genbound
