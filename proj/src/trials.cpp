#include "genbound/trials.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "genbound/format.hpp"
#include "json.hpp"

namespace genbound {

namespace {

using json = nlohmann::ordered_json;

json losses_to_json(const std::vector<double>& losses) {
  json arr = json::array();
  for (double v : losses) arr.push_back(format_fixed9(v));
  return arr;
}

std::vector<double> losses_from_json(const json& arr) {
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) out.push_back(std::stod(v.get<std::string>()));
  return out;
}

json read_record(std::istream& is, bool& ok) {
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    ok = true;
    return json::parse(line);
  }
  ok = false;
  return json();
}

void check_header(const json& h, const char* kind) {
  if (h.value("format", "") != "genbound-batch" || h.value("version", 0) != 1)
    throw std::invalid_argument("batch file: unrecognized header");
  if (h.value("kind", "") != kind)
    throw std::invalid_argument("batch file: wrong kind, expected " +
                                std::string(kind));
}

}  // namespace

void save_batch(const SupersampleBatch& batch, std::ostream& os) {
  json header{{"format", "genbound-batch"},
              {"version", 1},
              {"kind", "supersample"},
              {"n", batch.n},
              {"m_trials", batch.m_trials},
              {"seed", batch.seed},
              {"loss_levels", batch.loss_levels}};
  os << header.dump() << '\n';
  for (int t = 0; t < batch.m_trials; ++t) {
    const SupersampleTrial& trial = batch.trials[t];
    std::string bits(trial.s.size(), '0');
    for (std::size_t i = 0; i < trial.s.size(); ++i)
      if (trial.s[i]) bits[i] = '1';
    json rec{{"trial", t}, {"s_bits", bits}, {"losses", losses_to_json(trial.losses)}};
    if (!trial.predictions.empty()) rec["predictions"] = trial.predictions;
    if (!trial.data_keys.empty()) rec["data"] = trial.data_keys;
    if (trial.model_key >= 0) rec["model_key"] = trial.model_key;
    os << rec.dump() << '\n';
  }
}

void save_batch(const LooBatch& batch, std::ostream& os) {
  json header{{"format", "genbound-batch"},
              {"version", 1},
              {"kind", "loo"},
              {"n", batch.n},
              {"m_trials", batch.m_trials},
              {"seed", batch.seed},
              {"loss_levels", batch.loss_levels}};
  os << header.dump() << '\n';
  for (int t = 0; t < batch.m_trials; ++t) {
    const LooTrial& trial = batch.trials[t];
    json rec{{"trial", t}, {"u", trial.u}, {"losses", losses_to_json(trial.losses)}};
    os << rec.dump() << '\n';
  }
}

SupersampleBatch load_supersample_batch(std::istream& is) {
  bool ok = false;
  json header = read_record(is, ok);
  if (!ok) throw std::invalid_argument("batch file: missing header");
  check_header(header, "supersample");
  SupersampleBatch batch;
  batch.n = header.at("n").get<int>();
  batch.m_trials = header.at("m_trials").get<int>();
  batch.seed = header.at("seed").get<std::uint64_t>();
  batch.loss_levels = header.value("loss_levels", 0);
  batch.trials.reserve(batch.m_trials);
  for (int t = 0; t < batch.m_trials; ++t) {
    json rec = read_record(is, ok);
    if (!ok) throw std::invalid_argument("batch file: truncated");
    SupersampleTrial trial;
    std::string bits = rec.at("s_bits").get<std::string>();
    trial.s.assign(bits.size(), 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
      trial.s[i] = bits[i] == '1' ? 1 : 0;
    trial.losses = losses_from_json(rec.at("losses"));
    if (rec.contains("predictions"))
      trial.predictions = rec["predictions"].get<std::vector<std::int32_t>>();
    if (rec.contains("data"))
      trial.data_keys = rec["data"].get<std::vector<std::int32_t>>();
    if (rec.contains("model_key"))
      trial.model_key = rec["model_key"].get<std::int64_t>();
    if (static_cast<int>(trial.s.size()) != batch.n ||
        static_cast<int>(trial.losses.size()) != 2 * batch.n)
      throw std::invalid_argument("batch file: malformed trial record");
    batch.trials.push_back(std::move(trial));
  }
  return batch;
}

LooBatch load_loo_batch(std::istream& is) {
  bool ok = false;
  json header = read_record(is, ok);
  if (!ok) throw std::invalid_argument("batch file: missing header");
  check_header(header, "loo");
  LooBatch batch;
  batch.n = header.at("n").get<int>();
  batch.m_trials = header.at("m_trials").get<int>();
  batch.seed = header.at("seed").get<std::uint64_t>();
  batch.loss_levels = header.value("loss_levels", 0);
  batch.trials.reserve(batch.m_trials);
  for (int t = 0; t < batch.m_trials; ++t) {
    json rec = read_record(is, ok);
    if (!ok) throw std::invalid_argument("batch file: truncated");
    LooTrial trial;
    trial.u = rec.at("u").get<std::int32_t>();
    trial.losses = losses_from_json(rec.at("losses"));
    if (static_cast<int>(trial.losses.size()) != batch.n + 1 || trial.u < 0 ||
        trial.u > batch.n)
      throw std::invalid_argument("batch file: malformed trial record");
    batch.trials.push_back(std::move(trial));
  }
  return batch;
}

}  // namespace genbound
