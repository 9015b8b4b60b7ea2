#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "genbound/bounds.hpp"
#include "genbound/estimators.hpp"
#include "genbound/format.hpp"
#include "genbound/info_measures.hpp"
#include "genbound/testbeds.hpp"
#include "json.hpp"

namespace {

using namespace genbound;
using json = nlohmann::ordered_json;

// exit codes: 0 ok, 2 parse, 3 domain, 4 infeasible, 5 identity violation
constexpr int kOk = 0;
constexpr int kParseError = 2;
constexpr int kDomainError = 3;
constexpr int kInfeasible = 4;
constexpr int kIdentityViolation = 5;

struct ParseFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw ParseFailure("trailing characters in '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw ParseFailure("not a number: '" + s + "'");
  } catch (const std::out_of_range&) {
    throw ParseFailure("number out of range: '" + s + "'");
  }
}

double parse_double_or_inf(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  return parse_double(s);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  if (out.empty()) throw ParseFailure("empty list");
  return out;
}

// rows separated by ';', entries by ','
JointDist parse_joint(const std::string& s) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(s);
  std::string row;
  while (std::getline(ss, row, ';')) rows.push_back(parse_list(row));
  if (rows.empty()) throw ParseFailure("empty joint");
  std::size_t ny = rows.front().size();
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != ny) throw ParseFailure("ragged joint matrix");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return JointDist::from_probs(rows.size(), ny, flat);
}

struct MeasureArgs {
  std::optional<std::string> p, q, joint, xs, ys;
  std::optional<double> gamma, alpha, s, c, klv;

  std::string need(const std::optional<std::string>& v, const char* name) const {
    if (!v) throw ParseFailure(std::string("missing --") + name);
    return *v;
  }
  double need(const std::optional<double>& v, const char* name) const {
    if (!v) throw ParseFailure(std::string("missing --") + name);
    return *v;
  }
};

struct MeasureSpec {
  std::string id;
  std::string signature;
  double (*eval)(const MeasureArgs&);
};

const std::vector<MeasureSpec>& measure_registry() {
  static const std::vector<MeasureSpec> registry{
      {"kl", "--p <list> --q <list>",
       [](const MeasureArgs& a) {
         return kl(DiscreteDist::from_probs(parse_list(a.need(a.p, "p"))),
                   DiscreteDist::from_probs(parse_list(a.need(a.q, "q"))));
       }},
      {"mutual_information", "--joint <matrix>",
       [](const MeasureArgs& a) {
         return mutual_information(parse_joint(a.need(a.joint, "joint")));
       }},
      {"binary_kl", "--q <prob> --p <prob>",
       [](const MeasureArgs& a) {
         return binary_kl(parse_double(a.need(a.q, "q")),
                          parse_double(a.need(a.p, "p")));
       }},
      {"binary_kl_gamma", "--q <prob> --p <prob> --gamma <real>",
       [](const MeasureArgs& a) {
         return binary_kl_gamma(parse_double(a.need(a.q, "q")),
                                parse_double(a.need(a.p, "p")),
                                a.need(a.gamma, "gamma"));
       }},
      {"binary_kl_inverse_upper", "--s <prob> --c <nats>",
       [](const MeasureArgs& a) {
         return binary_kl_inverse_upper(a.need(a.s, "s"), a.need(a.c, "c"));
       }},
      {"binary_kl_inverse_relaxed", "--s <prob> --c <nats>",
       [](const MeasureArgs& a) {
         return binary_kl_inverse_relaxed(a.need(a.s, "s"), a.need(a.c, "c"));
       }},
      {"total_variation", "--p <list> --q <list>",
       [](const MeasureArgs& a) {
         return total_variation(
             DiscreteDist::from_probs(parse_list(a.need(a.p, "p"))),
             DiscreteDist::from_probs(parse_list(a.need(a.q, "q"))));
       }},
      {"pinsker_bound", "--klv <nats>",
       [](const MeasureArgs& a) { return pinsker_bound(a.need(a.klv, "klv")); }},
      {"bh_bound", "--klv <nats>",
       [](const MeasureArgs& a) { return bh_bound(a.need(a.klv, "klv")); }},
      {"renyi_divergence", "--p <list> --q <list> --alpha <real>",
       [](const MeasureArgs& a) {
         return renyi_divergence(
             DiscreteDist::from_probs(parse_list(a.need(a.p, "p"))),
             DiscreteDist::from_probs(parse_list(a.need(a.q, "q"))),
             a.need(a.alpha, "alpha"));
       }},
      {"alpha_mutual_information", "--joint <matrix> --alpha <real>",
       [](const MeasureArgs& a) {
         return alpha_mutual_information(parse_joint(a.need(a.joint, "joint")),
                                         a.need(a.alpha, "alpha"));
       }},
      {"maximal_leakage", "--joint <matrix>",
       [](const MeasureArgs& a) {
         return maximal_leakage(parse_joint(a.need(a.joint, "joint")));
       }},
      {"wasserstein1_1d", "--xs <list> --ys <list>",
       [](const MeasureArgs& a) {
         return wasserstein1_1d(parse_list(a.need(a.xs, "xs")),
                                parse_list(a.need(a.ys, "ys")));
       }},
      {"wasserstein1_discrete_metric", "--p <list> --q <list>",
       [](const MeasureArgs& a) {
         return wasserstein1_discrete_metric(
             DiscreteDist::from_probs(parse_list(a.need(a.p, "p"))),
             DiscreteDist::from_probs(parse_list(a.need(a.q, "q"))));
       }},
      {"symmetrized_kl", "--p <list> --q <list>",
       [](const MeasureArgs& a) {
         return symmetrized_kl(
             DiscreteDist::from_probs(parse_list(a.need(a.p, "p"))),
             DiscreteDist::from_probs(parse_list(a.need(a.q, "q"))));
       }},
  };
  return registry;
}

int cmd_measure(const std::string& id, const MeasureArgs& args) {
  const MeasureSpec* spec = nullptr;
  for (const auto& m : measure_registry())
    if (m.id == id) spec = &m;
  if (!spec) {
    std::cerr << "unknown measure: " << id << "\n";
    return kParseError;
  }
  double value = spec->eval(args);
  std::cout << format_fixed9(value) << "\n";
  return kOk;
}

int cmd_bound(const std::string& id, const BoundQuery& query) {
  BoundValue v = evaluate_bound(id, query);
  json out;
  if (std::isfinite(v.value))
    out["value"] = v.value;
  else
    out["value"] = format_fixed9(v.value);  // json has no infinity literal
  out["vacuous"] = v.vacuous;
  json comps = json::object();
  for (const auto& [k, c] : v.components) comps[k] = c;
  out["components"] = comps;
  std::cout << out.dump() << "\n";
  return kOk;
}

int cmd_list(const std::string& registry, bool as_json) {
  if (registry == "measures") {
    if (as_json) {
      json arr = json::array();
      for (const auto& m : measure_registry())
        arr.push_back(json{{"id", m.id}, {"args", m.signature}});
      std::cout << arr.dump(2) << "\n";
    } else {
      for (const auto& m : measure_registry())
        std::printf("%-32s %s\n", m.id.c_str(), m.signature.c_str());
    }
    return kOk;
  }
  if (registry == "bounds") {
    if (as_json) {
      json arr = json::array();
      for (const auto& b : bound_registry())
        arr.push_back(json{{"id", b.id},
                           {"required", b.required},
                           {"bounded_loss", b.bounded_loss},
                           {"summary", b.summary}});
      std::cout << arr.dump(2) << "\n";
    } else {
      for (const auto& b : bound_registry()) {
        std::string req;
        for (const auto& r : b.required) req += (req.empty() ? "" : ", ") + r;
        std::printf("%-28s requires: %s\n", b.id.c_str(), req.c_str());
      }
    }
    return kOk;
  }
  if (registry == "testbeds") {
    if (as_json) {
      json arr = testbed_registry();
      std::cout << arr.dump(2) << "\n";
    } else {
      for (const auto& t : testbed_registry()) std::printf("%s\n", t.c_str());
    }
    return kOk;
  }
  std::cerr << "unknown registry: " << registry
            << " (expected measures|bounds|testbeds)\n";
  return kParseError;
}

int cmd_experiment(const std::string& config_path, const std::string& csv_override,
                   const std::string& json_override) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "cannot open config: " << config_path << "\n";
    return kParseError;
  }
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
    return kParseError;
  }

  std::string testbed = cfg.value("testbed", "");
  bool known = false;
  for (const auto& t : testbed_registry()) known = known || t == testbed;
  if (!known) {
    std::cerr << "config names no known testbed\n";
    return kParseError;
  }
  if (!cfg.contains("seed")) {
    std::cerr << "config must carry an explicit seed\n";
    return kParseError;
  }

  std::vector<std::string> bound_filter;
  bool all_bounds = true;
  if (cfg.contains("bounds") && cfg["bounds"].is_array()) {
    all_bounds = false;
    for (const auto& b : cfg["bounds"]) {
      std::string bid = b.get<std::string>();
      if (!find_bound(bid)) {
        std::cerr << "config references unknown bound id: " << bid << "\n";
        return kParseError;
      }
      bound_filter.push_back(bid);
    }
  }

  json section = cfg.value("config", json::object());
  section["seed"] = cfg["seed"];
  if (cfg.contains("m_trials")) section["m_trials"] = cfg["m_trials"];
  if (cfg.contains("n")) section["n"] = cfg["n"];

  RunOptions opt;
  opt.ci_level = cfg.value("ci_level", 0.95);
  opt.resamples = cfg.value("resamples", 1000);

  TestbedReport report = run_testbed_json(testbed, section, opt);
  if (!all_bounds) {
    std::vector<BoundRow> kept;
    for (const auto& row : report.bounds)
      for (const auto& want : bound_filter)
        if (row.bound_id == want) {
          kept.push_back(row);
          break;
        }
    report.bounds = std::move(kept);
  }

  std::string csv_path = !csv_override.empty() ? csv_override
                                               : cfg.value("csv_path", "");
  std::string json_path = !json_override.empty() ? json_override
                                                 : cfg.value("json_path", "");
  if (!csv_path.empty()) {
    std::ofstream os(csv_path);
    if (!os) {
      std::cerr << "cannot open for writing: " << csv_path << "\n";
      return kParseError;
    }
    report.write_csv(os);
  }
  if (!json_path.empty()) {
    std::ofstream os(json_path);
    if (!os) {
      std::cerr << "cannot open for writing: " << json_path << "\n";
      return kParseError;
    }
    os << report.to_json().dump(2) << "\n";
  }

  for (const auto& row : report.bounds)
    std::printf("%s %s info=%s value=%s vacuous=%d\n", row.bound_id.c_str(),
                row.info_source.c_str(), format_fixed9(row.info_value).c_str(),
                format_fixed9(row.bound_value).c_str(), row.vacuous ? 1 : 0);
  std::printf("gap %s ci=[%s, %s]\n", format_fixed9(report.empirical_gap).c_str(),
              format_fixed9(report.gap_ci.lo).c_str(),
              format_fixed9(report.gap_ci.hi).c_str());
  std::fprintf(stderr, "runtime %.3fs\n", report.runtime_seconds);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalization-bound evaluation toolkit"};
  app.require_subcommand(1);

  // measure
  auto* measure = app.add_subcommand("measure", "evaluate an information measure");
  std::string measure_id;
  MeasureArgs margs;
  std::string m_p, m_q, m_joint, m_xs, m_ys;
  double m_gamma = 0, m_alpha = 0, m_s = 0, m_c = 0, m_klv = 0;
  measure->add_option("id", measure_id)->required();
  measure->add_option("--p", m_p);
  measure->add_option("--q", m_q);
  measure->add_option("--joint", m_joint);
  measure->add_option("--xs", m_xs);
  measure->add_option("--ys", m_ys);
  auto* og = measure->add_option("--gamma", m_gamma);
  auto* oa = measure->add_option("--alpha", m_alpha);
  auto* os_ = measure->add_option("--s", m_s);
  auto* oc = measure->add_option("--c", m_c);
  auto* ok = measure->add_option("--klv", m_klv);

  // bound
  auto* bound = app.add_subcommand("bound", "evaluate a generalization bound");
  std::string bound_id, b_info, b_alpha, b_eta, b_rho2;
  BoundQuery query;
  double b_delta = 0, b_sigma = 0, b_train = 0, b_gamma = 0, b_lambda = 0;
  double b_m = 0, b_L = 0, b_k = 0, b_dvc = 0, b_sigma_beta = 0, b_d = 0;
  bound->add_option("id", bound_id)->required();
  bound->add_option("--n", query.n);
  auto* bd = bound->add_option("--delta", b_delta);
  auto* bs = bound->add_option("--sigma", b_sigma);
  auto* bt = bound->add_option("--train", b_train);
  bound->add_option("--info", b_info);
  auto* bg = bound->add_option("--gamma", b_gamma);
  auto* bl = bound->add_option("--lambda", b_lambda);
  bound->add_option("--alpha", b_alpha);
  auto* bm = bound->add_option("--m", b_m);
  auto* bL = bound->add_option("--L", b_L);
  auto* bk = bound->add_option("--k", b_k);
  auto* bdv = bound->add_option("--d-vc", b_dvc);
  auto* bsb = bound->add_option("--sigma-beta", b_sigma_beta);
  auto* bdd = bound->add_option("--d", b_d);
  bound->add_option("--eta", b_eta);
  bound->add_option("--rho2", b_rho2);
  bound->add_flag("--conditional", query.conditional);

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run a testbed from a config");
  std::string config_path, csv_override, json_override;
  experiment->add_option("--config", config_path)->required();
  experiment->add_option("--csv", csv_override);
  experiment->add_option("--json", json_override);

  // list
  auto* list = app.add_subcommand("list", "print a registry");
  std::string registry_name;
  bool list_json = false;
  list->add_option("registry", registry_name)->required();
  list->add_flag("--json", list_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return kParseError;
  }

  try {
    if (measure->parsed()) {
      if (!m_p.empty()) margs.p = m_p;
      if (!m_q.empty()) margs.q = m_q;
      if (!m_joint.empty()) margs.joint = m_joint;
      if (!m_xs.empty()) margs.xs = m_xs;
      if (!m_ys.empty()) margs.ys = m_ys;
      if (og->count()) margs.gamma = m_gamma;
      if (oa->count()) margs.alpha = m_alpha;
      if (os_->count()) margs.s = m_s;
      if (oc->count()) margs.c = m_c;
      if (ok->count()) margs.klv = m_klv;
      return cmd_measure(measure_id, margs);
    }
    if (bound->parsed()) {
      if (bd->count()) query.delta = b_delta;
      if (bs->count()) query.sigma = b_sigma;
      if (bt->count()) query.train_loss = b_train;
      if (!b_info.empty()) query.info = parse_list(b_info);
      if (bg->count()) query.params["gamma"] = b_gamma;
      if (bl->count()) query.params["lambda"] = b_lambda;
      if (!b_alpha.empty()) query.params["alpha"] = parse_double_or_inf(b_alpha);
      if (bm->count()) query.params["m"] = b_m;
      if (bL->count()) query.params["L"] = b_L;
      if (bk->count()) query.params["k"] = b_k;
      if (bdv->count()) query.params["d_vc"] = b_dvc;
      if (bsb->count()) query.params["sigma_beta"] = b_sigma_beta;
      if (bdd->count()) query.params["d"] = b_d;
      if (!b_eta.empty()) query.eta = parse_list(b_eta);
      if (!b_rho2.empty()) query.rho2 = parse_list(b_rho2);
      if (!find_bound(bound_id)) {
        std::cerr << "unknown bound: " << bound_id << "\n";
        return kParseError;
      }
      return cmd_bound(bound_id, query);
    }
    if (experiment->parsed())
      return cmd_experiment(config_path, csv_override, json_override);
    if (list->parsed()) return cmd_list(registry_name, list_json);
  } catch (const ParseFailure& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what()
              << " constraint=" << format_fixed9(e.constraint) << "\n";
    return kInfeasible;
  } catch (const MissingFieldError& e) {
    std::cerr << "missing field: " << e.field << "\n";
    return kDomainError;
  } catch (const IdentityViolation& e) {
    std::cerr << "identity violation: " << e.what() << "\n";
    return kIdentityViolation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kDomainError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kOk;
}
