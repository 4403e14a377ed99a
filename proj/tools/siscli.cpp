// Batch front-end: model ingestion, structure analysis, equilibrium
// catalogs, trajectory simulation and vaccination reports.
//
// Exit codes: 0 success, 2 input error, 3 resource cap exceeded,
// 4 convergence failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "sis/equilibria.hpp"
#include "sis/io.hpp"
#include "sis/reservoir.hpp"

using json = nlohmann::json;
using namespace sis;

namespace {

struct ToolOptions {
  std::string model_path;
  bool as_json = false;
  double tol = 1e-10;
};

Vec read_vector_file(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open vector file: " + path);
  Vec v;
  double x;
  while (in >> x) v.push_back(x);
  require_length(v.size(), n, "vector file");
  return v;
}

Vec parse_init_spec(const std::string& spec, const SISModel& m, std::uint64_t* seed_out) {
  const std::size_t n = m.size();
  if (spec == "ones") return Vec(n, 1.0);
  if (spec == "zeros") return Vec(n, 0.0);
  if (spec.rfind("mask:", 0) == 0) {
    Vec h(n, 0.0);
    std::stringstream ss(spec.substr(5));
    std::string label;
    while (std::getline(ss, label, ',')) {
      bool found = false;
      for (std::size_t i = 0; i < n; ++i)
        if (m.space.labels[i] == label) {
          h[i] = 1.0;
          found = true;
        }
      if (!found) throw std::invalid_argument("unknown label in mask: " + label);
    }
    return h;
  }
  if (spec.rfind("file:", 0) == 0) return read_vector_file(spec.substr(5), n);
  if (spec.rfind("random:", 0) == 0) {
    const std::uint64_t seed = std::stoull(spec.substr(7));
    if (seed_out) *seed_out = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vec h(n);
    for (double& v : h) v = unif(rng);
    return h;
  }
  throw std::invalid_argument("unknown init spec: " + spec);
}

json antichain_json(const SISModel& m, const AtomDecomposition& d, const Antichain& c) {
  json arr = json::array();
  for (int a : c) arr.push_back(mask_to_labels(m, d.atoms[a]));
  return arr;
}

int cmd_analyze(const ToolOptions& opt) {
  const ParsedModel parsed = load_model(opt.model_path);
  const SISModel& m = parsed.model;
  const ValidationReport val = validate_assumptions(m);
  if (!val.valid()) {
    for (const auto& v : val.violations) std::cerr << "validation: " << v << "\n";
    return 2;
  }
  const AtomDecomposition d = decompose(m);
  const double r0 = R0(m, opt.tol);
  const auto chains = supercritical_antichains(d);

  if (opt.as_json) {
    json out;
    out["n"] = m.size();
    out["R0"] = r0;
    out["monatomic"] = is_monatomic(d);
    out["antichain_count"] = chains.size();
    out["atoms"] = json::array();
    for (std::size_t a = 0; a < d.num_atoms(); ++a) {
      json atom;
      atom["members"] = mask_to_labels(m, d.atoms[a]);
      atom["class"] = to_string(d.atom_class[a]);
      atom["R0"] = d.atom_r0[a];
      atom["future"] = mask_to_labels(m, d.futures[a]);
      out["atoms"].push_back(atom);
    }
    out["order"] = json::array();
    for (std::size_t a = 0; a < d.num_atoms(); ++a)
      for (std::size_t b = 0; b < d.num_atoms(); ++b)
        if (a != b && d.below(a, b))
          out["order"].push_back({mask_to_labels(m, d.atoms[a]), mask_to_labels(m, d.atoms[b])});
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  std::cout << "features: " << m.size() << "\n";
  std::cout << "R0(full): " << format_real(r0) << "\n";
  std::cout << "atoms (" << d.num_atoms() << "):\n";
  for (std::size_t a = 0; a < d.num_atoms(); ++a) {
    std::cout << "  {" << mask_to_labels(m, d.atoms[a]) << "}  class=" << to_string(d.atom_class[a]);
    if (d.atom_class[a] != AtomClass::zero) std::cout << "  R0=" << format_real(d.atom_r0[a]);
    std::cout << "  future={" << mask_to_labels(m, d.futures[a]) << "}\n";
  }
  std::cout << "order (below relation):\n";
  for (std::size_t a = 0; a < d.num_atoms(); ++a)
    for (std::size_t b = 0; b < d.num_atoms(); ++b)
      if (a != b && d.below(a, b))
        std::cout << "  {" << mask_to_labels(m, d.atoms[a]) << "} <= {"
                  << mask_to_labels(m, d.atoms[b]) << "}\n";
  std::cout << "supercritical antichains: " << chains.size() << "\n";
  std::cout << "monatomic: " << (is_monatomic(d) ? "true" : "false") << "\n";
  return 0;
}

int cmd_equilibria(const ToolOptions& opt, bool reservoir, const std::string& csv_path) {
  const ParsedModel parsed = load_model(opt.model_path);
  const SISModel& m = parsed.model;
  EquilibriumOptions eopts;
  eopts.equilibrium_tol = opt.tol;

  std::vector<EquilibriumRecord> catalog;
  AtomDecomposition d = decompose(m);
  if (reservoir) {
    catalog = reservoir_equilibria(parsed.make_reservoir(), eopts);
  } else {
    catalog = equilibrium_catalog(m, d, eopts);
  }

  json out;
  out["count"] = catalog.size();
  out["equilibria"] = json::array();
  for (const auto& rec : catalog) {
    Vec eta(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) eta[i] = m.incidence(rec.state[i]);
    json e;
    e["antichain"] = antichain_json(m, d, rec.antichain);
    e["support"] = mask_to_labels(m, rec.support);
    e["state"] = rec.state;
    e["residual"] = rec.residual;
    e["Re_phi"] = Re(m, eta);
    e["is_maximal"] = rec.is_maximal;
    out["equilibria"].push_back(e);
  }

  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    csv << "antichain,support_bitmask,";
    for (std::size_t i = 0; i < m.size(); ++i) csv << m.space.labels[i] << ",";
    csv << "residual,Re_phi\n";
    for (const auto& rec : catalog) {
      std::string chain;
      for (int a : rec.antichain) {
        if (!chain.empty()) chain += "|";
        chain += mask_to_labels(m, d.atoms[a]);
      }
      std::string bits;
      for (auto b : rec.support) bits += b ? '1' : '0';
      Vec eta(m.size());
      for (std::size_t i = 0; i < m.size(); ++i) eta[i] = m.incidence(rec.state[i]);
      csv << (chain.empty() ? "-" : chain) << "," << bits << ",";
      for (double v : rec.state) csv << format_real(v) << ",";
      csv << format_real(rec.residual) << "," << format_real(Re(m, eta)) << "\n";
    }
  }

  if (opt.as_json) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "equilibria: " << catalog.size() << "\n";
    for (const auto& e : out["equilibria"]) {
      std::cout << "  antichain=[";
      bool first = true;
      for (const auto& a : e["antichain"]) {
        if (!first) std::cout << "; ";
        std::cout << a.get<std::string>();
        first = false;
      }
      std::cout << "]  support={" << e["support"].get<std::string>() << "}  residual="
                << format_real(e["residual"].get<double>())
                << "  Re(phi(g))=" << format_real(e["Re_phi"].get<double>());
      if (e["is_maximal"].get<bool>()) std::cout << "  [maximal]";
      std::cout << "\n    state:";
      for (const auto& v : e["state"]) std::cout << " " << format_real(v.get<double>());
      std::cout << "\n";
    }
  }
  return 0;
}

int cmd_simulate(const ToolOptions& opt, const std::string& init_spec, double t_max,
                 const std::string& out_path, std::size_t stride) {
  const ParsedModel parsed = load_model(opt.model_path);
  const SISModel& m = parsed.model;
  const Vec h = parse_init_spec(init_spec, m, nullptr);
  const AtomDecomposition d = decompose(m);

  const EquilibriumRecord pred = predict_limit(m, d, h);
  const Trajectory traj = integrate(m, h, t_max, opt.tol);
  const Vec& terminal = traj.terminal_state();
  double sup_d = 0.0, gamma_d = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double dv = std::abs(terminal[i] - pred.state[i]);
    sup_d = std::max(sup_d, dv);
    gamma_d = std::max(gamma_d, dv * m.gamma[i]);
  }

  if (!out_path.empty()) {
    std::ofstream csv(out_path);
    write_trajectory_csv(csv, m, traj, stride);
  }

  if (opt.as_json) {
    json out;
    out["predicted_support"] = mask_to_labels(m, pred.support);
    out["predicted_antichain"] = antichain_json(m, d, pred.antichain);
    out["predicted_state"] = pred.state;
    out["terminal_time"] = traj.times.back();
    out["terminal_residual"] = traj.residuals.back();
    out["sup_distance"] = sup_d;
    out["gamma_weighted_distance"] = gamma_d;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "predicted limit: support={" << mask_to_labels(m, pred.support) << "}\n";
    std::cout << "terminal t=" << format_real(traj.times.back())
              << "  residual=" << format_real(traj.residuals.back()) << "\n";
    std::cout << "distance to prediction: sup=" << format_real(sup_d)
              << "  gamma-weighted=" << format_real(gamma_d) << "\n";
  }
  return 0;
}

int cmd_vaccinate(const ToolOptions& opt, const std::string& eta_spec) {
  const ParsedModel parsed = load_model(opt.model_path);
  const SISModel& m = parsed.model;

  if (eta_spec == "from-equilibrium") {
    const AtomDecomposition d = decompose(m);
    const auto catalog = equilibrium_catalog(m, d);
    const auto rep = critical_vaccination_check(m, catalog);
    if (opt.as_json) {
      json out;
      out["R0"] = rep.r0;
      out["entries"] = json::array();
      for (const auto& e : rep.entries)
        out["entries"].push_back({{"antichain", antichain_json(m, d, e.antichain)},
                                  {"Re_phi", e.re_phi},
                                  {"is_maximal", e.is_maximal},
                                  {"is_dfe", e.is_dfe}});
      out["violations"] = rep.violations;
      std::cout << out.dump(2) << "\n";
    } else {
      std::cout << "R0: " << format_real(rep.r0) << "\n";
      for (const auto& e : rep.entries) {
        std::cout << "  Re(phi(g)) = " << format_real(e.re_phi);
        if (e.is_dfe) std::cout << "  [DFE]";
        if (e.is_maximal) std::cout << "  [maximal; critical identity Re=1]";
        std::cout << "\n";
      }
      for (const auto& v : rep.violations) std::cout << "  violation: " << v << "\n";
    }
    return 0;
  }

  const Vec eta = read_vector_file(eta_spec, m.size());
  for (double v : eta)
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("eta entries must lie in [0,1]");
  const double re = Re(m, eta);
  if (opt.as_json) {
    std::cout << json{{"Re", re}}.dump(2) << "\n";
  } else {
    std::cout << "Re(eta): " << format_real(re) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heterogeneous SIS model analyzer"};
  app.require_subcommand(1);

  ToolOptions opt;
  bool reservoir = false;
  std::string csv_path, init_spec = "ones", out_path, eta_spec;
  double t_max = 1e4;
  std::size_t stride = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("model", opt.model_path, "model file")->required();
    sub->add_flag("--json", opt.as_json, "emit structured JSON");
    sub->add_option("--tol", opt.tol, "solver tolerance override");
  };

  auto* analyze = app.add_subcommand("analyze", "atoms, order, antichains, R0");
  add_common(analyze);

  auto* equilibria = app.add_subcommand("equilibria", "equilibrium catalog");
  add_common(equilibria);
  equilibria->add_flag("--reservoir", reservoir, "use the reservoir (kappa) extension");
  equilibria->add_option("--csv", csv_path, "write catalog CSV");

  auto* simulate = app.add_subcommand("simulate", "integrate and compare with prediction");
  add_common(simulate);
  simulate->add_option("--init", init_spec, "ones|zeros|mask:<labels>|file:<path>|random:<seed>");
  simulate->add_option("--tmax", t_max, "integration horizon");
  simulate->add_option("--out", out_path, "trajectory CSV path");
  simulate->add_option("--stride", stride, "CSV sampling stride");

  auto* vaccinate = app.add_subcommand("vaccinate", "effective reproduction number report");
  add_common(vaccinate);
  vaccinate->add_option("--eta", eta_spec, "vector file or 'from-equilibrium'")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return cmd_analyze(opt);
    if (equilibria->parsed()) return cmd_equilibria(opt, reservoir, csv_path);
    if (simulate->parsed()) return cmd_simulate(opt, init_spec, t_max, out_path, stride);
    if (vaccinate->parsed()) return cmd_vaccinate(opt, eta_spec);
  } catch (const resource_cap_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const convergence_error& e) {
    std::cerr << "error: " << e.what() << " (best estimate " << e.best_estimate << ")\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
