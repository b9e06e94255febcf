#include "maslov/run.hpp"

#include "maslov/fd_oracle.hpp"
#include "maslov/morse.hpp"
#include "maslov/star_graph.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

namespace maslov::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";
constexpr double kDefectBudget = 1e-8;

class ConfigError : public Error {
public:
  using Error::Error;
};

double as_double(const json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      size_t pos = 0;
      const double v = std::stod(j.get<std::string>(), &pos);
      if (pos == j.get<std::string>().size()) return v;
    } catch (...) {
    }
  }
  throw ConfigError(std::string("expected a number (or decimal string) for ") + what);
}

Complex as_complex(const json& j, const char* what) {
  if (j.is_array()) {
    if (j.size() != 2) throw ConfigError(std::string("complex entry must be [re, im] in ") + what);
    return {as_double(j[0], what), as_double(j[1], what)};
  }
  return {as_double(j, what), 0.0};
}

Matrix as_matrix(const json& j, int n, const char* what) {
  if (!j.is_array() || j.size() != static_cast<size_t>(n) * static_cast<size_t>(n))
    throw ConfigError(std::string("expected a row-major array of n*n entries for ") + what);
  Matrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      m(r, c) = as_complex(j[static_cast<size_t>(r * n + c)], what);
  return m;
}

struct TabulatedData {
  std::vector<double> xs;
  std::vector<Matrix> P, V, Q;
};

MatrixFn tabulated_evaluator(std::shared_ptr<TabulatedData> data, int which, Matrix endstate) {
  return [data, which, endstate](double x) -> Matrix {
    const auto& xs = data->xs;
    const auto& tab = which == 0 ? data->P : which == 1 ? data->V : data->Q;
    if (x >= xs.back()) return endstate;
    if (x <= xs.front()) return tab.front();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const size_t hi = static_cast<size_t>(it - xs.begin());
    const size_t lo = hi - 1;
    const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return Matrix((1.0 - w) * tab[lo] + w * tab[hi]);
  };
}

struct ParsedProblem {
  HalfLineSystem sys;
  ordered_json echo;
};

ParsedProblem build_problem(const json& p) {
  if (!p.contains("model")) throw ConfigError("problem.model is required");
  const std::string model = p.at("model").get<std::string>();
  ParsedProblem out;
  out.echo["model"] = model;

  if (model == "star_graph_nls") {
    StarGraphNLS cfg;
    cfg.n = p.value("n", 3);
    cfg.p = p.contains("p") ? as_double(p.at("p"), "problem.p") : 1.0;
    const std::string op = p.value("operator", "L+");
    if (op == "L+")
      cfg.op = StarGraphNLS::Operator::Lplus;
    else if (op == "L-")
      cfg.op = StarGraphNLS::Operator::Lminus;
    else
      throw ConfigError("problem.operator must be \"L+\" or \"L-\"");
    out.sys = build_system(cfg);
    out.echo["n"] = cfg.n;
    out.echo["p"] = cfg.p;
    out.echo["operator"] = op;
    return out;
  }

  const int n = p.value("n", 0);
  if (n <= 0) throw ConfigError("problem.n is required for this model");
  out.echo["n"] = n;

  if (!p.contains("boundary"))
    throw ConfigError("problem.boundary {alpha1, alpha2} is required for this model");
  BoundaryCondition bc{as_matrix(p.at("boundary").at("alpha1"), n, "alpha1"),
                       as_matrix(p.at("boundary").at("alpha2"), n, "alpha2")};

  CoefficientModel m;
  m.n = n;
  if (model == "constant") {
    const Matrix P0 = as_matrix(p.at("P"), n, "P");
    const Matrix V0 = as_matrix(p.at("V"), n, "V");
    const Matrix Q0 = as_matrix(p.at("Q"), n, "Q");
    m = CoefficientModel::constant(P0, V0, Q0);
  } else if (model == "tabulated") {
    const std::string file = p.at("grid_file").get<std::string>();
    std::ifstream is(file);
    if (!is) throw ConfigError("cannot open grid_file " + file);
    json g = json::parse(is);
    auto data = std::make_shared<TabulatedData>();
    for (const auto& xj : g.at("x")) data->xs.push_back(as_double(xj, "grid x"));
    if (data->xs.size() < 2) throw ConfigError("tabulated grid needs at least two samples");
    for (const auto& mj : g.at("P")) data->P.push_back(as_matrix(mj, n, "grid P"));
    for (const auto& mj : g.at("V")) data->V.push_back(as_matrix(mj, n, "grid V"));
    for (const auto& mj : g.at("Q")) data->Q.push_back(as_matrix(mj, n, "grid Q"));
    if (data->P.size() != data->xs.size() || data->V.size() != data->xs.size() ||
        data->Q.size() != data->xs.size())
      throw ConfigError("tabulated grid arrays disagree in length");
    m.P_plus = as_matrix(g.at("P_plus"), n, "P_plus");
    m.V_plus = as_matrix(g.at("V_plus"), n, "V_plus");
    m.Q_plus = as_matrix(g.at("Q_plus"), n, "Q_plus");
    m.P = tabulated_evaluator(data, 0, m.P_plus);
    m.V = tabulated_evaluator(data, 1, m.V_plus);
    m.Q = tabulated_evaluator(data, 2, m.Q_plus);
    m.Pprime = nullptr;
    out.echo["grid_file"] = file;
  } else {
    throw ConfigError("unknown problem.model " + model);
  }

  if (p.contains("constants")) {
    const auto& c = p.at("constants");
    if (c.contains("theta_P")) m.theta_P = as_double(c.at("theta_P"), "theta_P");
    if (c.contains("theta_Q")) m.theta_Q = as_double(c.at("theta_Q"), "theta_Q");
    if (c.contains("C_V")) m.C_V = as_double(c.at("C_V"), "C_V");
    if (c.contains("eta")) m.eta = as_double(c.at("eta"), "eta");
  }
  if (m.theta_P <= 0.0 || m.theta_Q <= 0.0)
    throw ConfigError("constants theta_P, theta_Q must be declared positive");
  if (m.eta <= 0.0) throw ConfigError("constants.eta must be declared positive");
  out.sys = HalfLineSystem{m, bc};
  out.echo["constants"] = {{"theta_P", m.theta_P},
                           {"theta_Q", m.theta_Q},
                           {"C_V", m.C_V},
                           {"eta", m.eta}};
  return out;
}

EngineOptions engine_options_from(const json& cfg, const Overrides& o) {
  EngineOptions e;
  if (cfg.contains("tolerances")) {
    const auto& t = cfg.at("tolerances");
    if (t.contains("ode_rtol")) e.evolve.ode.rtol = as_double(t.at("ode_rtol"), "ode_rtol");
    if (t.contains("ode_atol")) e.evolve.ode.atol = as_double(t.at("ode_atol"), "ode_atol");
    if (t.contains("settle_tol")) e.settle_tol = as_double(t.at("settle_tol"), "settle_tol");
    if (t.contains("track_angle_cap"))
      e.track.angle_cap = as_double(t.at("track_angle_cap"), "track_angle_cap");
    if (t.contains("at_minus_one_tol"))
      e.track.at_minus_one_tol = as_double(t.at("at_minus_one_tol"), "at_minus_one_tol");
    for (const char* key : {"ode_rtol", "ode_atol", "settle_tol", "track_angle_cap",
                            "at_minus_one_tol"})
      if (t.contains(key) && as_double(t.at(key), key) <= 0.0)
        throw ConfigError("tolerances must be positive");
  }
  if (cfg.contains("lambda_inf")) e.lambda_inf = as_double(cfg.at("lambda_inf"), "lambda_inf");
  if (cfg.contains("x_inf")) e.x_inf = as_double(cfg.at("x_inf"), "x_inf");
  if (o.tol > 0.0) {
    e.evolve.ode.rtol = o.tol;
    e.evolve.ode.atol = o.tol * 1e-2;
  }
  return e;
}

ordered_json flow_to_json(const SpectralFlowResult& f) {
  ordered_json j;
  j["maslov_index"] = f.maslov_index;
  ordered_json cps = ordered_json::array();
  for (const auto& cp : f.conjugate_points) {
    ordered_json c;
    c["t"] = cp.t;
    c["t_end"] = cp.t_end;
    c["multiplicity"] = cp.multiplicity;
    c["net"] = cp.net;
    c["directions"] = cp.track_directions;
    c["kind"] = cp.kind == ConjugatePoint::Kind::interior
                    ? "interior"
                    : cp.kind == ConjugatePoint::Kind::left_endpoint ? "left_endpoint"
                                                                     : "right_endpoint";
    c["dwell"] = cp.dwell;
    cps.push_back(c);
  }
  j["conjugate_points"] = cps;
  j["flags"] = f.flags;
  return j;
}

ordered_json report_to_json(const MorseReport& r) {
  ordered_json j;
  j["morse_index"] = r.morse_index;
  j["shelves"] = {{"bottom", r.box.bottom.maslov_index},
                  {"right", r.box.right.maslov_index},
                  {"top", r.box.top.maslov_index},
                  {"left", r.box.left.maslov_index}};
  j["loop_sum"] = r.box.loop_sum();
  if (r.method == MorseMethod::corollary) {
    j["correction"] = r.correction;
    j["ell2plus_shelf_index"] = r.ell2plus_shelf_index;
  }
  j["lambda_inf"] = r.box.lambda_inf;
  j["x_inf"] = r.box.x_inf;
  j["lambda0_near_eigenvalue"] = r.lambda0_near_eigenvalue;
  j["max_unitarity_defect"] = r.max_unitarity_defect;
  j["max_lagrangian_defect"] = r.max_lagrangian_defect;
  j["conjugate_points"] = {{"bottom", flow_to_json(r.box.bottom)["conjugate_points"]},
                           {"right", flow_to_json(r.box.right)["conjugate_points"]},
                           {"top", flow_to_json(r.box.top)["conjugate_points"]},
                           {"left", flow_to_json(r.box.left)["conjugate_points"]}};
  j["flags"] = r.flags;
  return j;
}

void write_trajectories(const MorseReport& r, const std::filesystem::path& dir) {
  const std::pair<const char*, const SpectralFlowResult*> shelves[] = {
      {"bottom", &r.box.bottom}, {"right", &r.box.right}, {"top", &r.box.top},
      {"left", &r.box.left}};
  for (const auto& [name, flow] : shelves) {
    std::ofstream os(dir / (std::string("traj_") + to_string(r.method) + "_" + name + ".csv"));
    os << "t";
    const size_t ntracks = flow->theta.empty() ? 0 : flow->theta.front().size();
    for (size_t j = 0; j < ntracks; ++j) os << ",theta_" << (j + 1);
    os << "\n";
    for (size_t k = 0; k < flow->ts.size(); ++k) {
      os << flow->ts[k];
      for (double th : flow->theta[k]) os << "," << th;
      os << "\n";
    }
  }
}

struct CellOutcome {
  ordered_json methods;
  std::optional<OracleResult> oracle;
  std::vector<MorseReport> reports;
  bool agreement = true;
  bool invariant_failure = false;
  std::vector<std::string> errors;
  int exit_code = kExitOk;
  double seconds = 0.0;
};

struct CellSpec {
  json problem;
  double lambda0 = 0.0;
  std::vector<std::string> methods;
  EngineOptions engine;
  double oracle_L = 0.0;
  int oracle_N = 0;
};

CellOutcome run_cell(const CellSpec& spec) {
  CellOutcome out;
  const auto t_start = std::chrono::steady_clock::now();
  try {
    ParsedProblem prob = build_problem(spec.problem);

    // spot-check the assumptions before any numerics
    std::vector<double> grid;
    for (int k = 0; k <= 80; ++k) grid.push_back(0.5 * k);
    const ValidationReport vrep = validate_system(prob.sys.model, prob.sys.bc, grid);
    if (!vrep.ok) throw AssumptionError("assumption check failed: " + vrep.summary());

    std::vector<int> counts;
    double x_inf_used = 0.0;
    for (const auto& mname : spec.methods) {
      if (mname == "oracle") continue;
      MorseMethod method;
      if (mname == "target0")
        method = MorseMethod::target0;
      else if (mname == "targetplus")
        method = MorseMethod::targetplus;
      else if (mname == "corollary")
        method = MorseMethod::corollary;
      else
        throw ConfigError("unknown method " + mname);

      MorseReport rep = [&] {
        switch (method) {
          case MorseMethod::target0: return morse_via_target0(prob.sys, spec.lambda0, spec.engine);
          case MorseMethod::targetplus:
            return morse_via_targetplus(prob.sys, spec.lambda0, spec.engine);
          default: return morse_via_corollary(prob.sys, spec.lambda0, spec.engine);
        }
      }();
      x_inf_used = rep.box.x_inf;
      counts.push_back(rep.morse_index);
      if (rep.box.loop_sum() != 0 || rep.box.left.maslov_index != 0 ||
          rep.max_lagrangian_defect > kDefectBudget || rep.max_unitarity_defect > kDefectBudget)
        out.invariant_failure = true;
      out.methods[mname] = report_to_json(rep);
      out.reports.push_back(std::move(rep));
    }

    const bool want_oracle =
        std::find(spec.methods.begin(), spec.methods.end(), "oracle") != spec.methods.end();
    if (want_oracle) {
      double L = spec.oracle_L;
      if (L <= 0.0) {
        if (x_inf_used <= 0.0) {
          SettleOptions sopts;
          sopts.ode = spec.engine.evolve.ode;
          const VertexProjectors vp = vertex_projectors(prob.sys.bc);
          const double li = lambda_infinity_bound(prob.sys.model, vp);
          x_inf_used = settle_truncation(prob.sys, {-li, spec.lambda0}, sopts).x_inf;
        }
        L = 1.25 * x_inf_used;
      }
      int N = spec.oracle_N;
      if (N <= 0) N = std::max(200 * prob.sys.model.n, static_cast<int>(40.0 * L));
      const OracleResult orc = count_below(prob.sys, spec.lambda0, L, N);
      ordered_json oj;
      oj["count"] = orc.count;
      oj["converged"] = orc.converged;
      oj["ambiguous"] = orc.ambiguous;
      oj["margin"] = orc.margin;
      oj["eigenvalues"] = orc.eigenvalues;
      oj["L"] = L;
      oj["N"] = N;
      oj["flags"] = orc.flags;
      out.methods["oracle"] = oj;
      if (orc.converged && !orc.ambiguous) counts.push_back(orc.count);
      out.oracle = orc;
    }

    for (size_t k = 1; k < counts.size(); ++k)
      if (counts[k] != counts[0]) out.agreement = false;

    if (!out.agreement)
      out.exit_code = kExitDisagreement;
    else if (out.invariant_failure)
      out.exit_code = kExitNumerical;
  } catch (const ConfigError& e) {
    out.errors.push_back(e.what());
    out.exit_code = kExitConfig;
  } catch (const AssumptionError& e) {
    out.errors.push_back(e.what());
    out.exit_code = kExitAssumption;
  } catch (const Error& e) {
    out.errors.push_back(e.what());
    out.exit_code = kExitNumerical;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  try {
    return json::parse(is);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

CellSpec cell_from_config(const json& cfg, const Overrides& o) {
  CellSpec spec;
  if (!cfg.contains("problem")) throw ConfigError("config requires a problem block");
  spec.problem = cfg.at("problem");
  spec.lambda0 = cfg.contains("lambda0") ? as_double(cfg.at("lambda0"), "lambda0") : 0.0;
  if (cfg.contains("methods"))
    for (const auto& m : cfg.at("methods")) spec.methods.push_back(m.get<std::string>());
  if (spec.methods.empty()) throw ConfigError("config requires at least one method");
  spec.engine = engine_options_from(cfg, o);
  if (cfg.contains("oracle")) {
    const auto& oc = cfg.at("oracle");
    if (oc.contains("L")) spec.oracle_L = as_double(oc.at("L"), "oracle.L");
    if (oc.contains("N")) spec.oracle_N = oc.at("N").get<int>();
  }
  return spec;
}

} // namespace

std::string version_string() { return kVersion; }

int run_command(const std::string& config_path, const Overrides& o) {
  json cfg;
  CellSpec spec;
  try {
    cfg = load_config(config_path);
    spec = cell_from_config(cfg, o);
  } catch (const Error& e) {
    std::cerr << "morse: " << e.what() << "\n";
    return kExitConfig;
  }

  const CellOutcome out = run_cell(spec);
  for (const auto& err : out.errors) std::cerr << "morse: " << err << "\n";

  std::error_code ec;
  std::filesystem::create_directories(o.out_dir, ec);

  ordered_json doc;
  doc["schema"] = {{"name", "morse-result"}, {"version", 1}};
  doc["tool"] = {{"name", "morse"}, {"version", kVersion}};
  try {
    doc["problem"] = build_problem(spec.problem).echo;
  } catch (const Error&) {
    doc["problem"] = spec.problem;
  }
  doc["lambda0"] = spec.lambda0;
  doc["methods"] = out.methods.is_null() ? ordered_json::object() : out.methods;
  doc["agreement"] = out.agreement;
  doc["errors"] = out.errors;
  doc["exit_code"] = out.exit_code;

  const std::string out_name =
      cfg.contains("output") && cfg.at("output").contains("results")
          ? cfg.at("output").at("results").get<std::string>()
          : std::string("result.json");
  {
    std::ofstream os(std::filesystem::path(o.out_dir) / out_name);
    os << doc.dump(2) << "\n";
  }
  {
    ordered_json tim;
    tim["total_seconds"] = out.seconds;
    std::ofstream os(std::filesystem::path(o.out_dir) / "timings.json");
    os << tim.dump(2) << "\n";
  }
  if (cfg.contains("output") && cfg.at("output").value("trajectories", false))
    for (const auto& rep : out.reports) write_trajectories(rep, o.out_dir);

  return out.exit_code;
}

int sweep_command(const std::string& config_path, const Overrides& o) {
  json cfg;
  try {
    cfg = load_config(config_path);
  } catch (const Error& e) {
    std::cerr << "morse: " << e.what() << "\n";
    return kExitConfig;
  }

  std::vector<std::pair<std::string, std::vector<json>>> axes;
  if (cfg.contains("sweep"))
    for (const auto& [key, vals] : cfg.at("sweep").items()) {
      std::vector<json> vv;
      for (const auto& v : vals) vv.push_back(v);
      axes.emplace_back(key, vv);
    }

  // cartesian product, last axis fastest
  std::vector<std::vector<size_t>> cells;
  std::vector<size_t> odo(axes.size(), 0);
  size_t total = 1;
  for (const auto& [k, v] : axes) total *= v.size();
  if (axes.empty()) total = 0;
  for (size_t c = 0; c < total; ++c) {
    cells.push_back(odo);
    for (size_t a = axes.size(); a-- > 0;) {
      if (++odo[a] < axes[a].second.size()) break;
      odo[a] = 0;
    }
  }

  std::vector<CellSpec> specs;
  std::vector<std::string> labels;
  for (const auto& cell : cells) {
    json cell_cfg = cfg;
    std::ostringstream label;
    for (size_t a = 0; a < axes.size(); ++a) {
      const json& v = axes[a].second[cell[a]];
      if (axes[a].first == "lambda0")
        cell_cfg["lambda0"] = v;
      else
        cell_cfg["problem"][axes[a].first] = v;
      if (a) label << ",";
      label << (v.is_string() ? v.get<std::string>() : v.dump());
    }
    try {
      specs.push_back(cell_from_config(cell_cfg, o));
      labels.push_back(label.str());
    } catch (const Error& e) {
      std::cerr << "morse: " << e.what() << "\n";
      return kExitConfig;
    }
  }

  std::vector<CellOutcome> outcomes(specs.size());
  std::atomic<size_t> next{0};
  unsigned jobs = o.jobs > 0 ? static_cast<unsigned>(o.jobs)
                             : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, std::max<size_t>(specs.size(), 1));
  std::atomic<bool> abort_flag{false};
  auto worker = [&] {
    for (;;) {
      const size_t k = next.fetch_add(1);
      if (k >= specs.size()) return;
      if (abort_flag.load() && !o.keep_going) return;
      outcomes[k] = run_cell(specs[k]);
      if (outcomes[k].exit_code != kExitOk && !o.keep_going) abort_flag.store(true);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::error_code ec;
  std::filesystem::create_directories(o.out_dir, ec);
  std::ofstream os(std::filesystem::path(o.out_dir) / "sweep.csv");
  os << "cell";
  for (const auto& [k, v] : axes) os << "," << k;
  std::vector<std::string> mnames;
  if (cfg.contains("methods"))
    for (const auto& m : cfg.at("methods")) mnames.push_back(m.get<std::string>());
  for (const auto& m : mnames) {
    if (m == "oracle") {
      os << ",oracle_count,oracle_converged";
    } else {
      os << "," << m << "_morse," << m << "_bottom," << m << "_right," << m << "_top," << m
         << "_left";
    }
  }
  os << ",agreement,exit_code,flags\n";

  int exit_code = kExitOk;
  for (size_t k = 0; k < specs.size(); ++k) {
    const auto& out = outcomes[k];
    if (out.exit_code != kExitOk && exit_code == kExitOk) exit_code = out.exit_code;
    os << k;
    {
      std::istringstream lab(labels[k]);
      std::string piece;
      while (std::getline(lab, piece, ',')) os << "," << piece;
    }
    size_t rep_idx = 0;
    for (const auto& m : mnames) {
      if (m == "oracle") {
        if (out.oracle)
          os << "," << out.oracle->count << "," << (out.oracle->converged ? 1 : 0);
        else
          os << ",,";
      } else if (rep_idx < out.reports.size()) {
        const auto& r = out.reports[rep_idx++];
        os << "," << r.morse_index << "," << r.box.bottom.maslov_index << ","
           << r.box.right.maslov_index << "," << r.box.top.maslov_index << ","
           << r.box.left.maslov_index;
      } else {
        os << ",,,,,";
      }
    }
    std::string flags;
    for (const auto& r : out.reports)
      for (const auto& f : r.flags) flags += (flags.empty() ? "" : "; ") + f;
    for (const auto& e : out.errors) flags += (flags.empty() ? "" : "; ") + e;
    os << "," << (out.agreement ? 1 : 0) << "," << out.exit_code << ",\"" << flags << "\"\n";
    if (out.exit_code != kExitOk && !o.keep_going) break;
  }
  return exit_code;
}

} // namespace maslov::cli
