#include "rra/io.hpp"

#include "rra/geometry.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace rra {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

ojson vec_to_json(const Vec& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const json& a, const char* what) {
  if (!a.is_array()) throw ParseError(std::string(what) + ": expected array");
  Vec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw ParseError(std::string(what) + ": expected number");
    v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  }
  return v;
}

ojson set_to_json(const LocalSet& s) {
  ojson j;
  switch (s.kind) {
    case LocalSet::Kind::Ball:
      j["type"] = "ball";
      j["center"] = vec_to_json(s.center);
      j["radius"] = s.radius;
      break;
    case LocalSet::Kind::Box:
      j["type"] = "box";
      j["lower"] = vec_to_json(s.lower);
      j["upper"] = vec_to_json(s.upper);
      break;
    case LocalSet::Kind::Nonneg:
      j["type"] = "nonneg";
      break;
    case LocalSet::Kind::WholeSpace:
      j["type"] = "whole-space";
      break;
  }
  return j;
}

LocalSet set_from_json(const json& j, int q) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "ball") {
    return LocalSet::ball(vec_from_json(j.at("center"), "set.center"),
                          j.at("radius").get<double>());
  }
  if (type == "box") {
    return LocalSet::box(vec_from_json(j.at("lower"), "set.lower"),
                         vec_from_json(j.at("upper"), "set.upper"));
  }
  if (type == "nonneg") return LocalSet::nonneg(q);
  if (type == "whole-space") return LocalSet::whole_space(q);
  throw ParseError("unknown set type: " + type);
}

ojson objective_to_json(const ObjectiveSpec& o) {
  ojson j;
  switch (o.kind) {
    case ObjectiveSpec::Kind::Quadratic:
      j["type"] = "quadratic";
      break;
    case ObjectiveSpec::Kind::QuadraticPlusL1:
      j["type"] = "quadratic_plus_l1";
      break;
    case ObjectiveSpec::Kind::L2Norm:
      j["type"] = "l2norm";
      break;
  }
  j["p"] = vec_to_json(o.p);
  return j;
}

ObjectiveSpec objective_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  Vec p = vec_from_json(j.at("p"), "objective.p");
  if (type == "quadratic") return ObjectiveSpec::quadratic(std::move(p));
  if (type == "quadratic_plus_l1")
    return ObjectiveSpec::quadratic_plus_l1(std::move(p));
  if (type == "l2norm") return ObjectiveSpec::l2norm(std::move(p));
  throw ParseError("unknown objective type: " + type);
}

}  // namespace

ojson problem_to_json(const RobustAllocationProblem& problem) {
  const Dims d = problem.dims();
  ojson j;
  j["format_version"] = kFormatVersion;
  j["n"] = d.n;
  j["m"] = d.m;
  j["q"] = d.q;
  j["gamma"] = problem.constraints.gamma;
  ojson agents = ojson::array();
  for (int i = 0; i < d.n; ++i) {
    ojson a;
    ojson A = ojson::array(), Ah = ojson::array(), b = ojson::array();
    for (int jj = 0; jj < d.m; ++jj) {
      A.push_back(vec_to_json(problem.constraints.a[i][jj]));
      Ah.push_back(vec_to_json(problem.constraints.ahat[i][jj]));
      b.push_back(vec_to_json(problem.constraints.b[i][jj]));
    }
    a["A"] = std::move(A);
    a["Ahat"] = std::move(Ah);
    a["b"] = std::move(b);
    a["set"] = set_to_json(problem.sets[i]);
    a["objective"] = objective_to_json(problem.objectives[i]);
    agents.push_back(std::move(a));
  }
  j["agents"] = std::move(agents);
  if (problem.constraints.b_aggregate) {
    ojson agg = ojson::array();
    for (const auto& v : *problem.constraints.b_aggregate)
      agg.push_back(vec_to_json(v));
    j["b_aggregate"] = std::move(agg);
  }
  ojson adj = ojson::array();
  for (int i = 0; i < d.n; ++i) {
    ojson row = ojson::array();
    for (int k = 0; k < d.n; ++k) row.push_back(problem.graph.adjacency(i, k));
    adj.push_back(std::move(row));
  }
  j["graph"] = ojson{{"adjacency", std::move(adj)}};
  return j;
}

RobustAllocationProblem problem_from_json(const json& j) {
  if (j.value("format_version", 0) != kFormatVersion) {
    throw ParseError("unsupported problem format_version");
  }
  RobustAllocationProblem p;
  const int n = j.at("n").get<int>();
  const int m = j.at("m").get<int>();
  const int q = j.at("q").get<int>();
  if (n <= 0 || m < 0 || q <= 0) throw ParseError("invalid dimensions");
  p.constraints.m = m;
  p.constraints.q = q;
  p.constraints.gamma = j.at("gamma").get<std::vector<int>>();

  const auto& agents = j.at("agents");
  if (!agents.is_array() || static_cast<int>(agents.size()) != n) {
    throw ParseError("agents: expected n entries");
  }
  p.constraints.a.resize(n);
  p.constraints.ahat.resize(n);
  p.constraints.b.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& a = agents[i];
    for (const char* key : {"A", "Ahat", "b"}) {
      if (!a.contains(key) || static_cast<int>(a.at(key).size()) != m) {
        throw ParseError(std::string("agents[") + std::to_string(i) + "]." +
                         key + ": expected m entries");
      }
    }
    for (int jj = 0; jj < m; ++jj) {
      p.constraints.a[i].push_back(vec_from_json(a.at("A")[jj], "A"));
      p.constraints.ahat[i].push_back(vec_from_json(a.at("Ahat")[jj], "Ahat"));
      p.constraints.b[i].push_back(vec_from_json(a.at("b")[jj], "b"));
    }
    p.sets.push_back(set_from_json(a.at("set"), q));
    p.objectives.push_back(objective_from_json(a.at("objective")));
  }
  if (j.contains("b_aggregate")) {
    std::vector<Vec> agg;
    for (const auto& v : j.at("b_aggregate"))
      agg.push_back(vec_from_json(v, "b_aggregate"));
    p.constraints.b_aggregate = std::move(agg);
  }
  p.graph.n = n;
  p.graph.adjacency = Mat::Zero(n, n);
  const auto& adj = j.at("graph").at("adjacency");
  if (static_cast<int>(adj.size()) != n) throw ParseError("adjacency: bad shape");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(adj[i].size()) != n) throw ParseError("adjacency: bad shape");
    for (int k = 0; k < n; ++k) {
      p.graph.adjacency(i, k) = adj[i][k].get<double>();
    }
  }
  return p;
}

std::string dump_problem(const RobustAllocationProblem& problem) {
  return problem_to_json(problem).dump(2) + "\n";
}

RobustAllocationProblem load_problem(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("problem JSON: ") + e.what());
  }
  return problem_from_json(j);
}

ojson state_to_json(const Dims& dims, const SwarmState& state) {
  ojson j;
  j["format_version"] = kFormatVersion;
  j["n"] = dims.n;
  j["m"] = dims.m;
  j["q"] = dims.q;
  j["raw"] = ojson{{"xbar", vec_to_json(state.xbar)},
                   {"Zbar", vec_to_json(state.Zbar)},
                   {"Wbar", vec_to_json(state.Wbar)},
                   {"U", vec_to_json(state.U)},
                   {"Lam1bar", vec_to_json(state.Lam1bar)},
                   {"Lam2bar", vec_to_json(state.Lam2bar)},
                   {"Y1", vec_to_json(state.Y1)},
                   {"Y2", vec_to_json(state.Y2)}};
  j["outputs"] = ojson{{"x", vec_to_json(state.x)},
                       {"Z", vec_to_json(state.Z)},
                       {"W", vec_to_json(state.W)},
                       {"Lam1", vec_to_json(state.Lam1)},
                       {"Lam2", vec_to_json(state.Lam2)}};
  return j;
}

SwarmState state_from_json(const RobustAllocationProblem& problem,
                           const json& j) {
  if (j.value("format_version", 0) != kFormatVersion) {
    throw ParseError("unsupported state format_version");
  }
  const Dims d = problem.dims();
  if (j.at("n").get<int>() != d.n || j.at("m").get<int>() != d.m ||
      j.at("q").get<int>() != d.q) {
    throw ParseError("state dimensions do not match the problem");
  }
  SwarmState s = SwarmState::zero(d);
  const auto& raw = j.at("raw");
  auto read = [&](const char* key, Eigen::Index size) {
    Vec v = vec_from_json(raw.at(key), key);
    if (v.size() != size) throw ParseError(std::string(key) + ": wrong length");
    return v;
  };
  s.xbar = read("xbar", d.nq());
  s.Zbar = read("Zbar", d.mnq());
  s.Wbar = read("Wbar", d.mnq());
  s.U = read("U", d.mnq());
  s.Lam1bar = read("Lam1bar", d.mnq());
  s.Lam2bar = read("Lam2bar", d.mnq());
  s.Y1 = read("Y1", d.mnq());
  s.Y2 = read("Y2", d.mnq());
  refresh_outputs(problem, s);

  if (j.contains("outputs")) {
    const auto& out = j.at("outputs");
    auto check = [&](const char* key, const Vec& expect) {
      const Vec got = vec_from_json(out.at(key), key);
      if (got.size() != expect.size() ||
          (got - expect).lpNorm<Eigen::Infinity>() > 1e-9) {
        throw ParseError(std::string("state outputs.") + key +
                         " is not the projection of the raw block "
                         "(tampered or stale dump)");
      }
    };
    check("x", s.x);
    check("Z", s.Z);
    check("W", s.W);
    check("Lam1", s.Lam1);
    check("Lam2", s.Lam2);
  }
  return s;
}

ojson oracle_to_json(const Dims& dims, const OracleSolution& sol) {
  (void)dims;
  ojson j;
  j["format_version"] = kFormatVersion;
  j["x"] = vec_to_json(sol.x);
  j["Z"] = vec_to_json(sol.Z);
  j["W"] = vec_to_json(sol.W);
  j["U"] = vec_to_json(sol.U);
  j["Lam1"] = vec_to_json(sol.Lam1);
  j["Lam2"] = vec_to_json(sol.Lam2);
  j["objective_value"] = sol.objective_value;
  j["iterations"] = sol.iterations;
  j["tol"] = sol.tol;
  j["kkt"] = ojson{{"r_a", sol.final_kkt.r_a}, {"r_b", sol.final_kkt.r_b},
                   {"r_c", sol.final_kkt.r_c}, {"r_d", sol.final_kkt.r_d},
                   {"r_e", sol.final_kkt.r_e}, {"r_f", sol.final_kkt.r_f},
                   {"r_g", sol.final_kkt.r_g}, {"r_h", sol.final_kkt.r_h}};
  return j;
}

ojson report_to_json(const CertificationReport& rep) {
  ojson j;
  j["format_version"] = kFormatVersion;
  j["kkt"] = ojson{{"r_a", rep.kkt.r_a}, {"r_b", rep.kkt.r_b},
                   {"r_c", rep.kkt.r_c}, {"r_d", rep.kkt.r_d},
                   {"r_e", rep.kkt.r_e}, {"r_f", rep.kkt.r_f},
                   {"r_g", rep.kkt.r_g}, {"r_h", rep.kkt.r_h}};
  j["eq_residual"] = rep.eq_residual;
  j["consensus"] = ojson{{"Z", rep.consensus.Z},
                         {"Lam1", rep.consensus.Lam1},
                         {"Lam2", rep.consensus.Lam2}};
  auto mat = [](const Mat& m) {
    ojson rows = ojson::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      ojson row = ojson::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["G1"] = mat(rep.feasibility.G1);
  j["G2"] = mat(rep.feasibility.G2);
  j["robust_primal"] = mat(rep.robust_primal);
  return j;
}

std::string report_table(const CertificationReport& rep) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3);
  os << "condition            residual\n";
  const char* names[8] = {
      "(a) x stationarity ", "(b) z stationarity ", "(c) w stationarity ",
      "(d) G1 violation   ", "(e) G2 violation   ", "(f) Z consensus    ",
      "(g) compl. slack 1 ", "(h) compl. slack 2 "};
  const auto arr = rep.kkt.as_array();
  for (int i = 0; i < 8; ++i) {
    os << names[i] << "  " << arr[i] << "\n";
  }
  os << "equilibrium residual  " << rep.eq_residual << "\n";
  os << "consensus (Z, L1, L2) " << rep.consensus.Z << "  "
     << rep.consensus.Lam1 << "  " << rep.consensus.Lam2 << "\n";
  if (rep.robust_primal.size() != 0) {
    os << "max robust primal     " << rep.robust_primal.maxCoeff() << "\n";
  }
  return os.str();
}

void write_trajectory_csv(std::ostream& os, const Dims& dims,
                          const Trajectory& traj) {
  os << "t";
  for (int i = 1; i <= dims.n; ++i) {
    for (int l = 1; l <= dims.q; ++l) os << ",x_" << i << "_" << l;
  }
  for (int j = 1; j <= dims.m; ++j) {
    for (int l = 1; l <= dims.q; ++l) os << ",G1_" << j << "_" << l;
  }
  for (int j = 1; j <= dims.m; ++j) {
    for (int l = 1; l <= dims.q; ++l) os << ",G2_" << j << "_" << l;
  }
  os << ",V,eq_residual,cons_Z,cons_L1,cons_L2\n";
  os << std::setprecision(17);
  for (size_t k = 0; k < traj.times.size(); ++k) {
    os << traj.times[k];
    const auto& s = traj.states[k];
    const auto& mon = traj.monitors[k];
    for (int i = 0; i < dims.n; ++i) {
      for (int l = 0; l < dims.q; ++l) os << "," << s.x[dims.xidx(i, l)];
    }
    for (int j = 0; j < dims.m; ++j) {
      for (int l = 0; l < dims.q; ++l) os << "," << mon.G1(j, l);
    }
    for (int j = 0; j < dims.m; ++j) {
      for (int l = 0; l < dims.q; ++l) os << "," << mon.G2(j, l);
    }
    os << "," << mon.lyapunov << "," << mon.eq_residual << ","
       << mon.consensus_Z << "," << mon.consensus_Lam1 << ","
       << mon.consensus_Lam2 << "\n";
  }
}

}  // namespace rra
