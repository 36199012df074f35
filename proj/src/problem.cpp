#include "rra/problem.hpp"

#include <cmath>
#include <sstream>

namespace rra {

LocalSet LocalSet::ball(Vec center, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("ball radius must be > 0");
  LocalSet s;
  s.kind = Kind::Ball;
  s.center = std::move(center);
  s.radius = radius;
  return s;
}

LocalSet LocalSet::box(Vec lower, Vec upper) {
  if (lower.size() != upper.size() || (upper - lower).minCoeff() < 0.0) {
    throw std::invalid_argument("box bounds must satisfy lower <= upper");
  }
  LocalSet s;
  s.kind = Kind::Box;
  s.lower = std::move(lower);
  s.upper = std::move(upper);
  return s;
}

LocalSet LocalSet::nonneg(int dim) {
  LocalSet s;
  s.kind = Kind::Nonneg;
  s.lower = Vec::Zero(dim);
  return s;
}

LocalSet LocalSet::whole_space(int dim) {
  LocalSet s;
  s.kind = Kind::WholeSpace;
  s.lower = Vec::Zero(dim);  // records the dimension
  return s;
}

int LocalSet::dim() const {
  switch (kind) {
    case Kind::Ball:
      return static_cast<int>(center.size());
    case Kind::Box:
    case Kind::Nonneg:
    case Kind::WholeSpace:
      return static_cast<int>(lower.size());
  }
  return 0;
}

Vec LocalSet::interior_point() const {
  switch (kind) {
    case Kind::Ball:
      return center;
    case Kind::Box:
      return 0.5 * (lower + upper);
    case Kind::Nonneg:
    case Kind::WholeSpace:
      return Vec::Zero(dim());
  }
  return Vec();
}

ObjectiveSpec ObjectiveSpec::quadratic(Vec p) {
  return {Kind::Quadratic, std::move(p)};
}
ObjectiveSpec ObjectiveSpec::quadratic_plus_l1(Vec p) {
  return {Kind::QuadraticPlusL1, std::move(p)};
}
ObjectiveSpec ObjectiveSpec::l2norm(Vec p) {
  return {Kind::L2Norm, std::move(p)};
}

Vec UncertainConstraintData::aggregate_b(int j) const {
  Vec out = Vec::Zero(q);
  for (const auto& agent : b) out += agent[j];
  return out;
}

Dims RobustAllocationProblem::dims() const {
  return Dims{graph.n, constraints.m, constraints.q};
}

bool ValidationReport::passed() const {
  for (const auto& f : findings) {
    if (f.severity == ValidationFinding::Severity::Error) return false;
  }
  return true;
}

std::string ValidationReport::str() const {
  std::ostringstream os;
  for (const auto& f : findings) {
    const char* tag = f.severity == ValidationFinding::Severity::Error
                          ? "error"
                          : f.severity == ValidationFinding::Severity::Warning
                                ? "warning"
                                : "info";
    os << tag << " [" << f.code << "] " << f.message << "\n";
  }
  os << (passed() ? "validation: pass" : "validation: fail") << "\n";
  return os.str();
}

namespace {

void add(ValidationReport& r, ValidationFinding::Severity sev,
         std::string code, std::string msg) {
  r.findings.push_back({sev, std::move(code), std::move(msg)});
}

}  // namespace

ValidationReport validate_problem(const RobustAllocationProblem& problem) {
  using S = ValidationFinding::Severity;
  ValidationReport r;
  const int n = problem.n();
  const int m = problem.m();
  const int q = problem.q();

  if (n <= 0) {
    add(r, S::Error, "dims", "agent count must be positive");
    return r;
  }

  bool adjacency_ok = true;
  if (problem.graph.adjacency.rows() != n ||
      problem.graph.adjacency.cols() != n) {
    add(r, S::Error, "graph.shape", "adjacency matrix is not n x n");
    adjacency_ok = false;
  } else {
    for (int i = 0; i < n && adjacency_ok; ++i) {
      if (problem.graph.adjacency(i, i) != 0.0) {
        add(r, S::Error, "graph.diagonal", "adjacency diagonal must be zero");
        adjacency_ok = false;
      }
      for (int k = 0; k < n; ++k) {
        if (problem.graph.adjacency(i, k) < 0.0 ||
            problem.graph.adjacency(i, k) !=
                problem.graph.adjacency(k, i)) {
          add(r, S::Error, "graph.weights",
              "adjacency must be symmetric with nonnegative weights");
          adjacency_ok = false;
          break;
        }
      }
    }
  }
  if (adjacency_ok && !problem.graph.connected()) {
    add(r, S::Error, "graph.connectivity", "communication graph is not connected");
  }

  const auto& c = problem.constraints;
  if (c.m != m || c.q != q) {
    add(r, S::Error, "dims", "constraint data dimensions inconsistent");
  }
  auto check_table = [&](const std::vector<std::vector<Vec>>& t,
                         const char* name) {
    if (static_cast<int>(t.size()) != n) {
      add(r, S::Error, "dims", std::string(name) + " must have one row per agent");
      return false;
    }
    for (const auto& row : t) {
      if (static_cast<int>(row.size()) != m) {
        add(r, S::Error, "dims",
            std::string(name) + " must have one entry per constraint");
        return false;
      }
      for (const auto& v : row) {
        if (v.size() != q) {
          add(r, S::Error, "dims", std::string(name) + " entries must be q-vectors");
          return false;
        }
      }
    }
    return true;
  };
  const bool a_ok = check_table(c.a, "A");
  const bool ahat_ok = check_table(c.ahat, "Ahat");
  const bool b_ok = check_table(c.b, "b");

  if (ahat_ok) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        if (c.ahat[i][j].minCoeff() < 0.0) {
          add(r, S::Error, "ahat.sign",
              "deviation half-widths Ahat must be nonnegative (agent " +
                  std::to_string(i + 1) + ", constraint " +
                  std::to_string(j + 1) + ")");
        }
      }
    }
  }

  if (static_cast<int>(c.gamma.size()) != m) {
    add(r, S::Error, "gamma.size", "gamma must have one budget per constraint");
  } else {
    for (int j = 0; j < m; ++j) {
      if (c.gamma[j] < 0 || c.gamma[j] > n) {
        add(r, S::Error, "gamma.range",
            "budget gamma_" + std::to_string(j + 1) + " = " +
                std::to_string(c.gamma[j]) + " outside [0, n]");
      }
    }
  }

  if (c.b_aggregate && b_ok) {
    if (static_cast<int>(c.b_aggregate->size()) != m) {
      add(r, S::Error, "b.aggregate", "aggregate b must have m entries");
    } else {
      for (int j = 0; j < m; ++j) {
        const Vec diff = c.aggregate_b(j) - (*c.b_aggregate)[j];
        if (diff.lpNorm<Eigen::Infinity>() > 1e-9) {
          add(r, S::Error, "b.split",
              "per-agent shares of constraint " + std::to_string(j + 1) +
                  " do not sum to the declared aggregate");
        }
      }
    }
  }

  if (static_cast<int>(problem.sets.size()) != n) {
    add(r, S::Error, "sets.size", "one local set per agent required");
  } else {
    for (int i = 0; i < n; ++i) {
      if (problem.sets[i].dim() != q) {
        add(r, S::Error, "sets.dim",
            "local set of agent " + std::to_string(i + 1) + " has wrong dimension");
      }
    }
  }

  if (static_cast<int>(problem.objectives.size()) != n) {
    add(r, S::Error, "objectives.size", "one objective per agent required");
  } else {
    for (int i = 0; i < n; ++i) {
      if (problem.objectives[i].p.size() != q) {
        add(r, S::Error, "objectives.dim",
            "objective anchor of agent " + std::to_string(i + 1) +
                " has wrong dimension");
      }
      if (problem.objectives[i].kind == ObjectiveSpec::Kind::L2Norm) {
        add(r, S::Warning, "objective.strictness",
            "agent " + std::to_string(i + 1) +
                " objective is the plain l2 norm: convex but not strictly "
                "convex; the uniqueness argument needs strictness");
      }
    }
  }

  if (a_ok) {
    add(r, S::Info, "slater",
        "Slater condition not checked automatically; certify a strictly "
        "feasible point manually if strong duality is in doubt");
  }
  return r;
}

RobustAllocationProblem demo_problem() {
  const int n = 4, m = 2, q = 2;
  RobustAllocationProblem prob;
  prob.graph = CommGraph::path(n);

  auto& c = prob.constraints;
  c.m = m;
  c.q = q;
  c.a.resize(n);
  c.ahat.resize(n);
  c.b.resize(n);
  for (int i = 0; i < n; ++i) {
    const double lead = 0.1 * (i + 1);        // 0.1 * agent index
    const double trail = 0.1 * (4 - i);       // 0.1 * (5 - agent index)
    c.a[i] = {Vec::Constant(q, lead), Vec::Constant(q, trail)};
    c.ahat[i] = {Vec::Constant(q, trail), Vec::Constant(q, lead)};
  }
  c.b[0] = {(Vec(2) << -15, -5).finished(), (Vec(2) << -5, -1).finished()};
  c.b[1] = {(Vec(2) << -10, -4).finished(), (Vec(2) << -4, -3).finished()};
  c.b[2] = {(Vec(2) << 0, -6).finished(), (Vec(2) << 0, -2).finished()};
  c.b[3] = {(Vec(2) << 4, 0).finished(), (Vec(2) << 1, -5).finished()};
  c.gamma = {2, 2};
  c.b_aggregate = {{(Vec(2) << -21, -15).finished(),
                    (Vec(2) << -8, -11).finished()}};

  const Mat x0 = demo_initial_positions();
  for (int i = 0; i < n; ++i) {
    prob.sets.push_back(LocalSet::ball(x0.row(i).transpose(), 30.0));
    Vec p(2);
    p << i + 1, -(i + 1);
    prob.objectives.push_back(ObjectiveSpec::quadratic_plus_l1(std::move(p)));
  }
  return prob;
}

Mat demo_initial_positions() {
  Mat x0(4, 2);
  x0 << -13, 12, 17, 15, -10, -11, 16, -14;
  return x0;
}

}  // namespace rra
