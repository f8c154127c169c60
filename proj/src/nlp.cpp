#include "lexibr/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lexibr/dynamics.hpp"

namespace lexibr::nlp {

std::string_view status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kMaxIter: return "max_iter";
    case SolveStatus::kInfeasible: return "infeasible";
  }
  return "unknown";
}

double KktReport::feasibility() const { return std::max(eq_feasibility, ineq_feasibility); }

double KktReport::max() const {
  return std::max({stationarity, eq_feasibility, ineq_feasibility, complementarity,
                   dual_feasibility});
}

namespace {

double fd_step(double xi) { return std::max(1e-6, 1e-6 * std::abs(xi)); }

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalError(what);
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw NumericalError(what);
}

// Bound rows appended after the program's own inequalities.
struct BoundRows {
  std::vector<int> lower_index;
  std::vector<int> upper_index;
  Vector lower_value;
  Vector upper_value;

  int rows() const { return static_cast<int>(lower_index.size() + upper_index.size()); }
};

BoundRows bound_rows(const SmoothProgram& p) {
  BoundRows b;
  if (!p.bounds) return b;
  std::vector<double> lv, uv;
  for (int i = 0; i < p.dim; ++i) {
    if (std::isfinite(p.bounds->lower[i])) {
      b.lower_index.push_back(i);
      lv.push_back(p.bounds->lower[i]);
    }
  }
  for (int i = 0; i < p.dim; ++i) {
    if (std::isfinite(p.bounds->upper[i])) {
      b.upper_index.push_back(i);
      uv.push_back(p.bounds->upper[i]);
    }
  }
  b.lower_value = Eigen::Map<Vector>(lv.data(), static_cast<Eigen::Index>(lv.size()));
  b.upper_value = Eigen::Map<Vector>(uv.data(), static_cast<Eigen::Index>(uv.size()));
  return b;
}

// Program with bounds rewritten as inequality rows.
class FlatProgram {
 public:
  explicit FlatProgram(const SmoothProgram& p) : p_(p), bounds_(bound_rows(p)) {
    m_eq_ = p.eq.rows;
    m_in_ = p.ineq.rows + bounds_.rows();
  }

  int dim() const { return p_.dim; }
  int num_eq() const { return m_eq_; }
  int num_ineq() const { return m_in_; }

  double f(const Vector& x) const {
    const double v = p_.objective.value(x);
    require_finite(v, "minimize: non-finite objective");
    return v;
  }
  Vector grad_f(const Vector& x) const { return objective_gradient(p_, x); }

  Vector c(const Vector& x) const {
    Vector v = p_.eq.eval(x);
    require_finite(v, "minimize: non-finite equality constraint");
    return v;
  }
  bool has_hessian() const { return static_cast<bool>(p_.hessian); }
  // Bound rows are linear, so only the program's own rows carry curvature.
  Matrix lagrangian_hessian(const Vector& x, const Vector& w_eq, const Vector& w_in) const {
    Matrix H = p_.hessian(x, w_eq, w_in.head(p_.ineq.rows));
    require_finite(H, "minimize: non-finite hessian");
    return H;
  }

  Matrix jac_c(const Vector& x) const {
    if (m_eq_ == 0) return Matrix(0, dim());
    return constraint_jacobian(p_.eq, x);
  }

  Vector g(const Vector& x) const {
    Vector v(m_in_);
    if (p_.ineq.rows > 0) v.head(p_.ineq.rows) = p_.ineq.value(x);
    int row = p_.ineq.rows;
    for (std::size_t k = 0; k < bounds_.lower_index.size(); ++k) {
      v[row++] = x[bounds_.lower_index[k]] - bounds_.lower_value[static_cast<Eigen::Index>(k)];
    }
    for (std::size_t k = 0; k < bounds_.upper_index.size(); ++k) {
      v[row++] = bounds_.upper_value[static_cast<Eigen::Index>(k)] - x[bounds_.upper_index[k]];
    }
    require_finite(v, "minimize: non-finite inequality constraint");
    return v;
  }
  Matrix jac_g(const Vector& x) const {
    Matrix J = Matrix::Zero(m_in_, dim());
    if (p_.ineq.rows > 0) J.topRows(p_.ineq.rows) = constraint_jacobian(p_.ineq, x);
    int row = p_.ineq.rows;
    for (int i : bounds_.lower_index) J(row++, i) = 1.0;
    for (int i : bounds_.upper_index) J(row++, i) = -1.0;
    return J;
  }

  Multipliers split(const Vector& lambda, const Vector& mu) const {
    Multipliers m;
    m.eq = lambda;
    m.ineq = mu.head(p_.ineq.rows);
    if (p_.bounds) {
      m.lower = Vector::Zero(dim());
      m.upper = Vector::Zero(dim());
      int row = p_.ineq.rows;
      for (int i : bounds_.lower_index) m.lower[i] = mu[row++];
      for (int i : bounds_.upper_index) m.upper[i] = mu[row++];
    }
    return m;
  }

 private:
  const SmoothProgram& p_;
  BoundRows bounds_;
  int m_eq_ = 0;
  int m_in_ = 0;
};

// Everything the inner loop needs at one iterate.
struct Iterate {
  Vector x;
  double f = 0.0;
  Vector grad_f;
  Vector c;
  Matrix jac_c;
  Vector g;
  Matrix jac_g;
};

Iterate evaluate(const FlatProgram& prog, const Vector& x) {
  Iterate it;
  it.x = x;
  it.f = prog.f(x);
  it.grad_f = prog.grad_f(x);
  require_finite(it.grad_f, "minimize: non-finite gradient");
  it.c = prog.num_eq() > 0 ? prog.c(x) : Vector(0);
  it.jac_c = prog.jac_c(x);
  it.g = prog.num_ineq() > 0 ? prog.g(x) : Vector(0);
  it.jac_g = prog.num_ineq() > 0 ? prog.jac_g(x) : Matrix(0, x.size());
  require_finite(it.jac_c, "minimize: non-finite constraint jacobian");
  require_finite(it.jac_g, "minimize: non-finite constraint jacobian");
  return it;
}

struct AugmentedLagrangian {
  const FlatProgram& prog;
  const Vector& lambda;
  const Vector& mu;
  double rho;

  double value(const Vector& x) const {
    double v = prog.f(x);
    if (prog.num_eq() > 0) {
      const Vector cv = prog.c(x);
      v += -lambda.dot(cv) + 0.5 * rho * cv.squaredNorm();
    }
    if (prog.num_ineq() > 0) {
      const Vector gv = prog.g(x);
      double s = 0.0;
      for (Eigen::Index i = 0; i < gv.size(); ++i) {
        const double shifted = std::max(0.0, mu[i] - rho * gv[i]);
        s += shifted * shifted - mu[i] * mu[i];
      }
      v += s / (2.0 * rho);
    }
    return v;
  }

  Vector shifted(const Iterate& it) const { return (mu - rho * it.g).cwiseMax(0.0); }

  Vector gradient(const Iterate& it) const {
    Vector grad = it.grad_f;
    if (prog.num_eq() > 0) grad -= it.jac_c.transpose() * (lambda - rho * it.c);
    if (prog.num_ineq() > 0) grad -= it.jac_g.transpose() * shifted(it);
    return grad;
  }

  // Exact Gauss-Newton part of the merit Hessian: rho J^T J over the
  // equalities and the inequalities whose shifted multiplier is positive.
  Matrix penalty_curvature(const Iterate& it) const {
    const Eigen::Index n = it.x.size();
    Matrix M = Matrix::Zero(n, n);
    if (prog.num_eq() > 0) M.noalias() += rho * it.jac_c.transpose() * it.jac_c;
    for (Eigen::Index i = 0; i < it.g.size(); ++i) {
      if (mu[i] - rho * it.g[i] > 0.0) {
        M.noalias() += rho * it.jac_g.row(i).transpose() * it.jac_g.row(i);
      }
    }
    return M;
  }
};

struct InnerResult {
  int iterations = 0;
  double grad_norm = 0.0;
};

// Newton-type minimization of the augmented Lagrangian. The penalty curvature
// is always formed exactly; the Lagrangian part is the program's own Hessian
// when it provides one, otherwise a damped BFGS estimate B that survives
// across outer iterations (it does not depend on rho).
InnerResult quasi_newton(const AugmentedLagrangian& merit, Iterate& cur, Matrix& B, double tol,
                         const SolverOptions& opt, int outer, std::vector<TraceEntry>* trace) {
  InnerResult r;
  const Eigen::Index n = cur.x.size();
  double phi = merit.value(cur.x);
  Vector grad = merit.gradient(cur);
  if (trace) trace->push_back({outer, 0, phi});
  bool b_fresh = false;
  const bool exact = merit.prog.has_hessian();
  for (int it = 0; it < opt.max_inner; ++it) {
    r.grad_norm = inf_norm(grad);
    if (r.grad_norm <= tol) break;
    Matrix M = merit.penalty_curvature(cur);
    if (exact) {
      Vector w_eq = merit.lambda;
      if (merit.prog.num_eq() > 0) w_eq -= merit.rho * cur.c;
      M += merit.prog.lagrangian_hessian(cur.x, w_eq, merit.shifted(cur));
    } else {
      M += B;
    }
    Eigen::LLT<Matrix> llt(M);
    double shift = 0.0;
    const double scale = std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
    while (llt.info() != Eigen::Success) {
      shift = shift == 0.0 ? 1e-8 * scale : shift * 10.0;
      llt.compute(M + shift * Matrix::Identity(n, n));
    }
    Vector d = -llt.solve(grad);
    double slope = grad.dot(d);
    if (!(slope < 0.0) || !d.allFinite()) {
      d = -grad;
      slope = grad.dot(d);
    }
    double alpha = std::min(1.0, opt.max_step / std::max(inf_norm(d), 1e-300));
    bool accepted = false;
    Vector x_new;
    double phi_new = phi;
    for (int ls = 0; ls < 50; ++ls) {
      x_new = cur.x + alpha * d;
      phi_new = merit.value(x_new);
      if (std::isfinite(phi_new) && phi_new <= phi + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (exact || b_fresh) break;  // no descent even from a reset model
      B = Matrix::Identity(n, n);
      b_fresh = true;
      continue;
    }
    Iterate next = evaluate(merit.prog, x_new);
    if (exact) {
      cur = std::move(next);
      phi = phi_new;
      grad = merit.gradient(cur);
      ++r.iterations;
      if (trace) trace->push_back({outer, r.iterations, phi});
      continue;
    }
    const Vector s = next.x - cur.x;
    Vector y = next.grad_f - cur.grad_f;
    if (merit.prog.num_eq() > 0) {
      y -= (next.jac_c - cur.jac_c).transpose() * (merit.lambda - merit.rho * next.c);
    }
    if (merit.prog.num_ineq() > 0) {
      y -= (next.jac_g - cur.jac_g).transpose() * merit.shifted(next);
    }
    const Vector Bs = B * s;
    const double sBs = s.dot(Bs);
    if (sBs > 1e-16 * s.squaredNorm()) {
      double sy = s.dot(y);
      if (sy < 0.2 * sBs) {  // Powell damping keeps B positive definite
        const double theta = 0.8 * sBs / (sBs - sy);
        y = theta * y + (1.0 - theta) * Bs;
        sy = s.dot(y);
      }
      B += (y * y.transpose()) / sy - (Bs * Bs.transpose()) / sBs;
      b_fresh = false;
    }
    cur = std::move(next);
    phi = phi_new;
    grad = merit.gradient(cur);
    ++r.iterations;
    if (trace) trace->push_back({outer, r.iterations, phi});
  }
  r.grad_norm = inf_norm(grad);
  return r;
}

bool meets_targets(const KktReport& r, const SolverOptions& opt) {
  return r.stationarity <= opt.stationarity_target && r.feasibility() <= opt.feasibility_target &&
         r.complementarity <= opt.stationarity_target;
}

// Polishing starts once the AL iterate is this close to feasible.
constexpr double kPolishViolation = 1e-3;
constexpr int kPolishSteps = 20;

struct PolishResult {
  Vector x;
  Vector lambda;
  Vector mu;
  double f = 0.0;
  KktReport report;
  bool ok = false;
};

// Residual of the KKT equations for a fixed active set: stationarity,
// equalities, and the active inequalities held at zero.
double active_kkt_norm(const Iterate& it, const std::vector<Eigen::Index>& rows,
                       const Vector& lambda, const Vector& mu) {
  Vector stat = it.grad_f;
  if (it.c.size() > 0) stat -= it.jac_c.transpose() * lambda;
  double sq = 0.0;
  for (Eigen::Index i : rows) {
    stat -= it.jac_g.row(i).transpose() * mu[i];
    sq += it.g[i] * it.g[i];
  }
  return std::sqrt(stat.squaredNorm() + it.c.squaredNorm() + sq);
}

// Newton on the KKT system of the equalities plus the inequalities estimated
// active, with a backtracking search on that system's residual. Quadratic
// once the active set settles, which the AL multiplier update reaches only
// linearly when multipliers are large. The small negative diagonal keeps
// dependent active rows solvable.
PolishResult polish(const SmoothProgram& p, const FlatProgram& prog, const Vector& x0,
                    const Vector& lambda0, const Vector& mu0, const SolverOptions& opt,
                    int max_steps) {
  PolishResult out;
  if (!prog.has_hessian()) return out;
  const Eigen::Index n = x0.size();
  const Eigen::Index me = prog.num_eq();
  Iterate it = evaluate(prog, x0);
  Vector lambda = lambda0;
  Vector mu = mu0;
  std::vector<bool> active(static_cast<std::size_t>(prog.num_ineq()));
  for (Eigen::Index i = 0; i < it.g.size(); ++i) active[i] = mu[i] > 0.0 || it.g[i] < 0.0;
  for (int step = 0; step < max_steps; ++step) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < it.g.size(); ++i) {
      if (active[static_cast<std::size_t>(i)]) rows.push_back(i);
      else mu[i] = 0.0;
    }
    const Eigen::Index m = me + static_cast<Eigen::Index>(rows.size());
    Matrix A(m, n);
    Vector r(m);
    if (me > 0) {
      A.topRows(me) = it.jac_c;
      r.head(me) = it.c;
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
      A.row(me + static_cast<Eigen::Index>(k)) = it.jac_g.row(rows[k]);
      r[me + static_cast<Eigen::Index>(k)] = it.g[rows[k]];
    }
    Matrix K = Matrix::Zero(n + m, n + m);
    K.topLeftCorner(n, n) = prog.lagrangian_hessian(it.x, lambda, mu);
    K.topRightCorner(n, m) = A.transpose();
    K.bottomLeftCorner(m, n) = A;
    K.bottomRightCorner(m, m).diagonal().setConstant(-1e-12);
    Vector rhs(n + m);
    rhs.head(n) = -it.grad_f;
    rhs.tail(m) = -r;
    const Vector sol = Eigen::PartialPivLU<Matrix>(K).solve(rhs);
    if (!sol.allFinite()) break;
    // The solve returns -y for the constraint multipliers y.
    const Vector dx = sol.head(n);
    const Vector lambda_full = -sol.segment(n, me);
    Vector mu_full = mu;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      mu_full[rows[k]] = -sol[n + me + static_cast<Eigen::Index>(k)];
    }
    const double r0 = active_kkt_norm(it, rows, lambda, mu);
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 20; ++ls, alpha *= 0.5) {
      Iterate trial = evaluate(prog, it.x + alpha * dx);
      const Vector l_trial = lambda + alpha * (lambda_full - lambda);
      const Vector m_trial = mu + alpha * (mu_full - mu);
      if (active_kkt_norm(trial, rows, l_trial, m_trial) <= (1.0 - 1e-4 * alpha) * r0) {
        it = std::move(trial);
        lambda = l_trial;
        mu = m_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    for (Eigen::Index i = 0; i < it.g.size(); ++i) {
      if (mu[i] < 0.0) {
        mu[i] = 0.0;
        active[static_cast<std::size_t>(i)] = false;
      } else if (it.g[i] < 0.0) {
        active[static_cast<std::size_t>(i)] = true;
      }
    }
    out.report = kkt_report(p, it.x, prog.split(lambda, mu));
    out.x = it.x;
    out.lambda = lambda;
    out.mu = mu;
    out.f = it.f;
    out.ok = true;
    if (meets_targets(out.report, opt)) break;
  }
  return out;
}

// Fallback when the last iterate is not converged. Ranked: converged (latest
// wins), tightly feasible by objective, loosely feasible by violation, rest by
// violation. The starting point is a candidate, so a feasible warm start is
// never traded for an infeasible end.
struct BestPoint {
  Vector x;
  double f = 0.0;
  Multipliers multipliers;
  KktReport report;
  int rank = 4;

  void offer(const Vector& cx, double cf, Multipliers cm, const KktReport& cr,
             const SolverOptions& opt) {
    const double feas = cr.feasibility();
    const int r = cr.max() <= opt.tolerance                ? 0
                  : feas <= 10.0 * opt.feasibility_target ? 1
                  : feas <= opt.tolerance                 ? 2
                                                          : 3;
    bool take = r < rank;
    if (r == rank) take = r == 0 || (r == 1 ? cf <= f : feas <= report.feasibility());
    if (!take) return;
    x = cx;
    f = cf;
    multipliers = std::move(cm);
    report = cr;
    rank = r;
  }
};

}  // namespace

Vector gradient(const std::function<double(const Vector&)>& f, const Vector& x) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = fd_step(x[i]);
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    require_finite(fp, "gradient: non-finite evaluation");
    require_finite(fm, "gradient: non-finite evaluation");
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Matrix jacobian(const std::function<Vector(const Vector&)>& f, int rows, const Vector& x) {
  Matrix J(rows, x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = fd_step(x[i]);
    probe[i] = x[i] + h;
    const Vector fp = f(probe);
    probe[i] = x[i] - h;
    const Vector fm = f(probe);
    probe[i] = x[i];
    require_finite(fp, "jacobian: non-finite evaluation");
    require_finite(fm, "jacobian: non-finite evaluation");
    J.col(i) = (fp - fm) / (2.0 * h);
  }
  return J;
}

Vector objective_gradient(const SmoothProgram& p, const Vector& x) {
  if (p.objective.gradient) return p.objective.gradient(x);
  return gradient(p.objective.value, x);
}

Matrix constraint_jacobian(const VectorFunction& f, const Vector& x) {
  if (f.rows == 0) return Matrix(0, x.size());
  if (f.jacobian) return f.jacobian(x);
  return jacobian(f.value, f.rows, x);
}

KktReport kkt_report(const SmoothProgram& p, const Vector& x, const Multipliers& m) {
  if (x.size() != p.dim || m.eq.size() != p.eq.rows || m.ineq.size() != p.ineq.rows) {
    throw std::invalid_argument("kkt_report: dimension mismatch");
  }
  KktReport r;
  Vector stat = objective_gradient(p, x);
  if (p.eq.rows > 0) {
    const Vector c = p.eq.value(x);
    stat -= constraint_jacobian(p.eq, x).transpose() * m.eq;
    r.eq_feasibility = inf_norm(c);
  }
  if (p.ineq.rows > 0) {
    const Vector g = p.ineq.value(x);
    stat -= constraint_jacobian(p.ineq, x).transpose() * m.ineq;
    r.ineq_feasibility = inf_norm(g.cwiseMin(0.0));
    r.complementarity = inf_norm(m.ineq.cwiseProduct(g));
    r.dual_feasibility = inf_norm(m.ineq.cwiseMin(0.0));
  }
  if (p.bounds) {
    if (m.lower.size() != p.dim || m.upper.size() != p.dim) {
      throw std::invalid_argument("kkt_report: bound multiplier size mismatch");
    }
    for (int i = 0; i < p.dim; ++i) {
      const double lo = p.bounds->lower[i];
      const double hi = p.bounds->upper[i];
      if (std::isfinite(lo)) {
        stat[i] -= m.lower[i];
        r.ineq_feasibility = std::max(r.ineq_feasibility, std::max(0.0, lo - x[i]));
        r.complementarity = std::max(r.complementarity, std::abs(m.lower[i] * (x[i] - lo)));
        r.dual_feasibility = std::max(r.dual_feasibility, std::max(0.0, -m.lower[i]));
      }
      if (std::isfinite(hi)) {
        stat[i] += m.upper[i];
        r.ineq_feasibility = std::max(r.ineq_feasibility, std::max(0.0, x[i] - hi));
        r.complementarity = std::max(r.complementarity, std::abs(m.upper[i] * (hi - x[i])));
        r.dual_feasibility = std::max(r.dual_feasibility, std::max(0.0, -m.upper[i]));
      }
    }
  }
  r.stationarity = inf_norm(stat);
  return r;
}

double kkt_residual(const SmoothProgram& p, const Vector& x, const Multipliers& m) {
  return kkt_report(p, x, m).max();
}

SolveResult minimize(const SmoothProgram& p, const Vector& x0, const SolverOptions& opt) {
  if (x0.size() != p.dim) throw std::invalid_argument("minimize: x0 has wrong dimension");
  if (!x0.allFinite()) throw std::invalid_argument("minimize: non-finite starting point");
  const FlatProgram prog(p);
  const Eigen::Index n = p.dim;

  Iterate cur = evaluate(prog, x0);
  Vector lambda = Vector::Zero(prog.num_eq());
  Vector mu = Vector::Zero(prog.num_ineq());
  double rho = opt.initial_penalty;
  Matrix B = Matrix::Identity(n, n);
  double prev_violation = std::numeric_limits<double>::infinity();

  SolveResult result;
  std::vector<TraceEntry>* trace = opt.record_trace ? &result.trace : nullptr;
  KktReport report;
  BestPoint best;
  {
    const Multipliers zero = prog.split(lambda, mu);
    best.offer(cur.x, cur.f, zero, kkt_report(p, cur.x, zero), opt);
  }
  for (int outer = 0; outer < opt.max_outer; ++outer) {
    const double inner_tol = std::max(opt.stationarity_target, std::pow(10.0, -(outer + 1)));
    const AugmentedLagrangian merit{prog, lambda, mu, rho};
    const InnerResult inner = quasi_newton(merit, cur, B, inner_tol, opt, outer, trace);
    result.inner_iterations += inner.iterations;
    result.outer_iterations = outer + 1;

    const Vector& c = cur.c;
    const Vector& g = cur.g;
    double violation = inf_norm(c);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      violation = std::max(violation, std::abs(std::min(g[i], mu[i] / rho)));
    }
    if (prog.num_eq() > 0) lambda -= rho * c;
    if (prog.num_ineq() > 0) mu = (mu - rho * g).cwiseMax(0.0);

    report = kkt_report(p, cur.x, prog.split(lambda, mu));
    best.offer(cur.x, cur.f, prog.split(lambda, mu), report, opt);
    if (meets_targets(report, opt)) break;
    if (violation <= kPolishViolation) {
      const PolishResult polished = polish(p, prog, cur.x, lambda, mu, opt, kPolishSteps);
      if (polished.ok) {
        best.offer(polished.x, polished.f, prog.split(polished.lambda, polished.mu),
                   polished.report, opt);
        if (meets_targets(polished.report, opt)) break;
      }
    }
    if (violation > 0.25 * prev_violation && rho < opt.max_penalty) {
      rho = std::min(rho * opt.penalty_growth, opt.max_penalty);
    }
    prev_violation = violation;
  }
  result.point = std::move(best.x);
  result.objective_value = best.f;
  result.multipliers = std::move(best.multipliers);
  result.kkt_residual = best.report.max();
  if (result.kkt_residual <= opt.tolerance) {
    result.status = SolveStatus::kConverged;
  } else if (best.report.feasibility() > opt.tolerance) {
    result.status = SolveStatus::kInfeasible;
  } else {
    result.status = SolveStatus::kMaxIter;
  }
  return result;
}

}  // namespace lexibr::nlp
