#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace lexibr::nlp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A smooth scalar function. When `gradient` is empty, derivatives come from
// central finite differences.
struct ScalarFunction {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

// A smooth vector function with `rows` outputs. When `jacobian` is empty,
// derivatives come from central finite differences.
struct VectorFunction {
  int rows = 0;
  std::function<Vector(const Vector&)> value;
  std::function<Matrix(const Vector&)> jacobian;

  Vector eval(const Vector& x) const { return rows == 0 ? Vector() : value(x); }
};

struct Box {
  Vector lower;
  Vector upper;
};

// minimize objective(x)  s.t.  eq(x) = 0,  ineq(x) >= 0,  lower <= x <= upper.
// Optional second-order information: returns grad^2 f - sum_i w_eq[i] grad^2 eq_i
// - sum_j w_ineq[j] grad^2 ineq_j. Without it the solver falls back to a
// quasi-Newton estimate.
using LagrangianHessian =
    std::function<Matrix(const Vector& x, const Vector& w_eq, const Vector& w_ineq)>;

struct SmoothProgram {
  int dim = 0;
  ScalarFunction objective;
  VectorFunction eq;
  VectorFunction ineq;
  std::optional<Box> bounds;
  LagrangianHessian hessian;
};

// KKT sign convention: grad f - J_eq^T eq - J_ineq^T ineq - lower + upper = 0
// with ineq, lower, upper >= 0.
struct Multipliers {
  Vector eq;
  Vector ineq;
  Vector lower;  // empty when the program has no bounds
  Vector upper;
};

enum class SolveStatus { kConverged, kMaxIter, kInfeasible };
std::string_view status_name(SolveStatus status);

struct SolverOptions {
  // Status gate: converged means kkt_residual <= tolerance at the returned point.
  double tolerance = 1e-4;
  // Internal targets the solver tries to reach before stopping early.
  double stationarity_target = 1e-7;
  double feasibility_target = 1e-9;
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  double max_penalty = 1e6;
  int max_outer = 20;
  int max_inner = 200;
  double max_step = 10.0;
  bool record_trace = false;
};

struct TraceEntry {
  int outer = 0;
  int inner = 0;
  double merit = 0.0;
};

struct SolveResult {
  Vector point;
  double objective_value = 0.0;
  Multipliers multipliers;
  double kkt_residual = 0.0;
  SolveStatus status = SolveStatus::kMaxIter;
  int outer_iterations = 0;
  int inner_iterations = 0;
  std::vector<TraceEntry> trace;
};

struct KktReport {
  double stationarity = 0.0;
  double eq_feasibility = 0.0;
  double ineq_feasibility = 0.0;
  double complementarity = 0.0;
  double dual_feasibility = 0.0;

  double feasibility() const;
  double max() const;
};

// Central differences with h_i = max(1e-6, 1e-6 |x_i|). Throws NumericalError
// on a non-finite evaluation.
Vector gradient(const std::function<double(const Vector&)>& f, const Vector& x);
Matrix jacobian(const std::function<Vector(const Vector&)>& f, int rows, const Vector& x);

// Analytic derivative when supplied, finite differences otherwise.
Vector objective_gradient(const SmoothProgram& p, const Vector& x);
Matrix constraint_jacobian(const VectorFunction& f, const Vector& x);

KktReport kkt_report(const SmoothProgram& p, const Vector& x, const Multipliers& m);
// Max-norm of stationarity, primal feasibility, complementarity and dual sign
// violations. Zero exactly at a KKT point.
double kkt_residual(const SmoothProgram& p, const Vector& x, const Multipliers& m);

// Augmented Lagrangian outer loop (PHR, inequalities folded in with the
// max(0, mu - rho g) form) around a Newton-type inner loop with Armijo
// backtracking: exact Lagrangian Hessian when the program supplies one,
// damped BFGS otherwise. Once nearly feasible it also tries Newton steps on
// the active-set KKT system. Returns the best point seen. Deterministic.
SolveResult minimize(const SmoothProgram& p, const Vector& x0, const SolverOptions& options = {});

}  // namespace lexibr::nlp
