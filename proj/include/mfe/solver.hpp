#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mfe/field.hpp"
#include "mfe/meanfield.hpp"

namespace mfe {

struct SolverOptions {
  double tol = 1e-10;          // target L2 norm of the residual
  int max_iter = 500;
  double damping = 1.0;        // initial step length, in (0, 1]
  double linesearch_c = 1e-4;  // sufficient-decrease constant, in (0, 0.5)
  double fd_eps = 1e-6;        // relative Jacobian-vector difference step
  double divergence_floor = -1e6;
  int krylov_max = 100;
  double krylov_rtol = 1e-9;

  // Throws BadParameter naming the first out-of-range field.
  void validate() const;
};

enum class SolveStatus { Converged, MaxIterations, Diverged, Stalled, SingularLinearization };

std::string to_string(SolveStatus s);

struct TraceRow {
  int iteration;
  double residual_norm;
  double functional_value;
  double step_length;
};

struct Solution {
  Field v;
  ProblemSpec spec;
  double residual_norm;
  int iterations;
  SolveStatus status;
  bool converged;
  double functional_value;
  std::vector<TraceRow> trace;
};

// Sobolev gradient descent on J/K: direction -(-Lap)^{-1} grad, Armijo
// backtracking. Reported functional values decrease strictly across
// accepted iterates (changes are evaluated without cancellation).
Solution minimize(const ProblemSpec& spec, const Field& v0, const SolverOptions& opts = {});

// Damped Newton on the residual with central-difference Jacobian-vector
// products and right-preconditioned GMRES on the mean-zero subspace.
Solution newton_solve(const ProblemSpec& spec, const Field& v0, const SolverOptions& opts = {});

struct ContinuationEntry {
  double lambda;
  std::optional<Solution> solution;  // empty once the path was abandoned
};

// Newton along lambda_path, each solve seeded from the previous converged
// nontrivial solution (or v0 when there is none). Trivial solutions
// (||v|| <= 1e-8) carry no branch information: when a solve seeded from the
// previous branch point lands on v = 0 it is retried from v0, and the
// nontrivial result is kept if that converges. Stops at Diverged or
// SingularLinearization; later entries are left unsolved.
std::vector<ContinuationEntry> continuation(const ProblemSpec& spec, const std::vector<double>& lambda_path,
                                            const Field& v0, const SolverOptions& opts = {});

// Directional derivative of the residual at v along w (central differences).
Field jacobian_vector(const ProblemSpec& spec, const Field& v, const Field& w, double fd_eps);

// Smallest eigenvalue of (-Lap)^{-1} J(v) on mean-zero fields, by shifted
// power iteration.
double smallest_preconditioned_eigenvalue(const ProblemSpec& spec, const Field& v, double fd_eps = 1e-6,
                                          int iterations = 300);

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

}  // namespace mfe
