#include "mfe/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mfe/errors.hpp"
#include "mfe/random.hpp"
#include "mfe/text.hpp"

namespace mfe {
namespace {

constexpr double kMinStep = 1e-12;
constexpr double kTrivialNorm = 1e-8;

bool within(double x, double lo, double hi) { return x > lo && x < hi; }

struct GmresResult {
  Field x;
  double relative_residual;
  int iterations;
};

// Right-preconditioned GMRES (no restart) for J x = b with preconditioner
// (-Lap)^{-1}; all Krylov vectors are kept mean-zero.
template <class Apply>
GmresResult gmres(Apply&& apply, const Field& b, int max_iter, double rtol) {
  const double beta = l2_norm(b);
  GmresResult out{Field(b.grid()), 0.0, 0};
  if (beta == 0.0) return out;

  std::vector<Field> basis;
  basis.push_back((1.0 / beta) * project_mean_zero(b));
  std::vector<std::vector<double>> h;  // h[j] = column j, length j + 2
  std::vector<double> cs, sn;
  std::vector<double> g{beta};

  int k = 0;
  double res = beta;
  for (; k < max_iter; ++k) {
    Field w = project_mean_zero(apply(solve_poisson(basis[static_cast<std::size_t>(k)])));
    std::vector<double> col(static_cast<std::size_t>(k) + 2, 0.0);
    for (int i = 0; i <= k; ++i) {
      col[static_cast<std::size_t>(i)] = inner(w, basis[static_cast<std::size_t>(i)]);
      w.add_scaled(-col[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(i)]);
    }
    const double wn = l2_norm(w);
    col[static_cast<std::size_t>(k) + 1] = wn;
    for (int i = 0; i < k; ++i) {
      const double a = col[static_cast<std::size_t>(i)];
      const double c = col[static_cast<std::size_t>(i) + 1];
      col[static_cast<std::size_t>(i)] = cs[static_cast<std::size_t>(i)] * a + sn[static_cast<std::size_t>(i)] * c;
      col[static_cast<std::size_t>(i) + 1] =
          -sn[static_cast<std::size_t>(i)] * a + cs[static_cast<std::size_t>(i)] * c;
    }
    const double a = col[static_cast<std::size_t>(k)];
    const double c = col[static_cast<std::size_t>(k) + 1];
    const double r = std::hypot(a, c);
    cs.push_back(r == 0.0 ? 1.0 : a / r);
    sn.push_back(r == 0.0 ? 0.0 : c / r);
    col[static_cast<std::size_t>(k)] = r;
    col[static_cast<std::size_t>(k) + 1] = 0.0;
    g.push_back(-sn.back() * g.back());
    g[static_cast<std::size_t>(k)] *= cs.back();
    h.push_back(std::move(col));
    res = std::abs(g.back());
    if (res <= rtol * beta || wn == 0.0) {
      ++k;
      break;
    }
    basis.push_back((1.0 / wn) * w);
  }

  // back substitution on the k x k triangle
  std::vector<double> y(static_cast<std::size_t>(k), 0.0);
  for (int i = k - 1; i >= 0; --i) {
    double s = g[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) s -= h[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
    const double d = h[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    y[static_cast<std::size_t>(i)] = d == 0.0 ? 0.0 : s / d;
  }
  Field z(b.grid());
  for (int i = 0; i < k; ++i) z.add_scaled(y[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(i)]);
  out.x = solve_poisson(z);
  out.relative_residual = res / beta;
  out.iterations = k;
  return out;
}

Solution finish(const ProblemSpec& spec, Field v, double rn, int iters, SolveStatus status, double f,
                std::vector<TraceRow> trace) {
  return Solution{std::move(v), spec, rn, iters, status, status == SolveStatus::Converged, f, std::move(trace)};
}

}  // namespace

void SolverOptions::validate() const {
  if (!(tol > 0.0)) throw BadParameter("solver.tol must be positive");
  if (max_iter < 1) throw BadParameter("solver.max_iter must be positive");
  if (!within(damping, 0.0, 1.0) && damping != 1.0) throw BadParameter("solver.damping must lie in (0,1]");
  if (!within(linesearch_c, 0.0, 0.5)) throw BadParameter("solver.linesearch_c must lie in (0,0.5)");
  if (!(fd_eps > 0.0)) throw BadParameter("solver.fd_eps must be positive");
  if (krylov_max < 1) throw BadParameter("solver.krylov_max must be positive");
  if (!within(krylov_rtol, 0.0, 1.0)) throw BadParameter("solver.krylov_rtol must lie in (0,1)");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::Diverged: return "diverged";
    case SolveStatus::Stalled: return "stalled";
    case SolveStatus::SingularLinearization: return "singular_linearization";
  }
  return "unknown";
}

Solution minimize(const ProblemSpec& spec, const Field& v0, const SolverOptions& opts) {
  spec.validate();
  opts.validate();
  if (!is_mean_zero(v0)) throw BadParameter("initial field must be mean-zero");
  Field v = project_mean_zero(v0);
  double f = functional(spec, v);
  Field g = functional_gradient(spec, v);
  double rn = l2_norm(g);
  std::vector<TraceRow> trace{{0, rn, f, 0.0}};

  for (int it = 1;; ++it) {
    if (rn <= opts.tol) return finish(spec, std::move(v), rn, it - 1, SolveStatus::Converged, f, std::move(trace));
    if (it > opts.max_iter) {
      return finish(spec, std::move(v), rn, it - 1, SolveStatus::MaxIterations, f, std::move(trace));
    }
    const Field d = -solve_poisson(g);
    const double slope = inner(g, d);
    double step = opts.damping;
    double change = 0.0;
    for (;;) {
      bool ok = false;
      try {
        change = functional_change(spec, v, d, step);
        ok = std::isfinite(change) && change <= opts.linesearch_c * step * slope;
      } catch (const Overflow&) {
        ok = false;
      }
      if (ok) break;
      step *= 0.5;
      if (step < kMinStep) return finish(spec, std::move(v), rn, it - 1, SolveStatus::Stalled, f, std::move(trace));
    }
    v.add_scaled(step, d);
    v = project_mean_zero(std::move(v));
    f += change;
    g = functional_gradient(spec, v);
    rn = l2_norm(g);
    trace.push_back({it, rn, f, step});
    if (f < opts.divergence_floor) return finish(spec, std::move(v), rn, it, SolveStatus::Diverged, f, std::move(trace));
  }
}

Field jacobian_vector(const ProblemSpec& spec, const Field& v, const Field& w, double fd_eps) {
  const double wn = max_abs(w);
  if (wn == 0.0) return Field(v.grid());
  // -Lap is linear; only the nonlinear term is differenced
  const double eps = fd_eps * (1.0 + max_abs(v)) / wn;
  Field plus = v;
  plus.add_scaled(eps, w);
  Field minus = v;
  minus.add_scaled(-eps, w);
  Field jw = rhs(spec, plus);
  jw -= rhs(spec, minus);
  jw *= -0.5 / eps;
  jw -= laplacian(w);
  return jw;
}

Solution newton_solve(const ProblemSpec& spec, const Field& v0, const SolverOptions& opts) {
  spec.validate();
  opts.validate();
  if (!is_mean_zero(v0)) throw BadParameter("initial field must be mean-zero");
  Field v = project_mean_zero(v0);
  Field r = residual(spec, v);
  double rn = l2_norm(r);
  std::vector<TraceRow> trace{{0, rn, functional(spec, v), 0.0}};

  for (int it = 1;; ++it) {
    if (rn <= opts.tol) {
      return finish(spec, v, rn, it - 1, SolveStatus::Converged, functional(spec, v), std::move(trace));
    }
    if (it > opts.max_iter) {
      return finish(spec, v, rn, it - 1, SolveStatus::MaxIterations, functional(spec, v), std::move(trace));
    }
    auto apply = [&](const Field& w) { return jacobian_vector(spec, v, w, opts.fd_eps); };
    const auto lin = gmres(apply, -r, opts.krylov_max, opts.krylov_rtol);
    if (lin.relative_residual > 0.5) {
      return finish(spec, v, rn, it - 1, SolveStatus::SingularLinearization, functional(spec, v), std::move(trace));
    }

    double step = opts.damping;
    Field trial(v.grid());
    Field trial_r(v.grid());
    double trial_rn = 0.0;
    for (;;) {
      trial = v;
      trial.add_scaled(step, lin.x);
      trial = project_mean_zero(std::move(trial));
      bool ok = false;
      if (trial.all_finite()) {
        try {
          trial_r = residual(spec, trial);
          trial_rn = l2_norm(trial_r);
          ok = std::isfinite(trial_rn) && trial_rn <= (1.0 - opts.linesearch_c * step) * rn;
        } catch (const Overflow&) {
          ok = false;
        }
      }
      if (ok) break;
      step *= 0.5;
      if (step < kMinStep) {
        return finish(spec, v, rn, it - 1, SolveStatus::Stalled, functional(spec, v), std::move(trace));
      }
    }
    v = std::move(trial);
    r = std::move(trial_r);
    rn = trial_rn;
    const double f = functional(spec, v);
    trace.push_back({it, rn, f, step});
    if (f < opts.divergence_floor) return finish(spec, v, rn, it, SolveStatus::Diverged, f, std::move(trace));
  }
}

std::vector<ContinuationEntry> continuation(const ProblemSpec& spec, const std::vector<double>& lambda_path,
                                            const Field& v0, const SolverOptions& opts) {
  if (lambda_path.empty()) throw BadParameter("continuation: empty lambda path");
  for (double l : lambda_path) {
    if (!(l > 0.0)) throw BadParameter("continuation: every lambda must be positive");
  }
  std::vector<ContinuationEntry> out;
  auto trivial = [](const Field& v) { return l2_norm(v) <= kTrivialNorm; };
  std::optional<Field> previous;  // last nontrivial converged solution
  bool abandoned = false;
  for (double l : lambda_path) {
    if (abandoned) {
      out.push_back({l, std::nullopt});
      continue;
    }
    const ProblemSpec at = spec.with_lambda(l);
    Solution sol = newton_solve(at, previous ? *previous : v0, opts);
    // v = 0 solves every member of the family; falling onto it from the
    // previous branch point says nothing about the branch, so retry from v0
    if (previous && sol.converged && trivial(sol.v)) {
      Solution retry = newton_solve(at, v0, opts);
      if (retry.converged && !trivial(retry.v)) sol = std::move(retry);
    }
    if (sol.status == SolveStatus::Diverged || sol.status == SolveStatus::SingularLinearization) abandoned = true;
    if (sol.converged) {
      if (trivial(sol.v)) {
        previous.reset();
      } else {
        previous = sol.v;
      }
    }
    out.push_back({l, std::move(sol)});
  }
  return out;
}

double smallest_preconditioned_eigenvalue(const ProblemSpec& spec, const Field& v, double fd_eps, int iterations) {
  auto op = [&](const Field& w) {
    return project_mean_zero(solve_poisson(jacobian_vector(spec, v, w, fd_eps)));
  };
  Xoshiro256 rng(0x5eed);
  const int modes = std::min(4, v.grid().resolution() / 2 - 1);
  auto power = [&](auto&& apply) {
    Field w = random_band_limited(v.grid(), rng, modes);
    w *= 1.0 / l2_norm(w);
    double theta = 0.0;
    for (int k = 0; k < iterations; ++k) {
      Field aw = apply(w);
      theta = inner(w, aw);
      const double n = l2_norm(aw);
      if (n == 0.0) break;
      w = (1.0 / n) * aw;
    }
    return theta;
  };
  const double top = std::abs(power(op));
  const double shift = 1.05 * top + 1e-3;
  const double shifted = power([&](const Field& w) {
    Field out = shift * w;
    out -= op(w);
    // the constant mode is a spurious eigenvalue 0; keep it out
    return project_mean_zero(std::move(out));
  });
  return shift - shifted;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "iteration,residual_norm,functional_value,step_length\r\n";
  for (const auto& row : trace) {
    out << row.iteration << ',' << format_real(row.residual_norm) << ',' << format_real(row.functional_value) << ','
        << format_real(row.step_length) << "\r\n";
  }
}

}  // namespace mfe
