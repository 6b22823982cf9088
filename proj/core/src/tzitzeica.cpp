#include "cstat/tzitzeica.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cstat {

namespace {

// Iterates whose magnitude exceeds this have left every regime the equation
// can balance (e^u or e^{-2u} overflow long before a genuine solution gets here).
constexpr double kDivergenceBound = 200.0;
constexpr int kMaxBacktrackFailures = 10;

ScalarField potential(const ScalarField& u, const ComplexField& q) {
  ScalarField p(u.chart_ptr());
  for (std::size_t k : u.chart().active_nodes())
    p[k] = 4.0 * std::exp(u[k]) + 8.0 * std::norm(q[k]) * std::exp(-2.0 * u[k]);
  return p;
}

double dot_interior(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t k : a.chart().interior_nodes()) s += a[k] * b[k];
  return s;
}

bool all_finite(const ScalarField& f) {
  for (std::size_t k : f.chart().active_nodes())
    if (!std::isfinite(f[k])) return false;
  return true;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("solver tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("solver max_iter must be at least 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("solver damping must lie in (0, 1]");
  if (!(min_damping > 0.0 && min_damping <= damping))
    throw std::invalid_argument("solver min_damping must lie in (0, damping]");
  if (!(linear_tol > 0.0 && linear_tol < 1.0)) throw std::invalid_argument("solver linear_tol must lie in (0, 1)");
  if (max_linear_iter < 0) throw std::invalid_argument("solver max_linear_iter must be non-negative");
}

const char* to_string(SolveStatus s) noexcept {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::NotConverged: return "not_converged";
    case SolveStatus::Obstruction: return "obstruction";
  }
  return "unknown";
}

ScalarField pde_residual(const ScalarField& u, const ComplexField& q) {
  require_same_chart(u.chart(), q.chart());
  ScalarField r = laplacian(u);
  for (std::size_t k : u.chart().interior_nodes())
    r[k] += -4.0 * std::exp(u[k]) + 4.0 * std::norm(q[k]) * std::exp(-2.0 * u[k]);
  return r;
}

ScalarField pde_residual(const ScalarField& u, const ComplexField& q, const ScalarField& forcing) {
  require_same_chart(u.chart(), forcing.chart());
  ScalarField r = pde_residual(u, q);
  for (std::size_t k : u.chart().interior_nodes()) r[k] -= forcing[k];
  return r;
}

ScalarField jacobian_apply(const ScalarField& u, const ComplexField& q, const ScalarField& delta) {
  require_same_chart(u.chart(), q.chart());
  require_same_chart(u.chart(), delta.chart());
  ScalarField out = laplacian(delta);
  const ScalarField p = potential(u, q);
  for (std::size_t k : u.chart().interior_nodes()) out[k] -= p[k] * delta[k];
  return out;
}

LinearSolveResult solve_linearized(const ScalarField& u, const ComplexField& q, const ScalarField& rhs,
                                   double rel_tol, int max_iter) {
  require_same_chart(u.chart(), q.chart());
  require_same_chart(u.chart(), rhs.chart());
  const Chart& c = u.chart();
  const auto& nodes = c.interior_nodes();
  if (max_iter <= 0) max_iter = static_cast<int>(50.0 * std::sqrt(static_cast<double>(nodes.size()))) + 500;

  const ScalarField p = potential(u, q);
  const double stencil_diag = 2.0 / (c.hx() * c.hx()) + 2.0 / (c.hy() * c.hy());

  // A x = -lap(x) + p x; unknowns live on interior nodes, everything else is zero.
  auto apply = [&](const ScalarField& x) {
    ScalarField y = laplacian(x);
    for (std::size_t k : nodes) y[k] = -y[k] + p[k] * x[k];
    return y;
  };

  LinearSolveResult res{ScalarField(u.chart_ptr()), 0, 0.0};
  ScalarField& x = res.solution;
  ScalarField r(u.chart_ptr());
  for (std::size_t k : nodes) r[k] = rhs[k];
  const double bnorm = std::sqrt(dot_interior(r, r));
  if (bnorm == 0.0) return res;

  ScalarField z(u.chart_ptr());
  for (std::size_t k : nodes) z[k] = r[k] / (stencil_diag + p[k]);
  ScalarField d = z;
  double rz = dot_interior(r, z);
  double rnorm = bnorm;
  int it = 0;
  while (it < max_iter && rnorm > rel_tol * bnorm) {
    const ScalarField Ad = apply(d);
    const double alpha = rz / dot_interior(d, Ad);
    for (std::size_t k : nodes) {
      x[k] += alpha * d[k];
      r[k] -= alpha * Ad[k];
    }
    for (std::size_t k : nodes) z[k] = r[k] / (stencil_diag + p[k]);
    const double rz_next = dot_interior(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t k : nodes) d[k] = z[k] + beta * d[k];
    rnorm = std::sqrt(dot_interior(r, r));
    ++it;
  }
  res.iterations = it;
  res.relative_residual = rnorm / bnorm;
  return res;
}

SolveReport newton_solve(const ComplexField& q, const SolverConfig& cfg, const SolveInputs& in) {
  cfg.validate();
  const ChartPtr& chart = q.chart_ptr();
  const Chart& c = *chart;
  if (c.is_torus() && in.boundary)
    throw ContractViolation("newton_solve: boundary data given on a torus chart");
  for (const auto* f : {in.initial ? &*in.initial : nullptr, in.forcing ? &*in.forcing : nullptr,
                        in.boundary ? &*in.boundary : nullptr})
    if (f) require_same_chart(c, f->chart());

  const ScalarField forcing = in.forcing ? *in.forcing : ScalarField(chart);

  ScalarField u(chart);
  if (in.initial) {
    u = *in.initial;
  } else {
    double mean_q2 = 0.0;
    for (std::size_t k : c.active_nodes()) mean_q2 += std::norm(q[k]);
    mean_q2 /= static_cast<double>(c.active_nodes().size());
    const double u0 = std::log(mean_q2 + kLogFloor) / 3.0;
    for (std::size_t k : c.active_nodes()) u[k] = u0;
  }
  if (!c.is_torus()) {
    for (std::size_t k : c.ring_nodes())
      u[k] = in.boundary ? (*in.boundary)[k] : std::log(std::norm(q[k]) + kLogFloor) / 3.0;
  }

  auto residual = [&](const ScalarField& v) { return pde_residual(v, q, forcing); };

  SolveReport report(u);
  ScalarField r = residual(u);
  double rn = sup_norm(r, Region::Interior);
  report.residual_history.push_back(rn);

  // On a torus lap(u) integrates to zero, so with q = 0 a solution needs
  // integral(4 e^u) = -integral(f) > 0.
  if (c.is_torus() && sup_norm(q) == 0.0 && integrate(forcing) >= 0.0) {
    report.obstruction_detected = true;
    report.status = SolveStatus::Obstruction;
    report.message = "q vanishes identically on a torus: lap(u) = 4 e^u + f has no periodic solution";
    return report;
  }

  int failures = 0;
  while (true) {
    if (std::isfinite(rn) && rn <= cfg.tol) {
      report.converged = true;
      report.status = SolveStatus::Converged;
      break;
    }
    if (report.iterations >= cfg.max_iter) {
      report.message = "maximum Newton iterations reached";
      break;
    }

    // -J s = R, then u <- u + lambda s.
    const LinearSolveResult lin = solve_linearized(u, q, r, cfg.linear_tol, cfg.max_linear_iter);
    report.linear_iterations.push_back(lin.iterations);

    double lambda = cfg.damping;
    bool accepted = false;
    ScalarField trial(chart);
    ScalarField rt(chart);
    double tn = 0.0;
    while (lambda >= cfg.min_damping) {
      trial = u;
      for (std::size_t k : c.interior_nodes()) trial[k] += lambda * lin.solution[k];
      rt = residual(trial);
      tn = sup_norm(rt, Region::Interior);
      if (std::isfinite(tn) && tn < rn) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) ++failures;
    ++report.iterations;

    // The last finite iterate is what the report keeps.
    if (!all_finite(trial) || sup_norm(trial) > kDivergenceBound) {
      report.obstruction_detected = true;
      report.status = SolveStatus::Obstruction;
      report.message = "Newton iterates diverged";
      break;
    }
    u = std::move(trial);
    r = std::move(rt);
    rn = tn;
    report.residual_history.push_back(rn);
    if (failures > kMaxBacktrackFailures) {
      std::ostringstream msg;
      msg << "line search failed " << failures << " times";
      report.message = msg.str();
      break;
    }
  }
  report.final_u = std::move(u);
  return report;
}

SolveReport manufactured_solve(const ScalarField& u_star, const ComplexField& q, const SolverConfig& cfg) {
  require_same_chart(u_star.chart(), q.chart());
  SolveInputs in;
  in.forcing = pde_residual(u_star, q);
  if (!u_star.chart().is_torus()) in.boundary = u_star;
  return newton_solve(q, cfg, in);
}

}  // namespace cstat
