#pragma once

// Damped Newton solver for the scalar Tzitzeica equation in conformal
// coordinates,
//
//     R(u) = lap(u) - 4 e^u + 4 |q|^2 e^{-2u} - f = 0,
//
// whose solution h = e^u is the harmonic metric of the cyclic Higgs bundle.
// The constants are fixed by the tensor conventions in tensor.hpp: for
// C0 = embed_cubic(q) one has 4 S_g + 16 - |C0|^2 = -4 e^{-u} R(u) when f = 0.
//
// The Jacobian J(u) = lap - (4 e^u + 8 |q|^2 e^{-2u}) has a strictly negative
// zeroth-order term, so -J is symmetric positive definite and each Newton
// correction is computed matrix-free with conjugate gradients.

#include <optional>
#include <string>
#include <vector>

#include "cstat/chart.hpp"

namespace cstat {

struct SolverConfig {
  double tol = 1e-10;          // sup-norm target for R
  int max_iter = 50;
  double damping = 1.0;        // first step length tried by the line search
  double min_damping = 1.0 / 64.0;
  double linear_tol = 1e-12;   // relative residual of the inner CG solve
  int max_linear_iter = 0;     // 0: 50 * sqrt(unknowns) + 500

  void validate() const;
};

enum class SolveStatus { Converged, NotConverged, Obstruction };

struct SolveReport {
  explicit SolveReport(ScalarField u) : final_u(std::move(u)) {}

  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_history;  // sup |R| before each step and at exit
  std::vector<int> linear_iterations;    // CG iterations per Newton step
  bool obstruction_detected = false;
  SolveStatus status = SolveStatus::NotConverged;
  std::string message;
  ScalarField final_u;
};

/// Offset added to |q|^2 before taking logarithms for default guesses and
/// boundary data.
inline constexpr double kLogFloor = 1e-8;

ScalarField pde_residual(const ScalarField& u, const ComplexField& q);
ScalarField pde_residual(const ScalarField& u, const ComplexField& q, const ScalarField& forcing);

/// J(u)[delta] = lap(delta) - (4 e^u + 8 |q|^2 e^{-2u}) delta.
ScalarField jacobian_apply(const ScalarField& u, const ComplexField& q, const ScalarField& delta);

struct LinearSolveResult {
  ScalarField solution;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Solves -J(u) s = rhs for s with homogeneous Dirichlet data on the disk
/// ring (all nodes are unknowns on a torus). Jacobi-preconditioned CG.
LinearSolveResult solve_linearized(const ScalarField& u, const ComplexField& q, const ScalarField& rhs,
                                   double rel_tol, int max_iter = 0);

struct SolveInputs {
  std::optional<ScalarField> initial;   // default: (1/3) log(mean |q|^2 + 1e-8)
  std::optional<ScalarField> forcing;   // f, default 0
  std::optional<ScalarField> boundary;  // disk ring values, default (1/3) log(|q|^2 + 1e-8)
};

SolveReport newton_solve(const ComplexField& q, const SolverConfig& cfg, const SolveInputs& in = {});

/// Forces the equation with f = R(u_star) and solves; the discrete solution is
/// u_star itself. Disk boundary data is taken from u_star.
SolveReport manufactured_solve(const ScalarField& u_star, const ComplexField& q, const SolverConfig& cfg);

const char* to_string(SolveStatus s) noexcept;

}  // namespace cstat
