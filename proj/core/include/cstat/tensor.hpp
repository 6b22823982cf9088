#pragma once

// Symmetric tensor algebra and Levi-Civita calculus for conformal metrics
// g = e^u (dx^2 + dy^2) on a chart.
//
// Conventions:
//  - tensor norms contract every slot with g^{-1}, so |C|^2 = e^{-3u} sum c_ijk^2;
//  - the scalar curvature is S = 2K = -e^{-u} lap(u);
//  - traces contract the last two slots;
//  - div(T)_{jk} = g^{il} (nabla_l T)_{ijk}.

#include <array>
#include <optional>

#include "cstat/chart.hpp"

namespace cstat {

enum Axis : int { X = 0, Y = 1 };

/// g = e^u (dx^2 + dy^2); the Hermitian coefficient on the tangent line is h = e^u.
struct ConformalMetric {
  explicit ConformalMetric(ScalarField log_factor) : u(std::move(log_factor)) {}

  const Chart& chart() const noexcept { return u.chart(); }
  const ChartPtr& chart_ptr() const noexcept { return u.chart_ptr(); }
  ScalarField h() const { return exp(u); }

  ScalarField u;
};

/// Totally symmetric (0,3) tensor in two dimensions. Components are indexed
/// by how many of the three slots are y: c[0] = c_xxx, c[1] = c_xxy,
/// c[2] = c_xyy, c[3] = c_yyy.
struct Sym3Tensor {
  explicit Sym3Tensor(const ChartPtr& chart) : c{ScalarField(chart), ScalarField(chart),
                                                  ScalarField(chart), ScalarField(chart)} {}
  Sym3Tensor(ScalarField xxx, ScalarField xxy, ScalarField xyy, ScalarField yyy);

  const Chart& chart() const noexcept { return c[0].chart(); }
  const ChartPtr& chart_ptr() const noexcept { return c[0].chart_ptr(); }

  ScalarField& operator()(int i, int j, int k) noexcept { return c[i + j + k]; }
  const ScalarField& operator()(int i, int j, int k) const noexcept { return c[i + j + k]; }

  Sym3Tensor& operator+=(const Sym3Tensor& o);
  Sym3Tensor& operator-=(const Sym3Tensor& o);
  Sym3Tensor& operator*=(double s);

  std::array<ScalarField, 4> c;
};

/// Symmetric (0,2) tensor: t[0] = t_xx, t[1] = t_xy, t[2] = t_yy.
struct Sym2Tensor {
  explicit Sym2Tensor(const ChartPtr& chart)
      : t{ScalarField(chart), ScalarField(chart), ScalarField(chart)} {}

  const Chart& chart() const noexcept { return t[0].chart(); }
  ScalarField& operator()(int i, int j) noexcept { return t[i + j]; }
  const ScalarField& operator()(int i, int j) const noexcept { return t[i + j]; }

  /// Pointwise Frobenius magnitude sqrt(t_xx^2 + 2 t_xy^2 + t_yy^2).
  ScalarField magnitude() const;

  std::array<ScalarField, 3> t;
};

/// Coefficients G^k_{ij} of a torsion-free connection, stored once per
/// unordered pair ij: gamma[k][i + j].
struct ConnectionCoefficients {
  explicit ConnectionCoefficients(const ChartPtr& chart);

  const Chart& chart() const noexcept { return gamma[0][0].chart(); }
  ScalarField& operator()(int k, int i, int j) noexcept { return gamma[k][i + j]; }
  const ScalarField& operator()(int k, int i, int j) const noexcept { return gamma[k][i + j]; }

  std::array<std::array<ScalarField, 3>, 2> gamma;
};

/// Q = q dz^3.
struct CubicDifferential {
  ComplexField q;
};

/// omega = w dz.
struct AbelianDifferential {
  ComplexField w;
};

/// Levi-Civita connection of g; derivatives of u by centered differences.
ConnectionCoefficients christoffel(const ConformalMetric& g);

/// tau_i = g^{jk} C_{ijk}.
OneFormField trace3(const Sym3Tensor& C, const ConformalMetric& g);

/// sym(tau (x) g)(u,v,w) = tau(u)g(v,w) + tau(v)g(w,u) + tau(w)g(u,v).
Sym3Tensor symmetrized_product(const OneFormField& tau, const ConformalMetric& g);

struct TraceDecomposition {
  Sym3Tensor C0;
  OneFormField tau;
};
/// C = C0 + (1/4) sym(tau (x) g) with C0 traceless.
TraceDecomposition decompose3(const Sym3Tensor& C, const ConformalMetric& g);

/// div(C)_{jk} = g^{il} (nabla_l C)_{ijk}, evaluated at interior nodes.
Sym2Tensor divergence3(const Sym3Tensor& C, const ConformalMetric& g);

struct CovariantDerivative {
  Sym2Tensor sym;        // symmetric part of (nabla tau)_{ij}
  ScalarField asymmetry;  // ((nabla tau)_{xy} - (nabla tau)_{yx}) / 2 = d(tau) / 2
};
CovariantDerivative covariant_derivative_oneform(const OneFormField& tau, const ConformalMetric& g);

ScalarField scalar_curvature(const ConformalMetric& g);

/// |C|^2 with all three slots contracted against g^{-1}.
ScalarField norm_sym3(const Sym3Tensor& C, const ConformalMetric& g);

/// q = C0(d_z, d_z, d_z). The metric overload first verifies tracelessness
/// to 1e-10 relative and throws TraceError otherwise.
CubicDifferential extract_cubic(const Sym3Tensor& C0);
CubicDifferential extract_cubic(const Sym3Tensor& C0, const ConformalMetric& g);

/// Q + conj(Q) as a real symmetric tensor.
Sym3Tensor embed_cubic(const CubicDifferential& Q);

/// w with tau = 16 Re(w dz).
AbelianDifferential extract_abelian(const OneFormField& tau);

/// nabla(tr C) - 2 div C; zero exactly when (C, g) is conservative.
/// Only the symmetric part of nabla(tr C) enters; its skew part is d(tau)/2
/// and is reported by harmonicity_residual.
Sym2Tensor field_equation_residual(const Sym3Tensor& C, const ConformalMetric& g);

struct HarmonicityResidual {
  ScalarField dtau;
  ScalarField divtau;
};
HarmonicityResidual harmonicity_residual(const OneFormField& tau, const ConformalMetric& g);

/// |C0|^2 - 4 S_g - 16.
ScalarField normalization_residual(const Sym3Tensor& C0, const ConformalMetric& g);

}  // namespace cstat
