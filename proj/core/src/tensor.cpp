#include "cstat/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cstat {

namespace {

// Representative index triples for the four independent components.
constexpr std::array<std::array<int, 3>, 4> kTriples{{{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {1, 1, 1}}};
constexpr std::array<std::array<int, 2>, 3> kPairs{{{0, 0}, {0, 1}, {1, 1}}};

constexpr double delta(int a, int b) { return a == b ? 1.0 : 0.0; }

}  // namespace

Sym3Tensor::Sym3Tensor(ScalarField xxx, ScalarField xxy, ScalarField xyy, ScalarField yyy)
    : c{std::move(xxx), std::move(xxy), std::move(xyy), std::move(yyy)} {
  for (int n = 1; n < 4; ++n) require_same_chart(c[0].chart(), c[n].chart());
}

Sym3Tensor& Sym3Tensor::operator+=(const Sym3Tensor& o) {
  for (int n = 0; n < 4; ++n) c[n] += o.c[n];
  return *this;
}

Sym3Tensor& Sym3Tensor::operator-=(const Sym3Tensor& o) {
  for (int n = 0; n < 4; ++n) c[n] -= o.c[n];
  return *this;
}

Sym3Tensor& Sym3Tensor::operator*=(double s) {
  for (auto& f : c) f *= s;
  return *this;
}

ScalarField Sym2Tensor::magnitude() const {
  ScalarField out(t[0].chart_ptr());
  for (std::size_t k : chart().active_nodes())
    out[k] = std::sqrt(t[0][k] * t[0][k] + 2.0 * t[1][k] * t[1][k] + t[2][k] * t[2][k]);
  return out;
}

ConnectionCoefficients::ConnectionCoefficients(const ChartPtr& chart)
    : gamma{{{ScalarField(chart), ScalarField(chart), ScalarField(chart)},
             {ScalarField(chart), ScalarField(chart), ScalarField(chart)}}} {}

ConnectionCoefficients christoffel(const ConformalMetric& g) {
  const ScalarField ux = diff_x(g.u);
  const ScalarField uy = diff_y(g.u);
  ConnectionCoefficients G(g.chart_ptr());
  for (std::size_t k : g.chart().interior_nodes()) {
    const double ax = 0.5 * ux[k];
    const double ay = 0.5 * uy[k];
    G(X, X, X)[k] = ax;
    G(X, X, Y)[k] = ay;
    G(X, Y, Y)[k] = -ax;
    G(Y, X, X)[k] = -ay;
    G(Y, X, Y)[k] = ax;
    G(Y, Y, Y)[k] = ay;
  }
  return G;
}

OneFormField trace3(const Sym3Tensor& C, const ConformalMetric& g) {
  require_same_chart(C.chart(), g.chart());
  OneFormField tau(C.chart_ptr());
  for (std::size_t k : C.chart().active_nodes()) {
    const double ginv = std::exp(-g.u[k]);
    tau.x[k] = ginv * (C(X, X, X)[k] + C(X, Y, Y)[k]);
    tau.y[k] = ginv * (C(Y, X, X)[k] + C(Y, Y, Y)[k]);
  }
  return tau;
}

Sym3Tensor symmetrized_product(const OneFormField& tau, const ConformalMetric& g) {
  require_same_chart(tau.chart(), g.chart());
  Sym3Tensor S(g.chart_ptr());
  for (std::size_t k : g.chart().active_nodes()) {
    const double gk = std::exp(g.u[k]);
    const double t[2] = {tau.x[k], tau.y[k]};
    for (int n = 0; n < 4; ++n) {
      const auto [a, b, c] = kTriples[n];
      S.c[n][k] = gk * (t[a] * delta(b, c) + t[b] * delta(c, a) + t[c] * delta(a, b));
    }
  }
  return S;
}

TraceDecomposition decompose3(const Sym3Tensor& C, const ConformalMetric& g) {
  OneFormField tau = trace3(C, g);
  Sym3Tensor C0 = C;
  Sym3Tensor pure = symmetrized_product(tau, g);
  pure *= 0.25;
  C0 -= pure;
  return {std::move(C0), std::move(tau)};
}

Sym2Tensor divergence3(const Sym3Tensor& C, const ConformalMetric& g) {
  require_same_chart(C.chart(), g.chart());
  const ConnectionCoefficients G = christoffel(g);
  std::array<std::array<ScalarField, 4>, 2> dC{
      {{diff_x(C.c[0]), diff_x(C.c[1]), diff_x(C.c[2]), diff_x(C.c[3])},
       {diff_y(C.c[0]), diff_y(C.c[1]), diff_y(C.c[2]), diff_y(C.c[3])}}};

  Sym2Tensor div(C.chart_ptr());
  for (std::size_t k : C.chart().interior_nodes()) {
    const double ginv = std::exp(-g.u[k]);
    for (int p = 0; p < 3; ++p) {
      const auto [j, l] = kPairs[p];
      double sum = 0.0;
      for (int i = 0; i < 2; ++i) {
        // (nabla_i C)_{i j l}
        double v = dC[i][i + j + l][k];
        for (int m = 0; m < 2; ++m) {
          v -= G(m, i, i)[k] * C(m, j, l)[k];
          v -= G(m, i, j)[k] * C(i, m, l)[k];
          v -= G(m, i, l)[k] * C(i, j, m)[k];
        }
        sum += v;
      }
      div.t[p][k] = ginv * sum;
    }
  }
  return div;
}

namespace {

// (nabla tau)_{ij} = d_i tau_j - G^k_ij tau_k at interior nodes, all four entries.
struct FullGradient {
  ScalarField xx, xy, yx, yy;
};

FullGradient covariant_gradient(const OneFormField& tau, const ConformalMetric& g) {
  require_same_chart(tau.chart(), g.chart());
  const ConnectionCoefficients G = christoffel(g);
  const ScalarField txx = diff_x(tau.x);
  const ScalarField txy = diff_x(tau.y);
  const ScalarField tyx = diff_y(tau.x);
  const ScalarField tyy = diff_y(tau.y);
  FullGradient out{ScalarField(g.chart_ptr()), ScalarField(g.chart_ptr()),
                   ScalarField(g.chart_ptr()), ScalarField(g.chart_ptr())};
  for (std::size_t k : g.chart().interior_nodes()) {
    const double tx = tau.x[k];
    const double ty = tau.y[k];
    const double gxx = G(X, X, X)[k] * tx + G(Y, X, X)[k] * ty;
    const double gxy = G(X, X, Y)[k] * tx + G(Y, X, Y)[k] * ty;
    const double gyy = G(X, Y, Y)[k] * tx + G(Y, Y, Y)[k] * ty;
    out.xx[k] = txx[k] - gxx;
    out.xy[k] = txy[k] - gxy;
    out.yx[k] = tyx[k] - gxy;
    out.yy[k] = tyy[k] - gyy;
  }
  return out;
}

}  // namespace

CovariantDerivative covariant_derivative_oneform(const OneFormField& tau, const ConformalMetric& g) {
  const FullGradient n = covariant_gradient(tau, g);
  CovariantDerivative out{Sym2Tensor(g.chart_ptr()), ScalarField(g.chart_ptr())};
  for (std::size_t k : g.chart().interior_nodes()) {
    out.sym.t[0][k] = n.xx[k];
    out.sym.t[1][k] = 0.5 * (n.xy[k] + n.yx[k]);
    out.sym.t[2][k] = n.yy[k];
    out.asymmetry[k] = 0.5 * (n.xy[k] - n.yx[k]);
  }
  return out;
}

ScalarField scalar_curvature(const ConformalMetric& g) {
  ScalarField S = laplacian(g.u);
  for (std::size_t k : g.chart().interior_nodes()) S[k] *= -std::exp(-g.u[k]);
  return S;
}

ScalarField norm_sym3(const Sym3Tensor& C, const ConformalMetric& g) {
  require_same_chart(C.chart(), g.chart());
  ScalarField out(C.chart_ptr());
  for (std::size_t k : C.chart().active_nodes()) {
    const double a = C.c[0][k], b = C.c[1][k], c = C.c[2][k], d = C.c[3][k];
    out[k] = std::exp(-3.0 * g.u[k]) * (a * a + 3.0 * b * b + 3.0 * c * c + d * d);
  }
  return out;
}

CubicDifferential extract_cubic(const Sym3Tensor& C0) {
  CubicDifferential Q{ComplexField(C0.chart_ptr())};
  for (std::size_t k : C0.chart().active_nodes()) {
    Q.q[k] = 0.125 * Complex(C0.c[0][k] - 3.0 * C0.c[2][k], C0.c[3][k] - 3.0 * C0.c[1][k]);
  }
  return Q;
}

CubicDifferential extract_cubic(const Sym3Tensor& C0, const ConformalMetric& g) {
  constexpr double kRelTol = 1e-10;
  const OneFormField tau = trace3(C0, g);
  double trace = 0.0;
  double scale = 0.0;
  for (std::size_t k : C0.chart().active_nodes()) {
    trace = std::max(trace, std::hypot(tau.x[k], tau.y[k]));
    double cmax = 0.0;
    for (const auto& f : C0.c) cmax = std::max(cmax, std::abs(f[k]));
    scale = std::max(scale, std::exp(-g.u[k]) * cmax);
  }
  if (trace > kRelTol * scale) {
    std::ostringstream msg;
    msg << "extract_cubic: tensor is not traceless (sup |tr_g C0| = " << trace
        << ", allowed " << kRelTol * scale << ")";
    throw TraceError(msg.str(), trace);
  }
  return extract_cubic(C0);
}

Sym3Tensor embed_cubic(const CubicDifferential& Q) {
  Sym3Tensor C(Q.q.chart_ptr());
  for (std::size_t k : Q.q.chart().active_nodes()) {
    const double re = 2.0 * Q.q[k].real();
    const double im = 2.0 * Q.q[k].imag();
    C.c[0][k] = re;
    C.c[1][k] = -im;
    C.c[2][k] = -re;
    C.c[3][k] = im;
  }
  return C;
}

AbelianDifferential extract_abelian(const OneFormField& tau) {
  AbelianDifferential W{ComplexField(tau.x.chart_ptr())};
  for (std::size_t k : tau.chart().active_nodes())
    W.w[k] = Complex(tau.x[k], -tau.y[k]) / 16.0;
  return W;
}

Sym2Tensor field_equation_residual(const Sym3Tensor& C, const ConformalMetric& g) {
  const OneFormField tau = trace3(C, g);
  CovariantDerivative grad = covariant_derivative_oneform(tau, g);
  const Sym2Tensor div = divergence3(C, g);
  for (int p = 0; p < 3; ++p) {
    for (std::size_t k : g.chart().interior_nodes())
      grad.sym.t[p][k] -= 2.0 * div.t[p][k];
  }
  return std::move(grad.sym);
}

HarmonicityResidual harmonicity_residual(const OneFormField& tau, const ConformalMetric& g) {
  const FullGradient n = covariant_gradient(tau, g);
  HarmonicityResidual out{d_oneform(tau), ScalarField(g.chart_ptr())};
  for (std::size_t k : g.chart().interior_nodes())
    out.divtau[k] = std::exp(-g.u[k]) * (n.xx[k] + n.yy[k]);
  return out;
}

ScalarField normalization_residual(const Sym3Tensor& C0, const ConformalMetric& g) {
  const ScalarField n = norm_sym3(C0, g);
  const ScalarField S = scalar_curvature(g);
  ScalarField out(g.chart_ptr());
  for (std::size_t k : g.chart().interior_nodes()) out[k] = n[k] - 4.0 * S[k] - 16.0;
  return out;
}

}  // namespace cstat
