#include "cstat/higgs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cstat {

Matrix3 Matrix3::identity() { return diag(1.0, 1.0, 1.0); }

Matrix3 Matrix3::diag(Complex d0, Complex d1, Complex d2) {
  Matrix3 m;
  m(0, 0) = d0;
  m(1, 1) = d1;
  m(2, 2) = d2;
  return m;
}

Matrix3 Matrix3::dagger() const {
  Matrix3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = std::conj((*this)(c, r));
  return m;
}

Matrix3& Matrix3::operator+=(const Matrix3& o) {
  for (int n = 0; n < 9; ++n) a_[n] += o.a_[n];
  return *this;
}

Matrix3& Matrix3::operator-=(const Matrix3& o) {
  for (int n = 0; n < 9; ++n) a_[n] -= o.a_[n];
  return *this;
}

Matrix3& Matrix3::operator*=(Complex s) {
  for (auto& v : a_) v *= s;
  return *this;
}

Matrix3 operator*(const Matrix3& a, const Matrix3& b) {
  Matrix3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      Complex s{};
      for (int k = 0; k < 3; ++k) s += a(r, k) * b(k, c);
      m(r, c) = s;
    }
  return m;
}

double max_abs_diff(const Matrix3& a, const Matrix3& b) {
  double m = 0.0;
  for (int n = 0; n < 9; ++n) m = std::max(m, std::abs(a.a_[n] - b.a_[n]));
  return m;
}

HiggsField build_higgs(const HiggsPointData& p) {
  Matrix3 a;
  a(0, 1) = 1.0;
  a(1, 2) = 1.0;
  a(2, 0) = p.q;
  return {p.w * Matrix3::identity() + a, a};
}

Matrix3 metric_adjoint(const Matrix3& m, double h) {
  if (!(h > 0.0)) throw std::domain_error("metric_adjoint: Hermitian coefficient must be positive");
  const Matrix3 H = Matrix3::diag(h, 1.0, 1.0 / h);
  const Matrix3 Hinv = Matrix3::diag(1.0 / h, 1.0, h);
  return Hinv * m.dagger() * H;
}

Matrix3 adjoint_A(const HiggsPointData& p) { return metric_adjoint(build_higgs(p).a, p.h); }

Matrix3 commutator(const Matrix3& a, const Matrix3& b) { return a * b - b * a; }

Sym3Tensor build_C_from_moduli(const AbelianDifferential& omega, const CubicDifferential& Q,
                               const ConformalMetric& g) {
  require_same_chart(omega.w.chart(), g.chart());
  require_same_chart(Q.q.chart(), g.chart());
  // 2 sym(W (x) g) with W = 2 Re(w dz) = (2 Re w, -2 Im w).
  OneFormField W(g.chart_ptr());
  for (std::size_t k : g.chart().active_nodes()) {
    W.x[k] = 2.0 * omega.w[k].real();
    W.y[k] = -2.0 * omega.w[k].imag();
  }
  Sym3Tensor C = symmetrized_product(W, g);
  C *= 2.0;
  C += embed_cubic(Q);
  return C;
}

ConnectionCoefficients build_nabla(const Sym3Tensor& C, const ConformalMetric& g) {
  require_same_chart(C.chart(), g.chart());
  ConnectionCoefficients N = christoffel(g);
  for (std::size_t k : g.chart().active_nodes()) {
    const double half_ginv = 0.5 * std::exp(-g.u[k]);
    for (int m = 0; m < 2; ++m)
      for (int p = 0; p < 3; ++p) {
        const int i = p == 2 ? 1 : 0;
        const int j = p == 0 ? 0 : 1;
        N.gamma[m][p][k] += half_ginv * C(i, j, m)[k];
      }
  }
  return N;
}

StatisticalConnectionResiduals statistical_connection_residuals(const ConnectionCoefficients& nabla,
                                                                const Sym3Tensor& C,
                                                                const ConformalMetric& g) {
  require_same_chart(nabla.chart(), g.chart());
  require_same_chart(C.chart(), g.chart());
  const ChartPtr& chart = g.chart_ptr();
  // g_jk = e^u delta_jk, so d_i g_jk = delta_jk d_i(e^u).
  const ScalarField eu = exp(g.u);
  const ScalarField deu[2] = {diff_x(eu), diff_y(eu)};

  StatisticalConnectionResiduals out{ScalarField(chart), ScalarField(chart), ScalarField(chart)};
  for (std::size_t k : chart->interior_nodes()) {
    // Coefficients are stored once per symmetric pair, so the torsion
    // G^m_ij - G^m_ji is identically zero; evaluate it anyway through the
    // same accessor the rest of the code uses.
    double torsion = 0.0;
    for (int m = 0; m < 2; ++m) torsion = std::max(torsion, std::abs(nabla(m, 0, 1)[k] - nabla(m, 1, 0)[k]));

    double ng[2][2][2];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) {
          double v = (j == l ? deu[i][k] : 0.0);
          for (int m = 0; m < 2; ++m) {
            v -= nabla(m, i, j)[k] * (m == l ? eu[k] : 0.0);
            v -= nabla(m, i, l)[k] * (j == m ? eu[k] : 0.0);
          }
          ng[i][j][l] = v;
        }

    double metric = 0.0;
    double symmetry = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) {
          metric = std::max(metric, std::abs(ng[i][j][l] + C(i, j, l)[k]));
          symmetry = std::max({symmetry, std::abs(ng[i][j][l] - ng[j][i][l]),
                               std::abs(ng[i][j][l] - ng[l][j][i]),
                               std::abs(ng[i][j][l] - ng[i][l][j])});
        }
    out.torsion[k] = torsion;
    out.metric_residual[k] = metric;
    out.symmetry[k] = symmetry;
  }
  return out;
}

StatisticalConnectionCheck check_statistical_connection(const ConnectionCoefficients& nabla,
                                                        const Sym3Tensor& C,
                                                        const ConformalMetric& g) {
  const auto r = statistical_connection_residuals(nabla, C, g);
  return {sup_norm(r.torsion, Region::Interior), sup_norm(r.metric_residual, Region::Interior),
          sup_norm(r.symmetry, Region::Interior)};
}

Vec2 higgs_route_nabla(const HiggsPointData& p, const Vec2& grad_u, const Vec2& v, const Vec2& w) {
  if (!(p.h > 0.0)) throw std::domain_error("higgs_route_nabla: Hermitian coefficient must be positive");
  const double h = p.h;

  // Chern connection of (T_X, h) on constant coordinate fields: for
  // h = e^u this is nabla^h_v w = (1/2)(du(v) w + du(w) v - <v, w> grad u).
  const double du_v = grad_u[0] * v[0] + grad_u[1] * v[1];
  const double du_w = grad_u[0] * w[0] + grad_u[1] * w[1];
  const double vw = v[0] * w[0] + v[1] * w[1];
  Vec2 out;
  for (int k = 0; k < 2; ++k) out[k] = 0.5 * (du_v * w[k] + du_w * v[k] - vw * grad_u[k]);

  // W = omega + conj(omega) as a real covector.
  const Vec2 W = {2.0 * p.w.real(), -2.0 * p.w.imag()};
  const double W_v = W[0] * v[0] + W[1] * v[1];
  const double W_w = W[0] * w[0] + W[1] * w[1];
  const double g_vw = h * vw;
  for (int k = 0; k < 2; ++k) out[k] += W_v * w[k] + W_w * v[k] + g_vw * (W[k] / h);

  // conj(Q)(v, w, e_k) = conj(q dz(v) dz(w) dz(e_k)); lower index, then raise with g^{-1} = 1/h.
  const Complex dz_v(v[0], v[1]);
  const Complex dz_w(w[0], w[1]);
  const Complex dz_e[2] = {Complex(1.0, 0.0), Complex(0.0, 1.0)};
  for (int k = 0; k < 2; ++k) {
    const Complex qbar = std::conj(p.q * dz_v * dz_w * dz_e[k]);
    out[k] += qbar.real() / h;
  }
  return out;
}

}  // namespace cstat
