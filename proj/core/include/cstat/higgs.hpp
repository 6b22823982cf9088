#pragma once

// Pointwise algebra of the cyclic Higgs bundle K^-1 + O + K with the
// diagonal harmonic metric H = diag(h, 1, 1/h), and the synthesis of the
// statistical structure (C, g, nabla) from moduli data (omega, Q).

#include <array>

#include "cstat/tensor.hpp"

namespace cstat {

/// Dense 3x3 complex matrix, row-major, zero-based indices.
class Matrix3 {
 public:
  Matrix3() { a_.fill(Complex{}); }

  static Matrix3 identity();
  static Matrix3 diag(Complex d0, Complex d1, Complex d2);

  Complex& operator()(int r, int c) noexcept { return a_[3 * r + c]; }
  const Complex& operator()(int r, int c) const noexcept { return a_[3 * r + c]; }

  /// Conjugate transpose.
  Matrix3 dagger() const;
  Complex trace() const { return a_[0] + a_[4] + a_[8]; }

  Matrix3& operator+=(const Matrix3& o);
  Matrix3& operator-=(const Matrix3& o);
  Matrix3& operator*=(Complex s);

  friend Matrix3 operator+(Matrix3 a, const Matrix3& b) { return a += b; }
  friend Matrix3 operator-(Matrix3 a, const Matrix3& b) { return a -= b; }
  friend Matrix3 operator*(Complex s, Matrix3 a) { return a *= s; }
  friend Matrix3 operator*(const Matrix3& a, const Matrix3& b);

  /// Largest entrywise modulus of a - b.
  friend double max_abs_diff(const Matrix3& a, const Matrix3& b);

 private:
  std::array<Complex, 9> a_;
};

struct HiggsPointData {
  Complex w;      // coefficient of omega = w dz
  Complex q;      // coefficient of Q = q dz^3
  double h = 1.0;  // Hermitian coefficient e^u, must be positive
};

struct HiggsField {
  Matrix3 phi;  // w I + A
  Matrix3 a;    // cyclic part: ones on the superdiagonal, q in the corner
};

HiggsField build_higgs(const HiggsPointData& p);

/// H^{-1} M^dagger H for H = diag(h, 1, 1/h). Throws std::domain_error for h <= 0.
Matrix3 metric_adjoint(const Matrix3& m, double h);

/// Metric adjoint of the cyclic part A.
Matrix3 adjoint_A(const HiggsPointData& p);

/// a b - b a.
Matrix3 commutator(const Matrix3& a, const Matrix3& b);

/// C_ijk = 2(W_i g_jk + W_j g_ik + W_k g_ij) + (Q + conj Q)_ijk with W = 2 Re(omega).
Sym3Tensor build_C_from_moduli(const AbelianDifferential& omega, const CubicDifferential& Q,
                               const ConformalMetric& g);

/// The torsion-free connection with nabla g = -C:
/// G~^k_ij = G^k_ij + (1/2) e^{-u} C_ijk.
ConnectionCoefficients build_nabla(const Sym3Tensor& C, const ConformalMetric& g);

struct StatisticalConnectionCheck {
  double torsion_sup = 0.0;
  double metric_residual_sup = 0.0;  // sup |(nabla_i g)_jk + C_ijk|
  double symmetry_sup = 0.0;         // largest permutation defect of nabla g
};

/// Pointwise residual fields behind check_statistical_connection, evaluated
/// at interior nodes; each is the max over index combinations at that node.
struct StatisticalConnectionResiduals {
  ScalarField torsion;
  ScalarField metric_residual;
  ScalarField symmetry;
};

StatisticalConnectionResiduals statistical_connection_residuals(const ConnectionCoefficients& nabla,
                                                                const Sym3Tensor& C,
                                                                const ConformalMetric& g);
StatisticalConnectionCheck check_statistical_connection(const ConnectionCoefficients& nabla,
                                                        const Sym3Tensor& C,
                                                        const ConformalMetric& g);

using Vec2 = std::array<double, 2>;

/// Evaluates nabla_v w for constant coordinate vectors v, w straight from the
/// bundle description: the Chern connection term (from grad u), the three
/// W = 2 Re(omega) terms and h^{-1} conj(Q)(v, w), where the last vector is
/// defined through g(h^{-1} conj(Q)(v, w), .) = Re(conj(Q)(v, w, .)).
Vec2 higgs_route_nabla(const HiggsPointData& p, const Vec2& grad_u, const Vec2& v, const Vec2& w);

}  // namespace cstat
