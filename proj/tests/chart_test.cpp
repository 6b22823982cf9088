#include <gtest/gtest.h>

#include <cmath>
#include <deque>

#include "cstat/chart.hpp"
#include "support/oracles.hpp"

using namespace cstat;

namespace {

constexpr double kPi = 3.141592653589793;

double max_diff(const ScalarField& a, const std::function<double(double, double)>& f) {
  const Chart& c = a.chart();
  double m = 0.0;
  for (std::size_t k : c.interior_nodes()) m = std::max(m, std::abs(a[k] - f(c.x(c.col(k)), c.y(c.row(k)))));
  return m;
}

double max_diff(const ComplexField& a, const std::function<Complex(Complex)>& f) {
  const Chart& c = a.chart();
  double m = 0.0;
  for (std::size_t k : c.interior_nodes()) m = std::max(m, std::abs(a[k] - f(c.z(k))));
  return m;
}

}  // namespace

TEST(Chart, SpacingsFollowKind) {
  const ChartPtr t = Chart::torus(64, 32, 0.5);
  EXPECT_DOUBLE_EQ(t->hx(), 1.0 / 64);
  EXPECT_DOUBLE_EQ(t->hy(), 0.5 / 32);
  const ChartPtr d = Chart::disk(33, 33, 2.0);
  EXPECT_DOUBLE_EQ(d->hx(), 4.0 / 32);
  EXPECT_DOUBLE_EQ(d->x(0), -2.0);
  EXPECT_DOUBLE_EQ(d->x(32), 2.0);
}

TEST(Chart, RejectsBadShapes) {
  EXPECT_THROW(Chart::torus(15, 64), ContractViolation);
  EXPECT_THROW(Chart::disk(64, 8), ContractViolation);
  EXPECT_THROW(Chart::torus(16, 16, 0.0), ContractViolation);
  EXPECT_THROW(Chart::disk(16, 16, -1.0), ContractViolation);
}

TEST(Chart, TorusNodesAreAllInterior) {
  const ChartPtr t = Chart::torus(16, 20);
  EXPECT_EQ(t->interior_nodes().size(), t->size());
  EXPECT_TRUE(t->ring_nodes().empty());
  EXPECT_EQ(t->east(t->index(15, 3)), t->index(0, 3));
  EXPECT_EQ(t->south(t->index(4, 0)), t->index(4, 19));
}

TEST(Chart, DiskMaskIsSimplyConnected) {
  for (int n : {16, 31, 64}) {
    const ChartPtr d = Chart::disk(n, n);
    const Chart& c = *d;
    // Active nodes form one 4-connected component...
    std::vector<char> seen(c.size(), 0);
    std::deque<std::size_t> todo{c.index(n / 2, n / 2)};
    seen[todo.front()] = 1;
    std::size_t count = 0;
    auto visit = [&](int i, int j, bool want_active) {
      if (i < 0 || j < 0 || i >= n || j >= n) return;
      const std::size_t k = c.index(i, j);
      if (seen[k] || c.active(k) != want_active) return;
      seen[k] = 1;
      todo.push_back(k);
    };
    while (!todo.empty()) {
      const std::size_t k = todo.front();
      todo.pop_front();
      ++count;
      visit(c.col(k) + 1, c.row(k), true);
      visit(c.col(k) - 1, c.row(k), true);
      visit(c.col(k), c.row(k) + 1, true);
      visit(c.col(k), c.row(k) - 1, true);
    }
    EXPECT_EQ(count, c.active_nodes().size());
    // ...and the outside nodes all reach the frame (no holes).
    std::fill(seen.begin(), seen.end(), 0);
    count = 0;
    for (int i = 0; i < n; ++i)
      for (int j : {0, n - 1}) {
        visit(i, j, false);
        visit(j, i, false);
      }
    while (!todo.empty()) {
      const std::size_t k = todo.front();
      todo.pop_front();
      ++count;
      for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) visit(c.col(k) + di, c.row(k) + dj, false);
    }
    EXPECT_EQ(count, c.size() - c.active_nodes().size());
    // Interior nodes have all four neighbours active.
    for (std::size_t k : c.interior_nodes())
      for (std::size_t m : {c.east(k), c.west(k), c.north(k), c.south(k)}) EXPECT_TRUE(c.active(m));
  }
}

TEST(Field, CheckedAccessRejectsMaskedAndOutOfRange) {
  const ChartPtr d = Chart::disk(16, 16);
  ScalarField f(d, 1.0);
  EXPECT_THROW(f.at(0, 0), ContractViolation);
  EXPECT_THROW(f.at(16, 3), ContractViolation);
  EXPECT_NO_THROW(f.at(8, 8));
  EXPECT_EQ(f[d->index(0, 0)], 0.0);
}

TEST(Field, MismatchedChartsAreContractViolations) {
  const ScalarField a(Chart::torus(32, 32));
  const ScalarField b(Chart::torus(64, 64));
  EXPECT_THROW(a + b, ContractViolation);
  EXPECT_THROW(to_complex(a, b), ContractViolation);
  EXPECT_THROW(d_oneform(OneFormField(a, b)), ContractViolation);
  // Equal geometry built separately is the same chart.
  EXPECT_NO_THROW(a + ScalarField(Chart::torus(32, 32)));
}

TEST(Laplacian, ConstantIsHarmonic) {
  const ScalarField f(Chart::torus(32, 32), 3.0);
  EXPECT_EQ(sup_norm(laplacian(f)), 0.0);
}

TEST(Laplacian, SineOnUnitTorusWithinTaylorBound) {
  const ChartPtr t = Chart::torus(64, 64);
  const auto f = ScalarField::sample(t, [](double x, double) { return std::sin(2 * kPi * x); });
  const double err = max_diff(laplacian(f), [](double x, double) { return -4 * kPi * kPi * std::sin(2 * kPi * x); });
  const double h = t->hx();
  EXPECT_LE(err, 10.0 * h * h * std::pow(2 * kPi, 4) / 12.0);
}

TEST(Laplacian, ExactOnQuadraticsInDisk) {
  const ChartPtr d = Chart::disk(40, 40, 1.5);
  const auto f = ScalarField::sample(d, [](double x, double y) { return x * x + y * y; });
  EXPECT_LE(max_diff(laplacian(f), [](double, double) { return 4.0; }), 1e-10);
  // Ring nodes are never written.
  const ScalarField L = laplacian(f);
  for (std::size_t k : d->ring_nodes()) EXPECT_EQ(L[k], 0.0);
}

TEST(Laplacian, IsLinear) {
  oracle::SmoothFieldGen gen(1);
  for (const ChartPtr& c : {Chart::torus(48, 32, 0.7), Chart::disk(40, 40)}) {
    const ScalarField f = gen.real(c, 2.0), g = gen.real(c, 2.0);
    const double a = 1.7, b = -0.3;
    const ScalarField lhs = laplacian(a * f + b * g);
    const ScalarField rhs = a * laplacian(f) + b * laplacian(g);
    EXPECT_LE(sup_norm(lhs - rhs), 1e-13 * std::max(1.0, sup_norm(lhs)));
  }
}

TEST(Laplacian, IntegratesToZeroOnTorus) {
  oracle::SmoothFieldGen gen(2);
  for (int trial = 0; trial < 5; ++trial) {
    const ChartPtr t = Chart::torus(32 + 8 * trial, 40, 1.0 + 0.2 * trial);
    ScalarField f = gen.real(t, 1.0);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] += gen.uniform(-1.0, 1.0);  // rough as well as smooth
    EXPECT_NEAR(integrate(laplacian(f)), 0.0, 1e-11);
  }
}

TEST(Wirtinger, ConstantsHaveZeroDerivatives) {
  const ComplexField f(Chart::disk(20, 20), Complex(1.0, 2.0));
  const Wirtinger w = wirtinger(f);
  EXPECT_EQ(sup_norm(w.dz), 0.0);
  EXPECT_EQ(sup_norm(w.dzbar), 0.0);
}

TEST(Wirtinger, ExactOnLinearAndQuadratic) {
  const ChartPtr d = Chart::disk(33, 33);
  ComplexField z(d), zbar2(d);
  for (std::size_t k : d->active_nodes()) {
    z[k] = d->z(k);
    zbar2[k] = std::conj(d->z(k)) * std::conj(d->z(k));
  }
  const Wirtinger wz = wirtinger(z);
  EXPECT_LE(max_diff(wz.dz, [](Complex) { return Complex(1.0); }), 1e-12);
  EXPECT_LE(max_diff(wz.dzbar, [](Complex) { return Complex(0.0); }), 1e-12);
  const Wirtinger wq = wirtinger(zbar2);
  EXPECT_LE(max_diff(wq.dz, [](Complex) { return Complex(0.0); }), 1e-12);
  EXPECT_LE(max_diff(wq.dzbar, [](Complex z) { return 2.0 * std::conj(z); }), 1e-12);
}

TEST(Wirtinger, RecombinesToPartials) {
  oracle::SmoothFieldGen gen(3);
  const ChartPtr t = Chart::torus(40, 40);
  const ComplexField f = gen.complex(t, 3.0);
  const Wirtinger w = wirtinger(f);
  const ComplexField fx = diff_x(f), fy = diff_y(f);
  const Complex i(0.0, 1.0);
  double ex = 0.0, ey = 0.0;
  for (std::size_t k : t->interior_nodes()) {
    ex = std::max(ex, std::abs(w.dz[k] + w.dzbar[k] - fx[k]));
    ey = std::max(ey, std::abs(i * (w.dz[k] - w.dzbar[k]) - fy[k]));
  }
  EXPECT_LE(ex, 1e-12 * sup_norm(fx));
  EXPECT_LE(ey, 1e-12 * sup_norm(fy));
}

TEST(DOneForm, Examples) {
  const ChartPtr d = Chart::disk(24, 24);
  EXPECT_EQ(sup_norm(d_oneform(OneFormField(ScalarField(d, 2.0), ScalarField(d, -5.0)))), 0.0);
  const OneFormField rot(ScalarField::sample(d, [](double, double y) { return -y; }),
                         ScalarField::sample(d, [](double x, double) { return x; }));
  const ScalarField curl = d_oneform(rot);
  for (std::size_t k : d->interior_nodes()) EXPECT_NEAR(curl[k], 2.0, 1e-12);
  const Complex w(0.3, -1.1);
  EXPECT_EQ(sup_norm(d_oneform(OneFormField(ScalarField(d, 2 * w.real()), ScalarField(d, -2 * w.imag())))), 0.0);
}

TEST(Quadrature, Examples) {
  const ChartPtr t = Chart::torus(64, 64);
  EXPECT_EQ(integrate(ScalarField(t, 1.0)), 1.0);
  const auto s = ScalarField::sample(t, [](double x, double) { return std::sin(2 * kPi * x); });
  EXPECT_NEAR(integrate(s), 0.0, 1e-14);
  EXPECT_EQ(sup_norm(ScalarField(t, -2.0)), 2.0);
  EXPECT_DOUBLE_EQ(l2_norm(ScalarField(t, -2.0)), 2.0);
}

TEST(GridConvergence, OperatorsAreSecondOrder) {
  // Smooth periodic fields on a torus with rho = 1.5.
  constexpr double a = 2 * kPi, b = 2 * kPi / 1.5;
  auto f = [&](double x, double y) { return std::sin(a * x) * std::cos(b * y) + 0.5 * std::cos(a * x + 2 * b * y); };
  auto fx = [&](double x, double y) {
    return a * std::cos(a * x) * std::cos(b * y) - 0.5 * a * std::sin(a * x + 2 * b * y);
  };
  auto fy = [&](double x, double y) {
    return -b * std::sin(a * x) * std::sin(b * y) - b * std::sin(a * x + 2 * b * y);
  };
  auto lap = [&](double x, double y) {
    return -(a * a + b * b) * std::sin(a * x) * std::cos(b * y) -
           0.5 * (a * a + 4 * b * b) * std::cos(a * x + 2 * b * y);
  };
  oracle::Refinement rl, rx, ry, rw;
  for (int n : {32, 64, 128}) {
    const ChartPtr t = Chart::torus(n, n, 1.5);
    const ScalarField u = ScalarField::sample(t, f);
    for (auto* r : {&rl, &rx, &ry, &rw}) r->h.push_back(t->hx());
    rl.err.push_back(max_diff(laplacian(u), lap));
    rx.err.push_back(max_diff(diff_x(u), fx));
    ry.err.push_back(max_diff(diff_y(u), fy));
    // d/dzbar of the real field f is (fx + i fy)/2.
    rw.err.push_back(max_diff(wirtinger(to_complex(u, ScalarField(t))).dzbar, [&](Complex z) {
      return 0.5 * Complex(fx(z.real(), z.imag()), fy(z.real(), z.imag()));
    }));
  }
  for (const auto* r : {&rl, &rx, &ry, &rw}) {
    EXPECT_FALSE(r->exact());
    EXPECT_TRUE(r->order_within(2.0, 0.2)) << r->describe();
  }
}
