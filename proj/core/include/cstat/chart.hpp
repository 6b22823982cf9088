#pragma once

// Discretized conformal coordinate charts and the finite-difference
// primitives every other part of the library is built on.
//
// A chart is either a rectangular torus with periods 1 and i*rho, sampled on
// an nx-by-ny lattice with periodic wrap, or a disk of radius L embedded in
// the square [-L, L]^2. On a disk every node is classified as Outside (not
// part of the domain), Ring (inside the disk but missing at least one
// stencil neighbour; Dirichlet data lives here) or Interior. Differential
// operators only ever write interior nodes.
//
// Storage is row-major with y outer and x inner: node (i, j) lives at
// index j * nx + i.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "cstat/errors.hpp"

namespace cstat {

using Complex = std::complex<double>;

enum class ChartKind { Torus, Disk };
enum class NodeKind : std::uint8_t { Outside, Ring, Interior };

/// Which nodes a reduction (integral or norm) runs over.
enum class Region {
  Active,    // every node inside the domain (ring included)
  Interior,  // nodes where differential operators are evaluated
};

class Chart;
using ChartPtr = std::shared_ptr<const Chart>;

class Chart {
 public:
  static constexpr int kMinNodes = 16;

  static ChartPtr torus(int nx, int ny, double rho = 1.0);
  static ChartPtr disk(int nx, int ny, double half_width = 1.0);

  ChartKind kind() const noexcept { return kind_; }
  bool is_torus() const noexcept { return kind_ == ChartKind::Torus; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double hx() const noexcept { return hx_; }
  double hy() const noexcept { return hy_; }
  /// Torus aspect ratio (second period is i*rho). Zero on disks.
  double rho() const noexcept { return rho_; }
  /// Disk radius / half-width of the bounding square. Zero on tori.
  double half_width() const noexcept { return half_width_; }

  std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * nx_ + i;
  }
  int col(std::size_t k) const noexcept { return static_cast<int>(k % nx_); }
  int row(std::size_t k) const noexcept { return static_cast<int>(k / nx_); }

  double x(int i) const noexcept { return x0_ + i * hx_; }
  double y(int j) const noexcept { return y0_ + j * hy_; }
  Complex z(std::size_t k) const noexcept { return {x(col(k)), y(row(k))}; }

  NodeKind node(std::size_t k) const noexcept { return nodes_[k]; }
  bool active(std::size_t k) const noexcept { return nodes_[k] != NodeKind::Outside; }
  bool interior(std::size_t k) const noexcept { return nodes_[k] == NodeKind::Interior; }
  bool in_region(std::size_t k, Region r) const noexcept {
    return r == Region::Active ? active(k) : interior(k);
  }

  /// Stencil neighbours; wrap on the torus. Only meaningful at interior nodes.
  std::size_t east(std::size_t k) const noexcept;
  std::size_t west(std::size_t k) const noexcept;
  std::size_t north(std::size_t k) const noexcept;
  std::size_t south(std::size_t k) const noexcept;

  const std::vector<std::size_t>& interior_nodes() const noexcept { return interior_; }
  const std::vector<std::size_t>& active_nodes() const noexcept { return active_; }
  const std::vector<std::size_t>& ring_nodes() const noexcept { return ring_; }

  /// Same geometry and resolution (the node classification follows).
  bool operator==(const Chart& other) const noexcept;

 private:
  Chart() = default;
  void classify();

  ChartKind kind_ = ChartKind::Torus;
  int nx_ = 0;
  int ny_ = 0;
  double hx_ = 0.0;
  double hy_ = 0.0;
  double x0_ = 0.0;
  double y0_ = 0.0;
  double rho_ = 0.0;
  double half_width_ = 0.0;
  std::vector<NodeKind> nodes_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> active_;
  std::vector<std::size_t> ring_;
};

void require_same_chart(const Chart& a, const Chart& b);

/// Samples of a real or complex quantity on a chart. Nodes outside the disk
/// hold zero and are never read by the operators.
template <class T>
class Field {
 public:
  using value_type = T;

  explicit Field(ChartPtr chart, T fill = T{})
      : chart_(std::move(chart)), values_(checked(chart_)->size(), fill) {
    zero_outside();
  }

  /// Evaluates fn(x, y) at every active node.
  template <class Fn>
  static Field sample(ChartPtr chart, Fn&& fn) {
    Field f(std::move(chart));
    const Chart& c = f.chart();
    for (std::size_t k : c.active_nodes()) f.values_[k] = fn(c.x(c.col(k)), c.y(c.row(k)));
    return f;
  }

  const Chart& chart() const noexcept { return *chart_; }
  const ChartPtr& chart_ptr() const noexcept { return chart_; }
  std::size_t size() const noexcept { return values_.size(); }

  T& operator[](std::size_t k) noexcept { return values_[k]; }
  const T& operator[](std::size_t k) const noexcept { return values_[k]; }

  /// Checked access by grid position; outside nodes are a contract violation.
  const T& at(int i, int j) const { return values_[checked_index(i, j)]; }
  T& at(int i, int j) { return values_[checked_index(i, j)]; }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }

  Field& operator+=(const Field& o) {
    require_same_chart(chart(), o.chart());
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_same_chart(chart(), o.chart());
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
  }
  Field& operator*=(T s) {
    for (auto& v : values_) v *= s;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(T s, Field a) { return a *= s; }
  friend Field operator*(Field a, T s) { return a *= s; }

 private:
  static const ChartPtr& checked(const ChartPtr& c) {
    if (!c) throw ContractViolation("field constructed without a chart");
    return c;
  }
  std::size_t checked_index(int i, int j) const {
    const Chart& c = chart();
    if (i < 0 || j < 0 || i >= c.nx() || j >= c.ny())
      throw ContractViolation("grid index out of range");
    const std::size_t k = c.index(i, j);
    if (!c.active(k)) throw ContractViolation("access to a masked node");
    return k;
  }
  void zero_outside() {
    if (chart_->is_torus()) return;
    for (std::size_t k = 0; k < values_.size(); ++k)
      if (!chart_->active(k)) values_[k] = T{};
  }

  ChartPtr chart_;
  std::vector<T> values_;
};

using ScalarField = Field<double>;
using ComplexField = Field<Complex>;

/// A real 1-form tau_x dx + tau_y dy.
struct OneFormField {
  OneFormField(ScalarField tx, ScalarField ty) : x(std::move(tx)), y(std::move(ty)) {
    require_same_chart(x.chart(), y.chart());
  }
  explicit OneFormField(const ChartPtr& chart) : x(chart), y(chart) {}

  const Chart& chart() const noexcept { return x.chart(); }

  ScalarField x;
  ScalarField y;
};

// Pointwise helpers.
ScalarField exp(const ScalarField& f);
ScalarField real(const ComplexField& f);
ScalarField imag(const ComplexField& f);
ScalarField abs(const ComplexField& f);
ScalarField abs(const ScalarField& f);
ComplexField to_complex(const ScalarField& re, const ScalarField& im);

// Finite differences. All return zero on non-interior nodes.
ScalarField laplacian(const ScalarField& f);
ScalarField diff_x(const ScalarField& f);
ScalarField diff_y(const ScalarField& f);
ComplexField diff_x(const ComplexField& f);
ComplexField diff_y(const ComplexField& f);

struct Wirtinger {
  ComplexField dz;     // d/dz    = (d/dx - i d/dy) / 2
  ComplexField dzbar;  // d/dzbar = (d/dx + i d/dy) / 2
};
Wirtinger wirtinger(const ComplexField& f);

/// Exterior derivative of a 1-form: the dx^dy coefficient d_x tau_y - d_y tau_x.
ScalarField d_oneform(const OneFormField& tau);

// Quadrature and norms. l2 is weighted by the cell area hx*hy.
double integrate(const ScalarField& f, Region r = Region::Active);
double sup_norm(const ScalarField& f, Region r = Region::Active);
double l2_norm(const ScalarField& f, Region r = Region::Active);
double sup_norm(const ComplexField& f, Region r = Region::Active);
double l2_norm(const ComplexField& f, Region r = Region::Active);

}  // namespace cstat
