#include "cstat/chart.hpp"

#include <algorithm>
#include <string>

namespace cstat {

ChartPtr Chart::torus(int nx, int ny, double rho) {
  if (nx < kMinNodes || ny < kMinNodes)
    throw ContractViolation("torus chart needs at least 16 nodes per axis");
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw ContractViolation("torus aspect ratio must be positive");
  auto c = std::shared_ptr<Chart>(new Chart());
  c->kind_ = ChartKind::Torus;
  c->nx_ = nx;
  c->ny_ = ny;
  c->rho_ = rho;
  c->hx_ = 1.0 / nx;
  c->hy_ = rho / ny;
  c->classify();
  return c;
}

ChartPtr Chart::disk(int nx, int ny, double half_width) {
  if (nx < kMinNodes || ny < kMinNodes)
    throw ContractViolation("disk chart needs at least 16 nodes per axis");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw ContractViolation("disk half-width must be positive");
  auto c = std::shared_ptr<Chart>(new Chart());
  c->kind_ = ChartKind::Disk;
  c->nx_ = nx;
  c->ny_ = ny;
  c->half_width_ = half_width;
  c->hx_ = 2.0 * half_width / (nx - 1);
  c->hy_ = 2.0 * half_width / (ny - 1);
  c->x0_ = -half_width;
  c->y0_ = -half_width;
  c->classify();
  return c;
}

void Chart::classify() {
  nodes_.assign(size(), NodeKind::Interior);
  if (kind_ == ChartKind::Disk) {
    const double r2 = half_width_ * half_width_ * (1.0 + 1e-12);
    for (std::size_t k = 0; k < size(); ++k) {
      const double xi = x(col(k));
      const double yj = y(row(k));
      nodes_[k] = xi * xi + yj * yj <= r2 ? NodeKind::Interior : NodeKind::Outside;
    }
    auto inside = [&](int i, int j) {
      return i >= 0 && j >= 0 && i < nx_ && j < ny_ && nodes_[index(i, j)] != NodeKind::Outside;
    };
    for (std::size_t k = 0; k < size(); ++k) {
      if (nodes_[k] == NodeKind::Outside) continue;
      const int i = col(k);
      const int j = row(k);
      if (!inside(i + 1, j) || !inside(i - 1, j) || !inside(i, j + 1) || !inside(i, j - 1))
        nodes_[k] = NodeKind::Ring;
    }
  }
  interior_.clear();
  active_.clear();
  ring_.clear();
  for (std::size_t k = 0; k < size(); ++k) {
    if (nodes_[k] == NodeKind::Outside) continue;
    active_.push_back(k);
    (nodes_[k] == NodeKind::Interior ? interior_ : ring_).push_back(k);
  }
}

std::size_t Chart::east(std::size_t k) const noexcept {
  const int i = col(k);
  return i + 1 < nx_ ? k + 1 : k + 1 - nx_;
}

std::size_t Chart::west(std::size_t k) const noexcept {
  const int i = col(k);
  return i > 0 ? k - 1 : k + nx_ - 1;
}

std::size_t Chart::north(std::size_t k) const noexcept {
  const int j = row(k);
  return j + 1 < ny_ ? k + nx_ : k + nx_ - size();
}

std::size_t Chart::south(std::size_t k) const noexcept {
  const int j = row(k);
  return j > 0 ? k - nx_ : k + size() - nx_;
}

bool Chart::operator==(const Chart& o) const noexcept {
  return kind_ == o.kind_ && nx_ == o.nx_ && ny_ == o.ny_ && rho_ == o.rho_ &&
         half_width_ == o.half_width_;
}

void require_same_chart(const Chart& a, const Chart& b) {
  if (&a != &b && !(a == b)) throw ContractViolation("fields live on different charts");
}

namespace {

template <class T, class Fn>
Field<T> map_active(const ChartPtr& chart, Fn&& fn) {
  Field<T> out(chart);
  for (std::size_t k : chart->active_nodes()) out[k] = fn(k);
  return out;
}

template <class T>
Field<T> centered_x(const Field<T>& f) {
  const Chart& c = f.chart();
  Field<T> out(f.chart_ptr());
  const double s = 0.5 / c.hx();
  for (std::size_t k : c.interior_nodes()) out[k] = (f[c.east(k)] - f[c.west(k)]) * s;
  return out;
}

template <class T>
Field<T> centered_y(const Field<T>& f) {
  const Chart& c = f.chart();
  Field<T> out(f.chart_ptr());
  const double s = 0.5 / c.hy();
  for (std::size_t k : c.interior_nodes()) out[k] = (f[c.north(k)] - f[c.south(k)]) * s;
  return out;
}

}  // namespace

ScalarField exp(const ScalarField& f) {
  return map_active<double>(f.chart_ptr(), [&](std::size_t k) { return std::exp(f[k]); });
}

ScalarField real(const ComplexField& f) {
  return map_active<double>(f.chart_ptr(), [&](std::size_t k) { return f[k].real(); });
}

ScalarField imag(const ComplexField& f) {
  return map_active<double>(f.chart_ptr(), [&](std::size_t k) { return f[k].imag(); });
}

ScalarField abs(const ComplexField& f) {
  return map_active<double>(f.chart_ptr(), [&](std::size_t k) { return std::abs(f[k]); });
}

ScalarField abs(const ScalarField& f) {
  return map_active<double>(f.chart_ptr(), [&](std::size_t k) { return std::abs(f[k]); });
}

ComplexField to_complex(const ScalarField& re, const ScalarField& im) {
  require_same_chart(re.chart(), im.chart());
  return map_active<Complex>(re.chart_ptr(), [&](std::size_t k) { return Complex(re[k], im[k]); });
}

ScalarField laplacian(const ScalarField& f) {
  const Chart& c = f.chart();
  ScalarField out(f.chart_ptr());
  const double ax = 1.0 / (c.hx() * c.hx());
  const double ay = 1.0 / (c.hy() * c.hy());
  const double centre = 2.0 * (ax + ay);
  for (std::size_t k : c.interior_nodes()) {
    out[k] = (f[c.east(k)] + f[c.west(k)]) * ax + (f[c.north(k)] + f[c.south(k)]) * ay -
             centre * f[k];
  }
  return out;
}

ScalarField diff_x(const ScalarField& f) { return centered_x(f); }
ScalarField diff_y(const ScalarField& f) { return centered_y(f); }
ComplexField diff_x(const ComplexField& f) { return centered_x(f); }
ComplexField diff_y(const ComplexField& f) { return centered_y(f); }

Wirtinger wirtinger(const ComplexField& f) {
  const ComplexField fx = diff_x(f);
  const ComplexField fy = diff_y(f);
  Wirtinger out{ComplexField(f.chart_ptr()), ComplexField(f.chart_ptr())};
  const Complex i(0.0, 1.0);
  for (std::size_t k : f.chart().interior_nodes()) {
    out.dz[k] = 0.5 * (fx[k] - i * fy[k]);
    out.dzbar[k] = 0.5 * (fx[k] + i * fy[k]);
  }
  return out;
}

ScalarField d_oneform(const OneFormField& tau) {
  require_same_chart(tau.x.chart(), tau.y.chart());
  ScalarField out = diff_x(tau.y);
  out -= diff_y(tau.x);
  return out;
}

double integrate(const ScalarField& f, Region r) {
  const Chart& c = f.chart();
  double sum = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k)
    if (c.in_region(k, r)) sum += f[k];
  return sum * c.hx() * c.hy();
}

namespace {

template <class T>
double sup_impl(const Field<T>& f, Region r) {
  const Chart& c = f.chart();
  double m = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k)
    if (c.in_region(k, r)) m = std::max(m, std::abs(f[k]));
  return m;
}

template <class T>
double l2_impl(const Field<T>& f, Region r) {
  const Chart& c = f.chart();
  double sum = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k)
    if (c.in_region(k, r)) sum += std::norm(f[k]);
  return std::sqrt(sum * c.hx() * c.hy());
}

}  // namespace

double sup_norm(const ScalarField& f, Region r) { return sup_impl(f, r); }
double l2_norm(const ScalarField& f, Region r) { return l2_impl(f, r); }
double sup_norm(const ComplexField& f, Region r) { return sup_impl(f, r); }
double l2_norm(const ComplexField& f, Region r) { return l2_impl(f, r); }

}  // namespace cstat
