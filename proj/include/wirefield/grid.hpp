#pragma once

// Uniform tensor grids on [-a,a] x [-b,b], scalar fields living on them,
// trapezoid quadrature and low-order difference operators.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wirefield {

struct Grid {
  double a = 0, b = 0;   // half-widths
  int na = 0, nb = 0;    // node counts per axis
  double hx = 0, hy = 0; // spacings, hx = 2a/(na-1)

  double x(int i) const { return -a + i * hx; }
  double y(int j) const { return -b + j * hy; }
  int nodes() const { return na * nb; }

  // trapezoid weight of node (i,j): hx*hy, halved on each touched domain edge
  double weight(int i, int j) const {
    double w = hx * hy;
    if (i == 0 || i == na - 1) w *= 0.5;
    if (j == 0 || j == nb - 1) w *= 0.5;
    return w;
  }

  bool operator==(const Grid& o) const {
    return a == o.a && b == o.b && na == o.na && nb == o.nb;
  }
};

inline Grid make_grid(double a, double b, int na, int nb) {
  if (!(a > 0) || !(b > 0)) throw std::invalid_argument("make_grid: extents must be positive");
  if (na < 3 || nb < 3) throw std::invalid_argument("make_grid: need at least 3 nodes per axis");
  Grid g;
  g.a = a;
  g.b = b;
  g.na = na;
  g.nb = nb;
  g.hx = 2 * a / (na - 1);
  g.hy = 2 * b / (nb - 1);
  return g;
}

struct ScalarField {
  Grid grid;
  std::vector<double> values; // row-major: values[i*nb + j]

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), values(g.nodes(), fill) {}

  double& operator()(int i, int j) { return values[std::size_t(i) * grid.nb + j]; }
  double operator()(int i, int j) const { return values[std::size_t(i) * grid.nb + j]; }
};

template <class F>
ScalarField sample(const Grid& g, F&& f) {
  ScalarField out(g);
  for (int i = 0; i < g.na; ++i)
    for (int j = 0; j < g.nb; ++j) out(i, j) = f(g.x(i), g.y(j));
  return out;
}

inline void check_same_grid(const ScalarField& f, const ScalarField& g, const char* who) {
  if (!(f.grid == g.grid)) throw std::invalid_argument(std::string(who) + ": grid mismatch");
}

inline double integrate(const ScalarField& f) {
  const Grid& g = f.grid;
  double s = 0;
  for (int i = 0; i < g.na; ++i)
    for (int j = 0; j < g.nb; ++j) s += g.weight(i, j) * f(i, j);
  return s;
}

inline double lp_norm(const ScalarField& f, double p) {
  if (p < 1) throw std::invalid_argument("lp_norm: p must be >= 1");
  const Grid& g = f.grid;
  double s = 0;
  for (int i = 0; i < g.na; ++i)
    for (int j = 0; j < g.nb; ++j) s += g.weight(i, j) * std::pow(std::abs(f(i, j)), p);
  return std::pow(s, 1.0 / p);
}

// 5-point stencil on interior nodes; the boundary ring is set to zero and is
// not meaningful (residual tests must restrict to the interior).
inline ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid;
  ScalarField out(g);
  const double ix = 1.0 / (g.hx * g.hx), iy = 1.0 / (g.hy * g.hy);
  for (int i = 1; i + 1 < g.na; ++i)
    for (int j = 1; j + 1 < g.nb; ++j)
      out(i, j) = (f(i + 1, j) - 2 * f(i, j) + f(i - 1, j)) * ix +
                  (f(i, j + 1) - 2 * f(i, j) + f(i, j - 1)) * iy;
  return out;
}

// central differences inside, one-sided on the boundary
inline std::pair<ScalarField, ScalarField> gradient(const ScalarField& f) {
  const Grid& g = f.grid;
  ScalarField gx(g), gy(g);
  for (int i = 0; i < g.na; ++i)
    for (int j = 0; j < g.nb; ++j) {
      if (i == 0)
        gx(i, j) = (f(i + 1, j) - f(i, j)) / g.hx;
      else if (i == g.na - 1)
        gx(i, j) = (f(i, j) - f(i - 1, j)) / g.hx;
      else
        gx(i, j) = (f(i + 1, j) - f(i - 1, j)) / (2 * g.hx);
      if (j == 0)
        gy(i, j) = (f(i, j + 1) - f(i, j)) / g.hy;
      else if (j == g.nb - 1)
        gy(i, j) = (f(i, j) - f(i, j - 1)) / g.hy;
      else
        gy(i, j) = (f(i, j + 1) - f(i, j - 1)) / (2 * g.hy);
    }
  return {gx, gy};
}

} // namespace wirefield
