#pragma once

// 2D Coulomb machinery. Two interaction models live here:
//
//  regularized:  W_f(x) = (1/2pi) int f(y)/|x-y| dy, split potentials
//                I1^g(x) = (1/2pi) int_{|y|<1} g(y)/|x-y| dy
//                I2^g(x) = (1/2pi) int_{|y|>=1} (1/|x-y| - 1/|y|) g(y) dy
//                V_f = 4pi (I1^{W_f} + I2^{W_f}),  D(f,h) = int V_f h
//  log model:    Vt_f(x) = -2 int log|x-y| f(y) dy,  D2(f,g) = int Vt_f g
//
// All sums are direct trapezoid quadrature over source nodes. The singular
// node is replaced by the exact cell average of the kernel over the full cell
// area (see kernels.hpp), which keeps the composition 4pi I[W[.]] a weak
// solution of -lap V = 4pi f up to O(h) interior residual.

#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "wirefield/charge.hpp"
#include "wirefield/grid.hpp"
#include "wirefield/kernels.hpp"

namespace wirefield {

namespace detail {

// shared node geometry precomputation for the kernel sums
struct NodeTable {
  const Grid grid;
  std::vector<double> px, py, w, r; // position, trapezoid weight, |y| of each node
  double self_riesz;                // cell integral (not average) of 1/|y| over one cell
  double self_log;                  // cell integral of -2 ln|y| over one cell

  explicit NodeTable(const Grid& g) : grid(g) {
    const int n = g.nodes();
    px.resize(n);
    py.resize(n);
    w.resize(n);
    r.resize(n);
    for (int i = 0; i < g.na; ++i)
      for (int j = 0; j < g.nb; ++j) {
        const int k = i * g.nb + j;
        px[k] = g.x(i);
        py[k] = g.y(j);
        w[k] = g.weight(i, j);
        r[k] = std::hypot(px[k], py[k]);
      }
    const double cell = g.hx * g.hy;
    self_riesz = cell_kernel_integral(Kernel::riesz, g.hx, g.hy) * cell;
    self_log = cell_kernel_integral(Kernel::log, g.hx, g.hy) * cell;
  }
};

} // namespace detail

inline ScalarField riesz_w(const ScalarField& f) {
  const detail::NodeTable t(f.grid);
  const int n = f.grid.nodes();
  ScalarField out(f.grid);
  const double inv2pi = 1.0 / (2 * M_PI);
#pragma omp parallel for schedule(static)
  for (int a = 0; a < n; ++a) {
    double s = f.values[a] * t.self_riesz;
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      s += t.w[b] * f.values[b] / std::hypot(t.px[a] - t.px[b], t.py[a] - t.py[b]);
    }
    out.values[a] = s * inv2pi;
  }
  return out;
}

// I1: sources restricted to the open unit disk
inline ScalarField modified_riesz_i1(const ScalarField& g) {
  const detail::NodeTable t(g.grid);
  const int n = g.grid.nodes();
  ScalarField out(g.grid);
  const double inv2pi = 1.0 / (2 * M_PI);
#pragma omp parallel for schedule(static)
  for (int a = 0; a < n; ++a) {
    double s = 0;
    for (int b = 0; b < n; ++b) {
      if (t.r[b] >= 1.0) continue;
      if (b == a)
        s += g.values[b] * t.self_riesz;
      else
        s += t.w[b] * g.values[b] / std::hypot(t.px[a] - t.px[b], t.py[a] - t.py[b]);
    }
    out.values[a] = s * inv2pi;
  }
  return out;
}

// I2: sources on |y| >= 1, difference kernel 1/|x-y| - 1/|y|; only the
// singular first part needs the cell regularization at b == a
inline ScalarField modified_riesz_i2(const ScalarField& g) {
  const detail::NodeTable t(g.grid);
  const int n = g.grid.nodes();
  ScalarField out(g.grid);
  const double inv2pi = 1.0 / (2 * M_PI);
#pragma omp parallel for schedule(static)
  for (int a = 0; a < n; ++a) {
    double s = 0;
    for (int b = 0; b < n; ++b) {
      if (t.r[b] < 1.0) continue;
      if (b == a)
        s += g.values[b] * (t.self_riesz - t.w[b] / t.r[b]);
      else
        s += t.w[b] * g.values[b] *
             (1.0 / std::hypot(t.px[a] - t.px[b], t.py[a] - t.py[b]) - 1.0 / t.r[b]);
    }
    out.values[a] = s * inv2pi;
  }
  return out;
}

// The modified kernel keeps the potential and the quadratic form finite for
// charged sources as well, so no neutrality precondition is imposed: solvers
// constrain the density mass to the declared charge while the sampled
// background may integrate to slightly less, and the difference they feed in
// here legitimately carries a net charge.
inline ScalarField mean_field_potential(const ScalarField& f) {
  const ScalarField w = riesz_w(f);
  ScalarField i1 = modified_riesz_i1(w);
  const ScalarField i2 = modified_riesz_i2(w);
  for (std::size_t k = 0; k < i1.values.size(); ++k)
    i1.values[k] = 4 * M_PI * (i1.values[k] + i2.values[k]);
  return i1;
}

inline double dot_weighted(const ScalarField& f, const ScalarField& g) {
  check_same_grid(f, g, "dot_weighted");
  const Grid& gr = f.grid;
  double s = 0;
  for (int i = 0; i < gr.na; ++i)
    for (int j = 0; j < gr.nb; ++j) s += gr.weight(i, j) * f(i, j) * g(i, j);
  return s;
}

inline double hartree_energy(const ScalarField& f, const ScalarField& h) {
  check_same_grid(f, h, "hartree_energy");
  return dot_weighted(mean_field_potential(f), h);
}

inline ScalarField log_potential(const ScalarField& f) {
  const detail::NodeTable t(f.grid);
  const int n = f.grid.nodes();
  ScalarField out(f.grid);
#pragma omp parallel for schedule(static)
  for (int a = 0; a < n; ++a) {
    double s = f.values[a] * t.self_log;
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      s += t.w[b] * f.values[b] *
           (-2.0) * std::log(std::hypot(t.px[a] - t.px[b], t.py[a] - t.py[b]));
    }
    out.values[a] = s;
  }
  return out;
}

inline double log_energy(const ScalarField& f, const ScalarField& g) {
  check_same_grid(f, g, "log_energy");
  return dot_weighted(log_potential(f), g);
}

// Diagnostic-only evaluation of D(f,g) through the discrete Fourier transform
// on a zero-padded grid. The DFT imposes a periodicity the free-space model
// does not have, so this is a cross-check, not a reference path.
inline double hartree_energy_fourier(const ScalarField& f, const ScalarField& g, int padding = 4) {
  check_same_grid(f, g, "hartree_energy_fourier");
  if (padding < 4) throw std::invalid_argument("hartree_energy_fourier: padding must be >= 4");
  const Grid& gr = f.grid;
  if (std::abs(gr.hx - gr.hy) > 1e-12 * gr.hx)
    throw std::invalid_argument("hartree_energy_fourier: square cells required");
  const int P = padding * std::max(gr.na, gr.nb);
  const double h = gr.hx;
  using cd = std::complex<double>;

  auto dft2 = [&](const ScalarField& u) {
    // separable naive DFT of the zero-padded field, scaled to approximate
    // (1/2pi) int u e^{-ikx} dx
    std::vector<cd> rows(std::size_t(P) * P), out(std::size_t(P) * P);
    std::vector<cd> twiddle(std::size_t(P) * P);
    for (int m = 0; m < P; ++m)
      for (int n = 0; n < P; ++n)
        twiddle[std::size_t(m) * P + n] = std::polar(1.0, -2.0 * M_PI * m * n / P);
    // transform along y for each occupied row
    for (int i = 0; i < gr.na; ++i)
      for (int m = 0; m < P; ++m) {
        cd s = 0;
        for (int j = 0; j < gr.nb; ++j) s += u(i, j) * twiddle[std::size_t(m) * P + j];
        rows[std::size_t(i) * P + m] = s;
      }
    // transform along x
#pragma omp parallel for schedule(static)
    for (int m = 0; m < P; ++m)
      for (int l = 0; l < P; ++l) {
        cd s = 0;
        for (int i = 0; i < gr.na; ++i) s += rows[std::size_t(i) * P + m] * twiddle[std::size_t(l) * P + i];
        out[std::size_t(l) * P + m] = s;
      }
    const double scale = h * h / (2 * M_PI);
    for (auto& v : out) v *= scale;
    return out;
  };

  const auto Ff = dft2(f);
  const auto Fg = (&f == &g) ? Ff : dft2(g);
  const double dk = 2 * M_PI / (P * h);
  double s = 0;
  for (int l = 0; l < P; ++l)
    for (int m = 0; m < P; ++m) {
      if (l == 0 && m == 0) continue; // neutrality kills the k = 0 mode
      const double kx = dk * (l <= P / 2 ? l : l - P);
      const double ky = dk * (m <= P / 2 ? m : m - P);
      s += (std::conj(Ff[std::size_t(l) * P + m]) * Fg[std::size_t(l) * P + m]).real() /
           (kx * kx + ky * ky);
    }
  return 4 * M_PI * s * dk * dk;
}

} // namespace wirefield
