#pragma once

// Reduced spectral mean-field solver: Dirichlet Hamiltonian assembly, the
// occupation map G = (sqrt2/pi) (lambda - H)_+^{1/2}, Fermi-level search under
// the charge constraint, an energy-monotone SCF with mixing, and the fiber /
// bath-tub verification oracles for the reduced kinetic functional.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wirefield/charge.hpp"
#include "wirefield/coulomb.hpp"
#include "wirefield/eig.hpp"
#include "wirefield/grid.hpp"
#include "wirefield/tf.hpp"

namespace wirefield {

// Finite-rank operator G = sum_j g_j |phi_j><phi_j|. Modes are grid functions
// vanishing on the boundary, orthonormal in the quadrature-weighted inner
// product. Zero-weight modes are not stored. `energies` carries the Rayleigh
// values E_j when the state was built spectrally; it is empty for mixtures.
struct ReducedState {
  std::vector<double> g;
  std::vector<ScalarField> modes;
  std::vector<double> energies;

  double trace() const { return std::accumulate(g.begin(), g.end(), 0.0); }
  int rank() const { return int(g.size()); }
};

// Dense -1/2 Laplacian + potential on interior nodes, homogeneous Dirichlet.
struct DiscreteHamiltonian {
  Grid grid;
  int mi = 0, mj = 0;       // interior extent: (na-2) x (nb-2)
  std::vector<double> mat;  // column-major (mi*mj) x (mi*mj), symmetric

  int size() const { return mi * mj; }
};

namespace detail {

inline std::vector<double> to_interior(const ScalarField& u) {
  const Grid& g = u.grid;
  std::vector<double> v(std::size_t(g.na - 2) * (g.nb - 2));
  for (int i = 1; i < g.na - 1; ++i)
    for (int j = 1; j < g.nb - 1; ++j)
      v[std::size_t(i - 1) * (g.nb - 2) + (j - 1)] = u(i, j);
  return v;
}

inline ScalarField from_interior(const Grid& g, const std::vector<double>& v) {
  ScalarField u(g);
  for (int i = 1; i < g.na - 1; ++i)
    for (int j = 1; j < g.nb - 1; ++j)
      u.values[std::size_t(i) * g.nb + j] = v[std::size_t(i - 1) * (g.nb - 2) + (j - 1)];
  return u;
}

// <phi, -Lap phi> with the 5-point Dirichlet stencil; phi vanishes on the
// boundary so the quadrature-weighted product reduces to hx*hy * interior sum.
inline double dirichlet_rayleigh(const ScalarField& phi) {
  ScalarField lap = laplacian(phi);
  return -dot_weighted(phi, lap);
}

// Two-pass modified Gram-Schmidt in the quadrature inner product; drops
// near-dependent columns. Input columns are appended in order.
inline std::vector<ScalarField> orthonormalize_modes(std::vector<ScalarField> cols) {
  std::vector<ScalarField> q;
  for (auto& c : cols) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : q) {
        const double p = dot_weighted(e, c);
        for (std::size_t a = 0; a < c.values.size(); ++a) c.values[a] -= p * e.values[a];
      }
    const double nrm = std::sqrt(dot_weighted(c, c));
    if (nrm < 1e-8) continue;
    for (double& x : c.values) x /= nrm;
    q.push_back(std::move(c));
  }
  return q;
}

// Representation A = P diag(g) P^T of a state in an orthonormal basis q that
// contains its range; A's eigenvalues reproduce g exactly in that case.
inline std::vector<double> represent_in_basis(const ReducedState& s,
                                              const std::vector<ScalarField>& q) {
  const int R = int(q.size());
  std::vector<double> P(std::size_t(R) * s.rank());
  for (int j = 0; j < s.rank(); ++j)
    for (int r = 0; r < R; ++r) P[std::size_t(j) * R + r] = dot_weighted(q[r], s.modes[j]);
  std::vector<double> A(std::size_t(R) * R, 0.0);
  for (int j = 0; j < s.rank(); ++j)
    for (int c = 0; c < R; ++c)
      for (int r = 0; r < R; ++r)
        A[std::size_t(c) * R + r] += s.g[j] * P[std::size_t(j) * R + r] * P[std::size_t(j) * R + c];
  return A;
}

} // namespace detail

// H = -1/2 (5-point Dirichlet Laplacian) + diag(V) on interior nodes.
inline DiscreteHamiltonian assemble_hamiltonian(const ScalarField& V) {
  const Grid& g = V.grid;
  if (g.na < 3 || g.nb < 3) throw std::invalid_argument("assemble_hamiltonian: grid too small");
  DiscreteHamiltonian H{g, g.na - 2, g.nb - 2, {}};
  const int M = H.size();
  H.mat.assign(std::size_t(M) * M, 0.0);
  const double cx = 0.5 / (g.hx * g.hx), cy = 0.5 / (g.hy * g.hy);
  auto idx = [&](int i, int j) { return std::size_t(i - 1) * H.mj + (j - 1); };
  for (int i = 1; i < g.na - 1; ++i)
    for (int j = 1; j < g.nb - 1; ++j) {
      const std::size_t a = idx(i, j);
      H.mat[a * M + a] = 2.0 * (cx + cy) + V(i, j);
      if (i > 1) H.mat[idx(i - 1, j) * M + a] = -cx;
      if (i < g.na - 2) H.mat[idx(i + 1, j) * M + a] = -cx;
      if (j > 1) H.mat[idx(i, j - 1) * M + a] = -cy;
      if (j < g.nb - 2) H.mat[idx(i, j + 1) * M + a] = -cy;
    }
  return H;
}

inline std::vector<double> apply_hamiltonian(const DiscreteHamiltonian& H,
                                             const std::vector<double>& u) {
  const int M = H.size();
  if (int(u.size()) != M) throw std::invalid_argument("apply_hamiltonian: size mismatch");
  std::vector<double> out(M, 0.0);
  for (int c = 0; c < M; ++c) {
    const double uc = u[c];
    if (uc == 0.0) continue;
    const double* col = H.mat.data() + std::size_t(c) * M;
    for (int r = 0; r < M; ++r) out[r] += col[r] * uc;
  }
  return out;
}

namespace detail {

inline ReducedState state_from_modes(const Grid& g, const EighResult& eig, double lambda) {
  ReducedState s;
  const int M = int(eig.values.size());
  const double norm = 1.0 / std::sqrt(g.hx * g.hy);
  for (int j = 0; j < M; ++j) {
    if (eig.values[j] >= lambda) break; // ascending order
    s.g.push_back(M_SQRT2 / M_PI * std::sqrt(lambda - eig.values[j]));
    s.energies.push_back(eig.values[j]);
    std::vector<double> col(eig.vectors.begin() + std::size_t(j) * M,
                            eig.vectors.begin() + std::size_t(j + 1) * M);
    for (double& x : col) x *= norm;
    s.modes.push_back(from_interior(g, col));
  }
  return s;
}

inline double fermi_from_eigenvalues(const std::vector<double>& E, double Z, double tol) {
  const double e0 = E.front();
  double lo = e0, hi = e0 + std::pow(M_PI * Z / M_SQRT2, 2);
  auto count = [&](double lam) {
    double s = 0.0;
    for (double e : E) {
      if (e >= lam) break;
      s += M_SQRT2 / M_PI * std::sqrt(lam - e);
    }
    return s - Z;
  };
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double c = count(mid);
    if (std::abs(c) <= tol) return mid;
    (c > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace detail

// Functional calculus G = (sqrt2/pi) (lambda - H)_+^{1/2} via full dense
// eigendecomposition; modes at or above lambda carry weight zero and are
// dropped from the returned state.
inline ReducedState state_from_hamiltonian(const DiscreteHamiltonian& H, double lambda) {
  EighResult eig = symmetric_eigh(H.mat, H.size());
  return detail::state_from_modes(H.grid, eig, lambda);
}

// lambda solving sum_j (sqrt2/pi) sqrt((lambda - E_j)_+) = Z; the count is
// strictly increasing past E_0 and the single-mode bound gives the bracket.
inline double rhf_fermi_level(const DiscreteHamiltonian& H, double Z, const TFConfig& cfg = {}) {
  if (!(Z > 0.0)) throw std::invalid_argument("rhf_fermi_level: Z must be positive");
  EighResult eig = symmetric_eigh(H.mat, H.size());
  return detail::fermi_from_eigenvalues(eig.values, Z, cfg.dichotomy_tol * Z);
}

inline ScalarField density_of_state(const ReducedState& s, const Grid& g) {
  ScalarField rho(g);
  for (int j = 0; j < s.rank(); ++j) {
    check_same_grid(rho, s.modes[j], "density_of_state");
    for (std::size_t a = 0; a < rho.values.size(); ++a)
      rho.values[a] += s.g[j] * s.modes[j].values[a] * s.modes[j].values[a];
  }
  return rho;
}

// Reduced kinetic functional 1/2 sum g_j <phi_j, -Lap phi_j> + (pi^2/6) sum g_j^3.
inline double kinetic_reduced(const ReducedState& s) {
  double lin = 0.0, cub = 0.0;
  for (int j = 0; j < s.rank(); ++j) {
    lin += s.g[j] * detail::dirichlet_rayleigh(s.modes[j]);
    cub += s.g[j] * s.g[j] * s.g[j];
  }
  return 0.5 * lin + M_PI * M_PI / 6.0 * cub;
}

// Midpoint quadrature of (1/4pi) Int Tr((-Lap + k^2) gamma_k) dk with the
// optimal fibers gamma_k = sum_j 1{|k| <= pi g_j} |phi_j><phi_j|, over
// k in [-pi max g, pi max g]. Converges to kinetic_reduced as k_nodes grows.
inline double kinetic_fiber_quadrature(const ReducedState& s, int k_nodes) {
  if (k_nodes < 100) throw std::invalid_argument("kinetic_fiber_quadrature: need >= 100 nodes");
  if (s.rank() == 0) return 0.0;
  const double gmax = *std::max_element(s.g.begin(), s.g.end());
  if (gmax <= 0.0) return 0.0;
  std::vector<double> ray(s.rank());
  for (int j = 0; j < s.rank(); ++j) ray[j] = detail::dirichlet_rayleigh(s.modes[j]);
  const double K = M_PI * gmax, dk = 2.0 * K / k_nodes;
  double total = 0.0;
  for (int n = 0; n < k_nodes; ++n) {
    const double k = -K + (n + 0.5) * dk;
    double tr = 0.0;
    for (int j = 0; j < s.rank(); ++j)
      if (std::abs(k) <= M_PI * s.g[j]) tr += ray[j] + k * k;
    total += tr;
  }
  return total * dk / (4.0 * M_PI);
}

// Discretized bath-tub linear program: minimize sum k^2 m(k) dk over
// 0 <= m <= 1 with sum m dk = 2 pi g, solved greedily by filling the
// smallest-|k| bins first. k_grid holds uniformly spaced bin centers.
inline std::vector<double> bathtub_oracle(double g, const std::vector<double>& k_grid) {
  if (g < 0.0) throw std::invalid_argument("bathtub_oracle: g must be nonnegative");
  if (k_grid.size() < 2) throw std::invalid_argument("bathtub_oracle: need at least two bins");
  const double dk = k_grid[1] - k_grid[0];
  for (std::size_t i = 1; i < k_grid.size(); ++i)
    if (std::abs(k_grid[i] - k_grid[i - 1] - dk) > 1e-12 * std::abs(dk))
      throw std::invalid_argument("bathtub_oracle: k_grid must be uniform");
  double mass = 2.0 * M_PI * g;
  if (mass > dk * double(k_grid.size()) * (1.0 + 1e-12))
    throw std::invalid_argument("bathtub_oracle: infeasible occupation mass");
  std::vector<std::size_t> order(k_grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return k_grid[a] * k_grid[a] < k_grid[b] * k_grid[b];
  });
  std::vector<double> m(k_grid.size(), 0.0);
  for (std::size_t i : order) {
    if (mass <= 0.0) break;
    m[i] = std::min(1.0, mass / dk);
    mass -= m[i] * dk;
  }
  return m;
}

// Full model energy: reduced kinetic term plus the regularized interaction
// D(rho_G - mu, rho_G - mu). The hartree field of the breakdown stores the
// interaction term as it enters this total.
inline EnergyBreakdown rhf_energy(const ReducedState& s, const ChargeDistribution& mu) {
  EnergyBreakdown e;
  e.kinetic = kinetic_reduced(s);
  const ScalarField f = subtract(density_of_state(s, mu.field.grid), mu.field);
  e.hartree = hartree_energy(f, f);
  e.total = e.kinetic + e.hartree;
  return e;
}

// Ratio integral(rho_G^{5/3}) / kinetic_reduced(G); diagnostic only.
inline double lieb_thirring_diagnostic(const ReducedState& s) {
  const double kin = kinetic_reduced(s);
  if (kin <= 0.0 || s.rank() == 0) return 0.0;
  return detail::power_integral(density_of_state(s, s.modes[0].grid), 5.0 / 3.0) / kin;
}

struct RHFResult {
  ReducedState state;
  ScalarField rho;
  ScalarField potential;
  double lambda = 0.0;
  EnergyBreakdown energy;
  std::vector<HistoryRow> history;
  bool converged = false;
  int iterations = 0;
};

namespace detail {

// Realize the mixture (1-t) Gn + t Gs as a ReducedState: diagonalize its
// matrix in an orthonormal basis of the combined range and keep the
// significant weights.
inline ReducedState realize_mixture(const ReducedState& gn, const ReducedState& gs, double t,
                                    const std::vector<ScalarField>& q,
                                    const std::vector<double>& a1, const std::vector<double>& a2) {
  const int R = int(q.size());
  std::vector<double> A(a1.size());
  for (std::size_t i = 0; i < A.size(); ++i) A[i] = (1.0 - t) * a1[i] + t * a2[i];
  EighResult eig = symmetric_eigh(A, R);
  const double scale = std::max((1.0 - t) * gn.trace() + t * gs.trace(), 1.0);
  ReducedState out;
  for (int k = 0; k < R; ++k) {
    if (eig.values[k] <= 1e-14 * scale) continue;
    ScalarField mode(q[0].grid);
    for (int r = 0; r < R; ++r) {
      const double c = eig.vectors[std::size_t(k) * R + r];
      for (std::size_t a = 0; a < mode.values.size(); ++a) mode.values[a] += c * q[r].values[a];
    }
    out.g.push_back(eig.values[k]);
    out.modes.push_back(std::move(mode));
  }
  return out;
}

inline double cubic_trace(const std::vector<double>& a1, const std::vector<double>& a2, double t,
                          int R) {
  std::vector<double> A(a1.size());
  for (std::size_t i = 0; i < A.size(); ++i) A[i] = (1.0 - t) * a1[i] + t * a2[i];
  EighResult eig = symmetric_eigh(A, R);
  double s = 0.0;
  for (double w : eig.values) {
    const double wp = std::max(w, 0.0);
    s += wp * wp * wp;
  }
  return s;
}

} // namespace detail

// Relative fixed-point defect || G - (sqrt2/pi)(lambda - H[rho_G])_+^{1/2} ||_F
// / ||G||_F, measured in an orthonormal basis containing both ranges.
inline double rhf_fixed_point_residual(const ReducedState& s, const ChargeDistribution& mu,
                                       const TFConfig& cfg = {}) {
  const ScalarField f = subtract(density_of_state(s, mu.field.grid), mu.field);
  const DiscreteHamiltonian H = assemble_hamiltonian(mean_field_potential(f));
  EighResult eig = symmetric_eigh(H.mat, H.size());
  const double lambda = detail::fermi_from_eigenvalues(eig.values, mu.Z, cfg.dichotomy_tol * mu.Z);
  const ReducedState target = detail::state_from_modes(mu.field.grid, eig, lambda);

  std::vector<ScalarField> cols = s.modes;
  cols.insert(cols.end(), target.modes.begin(), target.modes.end());
  const std::vector<ScalarField> q = detail::orthonormalize_modes(std::move(cols));
  const std::vector<double> a1 = detail::represent_in_basis(s, q);
  const std::vector<double> a2 = detail::represent_in_basis(target, q);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a1.size(); ++i) {
    num += (a1[i] - a2[i]) * (a1[i] - a2[i]);
    den += a1[i] * a1[i];
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

// SCF for the reduced model. Each step diagonalizes H[rho_n], builds the
// spectral candidate at the constrained Fermi level, and mixes
// rho_{n+1} = t rho_cand + (1-t) rho_n with t minimizing the exact energy of
// the mixed state (the state mixture realizes exactly this density mixture).
// The interaction is quadratic in t and the potential updates linearly, so
// each iteration costs one eigendecomposition and one kernel sum. On exit the
// state is replaced by the spectral state of the final potential, so the
// occupation law holds exactly for the returned modes.
inline RHFResult rhf_scf(const ChargeDistribution& mu, const TFConfig& cfg = {}) {
  cfg.validate();
  const Grid& grid = mu.field.grid;
  const double Z = mu.Z;
  const double charge_tol = cfg.dichotomy_tol * Z;

  auto spectral_at = [&](const ScalarField& V, double& lambda_out) {
    const DiscreteHamiltonian H = assemble_hamiltonian(V);
    EighResult eig = symmetric_eigh(H.mat, H.size());
    lambda_out = detail::fermi_from_eigenvalues(eig.values, Z, charge_tol);
    return detail::state_from_modes(grid, eig, lambda_out);
  };

  RHFResult res;
  const ScalarField zero(grid);
  double lambda0 = 0.0;
  ReducedState state = spectral_at(zero, lambda0);
  ScalarField rho = density_of_state(state, grid);
  ScalarField f = subtract(rho, mu.field);
  ScalarField V = mean_field_potential(f);
  double d00 = dot_weighted(V, f);
  double energy = kinetic_reduced(state) + 0.5 * d00;
  res.history.push_back({0, energy, lambda0, 0.0});
  res.lambda = lambda0;

  for (int n = 1; n <= cfg.max_iter; ++n) {
    double lambda = 0.0;
    const ReducedState cand = spectral_at(V, lambda);
    const ScalarField rho_c = density_of_state(cand, grid);
    const ScalarField delta = subtract(rho_c, rho);
    const ScalarField Vd = mean_field_potential(delta);
    const double d0d = dot_weighted(V, delta) + dot_weighted(Vd, f);
    const double ddd = dot_weighted(Vd, delta);

    double lin_n = 0.0, lin_c = 0.0;
    for (int j = 0; j < state.rank(); ++j)
      lin_n += state.g[j] * detail::dirichlet_rayleigh(state.modes[j]);
    for (int j = 0; j < cand.rank(); ++j)
      lin_c += cand.g[j] * detail::dirichlet_rayleigh(cand.modes[j]);

    std::vector<ScalarField> cols = state.modes;
    cols.insert(cols.end(), cand.modes.begin(), cand.modes.end());
    const std::vector<ScalarField> q = detail::orthonormalize_modes(std::move(cols));
    const std::vector<double> a1 = detail::represent_in_basis(state, q);
    const std::vector<double> a2 = detail::represent_in_basis(cand, q);
    const int R = int(q.size());

    auto energy_at = [&](double t) {
      const double lin = 0.5 * ((1.0 - t) * lin_n + t * lin_c);
      const double cub = M_PI * M_PI / 6.0 * detail::cubic_trace(a1, a2, t, R);
      return lin + cub + 0.5 * (d00 + t * d0d + t * t * ddd);
    };
    auto [t, next_energy] = detail::minimize_on_unit_interval(energy_at, cfg.mixing_samples);

    state = (t == 1.0) ? cand : detail::realize_mixture(state, cand, t, q, a1, a2);
    for (std::size_t a = 0; a < rho.values.size(); ++a) {
      rho.values[a] += t * delta.values[a];
      f.values[a] += t * delta.values[a];
      V.values[a] += t * Vd.values[a];
    }
    d00 += t * d0d + t * t * ddd;

    res.history.push_back({n, next_energy, lambda, t});
    res.lambda = lambda;
    res.iterations = n;
    const double change = std::abs(next_energy - energy);
    energy = next_energy;
    if (change < cfg.epsilon) { res.converged = true; break; }
  }

  if (res.iterations > 0) {
    // Final spectral step: the returned state satisfies the occupation law
    // exactly at its own potential's spectrum.
    double lambda = 0.0;
    state = spectral_at(V, lambda);
    res.lambda = lambda;
    rho = density_of_state(state, grid);
    f = subtract(rho, mu.field);
    V = mean_field_potential(f);
    d00 = dot_weighted(V, f);
  }
  res.state = std::move(state);
  res.rho = std::move(rho);
  res.potential = std::move(V);
  res.energy.kinetic = kinetic_reduced(res.state);
  res.energy.hartree = 0.5 * d00;
  res.energy.total = res.energy.kinetic + res.energy.hartree;
  return res;
}

} // namespace wirefield
