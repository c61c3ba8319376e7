#pragma once

// Dense symmetric eigendecomposition. LAPACK's divide-and-conquer driver when
// available, Eigen otherwise.

#include <stdexcept>
#include <vector>

#if __has_include(<lapacke.h>)
#define WIREFIELD_HAVE_LAPACKE 1
#include <lapacke.h>
#else
#include <Eigen/Dense>
#endif

namespace wirefield {

struct EighResult {
  std::vector<double> values;  // ascending
  std::vector<double> vectors; // column-major, unit 2-norm columns
};

// a: column-major n x n symmetric (only the lower triangle is referenced)
inline EighResult symmetric_eigh(std::vector<double> a, int n) {
  if (a.size() != std::size_t(n) * n) throw std::invalid_argument("symmetric_eigh: bad size");
  EighResult r;
  r.values.resize(n);
#ifdef WIREFIELD_HAVE_LAPACKE
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, r.values.data());
  if (info != 0) throw std::runtime_error("symmetric_eigh: dsyevd failed, info=" + std::to_string(info));
  r.vectors = std::move(a);
#else
  Eigen::Map<const Eigen::MatrixXd> A(a.data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw std::runtime_error("symmetric_eigh: eigensolver failed");
  r.vectors.assign(es.eigenvectors().data(), es.eigenvectors().data() + std::size_t(n) * n);
  for (int i = 0; i < n; ++i) r.values[i] = es.eigenvalues()[i];
#endif
  return r;
}

} // namespace wirefield
