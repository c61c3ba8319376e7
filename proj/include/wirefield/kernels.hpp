#pragma once

// Interaction kernels and the closed-form handling of their singular cell.

#include <cmath>
#include <stdexcept>

namespace wirefield {

enum class Kernel { riesz, log };

struct KernelCellRule {
  Kernel kind;
  double self_cell_value; // cell average of the kernel over the singular cell
};

// Exact integral of the kernel over the square cell [-h/2,h/2]^2 centered at
// the singularity, divided by the cell area.
//   riesz 1/r:     (1/h^2) * h * 4 ln(1+sqrt2)  =  4 ln(1+sqrt2)/h
//   log  -2 ln r:  -2 ln h + ln 2 + 3 - pi/2
// The log form combines int_{[-1/2,1/2]^2} ln|y| dy = (pi/2 - 3 - ln 2)/2
// with the scaling ln|h y| = ln h + ln|y|.
inline double cell_kernel_integral(Kernel kind, double hx, double hy) {
  if (!(hx > 0) || !(hy > 0)) throw std::invalid_argument("cell_kernel_integral: h must be positive");
  if (std::abs(hx - hy) > 1e-12 * hx)
    throw std::invalid_argument("cell_kernel_integral: square cells required");
  const double h = hx;
  if (kind == Kernel::riesz) return 4.0 * std::log(1.0 + std::sqrt(2.0)) / h;
  return -2.0 * std::log(h) + std::log(2.0) + 3.0 - M_PI / 2.0;
}

inline KernelCellRule make_cell_rule(Kernel kind, double hx, double hy) {
  return {kind, cell_kernel_integral(kind, hx, hy)};
}

} // namespace wirefield
