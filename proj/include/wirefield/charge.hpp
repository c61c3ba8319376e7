#pragma once

// Charge distributions (nonnegative fields with a total charge) and the
// neutrality bookkeeping needed by the regularized interaction.

#include <cmath>
#include <stdexcept>
#include <string>

#include "wirefield/grid.hpp"

namespace wirefield {

// Z is the charge the solvers constrain the electron density to. For sampled
// presets it is the analytic charge of the continuum distribution, which can
// differ from the discrete integral of the sampled field at finite resolution
// (an indicator sampled strictly drops its boundary nodes); the solvers must
// honor the declared value, not the quadrature of the samples.
struct ChargeDistribution {
  ScalarField field;
  double Z = 0;
};

inline void check_charge_field(const ScalarField& field, double Z, const char* who) {
  for (double v : field.values)
    if (v < 0) throw std::invalid_argument(std::string(who) + ": field must be nonnegative");
  if (!(Z > 0) || !std::isfinite(Z))
    throw std::invalid_argument(std::string(who) + ": total charge must be positive and finite");
}

// charge declared as the discrete integral (used when no analytic value exists,
// e.g. fields loaded from files)
inline ChargeDistribution make_charge(ScalarField field) {
  const double Z = integrate(field);
  check_charge_field(field, Z, "make_charge");
  return {std::move(field), Z};
}

inline ChargeDistribution make_charge(ScalarField field, double Z) {
  check_charge_field(field, Z, "make_charge");
  return {std::move(field), Z};
}

// indicator of the open square |x1|<half_side, |x2|<half_side, sampled at the
// nodes; nodes exactly on the square's boundary get 0. The declared charge is
// the discrete integral of the samples (not the analytic (2 half_side)^2):
// constraining the density to the sampled mass keeps rho - mu discretely
// neutral, which the log-kernel energy needs to be bounded and the comparison
// between the two interaction models needs to be meaningful. On grids whose
// nodes hit the square's edge the two charges differ by O(h).
inline ChargeDistribution square_nanowire(const Grid& g, double half_side = 2.0) {
  if (!(half_side > 0))
    throw std::invalid_argument("square_nanowire: half_side must be positive");
  return make_charge(sample(g, [=](double x, double y) {
    return (std::abs(x) < half_side && std::abs(y) < half_side) ? 1.0 : 0.0;
  }));
}

// normalized gaussian: Z/(2 pi sigma^2) exp(-|x-c|^2 / (2 sigma^2)); the
// declared charge is the stated one (box truncation error is the caller's
// concern and is negligible for the scales used here)
inline ChargeDistribution gaussian_charge(const Grid& g, double cx, double cy, double sigma,
                                          double charge) {
  if (!(sigma > 0) || !(charge > 0))
    throw std::invalid_argument("gaussian_charge: sigma and charge must be positive");
  const double amp = charge / (2 * M_PI * sigma * sigma);
  return make_charge(sample(g,
                            [=](double x, double y) {
                              double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                              return amp * std::exp(-r2 / (2 * sigma * sigma));
                            }),
                     charge);
}

constexpr double kNeutralityTol = 1e-8;

inline bool is_neutral(const ScalarField& f, double tol = kNeutralityTol) {
  return std::abs(integrate(f)) <= tol * (lp_norm(f, 1) + 1.0);
}

// shift by the mean so the discrete integral vanishes exactly
inline ScalarField project_neutral(ScalarField f) {
  const double shift = integrate(f) / (4.0 * f.grid.a * f.grid.b);
  for (double& v : f.values) v -= shift;
  return f;
}

// A field certified neutral at construction; inputs that fail the bound are
// rejected so downstream interaction code can assume neutrality.
struct NeutralField {
  ScalarField field;

  explicit NeutralField(ScalarField f) : field(std::move(f)) {
    if (!is_neutral(field)) throw std::invalid_argument("NeutralField: field is not neutral");
  }
};

inline ScalarField subtract(const ScalarField& f, const ScalarField& g) {
  check_same_grid(f, g, "subtract");
  ScalarField out(f.grid);
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = f.values[k] - g.values[k];
  return out;
}

} // namespace wirefield
