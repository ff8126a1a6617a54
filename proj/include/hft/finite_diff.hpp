#pragma once

#include <functional>

namespace hft::fd {

// Error-optimal central-difference step: cbrt(machine epsilon) * max(1, |x|).
double default_step(double x);

// Central finite difference of g at x. Computes the plain step-h estimate and
// the half-step estimate; when the two disagree by more than 1e-7 relative,
// one Richardson refinement (4 d_{h/2} - d_h) / 3 is returned instead.
// h = 0 selects default_step(x).
double derivative(const std::function<double(double)>& g, double x, double h = 0.0);

} // namespace hft::fd
