#pragma once

#include <cstddef>

#include "uat/certificate.hpp"
#include "uat/measure.hpp"
#include "uat/nets.hpp"
#include "uat/piecewise.hpp"
#include "uat/target.hpp"

namespace uat {

/// k-cell uniform step function holding the cell averages of f. Averages
/// use the target's exact integral when it has one, adaptive quadrature
/// (relative tolerance 1e-10 per cell) otherwise.
StepFn1D step_approximate(const Target1D& f, std::size_t k);

/// A sigma1 network reproducing a step function up to linear ramps of
/// controlled width at each jump.
struct Sigma1Construction {
  Net net;
  /// Exact L1 distance between the step function and the net: sum |h|/(4 s).
  double ramp_error = 0.0;
  /// Total length of the ramp windows, the only places where net != step.
  double window_measure = 0.0;
  /// Largest |jump|; bounds |net - step| everywhere.
  double max_jump = 0.0;
  std::size_t jump_count = 0;
};

/// g(x) = v_1 + sum_t h_t * sigma1(s_t (x - c_t)) over the nonzero jumps of
/// `step`. The constant v_1 is carried by one saturated unit (weight 0). Each
/// jump gets an equal share of `ramp_budget`; slopes are raised where needed
/// so a ramp window never reaches past the middle of an adjacent cell.
Sigma1Construction step_to_sigma1_net(const StepFn1D& step, double ramp_budget);

struct Approx1DOptions {
  std::size_t max_cells = std::size_t{1} << 20;
};

struct Approx1DResult {
  Net net;  // ReLU, d = 1, m = 1
  ApproxCertificate certificate;
  StepFn1D step;
  std::size_t cells = 0;
  /// Exact (or quadrature, for non-CPWL targets) ||f - net||_1.
  L1Report measured;
};

/// Target -> step approximant -> sigma1 ramps -> ReLU expansion, with the
/// error budget split eps/2 (step) + eps/2 (ramps). The cell count doubles
/// from 1 until the step stage fits its budget, judged by L/(4k) when the
/// target declares a Lipschitz constant and by measurement otherwise.
/// Throws BudgetInfeasibleError past options.max_cells.
Approx1DResult build_relu_approx_1d(const Target1D& f, double eps, const Approx1DOptions& options = {});

}  // namespace uat
