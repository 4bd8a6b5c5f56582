#pragma once

#include <Eigen/Dense>

#include <vector>

#include "msteer/moments.hpp"

namespace msteer {

// Horizon, moment order and the per-step dynamics coefficients a(k) of the
// scalar system x(k+1) = a(k) x(k) + u(k).
struct SystemSchedule {
    int horizon = 0; // K
    int order = 0;   // n
    std::vector<double> coeffs;

    SystemSchedule(int horizon, int order, std::vector<double> coeffs);
};

// Lower-triangular 2n x 2n matrix mapping state moments forward: entry
// (l, j), 1-based, is C(l,j) a^j E[u^{l-j}].  Together with the control
// moment vector it advances the moment state one step.
Eigen::MatrixXd build_system_matrix(const MomentSequence& u_moms, double a, int order);

// E[x^l(k+1)] = sum_{j=0..l} C(l,j) a^j E[x^j] E[u^{l-j}], assuming the
// control is drawn independently of the state.
MomentSequence propagate(const MomentSequence& x_moms, const MomentSequence& u_moms, double a);

// Zero-control step: every moment scales by a^l.
MomentSequence propagate_uncontrolled(const MomentSequence& x_moms, double a);

// Inverts propagate in the control argument by the triangular recursion
// E[u^l] = E[x^l(k+1)] - sum_{j=1..l} C(l,j) a^j E[x^j(k)] E[u^{l-j}].
// The result is algebraically exact but need not be a feasible moment
// sequence; the caller must check positivity.
MomentSequence solve_control_moments(const MomentSequence& x_now, const MomentSequence& x_next,
                                     double a);

} // namespace msteer
