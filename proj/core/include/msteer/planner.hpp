#pragma once

#include <vector>

#include "msteer/moment_system.hpp"
#include "msteer/moments.hpp"

namespace msteer {

// Moment-space plan: wait until the terminal error becomes a feasible
// moment direction, then walk toward the target along a convex combination,
// with one control moment sequence per remaining step.
struct SteeringPlan {
    int k0 = 0;                          // first controlled step
    std::vector<double> weights;         // omega(k0..K-1), positive, sum 1
    std::vector<MomentSequence> states;  // X(0..K)
    std::vector<MomentSequence> controls; // U(k0..K-1)
};

// e(k) = X_T - X(k), componentwise.
MomentSequence error_moments(const MomentSequence& x_T, const MomentSequence& x_k);

struct FeasibleStart {
    int k0 = 0;
    MomentSequence x_at_k0;
};

// Smallest k <= k_max where the terminal error has a strictly positive
// Hankel matrix, letting the state decay uncontrolled up to there.
FeasibleStart find_k0(const MomentSequence& x0, const MomentSequence& x_T,
                      const SystemSchedule& sched, int k_max);

// States for k = k0+1..K obtained by adding the cumulative weight share of
// e(k0) to x_at_k0; the last entry reproduces x_T up to rounding.
std::vector<MomentSequence> plan_states(const MomentSequence& x_at_k0, const MomentSequence& x_T,
                                        const std::vector<double>& weights);

// Reshape weights after a control infeasibility at failing_step (index
// within the controlled window): bump the first weight if the failure sits
// in the first half, the last weight otherwise, then renormalize.
std::vector<double> adjust_weights(const std::vector<double>& weights, int failing_step,
                                   int attempt);

inline constexpr int kWeightRetryBudget = 20;

// Full planning pass: find k0, interpolate states with equal weights,
// derive control moments, and retry with adjusted weights until every
// control is a feasible moment sequence.
SteeringPlan derive_plan(const MomentSequence& x0, const MomentSequence& x_T,
                         const SystemSchedule& sched);

} // namespace msteer
