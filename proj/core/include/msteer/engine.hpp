#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "msteer/moments.hpp"
#include "msteer/planner.hpp"
#include "msteer/realizer.hpp"
#include "msteer/rng.hpp"
#include "msteer/sampler.hpp"

namespace msteer {

enum class SteeringMode { Density, Occupation };

// Positions of N agents at the current step, with optional per-step
// snapshots.  N never changes during a run.
struct AgentEnsemble {
    std::vector<double> states;
    int step = 0;
    bool record_history = false;
    std::vector<std::vector<double>> state_history;   // states at steps 0..step
    std::vector<std::vector<double>> control_history; // inputs applied per step (empty when u=0)

    static AgentEnsemble create(std::vector<double> states, bool record_history = false);
};

// x_i(k+1) = a x_i(k) + u_i(k).  An empty control vector means an
// uncontrolled step.
AgentEnsemble propagate_agents(const AgentEnsemble& ens, const std::vector<double>& controls,
                               double a);

struct RealizeOptions {
    int node_count = 512;
    double tol = 1e-9;
    bool heavy_tail = false;  // cauchy instead of gaussian reference on unbounded supports
};

// A completed steering computation: the moment-space plan plus one realized
// control density per controlled step.
struct SteeringRun {
    SystemSchedule schedule;
    SteeringPlan plan;
    std::vector<RationalDensity> realized_controls; // steps k0..K-1
    SteeringMode mode = SteeringMode::Density;
    Support constraint;
    MomentSequence initial_moments;
    MomentSequence target_moments;
};

// Reference used to realize one control moment sequence under a constraint.
ReferenceDensity default_reference(const MomentSequence& control, const Support& constraint,
                                   bool heavy_tail);

// Plan in moment space and realize every control density.  Errors from the
// realizer carry the step index.
SteeringRun run_density_steering(const DensitySpec& q0, const DensitySpec& tau,
                                 const SystemSchedule& sched, const Support& constraint,
                                 const RealizeOptions& options = {});

// As above, but the initial moments come from agent positions; controls are
// then sampled per agent and the ensemble is propagated through all K
// steps.  Stream usage: rng_master.derive(k) seeds step k's sampling.
std::pair<SteeringRun, AgentEnsemble> run_occupation_steering(
    std::vector<double> initial_states, const DensitySpec& tau, const SystemSchedule& sched,
    const Support& constraint, const RngStream& rng_master, bool record_history = false,
    const RealizeOptions& options = {});

} // namespace msteer
