#include "msteer/engine.hpp"

#include <cmath>
#include <sstream>

namespace msteer {

AgentEnsemble AgentEnsemble::create(std::vector<double> states, bool record_history) {
    if (states.empty()) {
        throw Error(ErrorCode::EmptyEnsemble, "ensemble needs at least one agent");
    }
    AgentEnsemble ens;
    ens.states = std::move(states);
    ens.record_history = record_history;
    if (record_history) {
        ens.state_history.push_back(ens.states);
    }
    return ens;
}

AgentEnsemble propagate_agents(const AgentEnsemble& ens, const std::vector<double>& controls,
                               double a) {
    if (ens.states.empty()) {
        throw Error(ErrorCode::EmptyEnsemble, "ensemble has no agents");
    }
    const bool uncontrolled = controls.empty();
    if (!uncontrolled && controls.size() != ens.states.size()) {
        std::ostringstream os;
        os << "got " << controls.size() << " controls for " << ens.states.size() << " agents";
        throw Error(ErrorCode::LengthMismatch, os.str());
    }
    AgentEnsemble next = ens;
    for (size_t i = 0; i < next.states.size(); ++i) {
        next.states[i] = a * ens.states[i] + (uncontrolled ? 0.0 : controls[i]);
    }
    next.step = ens.step + 1;
    if (next.record_history) {
        next.state_history.push_back(next.states);
        next.control_history.push_back(controls);
    }
    return next;
}

ReferenceDensity default_reference(const MomentSequence& control, const Support& constraint,
                                   bool heavy_tail) {
    const double mean = control.moment(1);
    const double var = control.moment(2) - mean * mean;
    const double spread = 2.0 * std::sqrt(std::max(var, 1e-12));
    if (constraint.bounded) {
        return ReferenceDensity::truncated_gaussian(mean, spread, constraint.lo, constraint.hi);
    }
    return heavy_tail ? ReferenceDensity::cauchy(mean, spread)
                      : ReferenceDensity::gaussian(mean, spread);
}

namespace {

std::vector<RationalDensity> realize_controls(const SteeringPlan& plan, const Support& constraint,
                                              const RealizeOptions& options) {
    std::vector<RationalDensity> out;
    out.reserve(plan.controls.size());
    for (size_t i = 0; i < plan.controls.size(); ++i) {
        const int k = plan.k0 + static_cast<int>(i);
        const MomentSequence& u = plan.controls[i];
        try {
            const ReferenceDensity ref = default_reference(u, constraint, options.heavy_tail);
            const QuadratureGrid grid = make_grid(constraint, ref, options.node_count);
            out.push_back(minimize(hankel_of(u), ref, grid, options.tol));
        } catch (const Error& e) {
            std::ostringstream os;
            os << "realizing the control density for step " << k << ": " << e.what();
            throw Error(e.code(), os.str());
        }
    }
    return out;
}

void verify_run(const SteeringRun& run) {
    // planned terminal state must reproduce the target moments
    const MomentSequence& last = run.plan.states.back();
    for (int l = 1; l <= 2 * run.schedule.order; ++l) {
        const double want = run.target_moments.moment(l);
        if (std::abs(last.moment(l) - want) > 1e-9 * (1.0 + std::abs(want))) {
            std::ostringstream os;
            os << "planned terminal moment " << l << " misses the target: " << last.moment(l)
               << " vs " << want;
            throw Error(ErrorCode::ControlInfeasible, os.str());
        }
    }
    // realized densities must carry the planned control moments
    for (size_t i = 0; i < run.realized_controls.size(); ++i) {
        const MomentSequence got =
            realized_moments(run.realized_controls[i], run.schedule.order);
        const MomentSequence& want = run.plan.controls[i];
        for (int l = 1; l <= 2 * run.schedule.order; ++l) {
            if (std::abs(got.moment(l) - want.moment(l)) >
                1e-6 * (1.0 + std::abs(want.moment(l)))) {
                std::ostringstream os;
                os << "realized control " << i + run.plan.k0 << " moment " << l
                   << " drifted: " << got.moment(l) << " vs " << want.moment(l);
                throw Error(ErrorCode::MaxIterations, os.str());
            }
        }
    }
}

} // namespace

SteeringRun run_density_steering(const DensitySpec& q0, const DensitySpec& tau,
                                 const SystemSchedule& sched, const Support& constraint,
                                 const RealizeOptions& options) {
    if (!q0.has_finite_moments() || !tau.has_finite_moments()) {
        throw Error(ErrorCode::UnsupportedFamily,
                    "initial and terminal densities need finite moments");
    }
    const MomentSequence x0 = moments_of_density(q0, sched.order);
    const MomentSequence x_T = moments_of_density(tau, sched.order);
    SteeringRun run{sched,      derive_plan(x0, x_T, sched), {}, SteeringMode::Density,
                    constraint, x0,                          x_T};
    run.realized_controls = realize_controls(run.plan, constraint, options);
    verify_run(run);
    return run;
}

std::pair<SteeringRun, AgentEnsemble> run_occupation_steering(
    std::vector<double> initial_states, const DensitySpec& tau, const SystemSchedule& sched,
    const Support& constraint, const RngStream& rng_master, bool record_history,
    const RealizeOptions& options) {
    if (initial_states.empty()) {
        throw Error(ErrorCode::EmptyEnsemble, "occupation steering needs agents");
    }
    const MomentSequence x0 = moments_of_samples(initial_states, sched.order);
    const MomentSequence x_T = moments_of_density(tau, sched.order);

    SteeringRun run{sched,          derive_plan(x0, x_T, sched), {}, SteeringMode::Occupation,
                    constraint,     x0,                          x_T};
    run.realized_controls = realize_controls(run.plan, constraint, options);
    verify_run(run);

    AgentEnsemble ens = AgentEnsemble::create(std::move(initial_states), record_history);
    const int n_agents = static_cast<int>(ens.states.size());
    for (int k = 0; k < sched.horizon; ++k) {
        std::vector<double> controls;
        if (k >= run.plan.k0) {
            const RationalDensity& target = run.realized_controls[k - run.plan.k0];
            const CandidateDensity candidate = CandidateDensity::default_for(target);
            try {
                controls = sample_ensemble(target, candidate, n_agents,
                                           rng_master.derive(static_cast<std::uint64_t>(k)));
            } catch (const Error& e) {
                std::ostringstream os;
                os << "sampling controls for step " << k << ": " << e.what();
                throw Error(e.code(), os.str());
            }
        }
        ens = propagate_agents(ens, controls, sched.coeffs[k]);
    }
    return {std::move(run), std::move(ens)};
}

} // namespace msteer
