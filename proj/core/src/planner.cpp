#include "msteer/planner.hpp"

#include <cmath>
#include <sstream>

namespace msteer {

MomentSequence error_moments(const MomentSequence& x_T, const MomentSequence& x_k) {
    if (x_T.order() != x_k.order()) {
        throw Error(ErrorCode::OrderMismatch, "error moments need matching orders");
    }
    return MomentSequence(x_T.order(), x_T.values() - x_k.values());
}

FeasibleStart find_k0(const MomentSequence& x0, const MomentSequence& x_T,
                      const SystemSchedule& sched, int k_max) {
    if (x0.order() != sched.order || x_T.order() != sched.order) {
        throw Error(ErrorCode::OrderMismatch, "moment order does not match the schedule");
    }
    if (k_max < 0 || k_max >= sched.horizon) {
        throw Error(ErrorCode::ValidationError, "k_max must lie in [0, horizon)");
    }
    if (!is_strictly_positive(hankel_of(x0))) {
        throw Error(ErrorCode::NoFeasibleStart,
                    "initial moment sequence is not strictly positive");
    }
    MomentSequence x = x0;
    for (int k = 0; k <= k_max; ++k) {
        if (is_strictly_positive(hankel_of(error_moments(x_T, x)))) {
            return {k, x};
        }
        x = propagate_uncontrolled(x, sched.coeffs[k]);
    }
    std::ostringstream os;
    os << "terminal error never becomes feasible within k <= " << k_max;
    throw Error(ErrorCode::NoFeasibleStart, os.str());
}

namespace {

void check_weights(const std::vector<double>& weights) {
    if (weights.empty()) {
        throw Error(ErrorCode::WeightSumInvalid, "weight vector is empty");
    }
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw Error(ErrorCode::WeightSumInvalid, "weights must be positive and finite");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "weights sum to " << sum << ", expected 1";
        throw Error(ErrorCode::WeightSumInvalid, os.str());
    }
}

} // namespace

std::vector<MomentSequence> plan_states(const MomentSequence& x_at_k0, const MomentSequence& x_T,
                                        const std::vector<double>& weights) {
    if (x_at_k0.order() != x_T.order()) {
        throw Error(ErrorCode::OrderMismatch, "plan endpoints need matching orders");
    }
    check_weights(weights);
    const Eigen::VectorXd e = x_T.values() - x_at_k0.values();
    std::vector<MomentSequence> states;
    states.reserve(weights.size());
    double cumulative = 0.0;
    for (double w : weights) {
        cumulative += w;
        states.emplace_back(x_at_k0.order(), Eigen::VectorXd(x_at_k0.values() + cumulative * e));
    }
    return states;
}

std::vector<double> adjust_weights(const std::vector<double>& weights, int failing_step,
                                   int attempt) {
    if (attempt > kWeightRetryBudget) {
        std::ostringstream os;
        os << "weight adjustment attempt " << attempt << " exceeds budget of "
           << kWeightRetryBudget;
        throw Error(ErrorCode::RetryBudgetExceeded, os.str());
    }
    check_weights(weights);
    const int m = static_cast<int>(weights.size());
    if (failing_step < 0 || failing_step >= m) {
        throw Error(ErrorCode::ValidationError, "failing step outside the controlled window");
    }
    std::vector<double> out = weights;
    if (failing_step < m / 2.0) {
        out.front() *= 1.5;
    } else {
        out.back() *= 1.5;
    }
    double sum = 0.0;
    for (double w : out) {
        sum += w;
    }
    for (double& w : out) {
        w /= sum;
    }
    return out;
}

SteeringPlan derive_plan(const MomentSequence& x0, const MomentSequence& x_T,
                         const SystemSchedule& sched) {
    if (!is_strictly_positive(hankel_of(x_T))) {
        throw Error(ErrorCode::NoFeasibleStart,
                    "target moment sequence is not strictly positive");
    }
    const auto start = find_k0(x0, x_T, sched, sched.horizon - 1);
    const int K = sched.horizon;
    const int window = K - start.k0;

    // uncontrolled prefix X(0..k0)
    std::vector<MomentSequence> prefix;
    prefix.reserve(start.k0 + 1);
    prefix.push_back(x0);
    for (int k = 0; k < start.k0; ++k) {
        prefix.push_back(propagate_uncontrolled(prefix.back(), sched.coeffs[k]));
    }

    std::vector<double> weights(window, 1.0 / window);
    for (int attempt = 0; attempt <= kWeightRetryBudget; ++attempt) {
        const auto tail = plan_states(start.x_at_k0, x_T, weights);

        std::vector<MomentSequence> states = prefix;
        states.insert(states.end(), tail.begin(), tail.end());

        std::vector<MomentSequence> controls;
        controls.reserve(window);
        int failing = -1;
        for (int k = start.k0; k < K; ++k) {
            auto u = solve_control_moments(states[k], states[k + 1], sched.coeffs[k]);
            if (!is_strictly_positive(hankel_of(u))) {
                failing = k - start.k0;
                break;
            }
            controls.push_back(std::move(u));
        }
        if (failing < 0) {
            // the convexity argument guarantees these, but verify anyway
            for (int k = start.k0; k <= K; ++k) {
                if (!is_strictly_positive(hankel_of(states[k]))) {
                    std::ostringstream os;
                    os << "planned state at step " << k << " lost strict positivity";
                    throw Error(ErrorCode::ControlInfeasible, os.str());
                }
            }
            SteeringPlan plan;
            plan.k0 = start.k0;
            plan.weights = weights;
            plan.states = std::move(states);
            plan.controls = std::move(controls);
            return plan;
        }
        if (attempt == kWeightRetryBudget) {
            break;
        }
        weights = adjust_weights(weights, failing, attempt + 1);
    }
    std::ostringstream os;
    os << "no weight vector produced feasible controls within " << kWeightRetryBudget
       << " retries";
    throw Error(ErrorCode::ControlInfeasible, os.str());
}

} // namespace msteer
