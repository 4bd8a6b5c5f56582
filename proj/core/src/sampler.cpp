#include "msteer/sampler.hpp"

#include <cmath>
#include <sstream>

namespace msteer {

namespace {

constexpr std::uint64_t kMaxRejections = 1000000;

bool candidate_family_ok(Family f) {
    switch (f) {
    case Family::Cauchy:
    case Family::Gaussian:
    case Family::Uniform:
    case Family::TruncatedGaussian:
        return true;
    default:
        return false;
    }
}

double draw_component(const DensityComponent& c, RngStream& rng) {
    switch (c.family) {
    case Family::Gaussian:
        return c.loc + c.scale * rng.normal();
    case Family::Laplace: {
        const double u = rng.uniform_open01() - 0.5;
        return c.loc - c.scale * std::copysign(std::log1p(-2.0 * std::abs(u)), u);
    }
    case Family::GenLogistic: {
        // invert the CDF (1 + e^{-(x-loc)})^{-alpha}
        const double u = rng.uniform_open01();
        return c.loc - std::log(std::expm1(-std::log(u) / c.shape));
    }
    case Family::Uniform:
        return c.lo + (c.hi - c.lo) * rng.uniform01();
    case Family::Cauchy:
        return rng.cauchy(c.loc, c.scale);
    case Family::PointMass:
        return c.loc;
    case Family::TruncatedGaussian: {
        for (std::uint64_t i = 0; i < kMaxRejections; ++i) {
            const double x = c.loc + c.scale * rng.normal();
            if (x >= c.lo && x <= c.hi) {
                return x;
            }
        }
        throw Error(ErrorCode::AcceptanceStalled,
                    "truncated gaussian keeps too little mass to sample");
    }
    }
    throw Error(ErrorCode::UnsupportedFamily, "unknown density family");
}

} // namespace

double draw_from_spec(const DensitySpec& spec, RngStream& rng) {
    const auto& comps = spec.components();
    if (comps.size() == 1) {
        return draw_component(comps.front(), rng);
    }
    const double u = rng.uniform01();
    double acc = 0.0;
    for (const auto& c : comps) {
        acc += c.weight;
        if (u < acc) {
            return draw_component(c, rng);
        }
    }
    return draw_component(comps.back(), rng);
}

CandidateDensity::CandidateDensity(DensitySpec s) : spec(std::move(s)) {
    for (const auto& c : spec.components()) {
        if (!candidate_family_ok(c.family)) {
            throw Error(ErrorCode::UnsupportedFamily,
                        "candidate must mix cauchy/gaussian/uniform/truncated-gaussian only");
        }
    }
}

double CandidateDensity::draw(RngStream& rng) const { return draw_from_spec(spec, rng); }

CandidateDensity CandidateDensity::default_for(const RationalDensity& target) {
    if (target.support().bounded) {
        return CandidateDensity(DensitySpec::uniform(target.support().lo, target.support().hi));
    }
    const MomentSequence m = realized_moments(target, 1);
    const double mean = m.moment(1);
    const double sd = std::sqrt(std::max(m.moment(2) - mean * mean, 1e-12));
    return CandidateDensity(DensitySpec::cauchy(mean, 2.0 * sd));
}

double rejection_constant(const RationalDensity& target, const CandidateDensity& candidate,
                          const QuadratureGrid& grid) {
    const int size = grid.size();
    if (size < 4) {
        throw Error(ErrorCode::ValidationError, "grid too small for a supremum estimate");
    }
    Eigen::VectorXd ratio(size);
    for (int i = 0; i < size; ++i) {
        const double u = grid.nodes(i);
        const double denom = candidate.pdf(u);
        const double num = evaluate(target, u);
        if (!(denom > 0.0)) {
            if (num > 0.0) {
                throw Error(ErrorCode::UnboundedRatio,
                            "candidate density vanishes inside the target support");
            }
            ratio(i) = 0.0;
            continue;
        }
        ratio(i) = num / denom;
    }
    if (!ratio.allFinite()) {
        throw Error(ErrorCode::UnboundedRatio, "density ratio overflows on the grid");
    }
    double sup = ratio.maxCoeff();
    if (target.support().bounded) {
        // the nodes stop short of the endpoints, where a density on a closed
        // interval may peak; evaluate there directly.  a vanishing value next
        // to a climbing ratio means the density blows up just inside the edge
        const Support& sp = target.support();
        const bool rises_left = ratio(0) >= ratio(std::min(4, size - 1));
        const bool rises_right = ratio(size - 1) >= ratio(std::max(size - 5, 0));
        for (const double edge : {sp.lo, sp.hi}) {
            const double denom = candidate.pdf(edge);
            const double num = evaluate(target, edge);
            if (num > 0.0 && !(denom > 0.0)) {
                throw Error(ErrorCode::UnboundedRatio,
                            "candidate density vanishes inside the target support");
            }
            if (num <= 0.0 && (edge == sp.lo ? rises_left : rises_right)) {
                throw Error(ErrorCode::UnboundedRatio,
                            edge == sp.lo ? "density ratio grows toward the lower support edge"
                                          : "density ratio grows toward the upper support edge");
            }
            if (denom > 0.0) {
                sup = std::max(sup, num / denom);
            }
        }
        return 1.1 * sup;
    }
    // tail-dominance screen: ratio must not keep climbing toward the edges
    const int band = std::max(2, size / 20);
    const double left_inner = ratio.segment(band, band).maxCoeff();
    const double right_inner = ratio.segment(size - 2 * band, band).maxCoeff();
    if (ratio.head(band).maxCoeff() > left_inner && ratio(0) >= ratio.head(band).maxCoeff()) {
        throw Error(ErrorCode::UnboundedRatio,
                    "density ratio grows toward the lower support edge");
    }
    if (ratio.tail(band).maxCoeff() > right_inner &&
        ratio(size - 1) >= ratio.tail(band).maxCoeff()) {
        throw Error(ErrorCode::UnboundedRatio,
                    "density ratio grows toward the upper support edge");
    }
    return 1.1 * sup;
}

double sample_one(const RationalDensity& target, const CandidateDensity& candidate, double c,
                  RngStream& rng, std::uint64_t* trials) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw Error(ErrorCode::ValidationError, "rejection constant must be positive finite");
    }
    for (std::uint64_t i = 0; i < kMaxRejections; ++i) {
        const double u = candidate.draw(rng);
        const double r = rng.uniform01();
        if (trials) {
            ++*trials;
        }
        const double num = target.support().contains(u) ? evaluate(target, u) : 0.0;
        if (num <= 0.0) {
            continue;
        }
        const double denom = c * candidate.pdf(u);
        if (r * denom <= num) {
            return u;
        }
    }
    std::ostringstream os;
    os << "no acceptance after " << kMaxRejections << " candidate draws (c = " << c << ")";
    throw Error(ErrorCode::AcceptanceStalled, os.str());
}

std::vector<double> sample_ensemble(const RationalDensity& target,
                                    const CandidateDensity& candidate, int n_agents,
                                    const RngStream& rng_master, SampleStats* stats) {
    if (n_agents < 1) {
        throw Error(ErrorCode::ValidationError, "need at least one agent to sample");
    }
    const double c = rejection_constant(target, candidate, target.grid);
    if (stats) {
        stats->rejection_constant = c;
        stats->trials = 0;
    }
    std::vector<double> out(static_cast<size_t>(n_agents));
    for (int i = 0; i < n_agents; ++i) {
        RngStream stream = rng_master.derive(static_cast<std::uint64_t>(i));
        out[static_cast<size_t>(i)] =
            sample_one(target, candidate, c, stream, stats ? &stats->trials : nullptr);
    }
    return out;
}

} // namespace msteer
