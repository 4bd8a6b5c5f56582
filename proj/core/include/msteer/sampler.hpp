#pragma once

#include <cstdint>
#include <vector>

#include "msteer/moments.hpp"
#include "msteer/realizer.hpp"
#include "msteer/rng.hpp"

namespace msteer {

// Proposal density for acceptance-rejection: a family we can sample from
// directly and whose support covers the target's.
struct CandidateDensity {
    DensitySpec spec;

    explicit CandidateDensity(DensitySpec spec);

    double pdf(double u) const { return spec.pdf(u); }
    double draw(RngStream& rng) const;

    // unbounded target: cauchy at the realized mean with twice the realized
    // spread (heavier tails than any rational-times-gaussian density);
    // bounded target: uniform over the constraint interval
    static CandidateDensity default_for(const RationalDensity& target);
};

// Draw one value from a density spec (used for initial ensembles too).
double draw_from_spec(const DensitySpec& spec, RngStream& rng);

// sup over grid nodes of target/candidate, times a 1.1 safety factor.
// Raises UnboundedRatio when the ratio is still climbing in the outermost
// 5% of nodes on either side.
double rejection_constant(const RationalDensity& target, const CandidateDensity& candidate,
                          const QuadratureGrid& grid);

// One acceptance-rejection draw; trials (candidate draws used) is
// accumulated into *trials when given.
double sample_one(const RationalDensity& target, const CandidateDensity& candidate, double c,
                  RngStream& rng, std::uint64_t* trials = nullptr);

struct SampleStats {
    double rejection_constant = 0.0;
    std::uint64_t trials = 0; // total candidate draws across agents
};

// n_agents independent draws on per-agent derived streams; the result does
// not depend on evaluation order.
std::vector<double> sample_ensemble(const RationalDensity& target,
                                    const CandidateDensity& candidate, int n_agents,
                                    const RngStream& rng_master,
                                    SampleStats* stats = nullptr);

} // namespace msteer
