#pragma once

#include <Eigen/Dense>

#include <span>

#include "msteer/moments.hpp"
#include "msteer/quadrature.hpp"
#include "msteer/realizer.hpp"

namespace msteer {

// Entropy-maximizing density exp(-sum lambda_i x^i) matching a moment
// sequence.  lambdas is the monomial form; the shifted-scaled copy is kept
// for stable evaluation, and grid is the interval the fit integrated over.
struct MaxEntDensity {
    Eigen::VectorXd lambdas; // lambda_0 .. lambda_2n
    Support support;

    double center = 0.0;
    double scale = 1.0;
    Eigen::VectorXd lambdas_std;
    QuadratureGrid grid;

    double evaluate(double x) const;
};

// Newton iteration on the convex dual: minimize the integral of
// exp(-sum lambda_i x^i) plus sum lambda_i m_i.  Unbounded supports are
// truncated like the realizer grids (gaussian surrogate, tail < 1e-12).
MaxEntDensity fit_maxent(const MomentSequence& m, const Support& support, double tol = 1e-9);

// -integral of q log q over the grid.
double shannon_entropy(const MaxEntDensity& density, const QuadratureGrid& grid);
double shannon_entropy(const RationalDensity& density, const QuadratureGrid& grid);
double shannon_entropy(const DensitySpec& density, const QuadratureGrid& grid);

// KL(target || maxent) = H[maxent] - H[target] when both share the same
// first 2n moments.  Small negative values (quadrature noise) clip to 0;
// larger ones mean a broken fit.
double kl_via_entropy(double target_entropy, double maxent_entropy);

// Total-variation upper bound 3*sqrt(-1 + sqrt(1 + (4/9) kl)).
double tv_from_kl(double kl);

struct ErrorBoundReport {
    double H_maxent = 0.0;
    double H_terminal = 0.0;
    double H_desired = 0.0;
    double KL_terminal = 0.0;
    double KL_desired = 0.0;
    double TV_bound = 0.0;
};

// Chained bound on the distance between the achieved terminal distribution
// and the desired one: both sides are compared against the max-entropy fit
// of the desired moments.  The empirical-sample variant fits a second
// max-entropy density to the terminal sample moments; its KL leg is clipped
// at 0 since sampling noise can break the dominance assumption.
ErrorBoundReport terminal_error_bound(std::span<const double> terminal_samples,
                                      const DensitySpec& desired, int order,
                                      const Support& support);
ErrorBoundReport terminal_error_bound(const DensitySpec& terminal, const DensitySpec& desired,
                                      int order, const Support& support);

} // namespace msteer
