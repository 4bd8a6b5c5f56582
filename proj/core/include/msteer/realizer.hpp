#pragma once

#include <Eigen/Dense>

#include "msteer/moments.hpp"
#include "msteer/quadrature.hpp"

namespace msteer {

// Reference density r for the rational realization p = r / (B' Lambda B).
// Restricted to families that are strictly positive on their support and
// cheap to evaluate.
struct ReferenceDensity {
    DensitySpec spec;
    Support support;

    static ReferenceDensity gaussian(double mean, double stddev);
    static ReferenceDensity truncated_gaussian(double mean, double stddev, double lo, double hi);
    static ReferenceDensity uniform(double lo, double hi);
    static ReferenceDensity cauchy(double loc, double scale);

    double pdf(double u) const { return spec.pdf(u); }
    Family family() const { return spec.components().front().family; }
    double loc() const { return spec.components().front().loc; }
    double scale() const { return spec.components().front().scale; }
};

// Realized density p(u) = r(u) / (B(u)' Lambda B(u)) with B(u) = (1, u, ...,
// u^n).  lambda is the monomial-basis matrix; center/scale/lambda_std hold
// the same quadratic form in the shifted-scaled basis used for numerically
// stable evaluation.
struct RationalDensity {
    ReferenceDensity reference;
    Eigen::MatrixXd lambda;
    QuadratureGrid grid;
    double normalization_check = 0.0;

    double center = 0.0;
    double scale = 1.0;
    Eigen::MatrixXd lambda_std;

    int order() const { return static_cast<int>(lambda.rows()) - 1; }
    const Support& support() const { return reference.support; }
};

// Quadrature grid for realization integrals: the constraint interval when
// bounded; otherwise an interval wide enough that the reference leaves tail
// mass below 1e-12 (a tangent-substitution rule for cauchy references).
QuadratureGrid make_grid(const Support& support, const ReferenceDensity& reference,
                         int node_count = 512);

// J(Lambda) = tr(Lambda Sigma) - integral of r(u) log(B' Lambda B) du.
double objective(const Eigen::MatrixXd& lambda, const HankelMatrix& sigma,
                 const ReferenceDensity& reference, const QuadratureGrid& grid);

// Gradient of J: Sigma - integral of r(u) B(u) B(u)' / (B' Lambda B) du.
Eigen::MatrixXd gradient(const Eigen::MatrixXd& lambda, const HankelMatrix& sigma,
                         const ReferenceDensity& reference, const QuadratureGrid& grid);

// Newton descent from Lambda = E00 with backtracking that keeps B' Lambda B
// positive at every node.  The returned density reproduces sigma's moments;
// that is verified before returning.
RationalDensity minimize(const HankelMatrix& sigma, const ReferenceDensity& reference,
                         const QuadratureGrid& grid, double tol = 1e-9);

// Quadrature moments of the realized density, l = 1..2*order.
MomentSequence realized_moments(const RationalDensity& p, int order);

// Pointwise density value; OutOfSupport outside a bounded support.
double evaluate(const RationalDensity& p, double u);

} // namespace msteer
