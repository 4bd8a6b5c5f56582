#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "msteer/errors.hpp"

namespace msteer {

// Tolerance used by default for the strict-positivity test on Hankel
// matrices (leading principal minors must exceed it).
inline constexpr double kPositivityTol = 1e-10;

// Truncated power-moment sequence m_1..m_2n of a scalar random variable;
// m_0 = 1 is implicit.  The even length keeps the associated Hankel matrix
// square of size (n+1).
class MomentSequence {
  public:
    MomentSequence() = default;
    MomentSequence(int order, Eigen::VectorXd values);

    int order() const { return order_; }      // n
    int length() const { return 2 * order_; } // 2n
    const Eigen::VectorXd& values() const { return values_; }

    // E[x^l] for l in 0..2n; moment(0) == 1.
    double moment(int l) const;

  private:
    int order_ = 0;
    Eigen::VectorXd values_;
};

using HankelMatrix = Eigen::MatrixXd;

// (n+1)x(n+1) Hankel matrix [m_{i+j}] with the implicit m_0 = 1 in the
// top-left corner.  Error sequences get the same padding, matching the
// feasibility test used by the planner.
HankelMatrix hankel_of(const MomentSequence& m);

// Sylvester criterion: true iff every leading principal minor exceeds tol.
bool is_strictly_positive(const HankelMatrix& h, double tol = kPositivityTol);

enum class Family {
    Gaussian,          // loc = mean, scale = stddev
    Laplace,           // loc, scale = diversity
    GenLogistic,       // loc, shape = alpha (type-I generalized logistic)
    Uniform,           // support [lo, hi]
    Cauchy,            // loc, scale; no finite moments
    PointMass,         // loc
    TruncatedGaussian, // gaussian(loc, scale) restricted to [lo, hi]
};

struct DensityComponent {
    Family family = Family::Gaussian;
    double weight = 1.0;
    double loc = 0.0;
    double scale = 1.0;
    double shape = 1.0;        // genlogistic only
    double lo = 0.0, hi = 0.0; // uniform / truncated_gaussian only
};

// Support of a density or of a control constraint set: either the whole
// real line or a closed interval.
struct Support {
    bool bounded = false;
    double lo = 0.0;
    double hi = 0.0;

    static Support real_line() { return {}; }
    static Support interval(double lo, double hi);
    bool contains(double x) const { return !bounded || (x >= lo && x <= hi); }
};

// Finite mixture of parametric densities.  Serves as initial/terminal
// distribution description and as reference/candidate building block.
class DensitySpec {
  public:
    DensitySpec() = default;
    explicit DensitySpec(std::vector<DensityComponent> components);

    static DensitySpec gaussian(double mean, double stddev);
    static DensitySpec laplace(double loc, double scale);
    static DensitySpec genlogistic(double loc, double shape);
    static DensitySpec uniform(double lo, double hi);
    static DensitySpec cauchy(double loc, double scale);
    static DensitySpec point_mass(double loc);
    static DensitySpec truncated_gaussian(double mean, double stddev, double lo, double hi);

    const std::vector<DensityComponent>& components() const { return components_; }

    // Undefined for point masses (raises UnsupportedFamily).
    double pdf(double x) const;

    // Natural support: an interval when every component is compactly
    // supported, the real line otherwise.
    Support support() const;

    // Interval outside which each component leaves at most tail_mass
    // probability (two-sided).  Infinite-variance components get a very
    // wide but finite interval.
    Support effective_support(double tail_mass = 1e-12) const;

    bool has_finite_moments() const; // false iff a cauchy component is present

  private:
    std::vector<DensityComponent> components_;
};

// Analytic raw moments m_1..m_2n.  Raises UnsupportedFamily for cauchy
// components and for genlogistic components beyond the implemented
// cumulant order (2n > 4).
MomentSequence moments_of_density(const DensitySpec& d, int order);

// Empirical raw moments of a sample set.
MomentSequence moments_of_samples(std::span<const double> samples, int order);

// Exact binomial coefficient for small arguments.
double binomial(int n, int k);

// Radius z such that a standard gaussian leaves total mass tail_mass
// outside [-z, z].
double gaussian_tail_radius(double tail_mass);

} // namespace msteer
