#include "msteer/moments.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace msteer {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }
double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

} // namespace

MomentSequence::MomentSequence(int order, Eigen::VectorXd values)
    : order_(order), values_(std::move(values)) {
    if (order_ < 1) {
        throw Error(ErrorCode::OrderMismatch, "moment order must be at least 1");
    }
    if (values_.size() != 2 * order_) {
        std::ostringstream os;
        os << "moment sequence of order " << order_ << " needs " << 2 * order_
           << " values, got " << values_.size();
        throw Error(ErrorCode::OrderMismatch, os.str());
    }
    if (!all_finite(values_)) {
        throw Error(ErrorCode::ValidationError, "moment sequence contains non-finite values");
    }
}

double MomentSequence::moment(int l) const {
    if (l < 0 || l > length()) {
        std::ostringstream os;
        os << "moment index " << l << " outside 0.." << length();
        throw Error(ErrorCode::OrderMismatch, os.str());
    }
    return l == 0 ? 1.0 : values_(l - 1);
}

HankelMatrix hankel_of(const MomentSequence& m) {
    const int n = m.order();
    HankelMatrix h(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            h(i, j) = m.moment(i + j);
        }
    }
    return h;
}

bool is_strictly_positive(const HankelMatrix& h, double tol) {
    if (h.rows() != h.cols() || h.rows() == 0) {
        throw Error(ErrorCode::OrderMismatch, "hankel matrix must be square and nonempty");
    }
    for (int k = 1; k <= h.rows(); ++k) {
        if (!(h.topLeftCorner(k, k).determinant() > tol)) {
            return false;
        }
    }
    return true;
}

Support Support::interval(double lo, double hi) {
    if (!(lo < hi)) {
        throw Error(ErrorCode::ValidationError, "interval support needs lo < hi");
    }
    Support s;
    s.bounded = true;
    s.lo = lo;
    s.hi = hi;
    return s;
}

namespace {

void validate_component(const DensityComponent& c) {
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
        throw Error(ErrorCode::WeightSumInvalid, "mixture weights must be positive and finite");
    }
    if (!std::isfinite(c.loc)) {
        throw Error(ErrorCode::ValidationError, "component location must be finite");
    }
    switch (c.family) {
    case Family::Gaussian:
    case Family::Laplace:
    case Family::Cauchy:
        if (!(c.scale > 0.0) || !std::isfinite(c.scale)) {
            throw Error(ErrorCode::ValidationError, "component scale must be positive");
        }
        break;
    case Family::GenLogistic:
        if (!(c.shape > 0.0) || !std::isfinite(c.shape)) {
            throw Error(ErrorCode::ValidationError, "genlogistic shape must be positive");
        }
        break;
    case Family::Uniform:
        if (!(c.lo < c.hi) || !std::isfinite(c.lo) || !std::isfinite(c.hi)) {
            throw Error(ErrorCode::ValidationError, "uniform component needs lo < hi");
        }
        break;
    case Family::PointMass:
        break;
    case Family::TruncatedGaussian:
        if (!(c.scale > 0.0) || !std::isfinite(c.scale)) {
            throw Error(ErrorCode::ValidationError, "component scale must be positive");
        }
        if (!(c.lo < c.hi) || !std::isfinite(c.lo) || !std::isfinite(c.hi)) {
            throw Error(ErrorCode::ValidationError, "truncated gaussian needs lo < hi");
        }
        break;
    }
}

} // namespace

DensitySpec::DensitySpec(std::vector<DensityComponent> components)
    : components_(std::move(components)) {
    if (components_.empty()) {
        throw Error(ErrorCode::ValidationError, "density needs at least one component");
    }
    double wsum = 0.0;
    for (const auto& c : components_) {
        validate_component(c);
        wsum += c.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "mixture weights sum to " << wsum << ", expected 1";
        throw Error(ErrorCode::WeightSumInvalid, os.str());
    }
}

DensitySpec DensitySpec::gaussian(double mean, double stddev) {
    DensityComponent c;
    c.family = Family::Gaussian;
    c.loc = mean;
    c.scale = stddev;
    return DensitySpec({c});
}

DensitySpec DensitySpec::laplace(double loc, double scale) {
    DensityComponent c;
    c.family = Family::Laplace;
    c.loc = loc;
    c.scale = scale;
    return DensitySpec({c});
}

DensitySpec DensitySpec::genlogistic(double loc, double shape) {
    DensityComponent c;
    c.family = Family::GenLogistic;
    c.loc = loc;
    c.shape = shape;
    return DensitySpec({c});
}

DensitySpec DensitySpec::uniform(double lo, double hi) {
    DensityComponent c;
    c.family = Family::Uniform;
    c.lo = lo;
    c.hi = hi;
    return DensitySpec({c});
}

DensitySpec DensitySpec::cauchy(double loc, double scale) {
    DensityComponent c;
    c.family = Family::Cauchy;
    c.loc = loc;
    c.scale = scale;
    return DensitySpec({c});
}

DensitySpec DensitySpec::point_mass(double loc) {
    DensityComponent c;
    c.family = Family::PointMass;
    c.loc = loc;
    return DensitySpec({c});
}

DensitySpec DensitySpec::truncated_gaussian(double mean, double stddev, double lo, double hi) {
    DensityComponent c;
    c.family = Family::TruncatedGaussian;
    c.loc = mean;
    c.scale = stddev;
    c.lo = lo;
    c.hi = hi;
    return DensitySpec({c});
}

namespace {

double component_pdf(const DensityComponent& c, double x) {
    switch (c.family) {
    case Family::Gaussian:
        return std_normal_pdf((x - c.loc) / c.scale) / c.scale;
    case Family::Laplace:
        return std::exp(-std::abs(x - c.loc) / c.scale) / (2.0 * c.scale);
    case Family::GenLogistic: {
        // alpha * e^{-z} / (1 + e^{-z})^{alpha+1}; evaluate through logs to
        // stay finite deep in both tails.
        const double z = x - c.loc;
        const double lp = z < 0.0
                              ? std::log(c.shape) + c.shape * z -
                                    (c.shape + 1.0) * std::log1p(std::exp(z))
                              : std::log(c.shape) - z -
                                    (c.shape + 1.0) * std::log1p(std::exp(-z));
        return std::exp(lp);
    }
    case Family::Uniform:
        return (x >= c.lo && x <= c.hi) ? 1.0 / (c.hi - c.lo) : 0.0;
    case Family::Cauchy: {
        const double z = (x - c.loc) / c.scale;
        return 1.0 / (kPi * c.scale * (1.0 + z * z));
    }
    case Family::PointMass:
        throw Error(ErrorCode::UnsupportedFamily, "point mass has no density");
    case Family::TruncatedGaussian: {
        if (x < c.lo || x > c.hi) {
            return 0.0;
        }
        const double alpha = (c.lo - c.loc) / c.scale;
        const double beta = (c.hi - c.loc) / c.scale;
        const double z = std_normal_cdf(beta) - std_normal_cdf(alpha);
        return std_normal_pdf((x - c.loc) / c.scale) / (c.scale * z);
    }
    }
    throw Error(ErrorCode::UnsupportedFamily, "unknown density family");
}

} // namespace

double DensitySpec::pdf(double x) const {
    if (components_.empty()) {
        throw Error(ErrorCode::ValidationError, "empty density spec");
    }
    double p = 0.0;
    for (const auto& c : components_) {
        p += c.weight * component_pdf(c, x);
    }
    return p;
}

Support DensitySpec::support() const {
    bool bounded = true;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& c : components_) {
        switch (c.family) {
        case Family::Uniform:
        case Family::TruncatedGaussian:
            lo = std::min(lo, c.lo);
            hi = std::max(hi, c.hi);
            break;
        case Family::PointMass:
            lo = std::min(lo, c.loc);
            hi = std::max(hi, c.loc);
            break;
        default:
            bounded = false;
            break;
        }
        if (!bounded) {
            break;
        }
    }
    if (!bounded || !(lo < hi)) {
        return Support::real_line();
    }
    return Support::interval(lo, hi);
}

double gaussian_tail_radius(double tail_mass) {
    if (!(tail_mass > 0.0 && tail_mass < 1.0)) {
        throw Error(ErrorCode::ValidationError, "tail mass must lie in (0,1)");
    }
    // two-sided mass outside [-z, z] is erfc(z / sqrt(2)); bisect for z
    double lo = 0.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (std::erfc(mid / kSqrt2) > tail_mass) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Support DensitySpec::effective_support(double tail_mass) const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& c : components_) {
        double clo = 0.0, chi = 0.0;
        switch (c.family) {
        case Family::Gaussian: {
            const double r = c.scale * gaussian_tail_radius(tail_mass);
            clo = c.loc - r;
            chi = c.loc + r;
            break;
        }
        case Family::Laplace: {
            const double r = c.scale * std::log(1.0 / tail_mass);
            clo = c.loc - r;
            chi = c.loc + r;
            break;
        }
        case Family::GenLogistic: {
            // CDF is (1 + e^{-(x-loc)})^{-alpha}
            const double half = 0.5 * tail_mass;
            clo = c.loc - std::log(std::pow(half, -1.0 / c.shape) - 1.0);
            chi = c.loc - std::log(std::expm1(-std::log1p(-half) / c.shape));
            break;
        }
        case Family::Uniform:
        case Family::TruncatedGaussian:
            clo = c.lo;
            chi = c.hi;
            break;
        case Family::Cauchy: {
            const double r = c.scale / std::tan(0.5 * kPi * tail_mass);
            clo = c.loc - r;
            chi = c.loc + r;
            break;
        }
        case Family::PointMass:
            clo = chi = c.loc;
            break;
        }
        lo = std::min(lo, clo);
        hi = std::max(hi, chi);
    }
    if (!(lo < hi)) {
        // degenerate (single point mass); widen a hair so grids are valid
        lo -= 0.5;
        hi += 0.5;
    }
    return Support::interval(lo, hi);
}

bool DensitySpec::has_finite_moments() const {
    for (const auto& c : components_) {
        if (c.family == Family::Cauchy) {
            return false;
        }
    }
    return true;
}

namespace {

double double_factorial_odd(int j) {
    // (j-1)!! for even j
    double v = 1.0;
    for (int i = j - 1; i >= 1; i -= 2) {
        v *= i;
    }
    return v;
}

double factorial(int j) {
    double v = 1.0;
    for (int i = 2; i <= j; ++i) {
        v *= i;
    }
    return v;
}

// Raw moment of loc + X where X has central-free standard moments std_mom.
double shifted_moment(double loc, const std::vector<double>& std_mom, double scale, int l) {
    double m = 0.0;
    for (int j = 0; j <= l; ++j) {
        m += binomial(l, j) * std::pow(loc, l - j) * std::pow(scale, j) * std_mom[j];
    }
    return m;
}

double component_moment(const DensityComponent& c, int l) {
    switch (c.family) {
    case Family::Gaussian: {
        std::vector<double> z(l + 1);
        for (int j = 0; j <= l; ++j) {
            z[j] = (j % 2 == 0) ? double_factorial_odd(j) : 0.0;
        }
        return shifted_moment(c.loc, z, c.scale, l);
    }
    case Family::Laplace: {
        std::vector<double> w(l + 1);
        for (int j = 0; j <= l; ++j) {
            w[j] = (j % 2 == 0) ? factorial(j) : 0.0;
        }
        return shifted_moment(c.loc, w, c.scale, l);
    }
    case Family::GenLogistic: {
        if (l > 4) {
            throw Error(ErrorCode::UnsupportedFamily,
                        "genlogistic moments implemented up to order 4");
        }
        // cumulants of the standard (loc = 0) variate via polygamma
        const double a = c.shape;
        const double k1 = boost::math::digamma(a) + 0.57721566490153286060651209;
        const double k2 = boost::math::polygamma(1, a) + boost::math::polygamma(1, 1.0);
        const double k3 = boost::math::polygamma(2, a) - boost::math::polygamma(2, 1.0);
        const double k4 = boost::math::polygamma(3, a) + boost::math::polygamma(3, 1.0);
        std::vector<double> g(5);
        g[0] = 1.0;
        g[1] = k1;
        g[2] = k2 + k1 * k1;
        g[3] = k3 + 3.0 * k2 * k1 + k1 * k1 * k1;
        g[4] = k4 + 4.0 * k3 * k1 + 3.0 * k2 * k2 + 6.0 * k2 * k1 * k1 + std::pow(k1, 4);
        g.resize(l + 1);
        return shifted_moment(c.loc, g, 1.0, l);
    }
    case Family::Uniform: {
        // (hi^{l+1} - lo^{l+1}) / ((l+1)(hi - lo))
        double s = 0.0;
        // stable form: average of the geometric sum lo^i hi^{l-i}
        for (int i = 0; i <= l; ++i) {
            s += std::pow(c.lo, i) * std::pow(c.hi, l - i);
        }
        return s / (l + 1);
    }
    case Family::Cauchy:
        throw Error(ErrorCode::UnsupportedFamily, "cauchy has no finite moments");
    case Family::PointMass:
        return std::pow(c.loc, l);
    case Family::TruncatedGaussian: {
        const double alpha = (c.lo - c.loc) / c.scale;
        const double beta = (c.hi - c.loc) / c.scale;
        const double z = std_normal_cdf(beta) - std_normal_cdf(alpha);
        if (!(z > 1e-300)) {
            throw Error(ErrorCode::ValidationError,
                        "truncated gaussian keeps essentially no mass");
        }
        // recursion M_l = (l-1) M_{l-2} - (beta^{l-1} phi(beta) - alpha^{l-1} phi(alpha)) / z
        std::vector<double> m(l + 1);
        m[0] = 1.0;
        for (int i = 1; i <= l; ++i) {
            const double boundary =
                (std::pow(beta, i - 1) * std_normal_pdf(beta) -
                 std::pow(alpha, i - 1) * std_normal_pdf(alpha)) /
                z;
            m[i] = (i >= 2 ? (i - 1) * m[i - 2] : 0.0) - boundary;
        }
        return shifted_moment(c.loc, m, c.scale, l);
    }
    }
    throw Error(ErrorCode::UnsupportedFamily, "unknown density family");
}

} // namespace

MomentSequence moments_of_density(const DensitySpec& d, int order) {
    if (order < 1) {
        throw Error(ErrorCode::OrderMismatch, "moment order must be at least 1");
    }
    Eigen::VectorXd v(2 * order);
    for (int l = 1; l <= 2 * order; ++l) {
        double m = 0.0;
        for (const auto& c : d.components()) {
            m += c.weight * component_moment(c, l);
        }
        v(l - 1) = m;
    }
    return MomentSequence(order, std::move(v));
}

MomentSequence moments_of_samples(std::span<const double> samples, int order) {
    if (samples.empty()) {
        throw Error(ErrorCode::EmptyEnsemble, "cannot take moments of an empty sample set");
    }
    if (order < 1) {
        throw Error(ErrorCode::OrderMismatch, "moment order must be at least 1");
    }
    std::vector<long double> acc(2 * order, 0.0L);
    for (double x : samples) {
        long double p = 1.0L;
        for (int l = 0; l < 2 * order; ++l) {
            p *= x;
            acc[l] += p;
        }
    }
    Eigen::VectorXd v(2 * order);
    for (int l = 0; l < 2 * order; ++l) {
        v(l) = static_cast<double>(acc[l] / static_cast<long double>(samples.size()));
    }
    return MomentSequence(order, std::move(v));
}

double binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) {
        return 0.0;
    }
    // Pascal triangle; n stays tiny (at most 2 * max moment order)
    static constexpr int kMax = 40;
    static const auto table = [] {
        std::array<std::array<double, kMax + 1>, kMax + 1> t{};
        for (int i = 0; i <= kMax; ++i) {
            t[i][0] = 1.0;
            for (int j = 1; j <= i; ++j) {
                t[i][j] = t[i - 1][j - 1] + (j <= i - 1 ? t[i - 1][j] : 0.0);
            }
        }
        return t;
    }();
    if (n <= kMax) {
        return table[n][k];
    }
    double v = 1.0;
    for (int i = 1; i <= k; ++i) {
        v = v * (n - k + i) / i;
    }
    return v;
}

} // namespace msteer
