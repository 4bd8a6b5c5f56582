#include "msteer/realizer.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace msteer {

ReferenceDensity ReferenceDensity::gaussian(double mean, double stddev) {
    return {DensitySpec::gaussian(mean, stddev), Support::real_line()};
}

ReferenceDensity ReferenceDensity::truncated_gaussian(double mean, double stddev, double lo,
                                                      double hi) {
    return {DensitySpec::truncated_gaussian(mean, stddev, lo, hi), Support::interval(lo, hi)};
}

ReferenceDensity ReferenceDensity::uniform(double lo, double hi) {
    return {DensitySpec::uniform(lo, hi), Support::interval(lo, hi)};
}

ReferenceDensity ReferenceDensity::cauchy(double loc, double scale) {
    return {DensitySpec::cauchy(loc, scale), Support::real_line()};
}

namespace {

// composite gauss-legendre rule whose panels shrink geometrically toward both
// endpoints: a density on a closed interval may carry a steep boundary layer,
// and the log barrier needs nodes inside the layer so the denominator settles
// at a positive edge value instead of collapsing onto it
QuadratureGrid graded_interval_grid(double lo, double hi, int node_count) {
    constexpr double kEdgeFraction = 0.25;
    constexpr double kShrink = 0.25;
    constexpr int kLevels = 14;
    std::vector<double> cuts(kLevels + 1);
    cuts[0] = kEdgeFraction * (hi - lo);
    for (int j = 1; j <= kLevels; ++j) {
        cuts[j] = cuts[j - 1] * kShrink;
    }
    std::vector<QuadratureGrid> parts;
    auto edge_panel = [&parts](double a, double b) {
        // a panel narrower than double spacing contributes nothing
        if (b > a) {
            parts.push_back(make_interval_grid(a, b, 16));
        }
    };
    edge_panel(lo, lo + cuts[kLevels]);
    for (int j = kLevels; j > 0; --j) {
        edge_panel(lo + cuts[j], lo + cuts[j - 1]);
    }
    parts.push_back(make_interval_grid(lo + cuts[0], hi - cuts[0], node_count));
    for (int j = 1; j <= kLevels; ++j) {
        edge_panel(hi - cuts[j - 1], hi - cuts[j]);
    }
    edge_panel(hi - cuts[kLevels], hi);

    int total = 0;
    for (const QuadratureGrid& part : parts) {
        total += part.size();
    }
    QuadratureGrid grid;
    grid.nodes.resize(total);
    grid.weights.resize(total);
    int at = 0;
    for (const QuadratureGrid& part : parts) {
        grid.nodes.segment(at, part.size()) = part.nodes;
        grid.weights.segment(at, part.size()) = part.weights;
        at += part.size();
    }
    grid.domain = Support::interval(lo, hi);
    return grid;
}

} // namespace

QuadratureGrid make_grid(const Support& support, const ReferenceDensity& reference,
                         int node_count) {
    if (node_count < 64) {
        throw Error(ErrorCode::ValidationError, "grid needs at least 64 nodes");
    }
    if (support.bounded) {
        return graded_interval_grid(support.lo, support.hi, node_count);
    }
    switch (reference.family()) {
    case Family::Gaussian: {
        const double radius = reference.scale() * gaussian_tail_radius(1e-12);
        return make_interval_grid(reference.loc() - radius, reference.loc() + radius,
                                  node_count);
    }
    case Family::Cauchy: {
        // u = loc + scale*tan(theta) turns the slowly decaying integrand
        // into a smooth one; weights carry the jacobian scale/cos^2
        const double theta_max = 0.5 * std::numbers::pi * (1.0 - 1e-12);
        QuadratureGrid grid = make_interval_grid(-theta_max, theta_max, node_count);
        const double loc = reference.loc();
        const double scale = reference.scale();
        for (int i = 0; i < grid.size(); ++i) {
            const double theta = grid.nodes(i);
            const double c = std::cos(theta);
            grid.nodes(i) = loc + scale * std::tan(theta);
            grid.weights(i) *= scale / (c * c);
        }
        grid.domain = Support::interval(loc - scale * std::tan(theta_max),
                                        loc + scale * std::tan(theta_max));
        return grid;
    }
    case Family::Uniform:
    case Family::TruncatedGaussian:
        // these references are interval-supported themselves
        return graded_interval_grid(reference.support.lo, reference.support.hi, node_count);
    default:
        throw Error(ErrorCode::UnsupportedFamily,
                    "reference family unusable on an unbounded support");
    }
}

namespace {

// rows of powers z^0..z^n at each node, z = (u - center)/scale
Eigen::MatrixXd basis_matrix(const Eigen::VectorXd& nodes, int n, double center, double scale) {
    Eigen::MatrixXd b(nodes.size(), n + 1);
    for (Eigen::Index i = 0; i < nodes.size(); ++i) {
        const double z = (nodes(i) - center) / scale;
        b(i, 0) = 1.0;
        for (int t = 1; t <= n; ++t) {
            b(i, t) = b(i, t - 1) * z;
        }
    }
    return b;
}

Eigen::VectorXd quadratic_form_rows(const Eigen::MatrixXd& b, const Eigen::MatrixXd& lam) {
    return ((b * lam).cwiseProduct(b)).rowwise().sum();
}

Eigen::VectorXd reference_values(const ReferenceDensity& reference, const QuadratureGrid& grid) {
    Eigen::VectorXd r(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        r(i) = reference.pdf(grid.nodes(i));
    }
    return r;
}

void check_dims(const Eigen::MatrixXd& lambda, const HankelMatrix& sigma) {
    if (lambda.rows() != lambda.cols() || lambda.rows() < 2) {
        throw Error(ErrorCode::OrderMismatch, "lambda must be square of size n+1 >= 2");
    }
    if (sigma.rows() != lambda.rows() || sigma.cols() != lambda.cols()) {
        throw Error(ErrorCode::OrderMismatch, "lambda and sigma sizes differ");
    }
}

double target_moment(const HankelMatrix& sigma, int l) {
    const int n = static_cast<int>(sigma.rows()) - 1;
    const int i = l <= n ? 0 : l - n;
    return sigma(i, l - i);
}

} // namespace

double objective(const Eigen::MatrixXd& lambda, const HankelMatrix& sigma,
                 const ReferenceDensity& reference, const QuadratureGrid& grid) {
    check_dims(lambda, sigma);
    const int n = static_cast<int>(lambda.rows()) - 1;
    const Eigen::MatrixXd b = basis_matrix(grid.nodes, n, 0.0, 1.0);
    const Eigen::VectorXd q = quadratic_form_rows(b, lambda);
    double integral = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        if (!(q(i) > 0.0)) {
            std::ostringstream os;
            os << "B'LB non-positive at node " << i << " (u = " << grid.nodes(i) << ")";
            throw Error(ErrorCode::NotInteriorPoint, os.str());
        }
        integral += grid.weights(i) * reference.pdf(grid.nodes(i)) * std::log(q(i));
    }
    return (lambda * sigma).trace() - integral;
}

Eigen::MatrixXd gradient(const Eigen::MatrixXd& lambda, const HankelMatrix& sigma,
                         const ReferenceDensity& reference, const QuadratureGrid& grid) {
    check_dims(lambda, sigma);
    const int n = static_cast<int>(lambda.rows()) - 1;
    const Eigen::MatrixXd b = basis_matrix(grid.nodes, n, 0.0, 1.0);
    const Eigen::VectorXd q = quadratic_form_rows(b, lambda);
    Eigen::VectorXd scale(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        if (!(q(i) > 0.0)) {
            std::ostringstream os;
            os << "B'LB non-positive at node " << i << " (u = " << grid.nodes(i) << ")";
            throw Error(ErrorCode::NotInteriorPoint, os.str());
        }
        scale(i) = grid.weights(i) * reference.pdf(grid.nodes(i)) / q(i);
    }
    return sigma - b.transpose() * scale.asDiagonal() * b;
}

RationalDensity minimize(const HankelMatrix& sigma, const ReferenceDensity& reference,
                         const QuadratureGrid& grid, double tol) {
    if (sigma.rows() != sigma.cols() || sigma.rows() < 2) {
        throw Error(ErrorCode::SigmaNotPD, "sigma must be square of size n+1 >= 2");
    }
    if (std::abs(sigma(0, 0) - 1.0) > 1e-9) {
        throw Error(ErrorCode::SigmaNotPD, "sigma(0,0) must be the order-0 moment 1");
    }
    if (!is_strictly_positive(sigma, 0.0)) {
        throw Error(ErrorCode::SigmaNotPD, "sigma is not strictly positive definite");
    }
    const int n = static_cast<int>(sigma.rows()) - 1;

    // optimize in the shifted-scaled basis z = (u - center)/scale so the
    // Hessian stays well conditioned for off-center, wide targets
    const double center = sigma(0, 1);
    const double scale = std::sqrt(std::max(sigma(1, 1) - center * center, 1e-300));
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int d = 0; d <= n; ++d) {
        for (int j = 0; j <= d; ++j) {
            S(d, j) = binomial(d, j) * std::pow(-center, d - j) / std::pow(scale, d);
        }
    }
    const Eigen::MatrixXd sigma_std = S * sigma * S.transpose();
    const Eigen::MatrixXd S_inv =
        S.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n + 1, n + 1));

    Eigen::MatrixXd b = basis_matrix(grid.nodes, n, center, scale);
    Eigen::VectorXd rw = reference_values(reference, grid).cwiseProduct(grid.weights);

    // gauss-legendre nodes never touch interval endpoints, so a bounded
    // support gets zero-weight guard rows there: they join every positivity
    // check but drop out of all the weighted integrals, keeping the
    // quadratic form positive on the whole closed interval
    if (reference.support.bounded) {
        Eigen::Vector2d edges(reference.support.lo, reference.support.hi);
        const Eigen::MatrixXd be = basis_matrix(edges, n, center, scale);
        b.conservativeResize(b.rows() + 2, Eigen::NoChange);
        b.bottomRows(2) = be;
        rw.conservativeResize(rw.size() + 2);
        rw.tail(2).setZero();
    }
    const int rows = static_cast<int>(b.rows());

    // symmetric parametrization: one coordinate per upper-triangle entry
    struct Pair {
        int a, b;
        double mult;
    };
    std::vector<Pair> pairs;
    for (int i = 0; i <= n; ++i) {
        for (int j = i; j <= n; ++j) {
            pairs.push_back({i, j, i == j ? 1.0 : 2.0});
        }
    }
    const int np = static_cast<int>(pairs.size());
    Eigen::MatrixXd coord(rows, np);
    for (int p = 0; p < np; ++p) {
        coord.col(p) = pairs[p].mult * b.col(pairs[p].a).cwiseProduct(b.col(pairs[p].b));
    }

    auto objective_std = [&](const Eigen::MatrixXd& lam, const Eigen::VectorXd& q) {
        double integral = 0.0;
        for (int i = 0; i < rows; ++i) {
            if (rw(i) != 0.0) {
                integral += rw(i) * std::log(q(i));
            }
        }
        return (lam * sigma_std).trace() - integral;
    };

    Eigen::MatrixXd lam = Eigen::MatrixXd::Zero(n + 1, n + 1);
    lam(0, 0) = 1.0;
    Eigen::VectorXd q = quadratic_form_rows(b, lam);
    double J = objective_std(lam, q);

    constexpr int kMaxIterations = 2000;
    constexpr int kMaxHalvings = 60;
    bool converged = false;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        const Eigen::VectorXd inv_q = q.cwiseInverse();
        const Eigen::MatrixXd g_std =
            sigma_std - b.transpose() * rw.cwiseProduct(inv_q).asDiagonal() * b;
        const double gn = (S_inv * g_std * S_inv.transpose()).cwiseAbs().maxCoeff();
        if (gn < tol) {
            converged = true;
            break;
        }

        Eigen::VectorXd g(np);
        for (int p = 0; p < np; ++p) {
            g(p) = pairs[p].mult * g_std(pairs[p].a, pairs[p].b);
        }
        const Eigen::VectorXd hw = rw.cwiseProduct(inv_q).cwiseProduct(inv_q);
        Eigen::MatrixXd hess = coord.transpose() * hw.asDiagonal() * coord;
        hess.diagonal().array() += 1e-12;

        Eigen::VectorXd d = hess.ldlt().solve(-g);
        double slope = g.dot(d);
        if (!(slope < 0.0) || !d.allFinite()) {
            d = -g;
            slope = -g.squaredNorm();
        }
        Eigen::MatrixXd dir = Eigen::MatrixXd::Zero(n + 1, n + 1);
        for (int p = 0; p < np; ++p) {
            dir(pairs[p].a, pairs[p].b) = d(p);
            dir(pairs[p].b, pairs[p].a) = d(p);
        }

        // q is linear along the step, so the largest feasible t is exact; the
        // newton decrement damps early steps where the quadratic model is poor
        const Eigen::VectorXd dq = coord * d;
        double t_bound = std::numeric_limits<double>::infinity();
        for (int i = 0; i < rows; ++i) {
            if (dq(i) < 0.0) {
                t_bound = std::min(t_bound, -q(i) / dq(i));
            }
        }
        const double dec = std::sqrt(std::max(-slope, 0.0));
        double t = std::min({dec > 0.25 ? 1.0 / (1.0 + dec) : 1.0, 0.99 * t_bound, 1.0});
        const double noise = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(J));
        bool accepted = false;
        for (int h = 0; h < kMaxHalvings; ++h) {
            const Eigen::VectorXd q_try = q + t * dq;
            if (q_try.minCoeff() > 0.0) {
                const Eigen::MatrixXd lam_try = lam + t * dir;
                const double J_try = objective_std(lam_try, q_try);
                bool ok = std::isfinite(J_try) && J_try <= J + 1e-4 * t * slope;
                if (!ok && std::isfinite(J_try) && 1e-4 * t * dec * dec < noise) {
                    // the sufficient-decrease test cannot resolve changes below
                    // rounding noise in J; near convergence fall back to
                    // requiring the gradient itself to shrink
                    const Eigen::VectorXd inv_q_try = q_try.cwiseInverse();
                    const Eigen::MatrixXd g_try =
                        sigma_std - b.transpose() * rw.cwiseProduct(inv_q_try).asDiagonal() * b;
                    const double gn_try =
                        (S_inv * g_try * S_inv.transpose()).cwiseAbs().maxCoeff();
                    ok = gn_try <= (1.0 - 1e-4 * t) * gn;
                }
                if (ok) {
                    lam = lam_try;
                    // keep q from the line search instead of re-evaluating the
                    // quadratic form: re-evaluation rounding can flip tiny
                    // positive entries negative when an iterate passes near
                    // the boundary
                    q = q_try;
                    J = J_try;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!accepted) {
            throw Error(ErrorCode::LineSearchStalled,
                        "no acceptable step after 60 halvings (target near the moment "
                        "boundary or grid too coarse)");
        }
        if (q.minCoeff() < 1e-250) {
            throw Error(ErrorCode::LineSearchStalled,
                        "denominator collapsing onto the support boundary (the moments "
                        "demand edge mass the grid cannot resolve)");
        }
    }
    if (!converged) {
        throw Error(ErrorCode::MaxIterations, "gradient tolerance not reached in 2000 iterations");
    }

    RationalDensity p;
    p.reference = reference;
    p.grid = grid;
    p.center = center;
    p.scale = scale;
    p.lambda_std = 0.5 * (lam + lam.transpose());
    Eigen::MatrixXd mono = S.transpose() * lam * S;
    p.lambda = 0.5 * (mono + mono.transpose());
    p.normalization_check = rw.cwiseQuotient(q).sum();

    if (std::abs(p.normalization_check - 1.0) > 5e-7) {
        std::ostringstream os;
        os << "realized density integrates to " << p.normalization_check << ", not 1";
        throw Error(ErrorCode::MaxIterations, os.str());
    }
    const MomentSequence check = realized_moments(p, n);
    for (int l = 1; l <= 2 * n; ++l) {
        const double want = target_moment(sigma, l);
        const double got = check.moment(l);
        if (std::abs(got - want) > 1e-6 * (1.0 + std::abs(want))) {
            std::ostringstream os;
            os << "realized moment " << l << " is " << got << ", target " << want;
            throw Error(ErrorCode::MaxIterations, os.str());
        }
    }
    return p;
}

MomentSequence realized_moments(const RationalDensity& p, int order) {
    if (order < 1) {
        throw Error(ErrorCode::OrderMismatch, "moment order must be at least 1");
    }
    Eigen::VectorXd m = Eigen::VectorXd::Zero(2 * order);
    for (int i = 0; i < p.grid.size(); ++i) {
        const double u = p.grid.nodes(i);
        const double val = p.grid.weights(i) * evaluate(p, u);
        double pw = 1.0;
        for (int l = 0; l < 2 * order; ++l) {
            pw *= u;
            m(l) += val * pw;
        }
    }
    return MomentSequence(order, std::move(m));
}

double evaluate(const RationalDensity& p, double u) {
    if (p.support().bounded && !p.support().contains(u)) {
        std::ostringstream os;
        os << "u = " << u << " outside the support [" << p.support().lo << ", "
           << p.support().hi << "]";
        throw Error(ErrorCode::OutOfSupport, os.str());
    }
    const bool use_std = p.lambda_std.size() > 0;
    const Eigen::MatrixXd& lam = use_std ? p.lambda_std : p.lambda;
    const double z = use_std ? (u - p.center) / p.scale : u;
    const int n = static_cast<int>(lam.rows()) - 1;
    Eigen::VectorXd bz(n + 1);
    bz(0) = 1.0;
    for (int t = 1; t <= n; ++t) {
        bz(t) = bz(t - 1) * z;
    }
    const double q = bz.dot(lam * bz);
    if (!(q > 0.0)) {
        // the polynomial is positive on the grid hull; a dip can only occur
        // far outside where the reference mass is ~1e-12, so report zero
        return 0.0;
    }
    return p.reference.pdf(u) / q;
}

} // namespace msteer
