#include "msteer/maxent.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace msteer {

double MaxEntDensity::evaluate(double x) const {
    const bool use_std = lambdas_std.size() > 0;
    const Eigen::VectorXd& lam = use_std ? lambdas_std : lambdas;
    const double z = use_std ? (x - center) / scale : x;
    double poly = 0.0;
    double pw = 1.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        poly += lam(i) * pw;
        pw *= z;
    }
    const double v = std::exp(-poly);
    return use_std ? v / scale : v;
}

MaxEntDensity fit_maxent(const MomentSequence& m, const Support& support, double tol) {
    if (!is_strictly_positive(hankel_of(m), 0.0)) {
        throw Error(ErrorCode::MomentsInfeasible,
                    "moment sequence has no strictly positive Hankel matrix");
    }
    const int n = m.order();
    const int dim = 2 * n + 1; // lambda_0 .. lambda_2n

    const double center = m.moment(1);
    const double scale = std::sqrt(std::max(m.moment(2) - center * center, 1e-300));

    QuadratureGrid grid;
    if (support.bounded) {
        grid = make_interval_grid(support.lo, support.hi, 512);
    } else {
        // same truncation policy as the realizer reference grids
        const double radius = 2.0 * scale * gaussian_tail_radius(1e-12);
        grid = make_interval_grid(center - radius, center + radius, 512);
    }

    // standardized targets mt_d = E[((x-center)/scale)^d]
    Eigen::VectorXd mt(dim);
    for (int d = 0; d < dim; ++d) {
        double s = 0.0;
        for (int j = 0; j <= d; ++j) {
            s += binomial(d, j) * std::pow(-center, d - j) * m.moment(j);
        }
        mt(d) = s / std::pow(scale, d);
    }

    // powers of z at the nodes, weighted by the jacobian of the change of
    // variable (dx = scale dz is folded into the weights)
    Eigen::MatrixXd zp(grid.size(), dim);
    Eigen::VectorXd w(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        const double z = (grid.nodes(i) - center) / scale;
        zp(i, 0) = 1.0;
        for (int d = 1; d < dim; ++d) {
            zp(i, d) = zp(i, d - 1) * z;
        }
        w(i) = grid.weights(i) / scale;
    }

    auto density_values = [&](const Eigen::VectorXd& lam) -> Eigen::VectorXd {
        Eigen::VectorXd e = (-(zp * lam).array()).exp();
        return e;
    };
    auto dual_value = [&](const Eigen::VectorXd& lam, const Eigen::VectorXd& dens) {
        return w.dot(dens) + lam.dot(mt);
    };

    // start from the standard gaussian in z
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(dim);
    lam(0) = 0.5 * std::log(2.0 * std::numbers::pi);
    if (dim > 2) {
        lam(2) = 0.5;
    }

    Eigen::VectorXd dens = density_values(lam);
    double F = dual_value(lam, dens);
    if (!std::isfinite(F)) {
        throw Error(ErrorCode::MaxIterations, "dual objective not finite at the start");
    }

    constexpr int kMaxIterations = 200;
    bool converged = false;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        const Eigen::VectorXd wd = w.cwiseProduct(dens);
        const Eigen::VectorXd grad = mt - zp.transpose() * wd;
        if (grad.cwiseAbs().maxCoeff() < tol) {
            converged = true;
            break;
        }
        Eigen::MatrixXd hess = zp.transpose() * wd.asDiagonal() * zp;
        hess.diagonal().array() += 1e-13;
        Eigen::VectorXd d = hess.ldlt().solve(-grad);
        double slope = grad.dot(d);
        if (!(slope < 0.0) || !d.allFinite()) {
            d = -grad;
            slope = -grad.squaredNorm();
        }
        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h < 60; ++h) {
            const Eigen::VectorXd lam_try = lam + t * d;
            const Eigen::VectorXd dens_try = density_values(lam_try);
            const double F_try = dual_value(lam_try, dens_try);
            if (std::isfinite(F_try) && F_try <= F + 1e-4 * t * slope) {
                lam = lam_try;
                dens = dens_try;
                F = F_try;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            throw Error(ErrorCode::MaxIterations, "dual line search stalled");
        }
    }
    if (!converged) {
        throw Error(ErrorCode::MaxIterations,
                    "max-entropy dual did not converge in 200 iterations");
    }

    MaxEntDensity out;
    out.support = grid.domain;
    out.center = center;
    out.scale = scale;
    out.grid = grid;
    // the z-space density is exp(-sum lam z^d); in x-space divide by scale,
    // which lands in lambda_0 of the monomial expansion
    out.lambdas_std = lam;
    out.lambdas = Eigen::VectorXd::Zero(dim);
    for (int d = 0; d < dim; ++d) {
        for (int j = 0; j <= d; ++j) {
            out.lambdas(j) +=
                lam(d) * binomial(d, j) * std::pow(-center, d - j) / std::pow(scale, d);
        }
    }
    out.lambdas(0) += std::log(scale);

    // invariant checks: normalization and moment self-consistency
    double norm = 0.0;
    Eigen::VectorXd got = Eigen::VectorXd::Zero(2 * n);
    for (int i = 0; i < grid.size(); ++i) {
        const double x = grid.nodes(i);
        const double v = grid.weights(i) * out.evaluate(x);
        norm += v;
        double pw = 1.0;
        for (int l = 0; l < 2 * n; ++l) {
            pw *= x;
            got(l) += v * pw;
        }
    }
    if (std::abs(norm - 1.0) > 1e-8) {
        std::ostringstream os;
        os << "max-entropy density integrates to " << norm;
        throw Error(ErrorCode::MaxIterations, os.str());
    }
    for (int l = 1; l <= 2 * n; ++l) {
        if (std::abs(got(l - 1) - m.moment(l)) > 1e-6 * (1.0 + std::abs(m.moment(l)))) {
            std::ostringstream os;
            os << "max-entropy moment " << l << " is " << got(l - 1) << ", target "
               << m.moment(l);
            throw Error(ErrorCode::MaxIterations, os.str());
        }
    }
    return out;
}

namespace {

template <typename F>
double entropy_impl(F&& density, const QuadratureGrid& grid) {
    double h = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        const double q = density(grid.nodes(i));
        if (q > 1e-300) {
            h -= grid.weights(i) * q * std::log(q);
        }
    }
    return h;
}

} // namespace

double shannon_entropy(const MaxEntDensity& density, const QuadratureGrid& grid) {
    return entropy_impl([&](double x) { return density.evaluate(x); }, grid);
}

double shannon_entropy(const RationalDensity& density, const QuadratureGrid& grid) {
    return entropy_impl([&](double x) { return evaluate(density, x); }, grid);
}

double shannon_entropy(const DensitySpec& density, const QuadratureGrid& grid) {
    return entropy_impl([&](double x) { return density.pdf(x); }, grid);
}

double kl_via_entropy(double target_entropy, double maxent_entropy) {
    const double diff = maxent_entropy - target_entropy;
    if (diff < -1e-9) {
        std::ostringstream os;
        os << "max-entropy value " << maxent_entropy << " below target entropy "
           << target_entropy << "; the fit cannot dominate";
        throw Error(ErrorCode::EntropyOrderViolated, os.str());
    }
    return std::max(diff, 0.0);
}

double tv_from_kl(double kl) {
    if (!(kl >= 0.0)) {
        throw Error(ErrorCode::ValidationError, "kl divergence must be nonnegative");
    }
    return 3.0 * std::sqrt(-1.0 + std::sqrt(1.0 + (4.0 / 9.0) * kl));
}

namespace {

ErrorBoundReport assemble_report(double h_maxent, double h_terminal, double h_desired,
                                 bool clip_terminal_leg) {
    ErrorBoundReport rep;
    rep.H_maxent = h_maxent;
    rep.H_terminal = h_terminal;
    rep.H_desired = h_desired;
    rep.KL_desired = kl_via_entropy(h_desired, h_maxent);
    rep.KL_terminal = clip_terminal_leg ? std::max(h_maxent - h_terminal, 0.0)
                                        : kl_via_entropy(h_terminal, h_maxent);
    rep.TV_bound = tv_from_kl(rep.KL_terminal) + tv_from_kl(rep.KL_desired);
    return rep;
}

} // namespace

ErrorBoundReport terminal_error_bound(std::span<const double> terminal_samples,
                                      const DensitySpec& desired, int order,
                                      const Support& support) {
    const MomentSequence desired_m = moments_of_density(desired, order);
    const MaxEntDensity shared = fit_maxent(desired_m, support);
    const double h_maxent = shannon_entropy(shared, shared.grid);
    const double h_desired = shannon_entropy(desired, shared.grid);

    const MomentSequence empirical = moments_of_samples(terminal_samples, order);
    const MaxEntDensity terminal_fit = fit_maxent(empirical, support);
    const double h_terminal = shannon_entropy(terminal_fit, terminal_fit.grid);

    return assemble_report(h_maxent, h_terminal, h_desired, /*clip_terminal_leg=*/true);
}

ErrorBoundReport terminal_error_bound(const DensitySpec& terminal, const DensitySpec& desired,
                                      int order, const Support& support) {
    const MomentSequence desired_m = moments_of_density(desired, order);
    const MaxEntDensity shared = fit_maxent(desired_m, support);
    const double h_maxent = shannon_entropy(shared, shared.grid);
    const double h_desired = shannon_entropy(desired, shared.grid);
    const double h_terminal = shannon_entropy(terminal, shared.grid);
    return assemble_report(h_maxent, h_terminal, h_desired, /*clip_terminal_leg=*/false);
}

} // namespace msteer
