#include "msteer/moment_system.hpp"

#include <cmath>
#include <sstream>

namespace msteer {

namespace {

void check_coefficient(double a) {
    // the moment recursion itself is valid for any a; the stability
    // assumption a in (0,1) is reported, not enforced
    if (!(a > 0.0 && a < 1.0)) {
        std::ostringstream os;
        os << "dynamics coefficient " << a << " outside the stable range (0,1)";
        warn(os.str());
    }
}

void check_same_order(const MomentSequence& x, const MomentSequence& u) {
    if (x.order() != u.order()) {
        std::ostringstream os;
        os << "moment orders differ: " << x.order() << " vs " << u.order();
        throw Error(ErrorCode::OrderMismatch, os.str());
    }
}

} // namespace

SystemSchedule::SystemSchedule(int horizon_, int order_, std::vector<double> coeffs_)
    : horizon(horizon_), order(order_), coeffs(std::move(coeffs_)) {
    if (horizon < 1 || order < 1) {
        throw Error(ErrorCode::ValidationError, "horizon and order must be positive");
    }
    if (static_cast<int>(coeffs.size()) != horizon) {
        std::ostringstream os;
        os << "need exactly " << horizon << " coefficients, got " << coeffs.size();
        throw Error(ErrorCode::ValidationError, os.str());
    }
    for (double a : coeffs) {
        if (!(a > 0.0 && a < 1.0)) {
            std::ostringstream os;
            os << "coefficient " << a << " outside (0,1)";
            throw Error(ErrorCode::ValidationError, os.str());
        }
    }
}

Eigen::MatrixXd build_system_matrix(const MomentSequence& u_moms, double a, int order) {
    if (u_moms.order() != order) {
        throw Error(ErrorCode::OrderMismatch, "control moments do not match requested order");
    }
    check_coefficient(a);
    const int dim = 2 * order;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (int l = 1; l <= dim; ++l) {
        for (int j = 1; j <= l; ++j) {
            m(l - 1, j - 1) = binomial(l, j) * std::pow(a, j) * u_moms.moment(l - j);
        }
    }
    return m;
}

MomentSequence propagate(const MomentSequence& x_moms, const MomentSequence& u_moms, double a) {
    check_same_order(x_moms, u_moms);
    check_coefficient(a);
    const int dim = x_moms.length();
    Eigen::VectorXd next(dim);
    for (int l = 1; l <= dim; ++l) {
        double s = 0.0;
        for (int j = 0; j <= l; ++j) {
            s += binomial(l, j) * std::pow(a, j) * x_moms.moment(j) * u_moms.moment(l - j);
        }
        next(l - 1) = s;
    }
    return MomentSequence(x_moms.order(), std::move(next));
}

MomentSequence propagate_uncontrolled(const MomentSequence& x_moms, double a) {
    check_coefficient(a);
    const int dim = x_moms.length();
    Eigen::VectorXd next(dim);
    for (int l = 1; l <= dim; ++l) {
        next(l - 1) = std::pow(a, l) * x_moms.moment(l);
    }
    return MomentSequence(x_moms.order(), std::move(next));
}

MomentSequence solve_control_moments(const MomentSequence& x_now, const MomentSequence& x_next,
                                     double a) {
    check_same_order(x_now, x_next);
    check_coefficient(a);
    const int dim = x_now.length();
    Eigen::VectorXd u(dim);
    auto u_at = [&](int l) { return l == 0 ? 1.0 : u(l - 1); };
    for (int l = 1; l <= dim; ++l) {
        double s = 0.0;
        for (int j = 1; j <= l; ++j) {
            s += binomial(l, j) * std::pow(a, j) * x_now.moment(j) * u_at(l - j);
        }
        u(l - 1) = x_next.moment(l) - s;
    }
    return MomentSequence(x_now.order(), std::move(u));
}

} // namespace msteer
