#include "msteer/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace msteer {

void gauss_legendre(int points, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
    if (points < 1) {
        throw Error(ErrorCode::ValidationError, "quadrature panel needs at least one point");
    }
    nodes.resize(points);
    weights.resize(points);
    const int half = (points + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Newton refinement from the Chebyshev-like initial guess
        double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= points; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = points * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                break;
            }
        }
        nodes(i) = -x;
        nodes(points - 1 - i) = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights(i) = w;
        weights(points - 1 - i) = w;
    }
    if (points % 2 == 1) {
        nodes(half - 1) = 0.0;
    }
}

namespace {

constexpr int kPanelPoints = 16;

const Eigen::VectorXd& panel_nodes() {
    static const Eigen::VectorXd n = [] {
        Eigen::VectorXd nn, ww;
        gauss_legendre(kPanelPoints, nn, ww);
        return nn;
    }();
    return n;
}

const Eigen::VectorXd& panel_weights() {
    static const Eigen::VectorXd w = [] {
        Eigen::VectorXd nn, ww;
        gauss_legendre(kPanelPoints, nn, ww);
        return ww;
    }();
    return w;
}

} // namespace

QuadratureGrid make_interval_grid(double lo, double hi, int node_count) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw Error(ErrorCode::ValidationError, "integration interval needs finite lo < hi");
    }
    if (node_count < 1) {
        throw Error(ErrorCode::ValidationError, "node count must be positive");
    }
    const int panels = (node_count + kPanelPoints - 1) / kPanelPoints;
    const int total = panels * kPanelPoints;
    QuadratureGrid grid;
    grid.nodes.resize(total);
    grid.weights.resize(total);
    grid.domain = Support::interval(lo, hi);
    const double width = (hi - lo) / panels;
    const auto& pn = panel_nodes();
    const auto& pw = panel_weights();
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * width;
        const double mid = a + 0.5 * width;
        for (int i = 0; i < kPanelPoints; ++i) {
            grid.nodes(p * kPanelPoints + i) = mid + 0.5 * width * pn(i);
            grid.weights(p * kPanelPoints + i) = 0.5 * width * pw(i);
        }
    }
    return grid;
}

} // namespace msteer
