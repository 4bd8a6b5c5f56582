#pragma once

#include <Eigen/Dense>

#include "msteer/moments.hpp"

namespace msteer {

// Fixed integration grid: nodes, positive weights, and the interval that is
// actually covered.  Integration is a plain weighted sum in node order, so
// results are bit-reproducible.
struct QuadratureGrid {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
    Support domain;

    int size() const { return static_cast<int>(nodes.size()); }

    template <typename F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (int i = 0; i < nodes.size(); ++i) {
            s += weights(i) * f(nodes(i));
        }
        return s;
    }
};

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int points, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

// Composite Gauss-Legendre rule over [lo, hi].  node_count is rounded up to
// a whole number of 16-point panels.
QuadratureGrid make_interval_grid(double lo, double hi, int node_count);

} // namespace msteer
