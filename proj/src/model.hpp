#pragma once

#include "discrete_operator.hpp"
#include "grid.hpp"
#include "problem.hpp"

#include <vector>

namespace parakkt {

/// A problem bound to a grid: operator, weights and node coordinates, built
/// once and shared by every solver.
class Model {
public:
    Model(ProblemSpec spec, const Grid& grid);

    const ProblemSpec& spec() const { return spec_; }
    const Grid& grid() const { return grid_; }
    const SparseMatrix& A() const { return op_.matrix; }
    const Field& weights() const { return weights_; }
    const Point& x(std::size_t i) const { return coords_[i]; }
    double t(int j) const { return grid_.time.t(j); }
    double tau() const { return grid_.time.tau(); }
    std::size_t nodes() const { return grid_.nodes(); }
    int levels() const { return grid_.levels(); }

    /// y0 at the interior nodes.
    Eigen::VectorXd initial_state() const;

    /// Pointwise evaluation of a map at node (j, i).
    double eval(const PointwiseMap& m, int j, std::size_t i, double y, double u) const
    {
        return m(coords_[i], t(j), y, u);
    }

private:
    ProblemSpec spec_;
    Grid grid_;
    DiscreteOperator op_;
    Field weights_;
    std::vector<Point> coords_;
};

} // namespace parakkt
