#pragma once

#include "grid.hpp"
#include "problem.hpp"

#include <Eigen/SparseCore>

namespace parakkt {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct DiscreteOperator {
    SparseMatrix matrix;
    bool adjoint = false;
};

/// Divergence-form finite differences for A y = -sum_ij D_j(a_ij D_i y) on the
/// interior nodes. Diagonal coefficients live on faces (arithmetic mean of the
/// two nodal values); the mixed terms come from cell-centred gradients with
/// the cell average of a_12, a_21, which keeps the matrix symmetric when a is.
/// With adjoint set the transpose is returned.
DiscreteOperator assemble_operator(const ProblemSpec& spec, const SpatialGrid& grid,
                                   bool adjoint = false);

} // namespace parakkt
