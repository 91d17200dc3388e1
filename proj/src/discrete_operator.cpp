#include "discrete_operator.hpp"

#include "common.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace parakkt {

namespace {

double coefficient(const ProblemSpec& spec, int i, int j, const Point& x)
{
    const double v = spec.coeff[i][j](x);
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os.precision(17);
        os << "assemble_operator: non-finite a" << i + 1 << j + 1 << " at (" << x[0] << ", " << x[1]
           << ")";
        fail(ErrorKind::config, os.str());
    }
    return v;
}

} // namespace

DiscreteOperator assemble_operator(const ProblemSpec& spec, const SpatialGrid& grid, bool adjoint)
{
    if (spec.dim != grid.dim())
        fail(ErrorKind::config, "assemble_operator: grid dimension differs from the problem");

    const int n1 = grid.nodes(0);
    const int n2 = grid.dim() == 2 ? grid.nodes(1) : 1;
    const double h1 = grid.spacing(0);
    const double h2 = grid.spacing(1);

    // Nodal coefficient values on the full grid, boundary included.
    auto nodal = [&](int i, int j) {
        std::vector<double> v(static_cast<std::size_t>(n1) * n2);
        for (int k2 = 0; k2 < n2; ++k2)
            for (int k1 = 0; k1 < n1; ++k1)
                v[k2 * n1 + k1] = coefficient(spec, i, j, grid.node_coord(k1, k2));
        return v;
    };

    // Interior flat index of a full-grid node, -1 on the boundary.
    auto interior = [&](int k1, int k2) -> long {
        if (k1 <= 0 || k1 >= n1 - 1)
            return -1;
        if (grid.dim() == 2 && (k2 <= 0 || k2 >= n2 - 1))
            return -1;
        return static_cast<long>(grid.flat_index(k1 - 1, grid.dim() == 2 ? k2 - 1 : 0));
    };

    std::vector<Eigen::Triplet<double>> trip;
    auto add = [&](long r, long c, double v) {
        if (r >= 0 && c >= 0)
            trip.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
    };

    // Diagonal terms: sum over faces of a_f (y_a - y_b)(z_a - z_b) / h^2.
    for (int axis = 0; axis < grid.dim(); ++axis) {
        const auto a = nodal(axis, axis);
        const double h = grid.spacing(axis);
        const int d1 = axis == 0 ? 1 : 0;
        const int d2 = axis == 1 ? 1 : 0;
        for (int k2 = 0; k2 + d2 < n2; ++k2)
            for (int k1 = 0; k1 + d1 < n1; ++k1) {
                const double af = 0.5 * (a[k2 * n1 + k1] + a[(k2 + d2) * n1 + k1 + d1]);
                const double w = af / (h * h);
                const long p = interior(k1, k2);
                const long q = interior(k1 + d1, k2 + d2);
                add(p, p, w);
                add(q, q, w);
                add(p, q, -w);
                add(q, p, -w);
            }
    }

    // Mixed terms from cell gradients. In a cell with corners
    // c0 = (k1,k2), c1 = (k1+1,k2), c2 = (k1,k2+1), c3 = (k1+1,k2+1):
    //   D1 y = (y1 - y0 + y3 - y2) / (2 h1),  D2 y = (y2 - y0 + y3 - y1) / (2 h2),
    // and the bilinear form adds a12 D1y D2z + a21 D2y D1z.
    if (grid.dim() == 2) {
        const auto a12 = nodal(0, 1);
        const auto a21 = nodal(1, 0);
        const double g1[4] = {-0.5 / h1, 0.5 / h1, -0.5 / h1, 0.5 / h1};
        const double g2[4] = {-0.5 / h2, -0.5 / h2, 0.5 / h2, 0.5 / h2};
        for (int k2 = 0; k2 + 1 < n2; ++k2)
            for (int k1 = 0; k1 + 1 < n1; ++k1) {
                const int idx[4] = {k2 * n1 + k1, k2 * n1 + k1 + 1, (k2 + 1) * n1 + k1,
                                    (k2 + 1) * n1 + k1 + 1};
                const long node[4] = {interior(k1, k2), interior(k1 + 1, k2),
                                      interior(k1, k2 + 1), interior(k1 + 1, k2 + 1)};
                double c12 = 0.0, c21 = 0.0;
                for (int r = 0; r < 4; ++r) {
                    c12 += 0.25 * a12[idx[r]];
                    c21 += 0.25 * a21[idx[r]];
                }
                if (c12 == 0.0 && c21 == 0.0)
                    continue;
                // Row r tests with z = e_r, column s is the unknown y_s. The
                // bilinear form is scaled by the cell area and divided by the
                // nodal mass h1 h2, so the factor cancels.
                for (int r = 0; r < 4; ++r)
                    for (int s = 0; s < 4; ++s)
                        add(node[r], node[s], c12 * g1[s] * g2[r] + c21 * g2[s] * g1[r]);
            }
    }

    DiscreteOperator op;
    op.adjoint = adjoint;
    const auto n = static_cast<Eigen::Index>(grid.size());
    SparseMatrix a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    a.makeCompressed();
    if (adjoint) {
        SparseMatrix at = a.transpose();
        at.makeCompressed();
        op.matrix = std::move(at);
    } else {
        op.matrix = std::move(a);
    }
    return op;
}

} // namespace parakkt
