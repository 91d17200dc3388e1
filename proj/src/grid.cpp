#include "grid.hpp"

#include "common.hpp"

#include <algorithm>
#include <cmath>

namespace parakkt {

SpatialGrid::SpatialGrid(int dim, std::array<int, 2> nodes, std::array<double, 2> extent)
    : dim_(dim), nodes_(nodes), extent_(extent)
{
    if (dim != 1 && dim != 2)
        fail(ErrorKind::config, "grid: dim must be 1 or 2");
    if (dim == 1) {
        nodes_[1] = 1;
        extent_[1] = 1.0;
    }
    for (int k = 0; k < dim; ++k) {
        if (nodes_[k] < 3)
            fail(ErrorKind::config, "grid: need at least 3 nodes per axis");
        if (!(extent_[k] > 0.0) || !std::isfinite(extent_[k]))
            fail(ErrorKind::config, "grid: extents must be positive");
        h_[k] = extent_[k] / (nodes_[k] - 1);
    }
    if (dim == 1)
        h_[1] = 1.0;
}

std::array<int, 2> SpatialGrid::multi_index(std::size_t i) const
{
    const auto n1 = static_cast<std::size_t>(interior(0));
    return {static_cast<int>(i % n1), static_cast<int>(i / n1)};
}

std::size_t SpatialGrid::flat_index(int i1, int i2) const
{
    return static_cast<std::size_t>(i2) * interior(0) + i1;
}

Point SpatialGrid::coord(std::size_t i) const
{
    auto [i1, i2] = multi_index(i);
    return node_coord(i1 + 1, dim_ == 2 ? i2 + 1 : 0);
}

Point SpatialGrid::node_coord(int k1, int k2) const
{
    Point p{k1 == nodes_[0] - 1 ? extent_[0] : k1 * h_[0], 0.0};
    if (dim_ == 2)
        p[1] = k2 == nodes_[1] - 1 ? extent_[1] : k2 * h_[1];
    return p;
}

double SpatialGrid::volume() const
{
    return dim_ == 2 ? extent_[0] * extent_[1] : extent_[0];
}

double SpatialGrid::diameter() const
{
    return dim_ == 2 ? std::hypot(extent_[0], extent_[1]) : extent_[0];
}

double SpatialGrid::min_spacing() const
{
    return dim_ == 2 ? std::min(h_[0], h_[1]) : h_[0];
}

TimeGrid::TimeGrid(int levels, double horizon) : levels_(levels), horizon_(horizon)
{
    if (levels < 2)
        fail(ErrorKind::config, "grid: need at least 2 time levels");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        fail(ErrorKind::config, "grid: horizon must be positive");
    tau_ = horizon / (levels - 1);
}

Grid Grid::for_problem(const ProblemSpec& spec, std::array<int, 2> nodes, int levels)
{
    return {SpatialGrid(spec.dim, nodes, spec.extent), TimeGrid(levels, spec.horizon)};
}

Field::Field(const Grid& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

double Field::max_abs() const
{
    double m = 0.0;
    for (double v : values_)
        m = std::max(m, std::abs(v));
    return m;
}

bool Field::all_finite() const
{
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void require_aligned(const Field& a, const Field& b, const char* where)
{
    if (a.grid() != b.grid())
        fail(ErrorKind::config, std::string(where) + ": fields live on different grids");
}

namespace {

Eigen::VectorXd axis_weights(int interior, double h)
{
    Eigen::VectorXd w = Eigen::VectorXd::Constant(interior, h);
    w[0] += 0.5 * h;
    w[interior - 1] += 0.5 * h;
    return w;
}

} // namespace

Eigen::VectorXd spatial_weights(const SpatialGrid& grid)
{
    Eigen::VectorXd w1 = axis_weights(grid.interior(0), grid.spacing(0));
    if (grid.dim() == 1)
        return w1;
    Eigen::VectorXd w2 = axis_weights(grid.interior(1), grid.spacing(1));
    Eigen::VectorXd w(static_cast<Eigen::Index>(grid.size()));
    for (int i2 = 0; i2 < grid.interior(1); ++i2)
        for (int i1 = 0; i1 < grid.interior(0); ++i1)
            w[static_cast<Eigen::Index>(grid.flat_index(i1, i2))] = w1[i1] * w2[i2];
    return w;
}

Eigen::VectorXd time_weights(const TimeGrid& grid)
{
    Eigen::VectorXd w = Eigen::VectorXd::Constant(grid.levels(), grid.tau());
    w[0] *= 0.5;
    w[grid.levels() - 1] *= 0.5;
    return w;
}

Field quadrature_weights(const Grid& grid)
{
    Field w(grid);
    const Eigen::VectorXd wx = spatial_weights(grid.space);
    const Eigen::VectorXd wt = time_weights(grid.time);
    for (int j = 0; j < grid.levels(); ++j)
        w.level(j) = wt[j] * wx;
    return w;
}

double inner(const Field& a, const Field& b, const Field& weights)
{
    require_aligned(a, b, "inner");
    require_aligned(a, weights, "inner");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        s += weights.values()[k] * a.values()[k] * b.values()[k];
    return s;
}

FieldNorms field_norms(const Field& field, const Field& weights)
{
    require_aligned(field, weights, "field_norms");
    FieldNorms n;
    n.linf = field.max_abs();
    n.l2 = std::sqrt(inner(field, field, weights));

    const Grid& g = field.grid();
    const Eigen::VectorXd wx = spatial_weights(g.space);
    const Eigen::VectorXd wt = time_weights(g.time);
    double s = 0.0;
    for (int j = 0; j < g.levels(); ++j) {
        const double slice = (wx.array() * field.level(j).array().square()).sum();
        s += wt[j] * slice;
    }
    n.l2_time_l2_space = std::sqrt(s);
    return n;
}

Field sample(const Grid& grid, const SpaceTimeMap& map)
{
    Field f(grid);
    for (int j = 0; j < grid.levels(); ++j) {
        const double t = grid.time.t(j);
        for (std::size_t i = 0; i < grid.nodes(); ++i)
            f(j, i) = map(grid.space.coord(i), t);
    }
    return f;
}

} // namespace parakkt
