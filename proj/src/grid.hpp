#pragma once

#include "problem.hpp"

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <vector>

namespace parakkt {

/// Uniform tensor grid on the box (0, extent_1) x (0, extent_2). Nodes per
/// axis include the two boundary nodes; only interior nodes carry unknowns,
/// numbered lexicographically with x1 fastest.
class SpatialGrid {
public:
    SpatialGrid() = default;
    SpatialGrid(int dim, std::array<int, 2> nodes, std::array<double, 2> extent);

    int dim() const { return dim_; }
    int nodes(int axis) const { return nodes_[axis]; }
    double extent(int axis) const { return extent_[axis]; }
    double spacing(int axis) const { return h_[axis]; }
    /// Interior nodes along an axis (1 along the unused second axis in 1D).
    int interior(int axis) const { return axis < dim_ ? nodes_[axis] - 2 : 1; }
    std::size_t size() const { return static_cast<std::size_t>(interior(0)) * interior(1); }

    /// Zero-based interior multi-index of a flat interior index.
    std::array<int, 2> multi_index(std::size_t i) const;
    std::size_t flat_index(int i1, int i2) const;
    Point coord(std::size_t i) const;
    /// Position of the node with full (boundary-inclusive) indices.
    Point node_coord(int k1, int k2) const;
    double volume() const;
    double diameter() const;
    /// Smallest spacing over the used axes.
    double min_spacing() const;

    bool operator==(const SpatialGrid& o) const
    {
        return dim_ == o.dim_ && nodes_ == o.nodes_ && extent_ == o.extent_;
    }
    bool operator!=(const SpatialGrid& o) const { return !(*this == o); }

private:
    int dim_ = 1;
    std::array<int, 2> nodes_{3, 1};
    std::array<double, 2> extent_{1.0, 1.0};
    std::array<double, 2> h_{0.5, 1.0};
};

class TimeGrid {
public:
    TimeGrid() = default;
    TimeGrid(int levels, double horizon);

    int levels() const { return levels_; }
    int steps() const { return levels_ - 1; }
    double horizon() const { return horizon_; }
    double tau() const { return tau_; }
    double t(int j) const { return j == levels_ - 1 ? horizon_ : j * tau_; }

    bool operator==(const TimeGrid& o) const
    {
        return levels_ == o.levels_ && horizon_ == o.horizon_;
    }
    bool operator!=(const TimeGrid& o) const { return !(*this == o); }

private:
    int levels_ = 2;
    double horizon_ = 1.0;
    double tau_ = 1.0;
};

struct Grid {
    SpatialGrid space;
    TimeGrid time;

    /// Grid matching a problem's domain; nodes[1] is ignored in 1D.
    static Grid for_problem(const ProblemSpec& spec, std::array<int, 2> nodes, int levels);

    std::size_t nodes() const { return space.size(); }
    int levels() const { return time.levels(); }
    std::size_t size() const { return space.size() * static_cast<std::size_t>(time.levels()); }

    bool operator==(const Grid& o) const { return space == o.space && time == o.time; }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

/// Scalar field on the interior space-time nodes, time-major.
class Field {
public:
    using Level = Eigen::Map<Eigen::VectorXd>;
    using ConstLevel = Eigen::Map<const Eigen::VectorXd>;

    Field() = default;
    explicit Field(const Grid& grid, double fill = 0.0);

    const Grid& grid() const { return grid_; }
    std::size_t nodes() const { return grid_.nodes(); }
    int levels() const { return grid_.levels(); }
    std::size_t size() const { return values_.size(); }

    double& operator()(int j, std::size_t i) { return values_[j * nodes() + i]; }
    double operator()(int j, std::size_t i) const { return values_[j * nodes() + i]; }

    Level level(int j) { return Level(values_.data() + j * nodes(), static_cast<Eigen::Index>(nodes())); }
    ConstLevel level(int j) const
    {
        return ConstLevel(values_.data() + j * nodes(), static_cast<Eigen::Index>(nodes()));
    }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    Eigen::Map<Eigen::VectorXd> flat()
    {
        return {values_.data(), static_cast<Eigen::Index>(values_.size())};
    }
    Eigen::Map<const Eigen::VectorXd> flat() const
    {
        return {values_.data(), static_cast<Eigen::Index>(values_.size())};
    }

    double max_abs() const;
    bool all_finite() const;

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Throws a config error unless both fields live on the same grid.
void require_aligned(const Field& a, const Field& b, const char* where);

/// Interior-node spatial weights. Every interior node gets h per axis; the
/// half cells next to the boundary are absorbed into the first and last
/// interior node, so the weights integrate constants exactly.
Eigen::VectorXd spatial_weights(const SpatialGrid& grid);

/// Trapezoid weights in time.
Eigen::VectorXd time_weights(const TimeGrid& grid);

/// Tensor product of the two.
Field quadrature_weights(const Grid& grid);

/// Weighted inner product sum W a b.
double inner(const Field& a, const Field& b, const Field& weights);

struct FieldNorms {
    double l2 = 0.0;
    double linf = 0.0;
    double l2_time_l2_space = 0.0;
};

FieldNorms field_norms(const Field& field, const Field& weights);

/// Samples a space-time function at every interior node.
Field sample(const Grid& grid, const SpaceTimeMap& map);

} // namespace parakkt
