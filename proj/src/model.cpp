#include "model.hpp"

#include "common.hpp"

namespace parakkt {

Model::Model(ProblemSpec spec, const Grid& grid)
    : spec_(std::move(spec)), grid_(grid), op_(assemble_operator(spec_, grid.space)),
      weights_(quadrature_weights(grid))
{
    if (grid.space.extent(0) != spec_.extent[0] ||
        (spec_.dim == 2 && grid.space.extent(1) != spec_.extent[1]) ||
        grid.time.horizon() != spec_.horizon)
        fail(ErrorKind::config, "grid does not match the problem domain");
    coords_.reserve(grid.nodes());
    for (std::size_t i = 0; i < grid.nodes(); ++i)
        coords_.push_back(grid.space.coord(i));
}

Eigen::VectorXd Model::initial_state() const
{
    Eigen::VectorXd y0(static_cast<Eigen::Index>(nodes()));
    for (std::size_t i = 0; i < nodes(); ++i)
        y0[static_cast<Eigen::Index>(i)] = spec_.y0(coords_[i]);
    return y0;
}

} // namespace parakkt
