#pragma once

#include "kkt.hpp"
#include "model.hpp"
#include "parabolic.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace parakkt {

struct CriticalDirection {
    Field v;   // control perturbation
    Field y;   // linearized state of v
    bool c1_satisfied = false;
    double c1_value = 0.0;       // sum W (L_y y + L_u v)
    double c2_residual = 0.0;    // residual of the linearized equation
    double c3_violation = 0.0;   // max(0, g_y y + g_u v) over nodes with g >= -tol_feas
    bool negated = false;
};

inline constexpr double tol_c1 = 1e-8;
inline constexpr double tol_c2 = 1e-10;
inline constexpr double tol_c3 = 1e-8;

/// Second variation of the Lagrangian along (y, v):
///   sum W [L_yy y^2 + 2 L_yu y v + L_uu v^2 + e (g_yy y^2 + 2 g_yu y v + g_uu v^2)
///          + phi f''(ybar) y^2],
/// all partials taken at the point's (y, u).
double quadratic_form(const Model& model, const KKTPoint& point, const Field& y, const Field& v);

/// Recomputes c1_value, c1_satisfied, c2_residual and c3_violation of `dir`
/// from its fields.
void measure_direction(const Model& model, const KKTPoint& point, CriticalDirection& dir);

/// Smooth random field: a few low sine modes in space times cosine modes in
/// time, scaled to max norm 1. Deterministic in (seed, stream).
Field smooth_random_field(const Grid& grid, std::uint64_t seed, std::uint64_t stream);

/// Draws a smooth v and projects it twice towards the critical cone, negating
/// once if the first-order condition fails. Solver error if the tangent
/// condition is still violated by more than 1e-6.
CriticalDirection sample_critical_direction(const Model& model, const KKTPoint& point,
                                            std::uint64_t seed, const SolverOptions& opts = {});

struct LegendreResult {
    double min = 0.0;
    int level = 0;
    std::size_t node = 0;
    Point x{};
    double t = 0.0;
};

/// Minimum of L_uu + e g_uu over all nodes.
LegendreResult legendre_min(const Model& model, const KKTPoint& point);

struct GrowthTrial {
    int trial = 0;
    double ratio = 0.0;
    double norm_du = 0.0;
    bool feasible = false;
};

struct GrowthResult {
    double kappa_hat = 0.0;
    std::vector<GrowthTrial> trials;
    int dropped = 0;

    /// trial,ratio,norm_du,feasible
    std::string to_csv() const;
};

/// Perturbs u by smooth fields of max norm `radius`, restores feasibility and
/// records (J - Jbar) / ||u - ubar||^2. Trials that stay infeasible or collapse
/// below 1e-8 in norm are dropped.
GrowthResult quadratic_growth_probe(const Model& model, const KKTPoint& point, int n_trials,
                                    double radius, std::uint64_t seed,
                                    const SolverOptions& opts = {});

} // namespace parakkt
