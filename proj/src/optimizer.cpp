#include "optimizer.hpp"

#include "common.hpp"

#include <cmath>
#include <limits>

namespace parakkt {

void OptimizerOptions::validate() const
{
    if (max_outer < 1 || !(tol_kkt > 0.0) || max_halvings < 0)
        fail(ErrorKind::config, "optimizer options: max_outer, tol_kkt must be positive");
    if (!(c1 > 0.0 && c1 < 1.0) || !(backtrack > 0.0 && backtrack < 1.0))
        fail(ErrorKind::config, "optimizer options: c1 and backtrack factor must lie in (0, 1)");
    solver.validate();
}

std::string SolveTrace::to_csv() const
{
    std::string s = "iter,J,step,stat_res,comp_res,feas_viol,active_count\n";
    for (const auto& r : rows)
        s += std::to_string(r.iter) + "," + format17(r.J) + "," + format17(r.step) + "," +
             format17(r.stat_res) + "," + format17(r.comp_res) + "," + format17(r.feas_viol) + "," +
             std::to_string(r.active_count) + "\n";
    return s;
}

Field reduced_gradient(const Model& model, const Field& u, const SolverOptions& opts)
{
    const Field y = solve_state(model, u, opts).y;
    const Field phi = solve_adjoint(model, y, u, Field(model.grid()), opts);
    Field grad(model.grid());
    for (int j = 0; j < model.levels(); ++j)
        for (std::size_t i = 0; i < model.nodes(); ++i)
            grad(j, i) = model.eval(model.spec().L.du, j, i, y(j, i), u(j, i)) - phi(j, i);
    return grad;
}

double reduced_objective(const Model& model, const Field& u, const SolverOptions& opts)
{
    return objective(model, solve_state(model, u, opts).y, u);
}

FeasiblePair restore_feasibility(const Model& model, Field u, int passes, const SolverOptions& opts)
{
    for (int p = 0; p < passes; ++p) {
        const Field y = solve_state(model, u, opts).y;
        for (int j = 0; j < model.levels(); ++j)
            for (std::size_t i = 0; i < model.nodes(); ++i)
                u(j, i) = std::min(u(j, i),
                                   constraint_boundary(model.spec(), model.x(i), model.t(j), y(j, i)));
    }
    Field y = solve_state(model, u, opts).y;
    return {std::move(u), std::move(y)};
}

OcpResult solve_ocp(const Model& model, const OptimizerOptions& opts)
{
    opts.validate();
    const ProblemSpec& spec = model.spec();
    const Field& w = model.weights();
    if (opts.u_init && opts.u_init->grid() != model.grid())
        fail(ErrorKind::config, "solve_ocp: initial control lives on a different grid");

    auto [u, y] = restore_feasibility(model, opts.u_init ? *opts.u_init : Field(model.grid()), 2,
                                      opts.solver);
    Field e_lag(model.grid());
    OcpResult out;
    double J = objective(model, y, u);

    for (int iter = 0;; ++iter) {
        const Field phi = solve_adjoint(model, y, u, e_lag, opts.solver);
        Field u_new(model.grid()), e_new(model.grid());
        for (int j = 0; j < model.levels(); ++j)
            for (std::size_t i = 0; i < model.nodes(); ++i) {
                const auto upd = pointwise_control_update(spec, model.x(i), model.t(j), y(j, i), phi(j, i));
                u_new(j, i) = upd.u;
                e_new(j, i) = upd.e;
            }

        KKTPoint point{y, u, phi, e_new, J};
        ResidualReport res = kkt_residuals(model, point);
        const double eps_act = activity_threshold(e_new);
        TraceRow row{iter, J, 0.0, res.stat_res, res.comp_res, res.feas_viol, 0};
        for (double v : e_new.values())
            row.active_count += v > eps_act ? 1 : 0;

        // The adjoint used the lagged multiplier; a point only counts once the
        // lag no longer changes the adjoint source.
        double lag_gap = 0.0;
        bool lag_used = false;
        for (int j = 0; j < model.levels(); ++j)
            for (std::size_t i = 0; i < model.nodes(); ++i) {
                const double gy = model.eval(spec.g.dy, j, i, y(j, i), u(j, i));
                if (gy == 0.0)
                    continue;
                lag_gap = std::max(lag_gap, std::abs((e_new(j, i) - e_lag(j, i)) * gy));
                lag_used = lag_used || e_lag(j, i) != 0.0;
            }

        const bool certified = res.first_order() <= opts.tol_kkt && lag_gap <= opts.tol_kkt;
        if (certified || iter + 1 >= opts.max_outer || out.stalled) {
            out.trace.rows.push_back(row);
            out.point = std::move(point);
            out.residuals = res;
            out.converged = certified;
            out.iterations = iter + 1;
            return out;
        }

        // Armijo backtracking on the reduced objective along d = u_new - u.
        Field d(model.grid());
        d.flat() = u_new.flat() - u.flat();
        double slope = 0.0;
        {
            const Field phi0 = lag_used
                                   ? solve_adjoint(model, y, u, Field(model.grid()), opts.solver)
                                   : phi;
            for (int j = 0; j < model.levels(); ++j)
                for (std::size_t i = 0; i < model.nodes(); ++i) {
                    const double grad = model.eval(spec.L.du, j, i, y(j, i), u(j, i)) - phi0(j, i);
                    slope += w(j, i) * grad * d(j, i);
                }
        }
        slope = std::min(slope, 0.0);

        if (d.max_abs() > 0.0) {
            double s = 1.0;
            bool accepted = false;
            for (int h = 0; h <= opts.max_halvings; ++h, s *= opts.backtrack) {
                Field trial(model.grid());
                trial.flat() = u.flat() + s * d.flat();
                auto pair = restore_feasibility(model, std::move(trial), 2, opts.solver);
                const double J_trial = objective(model, pair.y, pair.u);
                if (J_trial <= J + opts.c1 * s * slope + 1e-14 * (1.0 + std::abs(J))) {
                    u = std::move(pair.u);
                    y = std::move(pair.y);
                    J = J_trial;
                    accepted = true;
                    break;
                }
            }
            if (accepted)
                row.step = s;
            else
                out.stalled = true;
        }
        out.trace.rows.push_back(row);
        e_lag = std::move(e_new);
    }
}

} // namespace parakkt
