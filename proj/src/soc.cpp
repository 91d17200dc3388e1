#include "soc.hpp"

#include "common.hpp"
#include "optimizer.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace parakkt {

double quadratic_form(const Model& model, const KKTPoint& p, const Field& y, const Field& v)
{
    require_aligned(p.y, y, "quadratic_form");
    require_aligned(p.y, v, "quadratic_form");
    const ProblemSpec& spec = model.spec();
    const Field& w = model.weights();
    double q = 0.0;
    for (int j = 0; j < model.levels(); ++j)
        for (std::size_t i = 0; i < model.nodes(); ++i) {
            const double yb = p.y(j, i), ub = p.u(j, i);
            const double z = y(j, i), s = v(j, i);
            double term = model.eval(spec.L.dyy, j, i, yb, ub) * z * z +
                          2.0 * model.eval(spec.L.dyu, j, i, yb, ub) * z * s +
                          model.eval(spec.L.duu, j, i, yb, ub) * s * s;
            if (p.e(j, i) != 0.0)
                term += p.e(j, i) * (model.eval(spec.g.dyy, j, i, yb, ub) * z * z +
                                     2.0 * model.eval(spec.g.dyu, j, i, yb, ub) * z * s +
                                     model.eval(spec.g.duu, j, i, yb, ub) * s * s);
            term += p.phi(j, i) * spec.f.ddf(yb) * z * z;
            q += w(j, i) * term;
        }
    return q;
}

void measure_direction(const Model& model, const KKTPoint& p, CriticalDirection& dir)
{
    const ProblemSpec& spec = model.spec();
    const Field& w = model.weights();
    const Field& y = dir.y;
    const Field& v = dir.v;

    double c1 = 0.0, c3 = 0.0;
    for (int j = 0; j < model.levels(); ++j)
        for (std::size_t i = 0; i < model.nodes(); ++i) {
            const double yb = p.y(j, i), ub = p.u(j, i);
            c1 += w(j, i) * (model.eval(spec.L.dy, j, i, yb, ub) * y(j, i) +
                             model.eval(spec.L.du, j, i, yb, ub) * v(j, i));
            if (model.eval(spec.g.value, j, i, yb, ub) >= -tol_feas) {
                const double lin = model.eval(spec.g.dy, j, i, yb, ub) * y(j, i) +
                                   model.eval(spec.g.du, j, i, yb, ub) * v(j, i);
                c3 = std::max(c3, lin);
            }
        }
    dir.c1_value = c1;
    dir.c1_satisfied = c1 <= tol_c1;
    dir.c3_violation = c3;

    // Linearized equation y_t + A y + f'(ybar) y = v with y(0) = 0.
    double c2 = y.level(0).lpNorm<Eigen::Infinity>();
    for (int j = 1; j < model.levels(); ++j) {
        Eigen::VectorXd r = (y.level(j) - y.level(j - 1)) / model.tau() + model.A() * y.level(j) - v.level(j);
        for (std::size_t i = 0; i < model.nodes(); ++i)
            r[static_cast<Eigen::Index>(i)] += spec.f.df(p.y(j, i)) * y(j, i);
        c2 = std::max(c2, r.lpNorm<Eigen::Infinity>());
    }
    dir.c2_residual = c2;
}

Field smooth_random_field(const Grid& grid, std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);

    constexpr int space_modes = 4;
    constexpr int time_modes = 3;
    const int k2max = grid.space.dim() == 2 ? space_modes : 1;
    struct Mode {
        int k1, k2, m;
        double a;
    };
    std::vector<Mode> modes;
    for (int k1 = 1; k1 <= space_modes; ++k1)
        for (int k2 = 1; k2 <= k2max; ++k2)
            for (int m = 0; m < time_modes; ++m)
                modes.push_back({k1, k2, m, coef(rng) / (k1 * k2 * (m + 1))});

    const double pi = std::numbers::pi;
    Field f(grid);
    for (int j = 0; j < grid.levels(); ++j) {
        const double t = grid.time.t(j) / grid.time.horizon();
        for (std::size_t i = 0; i < grid.nodes(); ++i) {
            const Point x = grid.space.coord(i);
            const double s1 = x[0] / grid.space.extent(0);
            const double s2 = grid.space.dim() == 2 ? x[1] / grid.space.extent(1) : 0.5;
            double v = 0.0;
            for (const auto& md : modes)
                v += md.a * std::sin(md.k1 * pi * s1) * (grid.space.dim() == 2 ? std::sin(md.k2 * pi * s2) : 1.0) *
                     std::cos(md.m * pi * t);
            f(j, i) = v;
        }
    }
    const double m = f.max_abs();
    if (m > 0.0)
        f.flat() /= m;
    return f;
}

namespace {

void project_pass(const Model& model, const KKTPoint& p, double eps_act, Field& v, const Field& y)
{
    const ProblemSpec& spec = model.spec();
    for (int j = 0; j < model.levels(); ++j)
        for (std::size_t i = 0; i < model.nodes(); ++i) {
            const double yb = p.y(j, i), ub = p.u(j, i);
            const bool strong = p.e(j, i) > eps_act;
            const bool weak = !strong && model.eval(spec.g.value, j, i, yb, ub) >= -tol_feas;
            if (!strong && !weak)
                continue;
            const double bound =
                -model.eval(spec.g.dy, j, i, yb, ub) / model.eval(spec.g.du, j, i, yb, ub) * y(j, i);
            v(j, i) = strong ? bound : std::min(v(j, i), bound);
        }
}

} // namespace

CriticalDirection sample_critical_direction(const Model& model, const KKTPoint& p, std::uint64_t seed,
                                            const SolverOptions& opts)
{
    const double eps_act = activity_threshold(p.e);
    const Field v0 = smooth_random_field(model.grid(), seed, 0);

    auto build = [&](const Field& start, bool negated) {
        CriticalDirection dir;
        dir.negated = negated;
        dir.v = start;
        for (int pass = 0; pass < 2; ++pass) {
            const Field y = solve_linearized(model, p.y, dir.v, opts);
            project_pass(model, p, eps_act, dir.v, y);
        }
        dir.y = solve_linearized(model, p.y, dir.v, opts);
        measure_direction(model, p, dir);
        return dir;
    };

    CriticalDirection dir = build(v0, false);
    if (!dir.c1_satisfied) {
        Field neg = v0;
        neg.flat() *= -1.0;
        dir = build(neg, true);
    }
    if (dir.c3_violation > 1e-6)
        fail(ErrorKind::solver, "sample_critical_direction: projection left tangent violation " +
                                    format17(dir.c3_violation) + " (c1 = " + format17(dir.c1_value) + ")");
    return dir;
}

LegendreResult legendre_min(const Model& model, const KKTPoint& p)
{
    const ProblemSpec& spec = model.spec();
    LegendreResult r;
    r.min = std::numeric_limits<double>::infinity();
    for (int j = 0; j < model.levels(); ++j)
        for (std::size_t i = 0; i < model.nodes(); ++i) {
            const double yb = p.y(j, i), ub = p.u(j, i);
            double v = model.eval(spec.L.duu, j, i, yb, ub);
            if (p.e(j, i) != 0.0)
                v += p.e(j, i) * model.eval(spec.g.duu, j, i, yb, ub);
            if (v < r.min) {
                r.min = v;
                r.level = j;
                r.node = i;
            }
        }
    r.x = model.x(r.node);
    r.t = model.t(r.level);
    return r;
}

std::string GrowthResult::to_csv() const
{
    std::string s = "trial,ratio,norm_du,feasible\n";
    for (const auto& t : trials)
        s += std::to_string(t.trial) + "," + format17(t.ratio) + "," + format17(t.norm_du) + "," +
             (t.feasible ? "1" : "0") + "\n";
    return s;
}

GrowthResult quadratic_growth_probe(const Model& model, const KKTPoint& p, int n_trials, double radius,
                                    std::uint64_t seed, const SolverOptions& opts)
{
    if (n_trials < 1 || !(radius > 0.0))
        fail(ErrorKind::config, "quadratic_growth_probe: need n_trials >= 1 and radius > 0");
    const double J_bar = objective(model, p.y, p.u);
    const Field& w = model.weights();
    GrowthResult out;
    out.kappa_hat = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_trials; ++k) {
        Field delta = smooth_random_field(model.grid(), seed, static_cast<std::uint64_t>(k) + 1);
        Field u(model.grid());
        u.flat() = p.u.flat() + radius * delta.flat();
        GrowthTrial trial;
        trial.trial = k;
        try {
            auto pair = restore_feasibility(model, std::move(u), 2, opts);
            const Field g = constraint_values(model, pair.y, pair.u);
            double max_g = -std::numeric_limits<double>::infinity();
            for (double v : g.values())
                max_g = std::max(max_g, v);
            Field du(model.grid());
            du.flat() = pair.u.flat() - p.u.flat();
            const double norm2 = inner(du, du, w);
            trial.norm_du = std::sqrt(norm2);
            trial.feasible = max_g <= tol_feas && trial.norm_du >= 1e-8;
            if (trial.feasible) {
                trial.ratio = (objective(model, pair.y, pair.u) - J_bar) / norm2;
                out.kappa_hat = std::min(out.kappa_hat, trial.ratio);
            }
        } catch (const Error&) {
            trial.feasible = false;
        }
        if (!trial.feasible) {
            ++out.dropped;
            trial.ratio = std::numeric_limits<double>::quiet_NaN();
        }
        out.trials.push_back(trial);
    }
    if (out.dropped == n_trials)
        out.kappa_hat = std::numeric_limits<double>::quiet_NaN();
    return out;
}

} // namespace parakkt
