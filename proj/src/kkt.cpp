#include "kkt.hpp"

#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace parakkt {

double ResidualReport::first_order() const
{
    return std::max({stat_res, comp_res, sign_viol, feas_viol});
}

std::string format_report(const ResidualReport& r)
{
    std::string s;
    s += "stat_res = " + format17(r.stat_res) + "\n";
    s += "comp_res = " + format17(r.comp_res) + "\n";
    s += "sign_viol = " + format17(r.sign_viol) + "\n";
    s += "feas_viol = " + format17(r.feas_viol) + "\n";
    s += "adjoint_res = " + format17(r.adjoint_res) + "\n";
    s += "state_res = " + format17(r.state_res) + "\n";
    return s;
}

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

std::string where(const Point& x, double t, double y)
{
    std::ostringstream os;
    os.precision(17);
    os << "(x1=" << x[0] << ", x2=" << x[1] << ", t=" << t << ", y=" << y << ")";
    return os.str();
}

// Root of an increasing scalar function on [lo, hi] with r(lo) < 0 < r(hi),
// Newton from `start` with bisection whenever a step leaves the bracket.
template <class R, class D>
double bracketed_newton(R&& r, D&& dr, double lo, double hi, double start, double r_start,
                        double tol, const char* what, const Point& x, double t, double y)
{
    double u = start;
    double ru = r_start;
    for (int it = 0; it < 200; ++it) {
        const double d = dr(u);
        double next = u - ru / d;
        if (!(next >= lo && next <= hi) || !std::isfinite(next))
            next = 0.5 * (lo + hi);
        u = next;
        ru = r(u);
        if (std::abs(ru) <= tol || ru == 0.0)
            return u;
        if (ru < 0.0)
            lo = u;
        else
            hi = u;
        if (hi - lo <= 4.0 * eps * (1.0 + std::abs(u)))
            return u;
    }
    fail(ErrorKind::solver, std::string(what) + ": Newton/bisection did not converge at " + where(x, t, y));
}

} // namespace

double constraint_boundary(const ProblemSpec& spec, const Point& x, double t, double y)
{
    auto g = [&](double u) { return spec.g.value(x, t, y, u); };
    auto gu = [&](double u) { return spec.g.du(x, t, y, u); };
    const double g0 = g(0.0);
    if (!std::isfinite(g0))
        fail(ErrorKind::hypothesis, "constraint_boundary: non-finite g at " + where(x, t, y));
    if (g0 == 0.0)
        return 0.0;

    // Expand a bracket away from zero in the direction of the root.
    const double dir = g0 < 0.0 ? 1.0 : -1.0;
    double inner = 0.0, outer = dir;
    double g_outer = g(outer);
    int doublings = 0;
    while (dir * g_outer < 0.0 || !std::isfinite(g_outer)) {
        if (!std::isfinite(g_outer) || ++doublings > 60)
            fail(ErrorKind::hypothesis,
                 "constraint_boundary: no root of g in u (bracket expansion failed) at " + where(x, t, y));
        inner = outer;
        outer *= 2.0;
        g_outer = g(outer);
    }
    if (g_outer == 0.0)
        return outer;
    const double lo = std::min(inner, outer), hi = std::max(inner, outer);
    const double tol = 1e-12 * (1.0 + std::abs(g0));
    // Start Newton from the endpoint nearer zero; for g affine in u the first
    // step lands on the root exactly.
    const double start = inner;
    const double r_start = inner == 0.0 ? g0 : g(inner);
    return bracketed_newton(g, gu, lo, hi, start, r_start, tol, "constraint_boundary", x, t, y);
}

ControlUpdate pointwise_control_update(const ProblemSpec& spec, const Point& x, double t, double y,
                                       double phi)
{
    const double bnd = constraint_boundary(spec, x, t, y);
    auto r = [&](double u) { return spec.L.du(x, t, y, u) - phi; };
    auto dr = [&](double u) { return spec.L.duu(x, t, y, u); };
    const double r_bnd = r(bnd);
    if (!std::isfinite(r_bnd))
        fail(ErrorKind::hypothesis, "pointwise_control_update: non-finite L_u at " + where(x, t, y));

    if (r_bnd < 0.0) {
        // The unconstrained minimizer lies beyond the boundary.
        const double gu = spec.g.du(x, t, y, bnd);
        return {bnd, -r_bnd / gu};
    }
    if (r_bnd == 0.0)
        return {bnd, 0.0};

    // Feasible branch: root of L_u = phi in (-inf, bnd].
    double lo = bnd - 1.0;
    double r_lo = r(lo);
    double width = 1.0;
    int doublings = 0;
    while (r_lo > 0.0) {
        if (++doublings > 60 || !std::isfinite(r_lo))
            fail(ErrorKind::solver,
                 "pointwise_control_update: cannot bracket the unconstrained minimizer at " + where(x, t, y));
        width *= 2.0;
        lo = bnd - width;
        r_lo = r(lo);
    }
    if (r_lo == 0.0)
        return {lo, 0.0};
    const double tol = 1e-14 * (1.0 + std::abs(phi));
    const double u = bracketed_newton(r, dr, lo, bnd, lo, r_lo, tol, "pointwise_control_update", x, t, y);
    return {u, 0.0};
}

Field recover_multiplier_division(const Model& model, const Field& y, const Field& u, const Field& phi)
{
    require_aligned(y, u, "recover_multiplier_division");
    require_aligned(y, phi, "recover_multiplier_division");
    const ProblemSpec& spec = model.spec();
    Field e(model.grid());
    for (int j = 0; j < model.levels(); ++j)
        for (std::size_t i = 0; i < model.nodes(); ++i) {
            const double gu = model.eval(spec.g.du, j, i, y(j, i), u(j, i));
            if (!(std::abs(gu) >= 0.5 * spec.gamma2))
                fail(ErrorKind::hypothesis,
                     "recover_multiplier_division: |g_u| below gamma2/2 at " +
                         where(model.x(i), model.t(j), y(j, i)));
            e(j, i) = (phi(j, i) - model.eval(spec.L.du, j, i, y(j, i), u(j, i))) / gu;
        }
    return e;
}

Field recover_multiplier_max(const Model& model, const Field& y, const Field& phi)
{
    require_aligned(y, phi, "recover_multiplier_max");
    const ProblemSpec& spec = model.spec();
    Field e(model.grid());
    for (int j = 0; j < model.levels(); ++j)
        for (std::size_t i = 0; i < model.nodes(); ++i) {
            const double bnd = constraint_boundary(spec, model.x(i), model.t(j), y(j, i));
            const double gap = phi(j, i) - model.eval(spec.L.du, j, i, y(j, i), bnd);
            e(j, i) = std::max(0.0, gap) / model.eval(spec.g.du, j, i, y(j, i), bnd);
        }
    return e;
}

HPotential h_potential_audit(const Model& model, const Field& y, const Field& u)
{
    require_aligned(y, u, "h_potential_audit");
    const ProblemSpec& spec = model.spec();
    HPotential out{Field(model.grid()), 0.0};
    for (int j = 0; j < model.levels(); ++j)
        for (std::size_t i = 0; i < model.nodes(); ++i) {
            const double gu = model.eval(spec.g.du, j, i, y(j, i), u(j, i));
            if (!(std::abs(gu) >= 0.5 * spec.gamma2))
                fail(ErrorKind::hypothesis,
                     "h_potential_audit: |g_u| below gamma2/2 at " + where(model.x(i), model.t(j), y(j, i)));
            const double p = spec.f.df(y(j, i)) + model.eval(spec.g.dy, j, i, y(j, i), u(j, i)) / gu;
            if (!std::isfinite(p))
                fail(ErrorKind::hypothesis,
                     "h_potential_audit: non-finite potential at " + where(model.x(i), model.t(j), y(j, i)));
            out.potential(j, i) = p;
        }
    out.ess_bound = out.potential.max_abs();
    return out;
}

ResidualReport kkt_residuals(const Model& model, const KKTPoint& p)
{
    require_aligned(p.y, p.u, "kkt_residuals");
    require_aligned(p.y, p.phi, "kkt_residuals");
    require_aligned(p.y, p.e, "kkt_residuals");
    const ProblemSpec& spec = model.spec();
    ResidualReport r;
    double min_e = 0.0, max_g = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < model.levels(); ++j)
        for (std::size_t i = 0; i < model.nodes(); ++i) {
            const double y = p.y(j, i), u = p.u(j, i), e = p.e(j, i);
            const double g = model.eval(spec.g.value, j, i, y, u);
            const double stat = model.eval(spec.L.du, j, i, y, u) - p.phi(j, i) +
                                e * model.eval(spec.g.du, j, i, y, u);
            r.stat_res = std::max(r.stat_res, std::abs(stat));
            r.comp_res = std::max(r.comp_res, std::abs(e * g));
            min_e = std::min(min_e, e);
            max_g = std::max(max_g, g);
        }
    r.sign_viol = std::max(0.0, -min_e);
    r.feas_viol = std::max(0.0, max_g);
    r.adjoint_res = adjoint_residual(model, p.y, p.u, p.phi, p.e);
    r.state_res = state_residual(model, p.y, p.u);
    return r;
}

double activity_threshold(const Field& e)
{
    return 1e-6 * (1.0 + e.max_abs());
}

Field constraint_values(const Model& model, const Field& y, const Field& u)
{
    require_aligned(y, u, "constraint_values");
    Field g(model.grid());
    for (int j = 0; j < model.levels(); ++j)
        for (std::size_t i = 0; i < model.nodes(); ++i)
            g(j, i) = model.eval(model.spec().g.value, j, i, y(j, i), u(j, i));
    return g;
}

Field boundary_values(const Model& model, const Field& y)
{
    Field b(model.grid());
    for (int j = 0; j < model.levels(); ++j)
        for (std::size_t i = 0; i < model.nodes(); ++i)
            b(j, i) = constraint_boundary(model.spec(), model.x(i), model.t(j), y(j, i));
    return b;
}

std::pair<Field, Field> recover_adjoint_pair(const Model& model, const Field& y, const Field& u,
                                             const SolverOptions& opts)
{
    require_aligned(y, u, "recover_adjoint_pair");
    const ProblemSpec& spec = model.spec();
    Field c(model.grid()), s(model.grid());
    for (int j = 0; j < model.levels(); ++j)
        for (std::size_t i = 0; i < model.nodes(); ++i) {
            const double yv = y(j, i), uv = u(j, i);
            const double ratio = model.eval(spec.g.dy, j, i, yv, uv) / model.eval(spec.g.du, j, i, yv, uv);
            c(j, i) = spec.f.df(yv) + ratio;
            s(j, i) = model.eval(spec.L.dy, j, i, yv, uv) - ratio * model.eval(spec.L.du, j, i, yv, uv);
        }
    Field phi = solve_backward(model, c, s, opts);
    Field e = recover_multiplier_division(model, y, u, phi);
    return {std::move(phi), std::move(e)};
}

} // namespace parakkt
