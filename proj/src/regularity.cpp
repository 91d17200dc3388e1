#include "regularity.hpp"

#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace parakkt {

std::string HolderFit::bins_csv() const
{
    std::string s = "bin_lo,bin_hi,n,max_increment\n";
    for (const auto& b : bins)
        s += format17(b.lo) + "," + format17(b.hi) + "," + std::to_string(b.n) + "," +
             format17(b.max_increment) + "\n";
    return s;
}

bool HolderFit::bound_holds(double slack) const
{
    for (const auto& o : offsets)
        if (o.max_increment > H_hat * std::pow(o.distance, alpha_hat) * (1.0 + slack))
            return false;
    return true;
}

namespace {

double sweep(const Field& f, int d1, int d2, int dt)
{
    const SpatialGrid& s = f.grid().space;
    const int n1 = s.interior(0), n2 = s.interior(1), nt = f.levels();
    double m = 0.0;
    for (int j = 0; j + dt < nt; ++j)
        for (int i2 = std::max(0, -d2); i2 < n2 && i2 + d2 < n2; ++i2)
            for (int i1 = std::max(0, -d1); i1 < n1 && i1 + d1 < n1; ++i1) {
                const double a = f(j, s.flat_index(i1, i2));
                const double b = f(j + dt, s.flat_index(i1 + d1, i2 + d2));
                m = std::max(m, std::abs(a - b));
            }
    return m;
}

} // namespace

HolderFit estimate_holder(const Field& field, std::size_t n_pairs, std::uint64_t seed)
{
    if (n_pairs < 1000)
        fail(ErrorKind::config, "estimate_holder: n_pairs must be at least 1000");
    if (!field.all_finite())
        fail(ErrorKind::config, "estimate_holder: non-finite field");

    const Grid& g = field.grid();
    const SpatialGrid& s = g.space;
    const int dim = s.dim();
    const int n1 = s.interior(0), n2 = s.interior(1), nt = g.levels();
    const double h1 = s.spacing(0), h2 = s.spacing(1), tau = g.time.tau();

    const double span1 = (n1 - 1) * h1;
    const double span2 = dim == 2 ? (n2 - 1) * h2 : 0.0;
    const double diam = std::sqrt(span1 * span1 + span2 * span2 + g.time.horizon() * g.time.horizon());
    const double d_lo = std::max({h1, dim == 2 ? h2 : 0.0, tau});
    const double d_hi = 0.5 * diam;

    HolderFit fit;
    fit.n_pairs = n_pairs;
    if (field.max_abs() == 0.0 ||
        std::all_of(field.values().begin(), field.values().end(),
                    [&](double v) { return v == field.values()[0]; })) {
        fit.constant_field = true;
        return fit;
    }
    if (!(d_hi > d_lo))
        fail(ErrorKind::config, "estimate_holder: grid too coarse for a distance window");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double pi = std::numbers::pi;
    std::size_t attempts = 0;
    while (fit.offsets.size() < n_pairs) {
        if (++attempts > 1000 * n_pairs)
            fail(ErrorKind::config, "estimate_holder: cannot place offsets on this grid");
        const double d = std::exp(std::log(d_lo) + unit(rng) * (std::log(d_hi) - std::log(d_lo)));
        // Direction in the half space dt >= 0.
        double e1, e2 = 0.0, et;
        if (dim == 1) {
            const double th = pi * unit(rng);
            e1 = std::cos(th);
            et = std::sin(th);
        } else {
            const double ct = unit(rng);
            const double ph = 2.0 * pi * unit(rng);
            const double st = std::sqrt(1.0 - ct * ct);
            e1 = st * std::cos(ph);
            e2 = st * std::sin(ph);
            et = ct;
        }
        HolderOffset o;
        o.d1 = static_cast<int>(std::lround(d * e1 / h1));
        o.d2 = dim == 2 ? static_cast<int>(std::lround(d * e2 / h2)) : 0;
        o.dt = static_cast<int>(std::lround(d * et / tau));
        if (std::abs(o.d1) >= n1 || std::abs(o.d2) >= n2 || o.dt >= nt ||
            (o.d1 == 0 && o.d2 == 0 && o.dt == 0))
            continue;
        o.distance = std::sqrt(std::pow(o.d1 * h1, 2) + std::pow(o.d2 * h2, 2) + std::pow(o.dt * tau, 2));
        o.max_increment = sweep(field, o.d1, o.d2, o.dt);
        fit.offsets.push_back(o);
    }

    constexpr int n_bins = 16;
    const double step = (std::log(d_hi) - std::log(d_lo)) / n_bins;
    fit.bins.resize(n_bins);
    for (int b = 0; b < n_bins; ++b) {
        fit.bins[b].lo = std::exp(std::log(d_lo) + b * step);
        fit.bins[b].hi = std::exp(std::log(d_lo) + (b + 1) * step);
    }
    for (const auto& o : fit.offsets) {
        if (o.distance < d_lo || o.distance >= d_hi)
            continue;
        const int b = std::min(n_bins - 1, static_cast<int>((std::log(o.distance) - std::log(d_lo)) / step));
        fit.bins[b].n += 1;
        fit.bins[b].max_increment = std::max(fit.bins[b].max_increment, o.max_increment);
    }

    std::vector<double> X, Y;
    for (const auto& b : fit.bins)
        if (b.n >= 10 && b.max_increment > 0.0) {
            X.push_back(0.5 * (std::log(b.lo) + std::log(b.hi)));
            Y.push_back(std::log(b.max_increment));
        }

    double slope = 1.0;
    if (X.size() >= 2) {
        const double mx = std::accumulate(X.begin(), X.end(), 0.0) / X.size();
        const double my = std::accumulate(Y.begin(), Y.end(), 0.0) / Y.size();
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t k = 0; k < X.size(); ++k) {
            sxy += (X[k] - mx) * (Y[k] - my);
            sxx += (X[k] - mx) * (X[k] - mx);
        }
        slope = sxy / sxx;
        const double icpt = my - slope * mx;
        double ss = 0.0;
        for (std::size_t k = 0; k < X.size(); ++k)
            ss += std::pow(Y[k] - (icpt + slope * X[k]), 2);
        fit.residual = std::sqrt(ss / X.size());
    }
    fit.alpha_hat = std::clamp(slope, 1e-3, 1.0);

    fit.H_hat = 0.0;
    for (const auto& o : fit.offsets)
        fit.H_hat = std::max(fit.H_hat, o.max_increment / std::pow(o.distance, fit.alpha_hat));
    return fit;
}

double active_boundary_jump(const Field& e, std::size_t* pairs)
{
    const double eps = activity_threshold(e);
    const SpatialGrid& s = e.grid().space;
    const int n1 = s.interior(0), n2 = s.interior(1);
    double jump = 0.0;
    std::size_t count = 0;
    auto consider = [&](double a, double b) {
        if ((a > eps) != (b > eps)) {
            jump = std::max(jump, std::abs(a - b));
            ++count;
        }
    };
    for (int j = 0; j < e.levels(); ++j)
        for (int i2 = 0; i2 < n2; ++i2)
            for (int i1 = 0; i1 < n1; ++i1) {
                const double v = e(j, s.flat_index(i1, i2));
                if (i1 + 1 < n1)
                    consider(v, e(j, s.flat_index(i1 + 1, i2)));
                if (i2 + 1 < n2)
                    consider(v, e(j, s.flat_index(i1, i2 + 1)));
                if (j + 1 < e.levels())
                    consider(v, e(j + 1, s.flat_index(i1, i2)));
            }
    if (pairs)
        *pairs = count;
    return jump;
}

Field drop_initial_level(const Field& f)
{
    const Grid& g = f.grid();
    if (g.levels() < 3)
        fail(ErrorKind::config, "drop_initial_level: need at least 3 levels");
    Grid sub{g.space, TimeGrid(g.levels() - 1, g.time.horizon() - g.time.tau())};
    Field out(sub);
    for (int j = 1; j < g.levels(); ++j)
        out.level(j - 1) = f.level(j);
    return out;
}

ContinuityReport multiplier_continuity_report(const Model& model, const KKTPoint& p, std::size_t n_pairs,
                                              std::uint64_t seed)
{
    const ProblemSpec& spec = model.spec();
    Field gue(model.grid());
    for (int j = 0; j < model.levels(); ++j)
        for (std::size_t i = 0; i < model.nodes(); ++i)
            gue(j, i) = model.eval(spec.g.du, j, i, p.y(j, i), p.u(j, i)) * p.e(j, i);

    ContinuityReport r;
    r.y = estimate_holder(drop_initial_level(p.y), n_pairs, seed);
    r.u = estimate_holder(drop_initial_level(p.u), n_pairs, seed);
    r.phi = estimate_holder(drop_initial_level(p.phi), n_pairs, seed);
    r.e = estimate_holder(drop_initial_level(p.e), n_pairs, seed);
    r.gu_e = estimate_holder(drop_initial_level(gue), n_pairs, seed);
    r.active_boundary_jump = active_boundary_jump(drop_initial_level(p.e), &r.boundary_pairs);
    r.domain_note = "rectangular domain: convex, so the positive geometric density property holds";
    return r;
}

} // namespace parakkt
