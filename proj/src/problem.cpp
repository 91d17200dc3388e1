#include "problem.hpp"

#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace parakkt {

void ProblemSpec::set_identity_coefficients()
{
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (!coeff[i][j])
                coeff[i][j] = [v = i == j ? 1.0 : 0.0](const Point&) { return v; };
}

double radical_inverse(std::uint64_t index, unsigned base)
{
    double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

namespace {

std::string describe_point(const Point& x, double t, double y, double u)
{
    std::ostringstream os;
    os.precision(17);
    os << "(x1=" << x[0] << ", x2=" << x[1] << ", t=" << t << ", y=" << y << ", u=" << u << ")";
    return os.str();
}

double checked(double v, const char* map, const Point& x, double t, double y, double u)
{
    if (!std::isfinite(v))
        fail(ErrorKind::hypothesis,
             std::string("non-finite value of ") + map + " at " + describe_point(x, t, y, u));
    return v;
}

} // namespace

HypothesisReport validate_hypotheses(const ProblemSpec& spec, const AuditBox& box,
                                     std::size_t n_samples, std::uint64_t seed)
{
    if (n_samples < 1)
        fail(ErrorKind::config, "validate_hypotheses: n_samples must be >= 1");
    if (!(box.y.lo <= box.y.hi) || !(box.u.lo <= box.u.hi))
        fail(ErrorKind::config, "validate_hypotheses: empty audit box");
    if (!(spec.gamma1 > 0.0) || !(spec.gamma2 > 0.0))
        fail(ErrorKind::config, "validate_hypotheses: gamma1 and gamma2 must be positive");

    HypothesisReport rep;
    rep.alpha_hat = std::numeric_limits<double>::infinity();
    rep.cf_hat = std::numeric_limits<double>::infinity();
    rep.min_gu = std::numeric_limits<double>::infinity();
    rep.min_abs_gu = std::numeric_limits<double>::infinity();
    rep.min_Luu = std::numeric_limits<double>::infinity();
    rep.sample_count = n_samples;

    rep.f_at_zero = spec.f.f(0.0);

    for (std::size_t k = 0; k < n_samples; ++k) {
        const std::uint64_t idx = seed + k + 1;
        Point x{spec.extent[0] * radical_inverse(idx, 2), 0.0};
        if (spec.dim == 2)
            x[1] = spec.extent[1] * radical_inverse(idx, 3);
        const double t = spec.horizon * radical_inverse(idx, 5);
        const double y = box.y.lo + (box.y.hi - box.y.lo) * radical_inverse(idx, 7);
        const double u = box.u.lo + (box.u.hi - box.u.lo) * radical_inverse(idx, 11);

        // ellipticity and symmetry of a
        const double a11 = checked(spec.coeff[0][0](x), "a11", x, t, y, u);
        double lam = a11;
        if (spec.dim == 2) {
            const double a12 = checked(spec.coeff[0][1](x), "a12", x, t, y, u);
            const double a21 = checked(spec.coeff[1][0](x), "a21", x, t, y, u);
            const double a22 = checked(spec.coeff[1][1](x), "a22", x, t, y, u);
            rep.max_asymmetry = std::max(rep.max_asymmetry, std::abs(a12 - a21));
            const double s = 0.5 * (a12 + a21);
            const double mean = 0.5 * (a11 + a22);
            const double half = 0.5 * (a11 - a22);
            lam = mean - std::sqrt(half * half + s * s);
        }
        rep.alpha_hat = std::min(rep.alpha_hat, lam);

        // f(0) = 0 and f' >= C_f
        checked(spec.f.f(y), "f", x, t, y, u);
        rep.cf_hat = std::min(rep.cf_hat, checked(spec.f.df(y), "f'", x, t, y, u));
        checked(spec.f.ddf(y), "f''", x, t, y, u);

        // every partial finite on the audit sample
        checked(spec.L.value(x, t, y, u), "L", x, t, y, u);
        checked(spec.L.dy(x, t, y, u), "L_y", x, t, y, u);
        checked(spec.L.du(x, t, y, u), "L_u", x, t, y, u);
        checked(spec.L.dyy(x, t, y, u), "L_yy", x, t, y, u);
        checked(spec.L.dyu(x, t, y, u), "L_yu", x, t, y, u);
        const double luu = checked(spec.L.duu(x, t, y, u), "L_uu", x, t, y, u);
        checked(spec.g.value(x, t, y, u), "g", x, t, y, u);
        checked(spec.g.dy(x, t, y, u), "g_y", x, t, y, u);
        const double gu = checked(spec.g.du(x, t, y, u), "g_u", x, t, y, u);
        checked(spec.g.dyy(x, t, y, u), "g_yy", x, t, y, u);
        checked(spec.g.dyu(x, t, y, u), "g_yu", x, t, y, u);
        checked(spec.g.duu(x, t, y, u), "g_uu", x, t, y, u);
        checked(spec.y0(x), "y0", x, t, y, u);

        // g_u away from zero, L_uu bounded below
        if (gu < rep.min_gu) {
            rep.min_gu = gu;
            rep.argmin_gu_x = x;
            rep.argmin_gu_t = t;
            rep.argmin_gu_y = y;
            rep.argmin_gu_u = u;
        }
        rep.min_abs_gu = std::min(rep.min_abs_gu, std::abs(gu));
        rep.min_Luu = std::min(rep.min_Luu, luu);
    }

    const double sym_tol = 1e-12 * (1.0 + std::abs(rep.alpha_hat));
    rep.pass_ellipticity = rep.alpha_hat > 0.0 && rep.max_asymmetry <= sym_tol;
    rep.pass_monotone_f = rep.f_at_zero == 0.0 && rep.cf_hat >= spec.f.lower_slope;
    rep.pass_gu_nonzero = rep.min_abs_gu > 0.0;
    rep.pass_uniform_bounds = rep.min_gu >= spec.gamma2 && rep.min_Luu >= spec.gamma1;
    return rep;
}

namespace {

struct Worst {
    DerivativeCheck& out;
    void consider(const char* name, double fd, double exact, const Point& x, double t, double y,
                  double u)
    {
        const double err = std::abs(fd - exact) / (1.0 + std::abs(exact));
        if (!(err <= out.worst_error)) {   // also catches NaN
            out.worst_error = std::isnan(err) ? std::numeric_limits<double>::infinity() : err;
            out.worst_map = name;
            out.x = x;
            out.t = t;
            out.y = y;
            out.u = u;
        }
    }
};

} // namespace

DerivativeCheck check_derivatives(const ProblemSpec& spec, const AuditBox& box, std::size_t n,
                                  std::uint64_t seed)
{
    DerivativeCheck result;
    Worst worst{result};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    constexpr double rel_step = 1e-4;

    for (std::size_t k = 0; k < n; ++k) {
        Point x{spec.extent[0] * unit(rng), spec.dim == 2 ? spec.extent[1] * unit(rng) : 0.0};
        const double t = spec.horizon * unit(rng);
        const double y = box.y.lo + (box.y.hi - box.y.lo) * unit(rng);
        const double u = box.u.lo + (box.u.hi - box.u.lo) * unit(rng);
        const double hy = rel_step * std::max(1.0, std::abs(y));
        const double hu = rel_step * std::max(1.0, std::abs(u));

        auto dy_of = [&](const PointwiseMap& m) {
            return (m(x, t, y + hy, u) - m(x, t, y - hy, u)) / (2.0 * hy);
        };
        auto du_of = [&](const PointwiseMap& m) {
            return (m(x, t, y, u + hu) - m(x, t, y, u - hu)) / (2.0 * hu);
        };

        for (auto [prefix, map] : {std::pair<const char*, const ScalarMap2*>{"L", &spec.L},
                                   std::pair<const char*, const ScalarMap2*>{"g", &spec.g}}) {
            const std::string p(prefix);
            worst.consider((p + ".dy").c_str(), dy_of(map->value), map->dy(x, t, y, u), x, t, y, u);
            worst.consider((p + ".du").c_str(), du_of(map->value), map->du(x, t, y, u), x, t, y, u);
            worst.consider((p + ".dyy").c_str(), dy_of(map->dy), map->dyy(x, t, y, u), x, t, y, u);
            worst.consider((p + ".dyu").c_str(), du_of(map->dy), map->dyu(x, t, y, u), x, t, y, u);
            worst.consider((p + ".duy").c_str(), dy_of(map->du), map->dyu(x, t, y, u), x, t, y, u);
            worst.consider((p + ".duu").c_str(), du_of(map->du), map->duu(x, t, y, u), x, t, y, u);
        }
        const double fd_f = (spec.f.f(y + hy) - spec.f.f(y - hy)) / (2.0 * hy);
        worst.consider("f.df", fd_f, spec.f.df(y), x, t, y, u);
        const double fd_df = (spec.f.df(y + hy) - spec.f.df(y - hy)) / (2.0 * hy);
        worst.consider("f.ddf", fd_df, spec.f.ddf(y), x, t, y, u);
    }
    return result;
}

} // namespace parakkt
