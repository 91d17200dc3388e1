#include "report.hpp"

#include "common.hpp"

namespace parakkt {

namespace {

std::string kv(std::string_view key, double v)
{
    return std::string(key) + " = " + format17(v) + "\n";
}

std::string kv(std::string_view key, std::string_view v)
{
    return std::string(key) + " = " + std::string(v) + "\n";
}

std::string kv_int(std::string_view key, long long v)
{
    return std::string(key) + " = " + std::to_string(v) + "\n";
}

std::string flag(bool b)
{
    return b ? "1" : "0";
}

} // namespace

void ReportBuilder::section(std::string_view name, std::string_view body)
{
    text_ += "== SECTION " + std::string(name) + " ==\n";
    text_ += body;
    if (!body.empty() && body.back() != '\n')
        text_ += '\n';
}

std::map<std::string, std::string> parse_key_values(std::string_view text)
{
    std::map<std::string, std::string> out;
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty())
            continue;
        auto eq = line.find(" = ");
        if (eq == std::string_view::npos)
            fail(ErrorKind::config, "report: malformed line '" + std::string(line) + "'");
        out[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 3));
    }
    return out;
}

std::map<std::string, std::string> split_sections(std::string_view report)
{
    std::map<std::string, std::string> out;
    std::string* current = nullptr;
    constexpr std::string_view open = "== SECTION ";
    constexpr std::string_view close = " ==";
    while (!report.empty()) {
        auto nl = report.find('\n');
        std::string_view line = report.substr(0, nl);
        report = nl == std::string_view::npos ? std::string_view{} : report.substr(nl + 1);
        if (line.substr(0, open.size()) == open && line.size() >= open.size() + close.size() &&
            line.substr(line.size() - close.size()) == close) {
            current = &out[std::string(line.substr(open.size(), line.size() - open.size() - close.size()))];
            continue;
        }
        if (current) {
            *current += line;
            *current += '\n';
        }
    }
    return out;
}

std::string format_hypotheses(const HypothesisReport& r, const AuditBox& box)
{
    std::string s;
    s += kv_int("sample_count", static_cast<long long>(r.sample_count));
    s += kv("audit_y_lo", box.y.lo) + kv("audit_y_hi", box.y.hi);
    s += kv("audit_u_lo", box.u.lo) + kv("audit_u_hi", box.u.hi);
    s += kv("alpha_hat", r.alpha_hat);
    s += kv("max_asymmetry", r.max_asymmetry);
    s += kv("f_at_zero", r.f_at_zero);
    s += kv("cf_hat", r.cf_hat);
    s += kv("min_gu", r.min_gu);
    s += kv("min_abs_gu", r.min_abs_gu);
    s += kv("min_Luu", r.min_Luu);
    s += kv("argmin_gu_x1", r.argmin_gu_x[0]) + kv("argmin_gu_x2", r.argmin_gu_x[1]);
    s += kv("argmin_gu_t", r.argmin_gu_t) + kv("argmin_gu_y", r.argmin_gu_y) + kv("argmin_gu_u", r.argmin_gu_u);
    s += kv("pass_ellipticity", flag(r.pass_ellipticity));
    s += kv("pass_monotone_f", flag(r.pass_monotone_f));
    s += kv("pass_gu_nonzero", flag(r.pass_gu_nonzero));
    s += kv("pass_uniform_bounds", flag(r.pass_uniform_bounds));
    return s;
}

std::string format_derivative_check(const DerivativeCheck& c)
{
    std::string s;
    s += kv("worst_map", c.worst_map.empty() ? "none" : c.worst_map);
    s += kv("worst_error", c.worst_error);
    s += kv("x1", c.x[0]) + kv("x2", c.x[1]) + kv("t", c.t) + kv("y", c.y) + kv("u", c.u);
    return s;
}

std::string format_solve_summary(const OcpResult& r)
{
    std::string s;
    s += kv("converged", flag(r.converged));
    s += kv("stalled", flag(r.stalled));
    s += kv_int("iterations", r.iterations);
    s += kv("J", r.point.J);
    std::size_t active = 0;
    const double eps = activity_threshold(r.point.e);
    for (double v : r.point.e.values())
        active += v > eps ? 1 : 0;
    s += kv_int("active_count", static_cast<long long>(active));
    s += kv("eps_act", eps);
    return s;
}

std::string format_legendre(const LegendreResult& r)
{
    std::string s;
    s += kv("lambda_hat", r.min);
    s += kv_int("level", r.level);
    s += kv_int("node", static_cast<long long>(r.node));
    s += kv("x1", r.x[0]) + kv("x2", r.x[1]) + kv("t", r.t);
    return s;
}

std::string format_direction(const CriticalDirection& d, double q)
{
    std::string s;
    s += kv("quadratic_form", q);
    s += kv("c1_value", d.c1_value);
    s += kv("c1_satisfied", flag(d.c1_satisfied));
    s += kv("c2_residual", d.c2_residual);
    s += kv("c3_violation", d.c3_violation);
    s += kv("negated", flag(d.negated));
    return s;
}

std::string format_growth(const GrowthResult& g, double radius)
{
    std::string s;
    s += kv("radius", radius);
    s += kv_int("trials", static_cast<long long>(g.trials.size()));
    s += kv_int("dropped", g.dropped);
    s += kv("kappa_hat", g.kappa_hat);
    return s;
}

std::string format_holder(const HolderFit& f)
{
    std::string s;
    s += kv("alpha_hat", f.alpha_hat);
    s += kv("H_hat", f.H_hat);
    s += kv_int("n_pairs", static_cast<long long>(f.n_pairs));
    s += kv("fit_residual", f.residual);
    s += kv("constant_field", flag(f.constant_field));
    s += kv("bound_holds", flag(f.bound_holds(holder_fit_slack)));
    return s;
}

std::string format_continuity(const ContinuityReport& r)
{
    std::string s;
    const std::pair<const char*, const HolderFit*> fits[] = {
        {"y", &r.y}, {"u", &r.u}, {"phi", &r.phi}, {"e", &r.e}, {"gu_e", &r.gu_e}};
    for (const auto& [name, f] : fits) {
        const std::string p(name);
        s += kv(p + ".alpha_hat", f->alpha_hat);
        s += kv(p + ".H_hat", f->H_hat);
        s += kv(p + ".constant_field", flag(f->constant_field));
    }
    s += kv("active_boundary_jump", r.active_boundary_jump);
    s += kv_int("boundary_pairs", static_cast<long long>(r.boundary_pairs));
    s += kv("domain", r.domain_note);
    return s;
}

std::string format_oracle(const NLPSolution& sol, const MultiplierDiscrepancy& d,
                          const MultiplierDiscrepancy& unscaled)
{
    std::string s;
    s += kv("oracle_converged", flag(sol.converged));
    s += kv("oracle_stationarity", sol.stationarity);
    s += kv("oracle_complementarity", sol.complementarity);
    s += kv("oracle_eq_violation", sol.eq_violation);
    s += kv("oracle_ineq_violation", sol.ineq_violation);
    s += kv_int("oracle_active_changes", sol.active_changes);
    s += kv_int("oracle_active_count", static_cast<long long>(sol.active_set.size()));
    s += kv("e_linf", d.e_linf) + kv("e_l2", d.e_l2);
    s += kv("phi_linf", d.phi_linf) + kv("phi_l2", d.phi_l2);
    s += kv("unscaled_e_linf", unscaled.e_linf) + kv("unscaled_phi_linf", unscaled.phi_linf);
    return s;
}

} // namespace parakkt
