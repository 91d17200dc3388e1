#include "parakkt/parakkt.h"

#include "catalog.hpp"
#include "common.hpp"
#include "field_io.hpp"
#include "kkt.hpp"
#include "model.hpp"
#include "optimizer.hpp"
#include "oracle.hpp"
#include "problem_file.hpp"
#include "regularity.hpp"
#include "report.hpp"
#include "soc.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <optional>
#include <string>

using namespace parakkt;

struct pk_problem {
    ProblemSpec spec;
};

struct pk_session {
    std::unique_ptr<Model> model;
    std::optional<KKTPoint> point;
    std::optional<ContinuityReport> holder;
};

namespace {

thread_local std::string last_error;

pk_status to_status(ErrorKind k)
{
    return static_cast<pk_status>(static_cast<int>(k));
}

template <class F>
pk_status guarded(F&& f)
{
    try {
        last_error.clear();
        f();
        return PK_OK;
    } catch (const Error& e) {
        last_error = std::string(error_kind_name(e.kind())) + ": " + e.what();
        return to_status(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "internal: out of memory";
        return PK_ERROR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = std::string("internal: ") + e.what();
        return PK_ERROR_INTERNAL;
    }
}

char* dup(const std::string& s)
{
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p)
        throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

void give(char** out, const std::string& s)
{
    if (out)
        *out = dup(s);
}

void require(const void* p, const char* what)
{
    if (!p)
        fail(ErrorKind::config, std::string(what) + " is null");
}

Field* field_by_name(KKTPoint& p, std::string_view name)
{
    if (name == "y")
        return &p.y;
    if (name == "u")
        return &p.u;
    if (name == "phi")
        return &p.phi;
    if (name == "e")
        return &p.e;
    fail(ErrorKind::config, "unknown field '" + std::string(name) + "' (expected y, u, phi or e)");
}

const KKTPoint& current_point(const pk_session* s)
{
    if (!s->point)
        fail(ErrorKind::config, "session has no fields; solve or read fields first");
    return *s->point;
}

KKTPoint& ensure_point(pk_session* s)
{
    if (!s->point) {
        OcpResult r = solve_ocp(*s->model);
        s->point = std::move(r.point);
    }
    return *s->point;
}

KKTPoint& editable_point(pk_session* s)
{
    if (!s->point) {
        const Grid& g = s->model->grid();
        s->point = KKTPoint{Field(g), Field(g), Field(g), Field(g), 0.0};
    }
    return *s->point;
}

const char* const field_names[] = {"y", "u", "phi", "e"};

} // namespace

extern "C" {

const char* pk_version(void)
{
    return "0.1.0";
}

const char* pk_status_name(pk_status status)
{
    switch (status) {
    case PK_OK: return "ok";
    case PK_ERROR_INTERNAL: return "internal";
    case PK_ERROR_CONFIG: return "config";
    case PK_ERROR_HYPOTHESIS: return "hypothesis";
    case PK_ERROR_SOLVER: return "solver";
    case PK_ERROR_IO: return "io";
    }
    return "unknown";
}

const char* pk_last_error(void)
{
    return last_error.c_str();
}

void pk_string_free(char* s)
{
    std::free(s);
}

pk_status pk_catalog_names(char** out)
{
    return guarded([&] {
        require(out, "output");
        std::string s;
        for (const auto& n : builtin_names())
            s += n + "\n";
        give(out, s);
    });
}

namespace {

pk_status make_problem(pk_problem** out, const std::function<ProblemSpec()>& build)
{
    return guarded([&] {
        require(out, "output");
        *out = nullptr;
        auto p = std::make_unique<pk_problem>();
        p->spec = build();
        *out = p.release();
    });
}

} // namespace

pk_status pk_problem_from_catalog(const char* name, pk_problem** out)
{
    return make_problem(out, [&] {
        require(name, "name");
        return builtin_problem(name);
    });
}

pk_status pk_problem_from_file(const char* path, pk_problem** out)
{
    return make_problem(out, [&] {
        require(path, "path");
        return load_problem_file(path);
    });
}

pk_status pk_problem_from_text(const char* text, pk_problem** out)
{
    return make_problem(out, [&] {
        require(text, "text");
        return parse_problem(text);
    });
}

pk_status pk_problem_resolve(const char* name_or_path, pk_problem** out)
{
    return make_problem(out, [&] {
        require(name_or_path, "problem");
        return resolve_problem(name_or_path);
    });
}

void pk_problem_destroy(pk_problem* problem)
{
    delete problem;
}

int pk_problem_dim(const pk_problem* problem)
{
    return problem ? problem->spec.dim : 0;
}

pk_status pk_problem_source(const pk_problem* problem, char** out)
{
    return guarded([&] {
        require(problem, "problem");
        give(out, problem->spec.source);
    });
}

pk_status pk_problem_validate(const pk_problem* problem, size_t n_samples, uint64_t seed, char** report,
                              int* all_pass)
{
    return guarded([&] {
        require(problem, "problem");
        const ProblemSpec& spec = problem->spec;
        const HypothesisReport h = validate_hypotheses(spec, spec.audit_box, n_samples, seed);
        const DerivativeCheck d = check_derivatives(spec, spec.audit_box, 100, seed);
        const bool deriv_ok = d.worst_error <= 1e-5;
        ReportBuilder rb;
        rb.section("hypotheses", format_hypotheses(h, spec.audit_box) + "gamma1 = " + format17(spec.gamma1) +
                                     "\ngamma2 = " + format17(spec.gamma2) + "\nC_f = " +
                                     format17(spec.f.lower_slope) + "\n");
        rb.section("derivatives", format_derivative_check(d) + "pass = " + (deriv_ok ? "1" : "0") + "\n");
        give(report, rb.str());
        if (all_pass)
            *all_pass = h.all_pass() && deriv_ok ? 1 : 0;
    });
}

pk_status pk_session_create(const pk_problem* problem, const pk_grid_options* grid, pk_session** out)
{
    return guarded([&] {
        require(problem, "problem");
        require(grid, "grid options");
        require(out, "output");
        *out = nullptr;
        auto s = std::make_unique<pk_session>();
        s->model = std::make_unique<Model>(
            problem->spec, Grid::for_problem(problem->spec, {grid->nodes[0], grid->nodes[1]}, grid->levels));
        *out = s.release();
    });
}

void pk_session_destroy(pk_session* session)
{
    delete session;
}

size_t pk_session_field_size(const pk_session* session)
{
    return session ? session->model->grid().size() : 0;
}

pk_status pk_session_solve(pk_session* session, const pk_solve_options* options, char** report,
                           char** trace_csv, int* converged)
{
    return guarded([&] {
        require(session, "session");
        OptimizerOptions opts;
        if (options) {
            if (options->max_outer > 0)
                opts.max_outer = options->max_outer;
            if (options->tol_kkt > 0.0)
                opts.tol_kkt = options->tol_kkt;
        }
        OcpResult r = solve_ocp(*session->model, opts);
        ReportBuilder rb;
        rb.section("solve", format_solve_summary(r));
        rb.section("residuals", format_report(r.residuals));
        give(report, rb.str());
        give(trace_csv, r.trace.to_csv());
        if (converged)
            *converged = r.converged ? 1 : 0;
        session->point = std::move(r.point);
        session->holder.reset();
    });
}

pk_status pk_session_get_field(const pk_session* session, const char* name, double* out, size_t n)
{
    return guarded([&] {
        require(session, "session");
        require(name, "name");
        require(out, "output");
        KKTPoint& p = const_cast<KKTPoint&>(current_point(session));
        const Field& f = *field_by_name(p, name);
        if (n != f.size())
            fail(ErrorKind::config, "buffer size " + std::to_string(n) + " differs from field size " +
                                        std::to_string(f.size()));
        std::memcpy(out, f.values().data(), n * sizeof(double));
    });
}

pk_status pk_session_set_field(pk_session* session, const char* name, const double* values, size_t n)
{
    return guarded([&] {
        require(session, "session");
        require(name, "name");
        require(values, "values");
        Field& f = *field_by_name(editable_point(session), name);
        if (n != f.size())
            fail(ErrorKind::config, "buffer size " + std::to_string(n) + " differs from field size " +
                                        std::to_string(f.size()));
        std::memcpy(f.values().data(), values, n * sizeof(double));
        session->point->J = objective(*session->model, session->point->y, session->point->u);
        session->holder.reset();
    });
}

pk_status pk_session_write_fields(const pk_session* session, const char* dir)
{
    return guarded([&] {
        require(session, "session");
        require(dir, "directory");
        KKTPoint& p = const_cast<KKTPoint&>(current_point(session));
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        for (const char* n : field_names)
            write_field(std::filesystem::path(dir) / (std::string(n) + ".field"), *field_by_name(p, n));
    });
}

pk_status pk_session_read_fields(pk_session* session, const char* dir)
{
    return guarded([&] {
        require(session, "session");
        require(dir, "directory");
        const Grid& g = session->model->grid();
        KKTPoint p;
        for (const char* n : field_names)
            *field_by_name(p, n) = read_field(std::filesystem::path(dir) / (std::string(n) + ".field"), &g);
        p.J = objective(*session->model, p.y, p.u);
        session->point = std::move(p);
        session->holder.reset();
    });
}

pk_status pk_session_check_kkt(const pk_session* session, char** report)
{
    return guarded([&] {
        require(session, "session");
        give(report, format_report(kkt_residuals(*session->model, current_point(session))));
    });
}

pk_status pk_session_soc(pk_session* session, uint64_t seed, int n_trials, double radius, char** report,
                         char** growth_csv)
{
    return guarded([&] {
        require(session, "session");
        const Model& m = *session->model;
        const KKTPoint& p = ensure_point(session);
        ReportBuilder rb;
        rb.section("legendre", format_legendre(legendre_min(m, p)));
        const CriticalDirection dir = sample_critical_direction(m, p, seed);
        rb.section("critical_direction", format_direction(dir, quadratic_form(m, p, dir.y, dir.v)));
        const GrowthResult g = quadratic_growth_probe(m, p, n_trials, radius, seed);
        rb.section("growth", format_growth(g, radius));
        give(report, rb.str());
        give(growth_csv, g.to_csv());
    });
}

pk_status pk_session_holder(pk_session* session, size_t n_pairs, uint64_t seed, char** report)
{
    return guarded([&] {
        require(session, "session");
        const KKTPoint& p = ensure_point(session);
        session->holder = multiplier_continuity_report(*session->model, p, n_pairs, seed);
        give(report, format_continuity(*session->holder));
    });
}

pk_status pk_session_holder_table(const pk_session* session, const char* name, char** csv)
{
    return guarded([&] {
        require(session, "session");
        require(name, "name");
        if (!session->holder)
            fail(ErrorKind::config, "no Hoelder fits in this session; run pk_session_holder first");
        const ContinuityReport& r = *session->holder;
        const std::string_view n(name);
        const HolderFit* f = n == "y" ? &r.y : n == "u" ? &r.u : n == "phi" ? &r.phi : n == "e" ? &r.e
                             : n == "gu_e" ? &r.gu_e : nullptr;
        if (!f)
            fail(ErrorKind::config, "unknown fit '" + std::string(n) + "'");
        give(csv, f->bins_csv());
    });
}

pk_status pk_session_oracle_compare(pk_session* session, char** report)
{
    return guarded([&] {
        require(session, "session");
        const Model& m = *session->model;
        const NLPInstance nlp = discretize_to_nlp(m);
        const KKTPoint& p = ensure_point(session);
        const NLPSolution sol = solve_nlp_active_set(nlp);
        const MultiplierDiscrepancy d = compare_multipliers(sol, p, nlp, true);
        const MultiplierDiscrepancy raw = compare_multipliers(sol, p, nlp, false);
        std::string body = format_oracle(sol, d, raw);
        body += "oracle_objective = " + format17(nlp.objective(sol.z)) + "\n";
        body += "pde_objective = " + format17(nlp.objective(nlp.pack(p.y, p.u))) + "\n";
        body += "jacobian_check = " + format17(nlp.jacobian_check_error()) + "\n";
        give(report, body);
    });
}

pk_status pk_session_export_fields(pk_session* session, const char* dir)
{
    return guarded([&] {
        require(session, "session");
        require(dir, "directory");
        const Model& m = *session->model;
        const KKTPoint& p = ensure_point(session);
        const std::filesystem::path d(dir);
        std::error_code ec;
        std::filesystem::create_directories(d, ec);
        KKTPoint& mp = const_cast<KKTPoint&>(p);
        for (const char* n : field_names)
            write_field(d / (std::string(n) + ".field"), *field_by_name(mp, n));
        write_field(d / "g.field", constraint_values(m, p.y, p.u));
        write_field(d / "boundary.field", boundary_values(m, p.y));
        write_field(d / "h_potential.field", h_potential_audit(m, p.y, p.u).potential);
        write_field(d / "e_max.field", recover_multiplier_max(m, p.y, p.phi));
        write_field(d / "e_division.field", recover_multiplier_division(m, p.y, p.u, p.phi));
    });
}

} // extern "C"
