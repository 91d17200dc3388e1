// parakkt command-line driver. One verb per run; artifacts go to --out.
#include "parakkt/parakkt.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct CliError {
    int code;
    std::string message;
};

struct RunConfig {
    std::string verb;
    std::string problem;
    std::vector<int> nodes{33, 33};
    int levels = 65;
    std::string out = "out";
    std::string fields;
    std::uint64_t seed = 1;
    int max_outer = 0;
    double tol = 0.0;
    std::size_t samples = 2000;
    int trials = 50;
    double radius = 1e-2;
    std::size_t pairs = 20000;
};

void check(pk_status s)
{
    if (s != PK_OK)
        throw CliError{static_cast<int>(s), pk_last_error()};
}

std::string take(char* s)
{
    std::string r = s ? s : "";
    pk_string_free(s);
    return r;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw CliError{PK_ERROR_IO, "io: cannot write " + path.string()};
}

struct Problem {
    pk_problem* p = nullptr;
    ~Problem() { pk_problem_destroy(p); }
};

struct Session {
    pk_session* s = nullptr;
    ~Session() { pk_session_destroy(s); }
};

std::string section(const std::string& name, const std::string& body)
{
    std::string s = "== SECTION " + name + " ==\n" + body;
    if (!s.empty() && s.back() != '\n')
        s += '\n';
    return s;
}

int run(const RunConfig& cfg)
{
    Problem prob;
    check(pk_problem_resolve(cfg.problem.c_str(), &prob.p));

    const fs::path out(cfg.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec)
        throw CliError{PK_ERROR_IO, "io: cannot create " + out.string() + ": " + ec.message()};

    char* audit_text = nullptr;
    int audit_pass = 0;
    check(pk_problem_validate(prob.p, cfg.samples, cfg.seed, &audit_text, &audit_pass));
    const std::string audit = take(audit_text);

    if (cfg.verb == "validate") {
        write_text(out / "report.txt", audit);
        if (!audit_pass)
            throw CliError{PK_ERROR_HYPOTHESIS, "hypothesis: audit failed, see report.txt"};
        return 0;
    }
    if (!audit_pass) {
        write_text(out / "report.txt", audit);
        throw CliError{PK_ERROR_HYPOTHESIS, "hypothesis: audit failed, see report.txt"};
    }

    Session ses;
    pk_grid_options grid{{cfg.nodes[0], cfg.nodes.size() > 1 ? cfg.nodes[1] : cfg.nodes[0]}, cfg.levels};
    check(pk_session_create(prob.p, &grid, &ses.s));

    std::string report = audit;
    int code = 0;

    auto solve = [&] {
        pk_solve_options opts{cfg.max_outer, cfg.tol};
        char* rep = nullptr;
        char* trace = nullptr;
        int converged = 0;
        check(pk_session_solve(ses.s, &opts, &rep, &trace, &converged));
        report += take(rep);
        write_text(out / "trace.csv", take(trace));
        if (!converged)
            code = PK_ERROR_SOLVER;
    };

    if (cfg.verb == "solve") {
        solve();
        check(pk_session_write_fields(ses.s, out.string().c_str()));
    } else if (cfg.verb == "check-kkt") {
        if (cfg.fields.empty())
            throw CliError{PK_ERROR_CONFIG, "config: check-kkt needs --fields DIR"};
        check(pk_session_read_fields(ses.s, cfg.fields.c_str()));
        char* rep = nullptr;
        check(pk_session_check_kkt(ses.s, &rep));
        report += section("residuals", take(rep));
    } else {
        if (!cfg.fields.empty())
            check(pk_session_read_fields(ses.s, cfg.fields.c_str()));
        else
            solve();
        if (cfg.verb == "soc") {
            char* rep = nullptr;
            char* csv = nullptr;
            check(pk_session_soc(ses.s, cfg.seed, cfg.trials, cfg.radius, &rep, &csv));
            report += take(rep);
            write_text(out / "growth.csv", take(csv));
        } else if (cfg.verb == "holder") {
            char* rep = nullptr;
            check(pk_session_holder(ses.s, cfg.pairs, cfg.seed, &rep));
            report += section("holder", take(rep));
            for (const char* name : {"y", "u", "phi", "e", "gu_e"}) {
                char* csv = nullptr;
                check(pk_session_holder_table(ses.s, name, &csv));
                write_text(out / ("holder_" + std::string(name) + ".csv"), take(csv));
            }
        } else if (cfg.verb == "oracle-compare") {
            char* rep = nullptr;
            check(pk_session_oracle_compare(ses.s, &rep));
            report += section("oracle", take(rep));
        } else if (cfg.verb == "export-fields") {
            check(pk_session_export_fields(ses.s, out.string().c_str()));
        }
    }

    write_text(out / "report.txt", report);
    if (code == PK_ERROR_SOLVER)
        throw CliError{code, "solver: optimizer did not reach the KKT tolerance, see report.txt"};
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    RunConfig cfg;
    CLI::App app{"parakkt: optimal control of semilinear parabolic equations with mixed constraints"};
    app.require_subcommand(1, 1);

    const std::vector<std::string> verbs{"validate", "solve", "check-kkt", "soc", "holder", "oracle-compare",
                                         "export-fields"};
    for (const auto& verb : verbs) {
        CLI::App* sub = app.add_subcommand(verb);
        sub->add_option("-p,--problem", cfg.problem, "catalog name or problem file")->required();
        sub->add_option("-o,--out", cfg.out, "output directory")->capture_default_str();
        sub->add_option("--seed", cfg.seed, "seed for every random draw")->capture_default_str();
        sub->add_option("--samples", cfg.samples, "hypothesis audit samples")->capture_default_str();
        if (verb == "validate")
            continue;
        sub->add_option("-n,--nodes", cfg.nodes, "nodes per axis including the boundary")
            ->expected(1, 2)
            ->check(CLI::Range(3, 1 << 20))
            ->capture_default_str();
        sub->add_option("-l,--levels", cfg.levels, "time levels")
            ->check(CLI::Range(2, 1 << 20))
            ->capture_default_str();
        sub->add_option("--max-outer", cfg.max_outer, "optimizer iteration cap");
        sub->add_option("--tol", cfg.tol, "KKT residual tolerance");
        if (verb != "solve")
            sub->add_option("-f,--fields", cfg.fields, "directory with y/u/phi/e .field files")
                ->check(CLI::ExistingDirectory);
        if (verb == "soc") {
            sub->add_option("--trials", cfg.trials, "growth probe trials")->capture_default_str();
            sub->add_option("--radius", cfg.radius, "growth probe radius")->capture_default_str();
        }
        if (verb == "holder")
            sub->add_option("--pairs", cfg.pairs, "offset pairs per field")->capture_default_str();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return PK_ERROR_CONFIG;
    }
    cfg.verb = app.get_subcommands().front()->get_name();

    try {
        return run(cfg);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return PK_ERROR_INTERNAL;
    }
}
