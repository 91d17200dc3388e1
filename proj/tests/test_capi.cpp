#include <parakkt/parakkt.h>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct StringDeleter {
    void operator()(char* s) const { pk_string_free(s); }
};
using owned = std::unique_ptr<char, StringDeleter>;

std::string take(char* s)
{
    owned o(s);
    return s ? std::string(s) : std::string();
}

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("parakkt_capi_" + name);
    fs::remove_all(p);
    return p;
}

struct Session {
    pk_problem* problem = nullptr;
    pk_session* session = nullptr;

    explicit Session(const char* name, int nodes = 9, int levels = 9)
    {
        EXPECT_EQ(pk_problem_from_catalog(name, &problem), PK_OK) << pk_last_error();
        pk_grid_options g{{nodes, nodes}, levels};
        EXPECT_EQ(pk_session_create(problem, &g, &session), PK_OK) << pk_last_error();
    }
    ~Session()
    {
        pk_session_destroy(session);
        pk_problem_destroy(problem);
    }
};

// Key-value value from a report block.
std::string value_of(const std::string& report, const std::string& key)
{
    const std::string needle = "\n" + key + " = ";
    const auto at = ("\n" + report).find(needle);
    if (at == std::string::npos)
        return {};
    const auto start = at + needle.size() - 1;
    return report.substr(start, report.find('\n', start) - start);
}

} // namespace

TEST(CApi, StatusNamesAndVersion)
{
    EXPECT_STREQ(pk_status_name(PK_OK), "ok");
    EXPECT_STREQ(pk_status_name(PK_ERROR_CONFIG), "config");
    EXPECT_STREQ(pk_status_name(PK_ERROR_HYPOTHESIS), "hypothesis");
    EXPECT_STREQ(pk_status_name(PK_ERROR_SOLVER), "solver");
    EXPECT_STREQ(pk_status_name(PK_ERROR_IO), "io");
    EXPECT_STREQ(pk_status_name(PK_ERROR_INTERNAL), "internal");
    EXPECT_STREQ(pk_version(), "0.1.0");
}

TEST(CApi, ErrorsCarryAMessage)
{
    pk_problem* p = nullptr;
    EXPECT_EQ(pk_problem_from_catalog("no_such_problem", &p), PK_ERROR_CONFIG);
    EXPECT_EQ(p, nullptr);
    EXPECT_NE(std::string(pk_last_error()).find("config:"), std::string::npos) << pk_last_error();

    EXPECT_EQ(pk_problem_from_file("/nonexistent/problem.txt", &p), PK_ERROR_IO);
    EXPECT_NE(std::string(pk_last_error()).find("io:"), std::string::npos);

    EXPECT_EQ(pk_problem_from_text("[domain]\ndim = 7\n", &p), PK_ERROR_CONFIG);
    EXPECT_EQ(pk_problem_from_catalog(nullptr, &p), PK_ERROR_CONFIG);
    EXPECT_EQ(pk_problem_from_catalog("tracking_box_1d", nullptr), PK_ERROR_CONFIG);
    pk_problem_destroy(nullptr);
    pk_session_destroy(nullptr);
    pk_string_free(nullptr);
}

TEST(CApi, CatalogAndSourceRoundTrip)
{
    char* names = nullptr;
    ASSERT_EQ(pk_catalog_names(&names), PK_OK);
    const std::string list = take(names);
    EXPECT_NE(list.find("tracking_box_1d\n"), std::string::npos);
    EXPECT_NE(list.find("tracking_box_2d\n"), std::string::npos);

    pk_problem* p = nullptr;
    ASSERT_EQ(pk_problem_resolve("tracking_box_2d", &p), PK_OK);
    EXPECT_EQ(pk_problem_dim(p), 2);
    char* src = nullptr;
    ASSERT_EQ(pk_problem_source(p, &src), PK_OK);
    const std::string text = take(src);
    pk_problem* q = nullptr;
    ASSERT_EQ(pk_problem_from_text(text.c_str(), &q), PK_OK) << pk_last_error();
    ASSERT_EQ(pk_problem_source(q, &src), PK_OK);
    EXPECT_EQ(take(src), text);

    const fs::path file = scratch("source.txt");
    std::ofstream(file) << text;
    pk_problem* r = nullptr;
    ASSERT_EQ(pk_problem_resolve(file.c_str(), &r), PK_OK) << pk_last_error();
    EXPECT_EQ(pk_problem_dim(r), 2);
    pk_problem_destroy(p);
    pk_problem_destroy(q);
    pk_problem_destroy(r);
    fs::remove(file);
}

TEST(CApi, Validate)
{
    pk_problem* p = nullptr;
    ASSERT_EQ(pk_problem_from_catalog("example31_poly", &p), PK_OK);
    char* report = nullptr;
    int pass = -1;
    ASSERT_EQ(pk_problem_validate(p, 500, 1, &report, &pass), PK_OK) << pk_last_error();
    const std::string r = take(report);
    EXPECT_EQ(pass, 1);
    EXPECT_NE(r.find("== SECTION hypotheses =="), std::string::npos);
    EXPECT_NE(r.find("== SECTION derivatives =="), std::string::npos);
    pk_problem_destroy(p);
}

TEST(CApi, SolveAndFieldAccess)
{
    Session s("tracking_box_1d");
    const size_t n = pk_session_field_size(s.session);
    EXPECT_EQ(n, 7u * 9u);
    std::vector<double> buf(n);
    EXPECT_EQ(pk_session_get_field(s.session, "u", buf.data(), n), PK_ERROR_CONFIG);

    char* report = nullptr;
    char* trace = nullptr;
    int converged = 0;
    ASSERT_EQ(pk_session_solve(s.session, nullptr, &report, &trace, &converged), PK_OK) << pk_last_error();
    EXPECT_EQ(converged, 1);
    const std::string r = take(report);
    EXPECT_NE(r.find("== SECTION solve =="), std::string::npos);
    EXPECT_NE(r.find("== SECTION residuals =="), std::string::npos);
    EXPECT_EQ(take(trace).rfind("iter,J,step,", 0), 0u);

    ASSERT_EQ(pk_session_get_field(s.session, "e", buf.data(), n), PK_OK);
    double emax = 0.0;
    for (double v : buf)
        emax = std::max(emax, v);
    EXPECT_GT(emax, 0.0);
    EXPECT_EQ(pk_session_get_field(s.session, "e", buf.data(), n - 1), PK_ERROR_CONFIG);
    EXPECT_EQ(pk_session_get_field(s.session, "w", buf.data(), n), PK_ERROR_CONFIG);

    pk_solve_options opts{1, 0.0};
    pk_session_solve(s.session, &opts, nullptr, nullptr, &converged);
    EXPECT_EQ(converged, 0);
}

TEST(CApi, WriteReadRoundTripPreservesResiduals)
{
    Session a("example31_poly");
    ASSERT_EQ(pk_session_solve(a.session, nullptr, nullptr, nullptr, nullptr), PK_OK);
    char* before = nullptr;
    ASSERT_EQ(pk_session_check_kkt(a.session, &before), PK_OK);
    const fs::path dir = scratch("fields");
    ASSERT_EQ(pk_session_write_fields(a.session, dir.c_str()), PK_OK) << pk_last_error();

    Session b("example31_poly");
    char* none = nullptr;
    EXPECT_EQ(pk_session_check_kkt(b.session, &none), PK_ERROR_CONFIG);
    ASSERT_EQ(pk_session_read_fields(b.session, dir.c_str()), PK_OK) << pk_last_error();
    char* after = nullptr;
    ASSERT_EQ(pk_session_check_kkt(b.session, &after), PK_OK);
    EXPECT_EQ(take(before), take(after));

    Session c("example31_poly", 11, 9);
    EXPECT_NE(pk_session_read_fields(c.session, dir.c_str()), PK_OK);
    EXPECT_EQ(pk_session_read_fields(c.session, "/nonexistent/dir"), PK_ERROR_IO);
    fs::remove_all(dir);
}

TEST(CApi, SetFieldChangesResiduals)
{
    Session s("tracking_box_1d");
    ASSERT_EQ(pk_session_solve(s.session, nullptr, nullptr, nullptr, nullptr), PK_OK);
    const size_t n = pk_session_field_size(s.session);
    std::vector<double> u(n);
    ASSERT_EQ(pk_session_get_field(s.session, "u", u.data(), n), PK_OK);
    for (double& v : u)
        v -= 0.5;
    ASSERT_EQ(pk_session_set_field(s.session, "u", u.data(), n), PK_OK);
    char* report = nullptr;
    ASSERT_EQ(pk_session_check_kkt(s.session, &report), PK_OK);
    const std::string r = take(report);
    EXPECT_GT(std::stod(value_of(r, "state_res")), 1e-3) << r;
}

TEST(CApi, DiagnosticsProduceReports)
{
    Session s("tracking_box_1d", 9, 17);
    char* report = nullptr;
    char* csv = nullptr;
    ASSERT_EQ(pk_session_soc(s.session, 1, 5, 1e-2, &report, &csv), PK_OK) << pk_last_error();
    const std::string soc = take(report);
    EXPECT_NE(soc.find("== SECTION legendre =="), std::string::npos);
    EXPECT_NE(soc.find("== SECTION growth =="), std::string::npos);
    EXPECT_EQ(take(csv).rfind("trial,ratio,norm_du,feasible\n", 0), 0u);
    EXPECT_EQ(pk_session_soc(s.session, 1, 0, 1e-2, &report, &csv), PK_ERROR_CONFIG);

    EXPECT_EQ(pk_session_holder_table(s.session, "y", &csv), PK_ERROR_CONFIG);
    ASSERT_EQ(pk_session_holder(s.session, 2000, 1, &report), PK_OK) << pk_last_error();
    take(report);
    for (const char* name : {"y", "u", "phi", "e", "gu_e"}) {
        ASSERT_EQ(pk_session_holder_table(s.session, name, &csv), PK_OK) << name;
        EXPECT_EQ(take(csv).rfind("bin_lo,bin_hi,n,max_increment\n", 0), 0u);
    }

    Session small("tracking_box_1d", 5, 5);
    ASSERT_EQ(pk_session_oracle_compare(small.session, &report), PK_OK) << pk_last_error();
    const std::string oc = take(report);
    EXPECT_LE(std::stod(value_of(oc, "e_linf")), 1e-6) << oc;
    EXPECT_FALSE(value_of(oc, "oracle_objective").empty());
    EXPECT_EQ(pk_session_oracle_compare(s.session, &report), PK_OK);
    take(report);

    Session big("tracking_box_1d", 33, 65);
    EXPECT_EQ(pk_session_oracle_compare(big.session, &report), PK_ERROR_CONFIG);

    const fs::path dir = scratch("export");
    ASSERT_EQ(pk_session_export_fields(small.session, dir.c_str()), PK_OK);
    for (const char* f : {"y", "u", "phi", "e", "g", "boundary", "h_potential", "e_max", "e_division"})
        EXPECT_TRUE(fs::exists(dir / (std::string(f) + ".field"))) << f;
    fs::remove_all(dir);
}

TEST(CApi, SessionValidation)
{
    pk_problem* p = nullptr;
    ASSERT_EQ(pk_problem_from_catalog("tracking_box_1d", &p), PK_OK);
    pk_session* s = nullptr;
    pk_grid_options bad{{2, 2}, 9};
    EXPECT_EQ(pk_session_create(p, &bad, &s), PK_ERROR_CONFIG);
    EXPECT_EQ(s, nullptr);
    pk_grid_options one_level{{9, 9}, 1};
    EXPECT_EQ(pk_session_create(p, &one_level, &s), PK_ERROR_CONFIG);
    EXPECT_EQ(pk_session_create(p, nullptr, &s), PK_ERROR_CONFIG);
    EXPECT_EQ(pk_session_field_size(nullptr), 0u);
    pk_problem_destroy(p);
}
