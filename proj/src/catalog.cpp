#include "catalog.hpp"

#include "common.hpp"
#include "problem_file.hpp"

#include <filesystem>

namespace parakkt {

namespace {

struct Builtin {
    const char* name;
    const char* text;
};

// Tracking of a fixed profile with a control bound that binds on an interior
// region of the space-time cylinder.
constexpr const char* tracking_box_1d = R"(
[domain]
name = tracking_box_1d
dim = 1
extent = 1
T = 1
y0 = 0

[f]
f = y^3
df = 3*y^2
ddf = 6*y
C_f = 0

[L]
L = 0.5*(y - amp*sin(pi*x1))^2 + 0.5*nu*u^2
L_y = y - amp*sin(pi*x1)
L_u = nu*u
L_yy = 1
L_yu = 0
L_uu = nu

[g]
g = u - (b0 + b1*x1*t)
g_y = 0
g_u = 1
g_yy = 0
g_yu = 0
g_uu = 0

[constants]
nu = 0.1
amp = 2
b0 = 1
b1 = 1
gamma1 = nu
gamma2 = 1
audit_y = -3 3
audit_u = -10 10
)";

constexpr const char* tracking_box_2d = R"(
[domain]
name = tracking_box_2d
dim = 2
extent = 1 1
T = 0.5
a11 = 1 + 0.5*x1
a12 = 0.1
a21 = 0.1
a22 = 1
y0 = 0

[f]
f = y^3
df = 3*y^2
ddf = 6*y
C_f = 0

[L]
L = 0.5*(y - amp*sin(pi*x1)*sin(pi*x2))^2 + 0.5*nu*u^2
L_y = y - amp*sin(pi*x1)*sin(pi*x2)
L_u = nu*u
L_yy = 1
L_yu = 0
L_uu = nu

[g]
g = u - (b0 + b1*x2*t)
g_y = 0
g_u = 1
g_yy = 0
g_yu = 0
g_uu = 0

[constants]
nu = 0.1
amp = 4
b0 = 0.8
b1 = 1
gamma1 = nu
gamma2 = 1
audit_y = -3 3
audit_u = -10 10
)";

// g = y^4 u^3 + (y^2 + 1) u, so the constraint boundary is u = 0 and the
// target pushes the control upward on the left half only.
constexpr const char* example31_poly = R"(
[domain]
name = example31_poly
dim = 1
extent = 1
T = 1
y0 = 0

[f]
f = y^3
df = 3*y^2
ddf = 6*y
C_f = 0

[L]
L = 0.5*(y - amp*sin(2*pi*x1))^2 + 0.5*nu*u^2
L_y = y - amp*sin(2*pi*x1)
L_u = nu*u
L_yy = 1
L_yu = 0
L_uu = nu

[g]
g = y^4*u^3 + (y^2 + 1)*u
g_y = 4*y^3*u^3 + 2*y*u
g_u = 3*y^4*u^2 + y^2 + 1
g_yy = 12*y^2*u^3 + 2*u
g_yu = 12*y^3*u^2 + 2*y
g_uu = 6*y^4*u

[constants]
nu = 0.1
amp = 1
gamma1 = nu
gamma2 = 1
audit_y = -2 2
audit_u = -2 2
)";

// Exact state sin(pi x) exp(-t) with its forcing; tracking both makes the
// pair optimal for the continuous problem.
constexpr const char* mms_cubic_1d = R"(
[domain]
name = mms_cubic_1d
dim = 1
extent = 1
T = 1
y0 = sin(pi*x1)

[f]
f = y^3
df = 3*y^2
ddf = 6*y
C_f = 0

[L]
L = 0.5*(y - sin(pi*x1)*exp(-t))^2 + 0.5*nu*(u - ((pi^2 - 1)*sin(pi*x1)*exp(-t) + sin(pi*x1)^3*exp(-3*t)))^2
L_y = y - sin(pi*x1)*exp(-t)
L_u = nu*(u - ((pi^2 - 1)*sin(pi*x1)*exp(-t) + sin(pi*x1)^3*exp(-3*t)))
L_yy = 1
L_yu = 0
L_uu = nu

[g]
g = u - 100
g_y = 0
g_u = 1
g_yy = 0
g_yu = 0
g_uu = 0

[constants]
nu = 0.1
gamma1 = nu
gamma2 = 1
audit_y = -2 2
audit_u = -20 20

[reference]
state = sin(pi*x1)*exp(-t)
forcing = (pi^2 - 1)*sin(pi*x1)*exp(-t) + sin(pi*x1)^3*exp(-3*t)
)";

// Linear-quadratic problem whose bound u <= 10 is never reached.
constexpr const char* strictly_feasible_1d = R"(
[domain]
name = strictly_feasible_1d
dim = 1
extent = 1
T = 1
y0 = 0

[f]
f = y
df = 1
ddf = 0
C_f = 1

[L]
L = 0.5*(y - amp*sin(pi*x1))^2 + 0.5*nu*u^2
L_y = y - amp*sin(pi*x1)
L_u = nu*u
L_yy = 1
L_yu = 0
L_uu = nu

[g]
g = u - 10
g_y = 0
g_u = 1
g_yy = 0
g_yu = 0
g_uu = 0

[constants]
nu = 0.1
amp = 1
gamma1 = nu
gamma2 = 1
audit_y = -3 3
audit_u = -10 10
)";

constexpr Builtin catalog[] = {
    {"tracking_box_1d", tracking_box_1d},
    {"tracking_box_2d", tracking_box_2d},
    {"example31_poly", example31_poly},
    {"mms_cubic_1d", mms_cubic_1d},
    {"strictly_feasible_1d", strictly_feasible_1d},
};

} // namespace

std::vector<std::string> builtin_names()
{
    std::vector<std::string> out;
    for (const auto& b : catalog)
        out.emplace_back(b.name);
    return out;
}

std::string builtin_source(std::string_view name)
{
    for (const auto& b : catalog)
        if (name == b.name)
            return b.text;
    std::string list;
    for (const auto& b : catalog)
        list += (list.empty() ? "" : ", ") + std::string(b.name);
    fail(ErrorKind::config, "unknown catalog problem '" + std::string(name) + "' (available: " + list + ")");
}

ProblemSpec builtin_problem(std::string_view name)
{
    return parse_problem(builtin_source(name));
}

ProblemSpec resolve_problem(std::string_view name_or_path)
{
    for (const auto& b : catalog)
        if (name_or_path == b.name)
            return parse_problem(b.text);
    // Anything that looks like a path goes to the file reader so a missing
    // file is an io error rather than an unknown catalog name.
    std::filesystem::path p(name_or_path);
    if (std::filesystem::exists(p) || name_or_path.find('/') != std::string_view::npos || p.has_extension())
        return load_problem_file(p);
    return builtin_problem(name_or_path);
}

} // namespace parakkt
