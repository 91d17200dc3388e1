#pragma once

// Problem definition files.
//
//   # comment
//   [domain]
//   name   = my_problem
//   dim    = 1                 # 1 or 2
//   extent = 1                 # one number per axis
//   T      = 1
//   a11    = 1 + x1            # optional, default identity; also a12 a21 a22
//   y0     = 0
//
//   [f]                        # expressions in y
//   f = y^3
//   df = 3*y^2
//   ddf = 6*y
//   C_f = 0
//
//   [L]                        # expressions in x1 x2 t y u
//   L = 0.5*(y - 1)^2 + 0.5*nu*u^2
//   L_y = ...   L_u = ...   L_yy = ...   L_yu = ...   L_uu = ...
//
//   [g]
//   g = u - 1
//   g_y = ...   g_u = ...   g_yy = ...   g_yu = ...   g_uu = ...
//
//   [constants]
//   gamma1 = 0.1
//   gamma2 = 1
//   audit_y = -3 3             # (y, u) box for the hypothesis audit
//   audit_u = -3 3
//   nu = 0.1                   # any other name is a user constant
//
//   [reference]                # optional manufactured solution
//   state = sin(pi*x1)*exp(-t)
//   forcing = ...
//
// User constants may be used in every expression; a constant may refer to
// constants defined before it. Sections may appear in any order.

#include "expr.hpp"
#include "problem.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace parakkt {

struct ProblemDocument {
    std::string name = "unnamed";
    int dim = 1;
    std::array<double, 2> extent{1.0, 1.0};
    double horizon = 1.0;

    /// Coefficient expressions keyed "a11", "a12", "a21", "a22" (only those given).
    std::vector<std::pair<std::string, expr::Expression>> coefficients;
    expr::Expression y0;

    expr::Expression f, df, ddf;
    expr::Expression c_f;

    std::array<expr::Expression, 6> L;   // value, y, u, yy, yu, uu
    std::array<expr::Expression, 6> g;

    expr::Expression gamma1, gamma2;
    AuditBox audit_box;
    std::vector<std::pair<std::string, expr::Expression>> constants;   // user constants, file order

    std::optional<std::pair<expr::Expression, expr::Expression>> reference;   // state, forcing
};

ProblemDocument parse_problem_document(std::string_view text);

/// Canonical text; parse_problem_document(write_problem_document(d)) reproduces d
/// and writes back to the identical string.
std::string write_problem_document(const ProblemDocument& doc);

ProblemSpec to_spec(const ProblemDocument& doc);

ProblemSpec parse_problem(std::string_view text);
ProblemSpec load_problem_file(const std::filesystem::path& path);

} // namespace parakkt
