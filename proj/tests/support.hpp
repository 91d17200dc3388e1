#pragma once

#include "problem_file.hpp"

#include <map>
#include <string>

namespace parakkt::testing {

// Problem text with every key overridable; defaults give a linear-quadratic
// 1D problem with a simple upper control bound.
inline std::string problem_text(const std::map<std::string, std::string>& over = {})
{
    std::map<std::string, std::string> k{
        {"dim", "1"},      {"extent", "1"},   {"T", "1"},        {"y0", "0"},         {"coeff", ""},
        {"f", "y"},        {"df", "1"},       {"ddf", "0"},      {"C_f", "1"},
        {"L", "0.5*(y - amp*sin(pi*x1))^2 + 0.5*nu*u^2"}, {"L_y", "y - amp*sin(pi*x1)"}, {"L_u", "nu*u"},      {"L_yy", "1"},
        {"L_yu", "0"},     {"L_uu", "nu"},
        {"g", "u - ub"},   {"g_y", "0"},      {"g_u", "1"},      {"g_yy", "0"},       {"g_yu", "0"},
        {"g_uu", "0"},     {"constants", "nu = 0.1\namp = 1\nub = 5\n"},
        {"gamma1", "nu"},  {"gamma2", "1"},   {"audit_y", "-3 3"}, {"audit_u", "-10 10"}, {"extra", ""}};
    for (const auto& [key, v] : over)
        k[key] = v;
    std::string t = "[domain]\nname = test\ndim = " + k["dim"] + "\nextent = " + k["extent"] + "\nT = " + k["T"] +
                    "\ny0 = " + k["y0"] + "\n" + k["coeff"] + "\n";
    t += "[f]\nf = " + k["f"] + "\ndf = " + k["df"] + "\nddf = " + k["ddf"] + "\nC_f = " + k["C_f"] + "\n";
    t += "[L]\nL = " + k["L"] + "\nL_y = " + k["L_y"] + "\nL_u = " + k["L_u"] + "\nL_yy = " + k["L_yy"] +
         "\nL_yu = " + k["L_yu"] + "\nL_uu = " + k["L_uu"] + "\n";
    t += "[g]\ng = " + k["g"] + "\ng_y = " + k["g_y"] + "\ng_u = " + k["g_u"] + "\ng_yy = " + k["g_yy"] +
         "\ng_yu = " + k["g_yu"] + "\ng_uu = " + k["g_uu"] + "\n";
    t += "[constants]\n" + k["constants"] + "gamma1 = " + k["gamma1"] + "\ngamma2 = " + k["gamma2"] +
         "\naudit_y = " + k["audit_y"] + "\naudit_u = " + k["audit_u"] + "\n";
    t += k["extra"];
    return t;
}

inline ProblemSpec make_problem(const std::map<std::string, std::string>& over = {})
{
    return parse_problem(problem_text(over));
}

} // namespace parakkt::testing
