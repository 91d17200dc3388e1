#pragma once

#include "problem.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace parakkt {

std::vector<std::string> builtin_names();

/// Problem-file text of a built-in problem; config error listing the
/// available names when unknown.
std::string builtin_source(std::string_view name);

ProblemSpec builtin_problem(std::string_view name);

/// Catalog name or path to a problem file.
ProblemSpec resolve_problem(std::string_view name_or_path);

} // namespace parakkt
