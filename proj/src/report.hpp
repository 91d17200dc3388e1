#pragma once

#include "kkt.hpp"
#include "optimizer.hpp"
#include "oracle.hpp"
#include "problem.hpp"
#include "regularity.hpp"
#include "soc.hpp"

#include <map>
#include <string>
#include <string_view>

namespace parakkt {

/// Builder for report.txt: blocks separated by "== SECTION <name> ==" lines.
class ReportBuilder {
public:
    void section(std::string_view name, std::string_view body);
    const std::string& str() const { return text_; }

private:
    std::string text_;
};

/// "key = value" lines into a map; config error on a malformed line.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Sections of a report.txt keyed by name.
std::map<std::string, std::string> split_sections(std::string_view report);

std::string format_hypotheses(const HypothesisReport& r, const AuditBox& box);
std::string format_derivative_check(const DerivativeCheck& c);
std::string format_solve_summary(const OcpResult& r);
std::string format_legendre(const LegendreResult& r);
std::string format_direction(const CriticalDirection& d, double q);
std::string format_growth(const GrowthResult& g, double radius);
std::string format_holder(const HolderFit& f);
std::string format_continuity(const ContinuityReport& r);
std::string format_oracle(const NLPSolution& sol, const MultiplierDiscrepancy& d,
                          const MultiplierDiscrepancy& unscaled);

} // namespace parakkt
