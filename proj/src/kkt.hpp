#pragma once

#include "model.hpp"
#include "parabolic.hpp"

#include <string>

namespace parakkt {

struct KKTPoint {
    Field y, u, phi, e;
    double J = 0.0;
};

struct ResidualReport {
    double stat_res = 0.0;      // max |L_u - phi + e g_u|
    double comp_res = 0.0;      // max |e g|
    double sign_viol = 0.0;     // max(0, -min e)
    double feas_viol = 0.0;     // max(0, max g)
    double adjoint_res = 0.0;
    double state_res = 0.0;

    /// Largest of the four first-order entries (stationarity, complementarity,
    /// sign, feasibility).
    double first_order() const;
};

/// Key-value block, one "key = value" line per entry with 17 digits.
std::string format_report(const ResidualReport& r);

inline constexpr double tol_sign = 1e-10;
inline constexpr double tol_feas = 1e-8;

/// The unique u with g(x, t, y, u) = 0 (g is increasing in u).
double constraint_boundary(const ProblemSpec& spec, const Point& x, double t, double y);

struct ControlUpdate {
    double u = 0.0;
    double e = 0.0;
};

/// Minimizer of L(x,t,y,u) - phi u over {g(x,t,y,u) <= 0} together with the
/// multiplier of the constraint.
ControlUpdate pointwise_control_update(const ProblemSpec& spec, const Point& x, double t, double y,
                                       double phi);

/// e = (phi - L_u) / g_u at every node.
Field recover_multiplier_division(const Model& model, const Field& y, const Field& u,
                                  const Field& phi);

/// e = max(0, phi - L_u(y, Phi)) / g_u(y, Phi) with Phi the constraint boundary.
Field recover_multiplier_max(const Model& model, const Field& y, const Field& phi);

struct HPotential {
    Field potential;   // f'(y) + g_y / g_u
    double ess_bound = 0.0;
};

HPotential h_potential_audit(const Model& model, const Field& y, const Field& u);

ResidualReport kkt_residuals(const Model& model, const KKTPoint& point);

/// Threshold above which a node counts as strongly active.
double activity_threshold(const Field& e);

/// Constraint values g(x, t, y, u) at every node.
Field constraint_values(const Model& model, const Field& y, const Field& u);

/// Phi(x, t, y) at every node.
Field boundary_values(const Model& model, const Field& y);

/// Multiplier pair from a fixed (y, u) without any lagged multiplier: the
/// stationarity relation is substituted into the adjoint source, giving the
/// potential f'(y) + g_y/g_u, after which e follows by division.
std::pair<Field, Field> recover_adjoint_pair(const Model& model, const Field& y, const Field& u,
                                             const SolverOptions& opts = {});

} // namespace parakkt
