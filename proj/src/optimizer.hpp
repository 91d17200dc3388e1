#pragma once

#include "kkt.hpp"
#include "model.hpp"
#include "parabolic.hpp"

#include <optional>
#include <string>
#include <vector>

namespace parakkt {

struct OptimizerOptions {
    int max_outer = 200;
    double tol_kkt = 1e-8;
    double c1 = 1e-4;
    double backtrack = 0.5;
    int max_halvings = 30;
    std::optional<Field> u_init;   // zero when absent
    SolverOptions solver;

    void validate() const;
};

struct TraceRow {
    int iter = 0;
    double J = 0.0;
    double step = 0.0;   // step accepted in this iteration (0 on the final row)
    double stat_res = 0.0;
    double comp_res = 0.0;
    double feas_viol = 0.0;
    std::size_t active_count = 0;
};

struct SolveTrace {
    std::vector<TraceRow> rows;

    /// iter,J,step,stat_res,comp_res,feas_viol,active_count
    std::string to_csv() const;
};

struct OcpResult {
    KKTPoint point;
    SolveTrace trace;
    ResidualReport residuals;
    bool converged = false;
    bool stalled = false;   // line search failed
    int iterations = 0;
};

/// L_u(y(u), u) - phi with phi the adjoint for e = 0: the gradient of the
/// discrete reduced objective in the quadrature inner product.
Field reduced_gradient(const Model& model, const Field& u, const SolverOptions& opts = {});

/// Reduced objective J(y(u), u).
double reduced_objective(const Model& model, const Field& u, const SolverOptions& opts = {});

struct FeasiblePair {
    Field u;
    Field y;
};

/// Alternates state solve and the projection u <- min(u, Phi(x,t,y)) `passes`
/// times, then solves for the state of the final control.
FeasiblePair restore_feasibility(const Model& model, Field u, int passes = 2,
                                 const SolverOptions& opts = {});

OcpResult solve_ocp(const Model& model, const OptimizerOptions& opts = {});

} // namespace parakkt
