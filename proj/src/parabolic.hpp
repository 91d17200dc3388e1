#pragma once

#include "model.hpp"

#include <Eigen/SparseLU>

#include <memory>
#include <vector>

namespace parakkt {

enum class LinearSolverKind { sparse_lu, bicgstab };

struct SolverOptions {
    double newton_tol = 1e-10;
    int newton_max_iter = 30;
    double linear_solver_tol = 1e-12;   // used by the iterative solver
    LinearSolverKind linear_solver = LinearSolverKind::sparse_lu;

    void validate() const;
};

struct StateSolveReport {
    int max_newton_iter = 0;
    std::vector<double> step_residuals;   // final residual per step, index j-1 for level j
    double apriori_ratio = 0.0;           // ||y||_inf / (||u||_inf + ||y0||_inf)
};

struct StateSolution {
    Field y;
    StateSolveReport report;
};

/// Solves (I/tau + A + diag(shift)) x = b for a fixed operator and step,
/// refactorizing only when the shift changes.
class StepSolver {
public:
    StepSolver(const SparseMatrix& a, double tau, const SolverOptions& opts);
    ~StepSolver();

    void set_shift(const Eigen::VectorXd& shift);
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Implicit Euler for y_t + A y + f(y) = u with Newton at every step.
StateSolution solve_state(const Model& model, const Field& u, const SolverOptions& opts = {});

/// Implicit Euler for z_t + A z + c z = rhs (A^T when adjoint is set); c and
/// rhs are taken at the new level, level 0 of both is unused.
Field solve_linear_parabolic(const Model& model, const Field& c, const Field& rhs,
                             const Eigen::VectorXd& z_init, bool adjoint,
                             const SolverOptions& opts = {});

/// Discrete adjoint for a potential c and source s: the field phi with
/// phi_0 = 0 and, for levels j = 1..N,
///   (I/tau + A^T + diag c_j)(W_j phi_j) - W_{j+1} phi_{j+1} / tau = -W_j s_j,
/// with W_{N+1} phi_{N+1} = 0. Solved forward on reversed time and scaled by
/// the quadrature weights so that L_u - phi is the weighted gradient.
Field solve_backward(const Model& model, const Field& c, const Field& s,
                     const SolverOptions& opts = {});

/// Adjoint state for the multiplier e: potential f'(y), source L_y + e g_y.
Field solve_adjoint(const Model& model, const Field& y, const Field& u, const Field& e,
                    const SolverOptions& opts = {});

/// Quadrature value of the objective.
double objective(const Model& model, const Field& y, const Field& u);

/// Linearized state: z_t + A z + f'(y) z = v, z(0) = 0.
Field solve_linearized(const Model& model, const Field& y, const Field& v,
                       const SolverOptions& opts = {});

/// Max-norm residual of the discrete state equation (including the initial
/// condition) for the given pair.
double state_residual(const Model& model, const Field& y, const Field& u);

/// Max-norm residual of the discrete adjoint equation, divided by the weights
/// so that it is comparable to L_y.
double adjoint_residual(const Model& model, const Field& y, const Field& u, const Field& phi,
                        const Field& e);

} // namespace parakkt
