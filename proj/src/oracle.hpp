#pragma once

// Dense finite-dimensional form of the discrete problem.
//
// Variables: the states y_1..y_N (level 0 is fixed by y0) followed by the
// controls u_0..u_N, each level holding the n interior nodes:
//   y(j, i) -> (j - 1) n + i          j = 1..N
//   u(j, i) -> N n + j n + i          j = 0..N
// The control at level 0 only enters the objective and the constraint.
// Equality rows F(j, i), j = 1..N, are the implicit Euler residuals of the
// state solver; inequality rows G(j, i), j = 0..N, are g at every node.
//
// With the Lagrangian  J + lambda^T F + mu^T G  the multipliers relate to
// the fields of a KKT point by
//   e(j, i)   = mu(j, i) / W(j, i),
//   phi(j, i) = lambda(j, i) / W(j, i)   (j >= 1, phi at level 0 is zero),
// W being the space-time quadrature weight of the node.

#include "kkt.hpp"
#include "model.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace parakkt {

inline constexpr std::size_t oracle_max_variables = 2000;

class NLPInstance {
public:
    explicit NLPInstance(const Model& model);

    const Model& model() const { return *model_; }
    std::size_t nodes() const { return n_; }
    int steps() const { return N_; }
    std::size_t num_vars() const { return n_ * (2 * N_ + 1); }
    std::size_t num_eq() const { return n_ * N_; }
    std::size_t num_ineq() const { return n_ * (N_ + 1); }

    std::size_t y_index(int j, std::size_t i) const { return (j - 1) * n_ + i; }
    std::size_t u_index(int j, std::size_t i) const { return N_ * n_ + j * n_ + i; }
    std::size_t eq_row(int j, std::size_t i) const { return (j - 1) * n_ + i; }
    std::size_t ineq_row(int j, std::size_t i) const { return j * n_ + i; }

    /// Quadrature weight of every inequality row (and of every node).
    const Eigen::VectorXd& node_weights() const { return weights_; }

    double objective(const Eigen::VectorXd& z) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& z) const;
    Eigen::VectorXd F(const Eigen::VectorXd& z) const;
    Eigen::MatrixXd jacobian_F(const Eigen::VectorXd& z) const;
    Eigen::VectorXd G(const Eigen::VectorXd& z) const;
    Eigen::MatrixXd jacobian_G(const Eigen::VectorXd& z) const;
    /// Hessian of J + lambda^T F + mu^T G in z.
    Eigen::MatrixXd lagrangian_hessian(const Eigen::VectorXd& z, const Eigen::VectorXd& lambda,
                                       const Eigen::VectorXd& mu) const;

    Eigen::VectorXd pack(const Field& y, const Field& u) const;
    void unpack(const Eigen::VectorXd& z, Field& y, Field& u) const;

    /// Relative mismatch of the Jacobians against central differences,
    /// measured at construction.
    double jacobian_check_error() const { return jac_check_; }

private:
    double y_at(const Eigen::VectorXd& z, int j, std::size_t i) const;

    const Model* model_;
    std::size_t n_;
    int N_;
    Eigen::VectorXd weights_;
    Eigen::VectorXd y0_;
    double jac_check_ = 0.0;
};

/// Builds the instance; config error above oracle_max_variables variables,
/// internal error if the Jacobians disagree with finite differences.
NLPInstance discretize_to_nlp(const Model& model);

struct NLPSolution {
    Eigen::VectorXd z, lambda, mu;
    double stationarity = 0.0;     // max |grad of the Lagrangian|
    double complementarity = 0.0;  // |mu^T G|
    double eq_violation = 0.0;     // max |F|
    double ineq_violation = 0.0;   // max(0, max G)
    bool converged = false;
    int active_changes = 0;
    int newton_iterations = 0;
    std::vector<std::size_t> active_set;
};

/// Primal-dual active-set iteration, each active set solved by Newton on the
/// equality-constrained KKT system with dense LU. Solver errors on cycling
/// (500 active-set changes) or a singular KKT matrix, naming the active set.
NLPSolution solve_nlp_active_set(const NLPInstance& nlp, const Eigen::VectorXd* start = nullptr);

struct MultiplierDiscrepancy {
    double e_linf = 0.0, e_l2 = 0.0;
    double phi_linf = 0.0, phi_l2 = 0.0;
    bool scaled = true;

    std::string to_text() const;
};

/// Oracle fields (y, u, phi, e) under the documented scaling.
KKTPoint oracle_point(const NLPInstance& nlp, const NLPSolution& sol, bool scale_by_weights = true);

/// Discrepancy between the oracle multipliers and a KKT point; with
/// scale_by_weights off the raw multipliers are compared (negative control).
MultiplierDiscrepancy compare_multipliers(const NLPSolution& sol, const KKTPoint& point,
                                          const NLPInstance& nlp, bool scale_by_weights = true);

} // namespace parakkt
