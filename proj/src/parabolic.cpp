#include "parabolic.hpp"

#include "common.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <limits>
#include <sstream>

namespace parakkt {

void SolverOptions::validate() const
{
    if (!(newton_tol > 0.0) || !(linear_solver_tol > 0.0) || newton_max_iter < 1)
        fail(ErrorKind::config, "solver options: tolerances and iteration caps must be positive");
}

struct StepSolver::Impl {
    SparseMatrix m;
    std::vector<double*> diag;
    Eigen::VectorXd base;   // 1/tau + A_ii
    LinearSolverKind kind;
    double tol;
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> iterative;
    bool factored = false;
};

StepSolver::StepSolver(const SparseMatrix& a, double tau, const SolverOptions& opts)
    : impl_(std::make_unique<Impl>())
{
    Impl& s = *impl_;
    s.kind = opts.linear_solver;
    s.tol = opts.linear_solver_tol;
    const auto n = a.rows();
    SparseMatrix eye(n, n);
    eye.setIdentity();
    s.m = a + (1.0 / tau) * eye;
    s.m.makeCompressed();
    s.base.resize(n);
    s.diag.resize(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        s.diag[static_cast<std::size_t>(k)] = &s.m.coeffRef(k, k);
        s.base[k] = s.m.coeff(k, k);
    }
    if (s.kind == LinearSolverKind::sparse_lu)
        s.lu.analyzePattern(s.m);
}

StepSolver::~StepSolver() = default;

void StepSolver::set_shift(const Eigen::VectorXd& shift)
{
    Impl& s = *impl_;
    for (std::size_t k = 0; k < s.diag.size(); ++k)
        *s.diag[k] = s.base[static_cast<Eigen::Index>(k)] + shift[static_cast<Eigen::Index>(k)];
    if (s.kind == LinearSolverKind::sparse_lu) {
        s.lu.factorize(s.m);
        s.factored = s.lu.info() == Eigen::Success;
    } else {
        s.iterative.setTolerance(s.tol);
        s.iterative.setMaxIterations(static_cast<Eigen::Index>(10 * s.m.rows() + 100));
        s.iterative.compute(s.m);
        s.factored = s.iterative.info() == Eigen::Success;
    }
    if (!s.factored)
        fail(ErrorKind::solver, "singular step matrix; try a smaller time step");
}

Eigen::VectorXd StepSolver::solve(const Eigen::VectorXd& b) const
{
    const Impl& s = *impl_;
    Eigen::VectorXd x;
    if (s.kind == LinearSolverKind::sparse_lu) {
        x = s.lu.solve(b);
    } else {
        x = s.iterative.solve(b);
        if (s.iterative.info() != Eigen::Success)
            fail(ErrorKind::solver, "iterative step solve did not converge");
    }
    if (!x.allFinite())
        fail(ErrorKind::solver, "step solve produced non-finite values");
    return x;
}

namespace {

std::string step_message(const char* what, int j, double residual)
{
    std::ostringstream os;
    os.precision(17);
    os << what << " at step " << j << " (last residual " << residual << ")";
    return os.str();
}

} // namespace

StateSolution solve_state(const Model& model, const Field& u, const SolverOptions& opts)
{
    opts.validate();
    if (u.grid() != model.grid())
        fail(ErrorKind::config, "solve_state: control lives on a different grid");
    if (!u.all_finite())
        fail(ErrorKind::solver, "solve_state: non-finite control");

    const ProblemSpec& spec = model.spec();
    const double tau = model.tau();
    const auto n = static_cast<Eigen::Index>(model.nodes());
    StateSolution out{Field(model.grid()), {}};
    Field& y = out.y;
    y.level(0) = model.initial_state();

    StepSolver step(model.A(), tau, opts);
    Eigen::VectorXd fy(n), dfy(n), res(n);
    const double eps = std::numeric_limits<double>::epsilon();

    for (int j = 1; j < model.levels(); ++j) {
        const Eigen::VectorXd prev = y.level(j - 1);
        Eigen::VectorXd cur = prev;
        const auto uj = u.level(j);
        double r = 0.0, r_prev = std::numeric_limits<double>::infinity();
        int growth = 0;
        int it = 0;
        for (;; ++it) {
            for (Eigen::Index i = 0; i < n; ++i)
                fy[i] = spec.f.f(cur[i]);
            res = (cur - prev) / tau + model.A() * cur + fy - uj;
            r = res.lpNorm<Eigen::Infinity>();
            if (!std::isfinite(r))
                fail(ErrorKind::solver, step_message("solve_state: non-finite state", j, r));
            if (r <= opts.newton_tol)
                break;
            if (it >= opts.newton_max_iter)
                fail(ErrorKind::solver, step_message("solve_state: Newton iteration cap", j, r));
            growth = r > r_prev ? growth + 1 : 0;
            if (growth >= 5)
                fail(ErrorKind::solver, step_message("solve_state: Newton diverged", j, r));
            r_prev = r;
            for (Eigen::Index i = 0; i < n; ++i)
                dfy[i] = spec.f.df(cur[i]);
            step.set_shift(dfy);
            const Eigen::VectorXd delta = step.solve(-res);
            cur += delta;
            // Rounding floor: the residual cannot drop further once the update
            // is at the level of the state's last bits.
            if (delta.lpNorm<Eigen::Infinity>() <= 4.0 * eps * (1.0 + cur.lpNorm<Eigen::Infinity>())) {
                for (Eigen::Index i = 0; i < n; ++i)
                    fy[i] = spec.f.f(cur[i]);
                res = (cur - prev) / tau + model.A() * cur + fy - uj;
                r = res.lpNorm<Eigen::Infinity>();
                ++it;
                break;
            }
        }
        if (!cur.allFinite())
            fail(ErrorKind::solver, step_message("solve_state: non-finite state", j, r));
        y.level(j) = cur;
        out.report.step_residuals.push_back(r);
        out.report.max_newton_iter = std::max(out.report.max_newton_iter, it);
    }

    const double denom = u.max_abs() + y.level(0).lpNorm<Eigen::Infinity>();
    out.report.apriori_ratio = denom > 0.0 ? y.max_abs() / denom : 0.0;
    return out;
}

Field solve_linear_parabolic(const Model& model, const Field& c, const Field& rhs,
                             const Eigen::VectorXd& z_init, bool adjoint, const SolverOptions& opts)
{
    opts.validate();
    if (c.grid() != model.grid() || rhs.grid() != model.grid())
        fail(ErrorKind::config, "solve_linear_parabolic: fields live on a different grid");
    if (z_init.size() != static_cast<Eigen::Index>(model.nodes()))
        fail(ErrorKind::config, "solve_linear_parabolic: initial value has the wrong size");
    if (!c.all_finite() || !rhs.all_finite())
        fail(ErrorKind::solver, "solve_linear_parabolic: non-finite potential or right-hand side");

    const double tau = model.tau();
    SparseMatrix at;
    if (adjoint) {
        at = model.A().transpose();
        at.makeCompressed();
    }
    StepSolver step(adjoint ? at : model.A(), tau, opts);
    Field z(model.grid());
    z.level(0) = z_init;
    for (int j = 1; j < model.levels(); ++j) {
        try {
            step.set_shift(c.level(j));
        } catch (const Error& e) {
            fail(e.kind(), std::string(e.what()) + " (step " + std::to_string(j) + ")");
        }
        z.level(j) = step.solve(z.level(j - 1) / tau + rhs.level(j));
    }
    return z;
}

Field solve_backward(const Model& model, const Field& c, const Field& s, const SolverOptions& opts)
{
    const int nl = model.levels();
    const int N = nl - 1;
    const Field& w = model.weights();
    Field c_rev(model.grid()), rhs_rev(model.grid());
    for (int m = 1; m <= N; ++m) {
        const int j = N + 1 - m;
        c_rev.level(m) = c.level(j);
        rhs_rev.level(m) = -(w.level(j).array() * s.level(j).array()).matrix();
    }
    const Field z = solve_linear_parabolic(
        model, c_rev, rhs_rev, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.nodes())), true,
        opts);
    Field phi(model.grid());
    for (int j = 1; j <= N; ++j)
        phi.level(j) = (z.level(N + 1 - j).array() / w.level(j).array()).matrix();
    return phi;
}

Field solve_adjoint(const Model& model, const Field& y, const Field& u, const Field& e,
                    const SolverOptions& opts)
{
    require_aligned(y, u, "solve_adjoint");
    require_aligned(y, e, "solve_adjoint");
    const ProblemSpec& spec = model.spec();
    Field c(model.grid()), s(model.grid());
    for (int j = 0; j < model.levels(); ++j)
        for (std::size_t i = 0; i < model.nodes(); ++i) {
            const double yv = y(j, i), uv = u(j, i);
            c(j, i) = spec.f.df(yv);
            s(j, i) = model.eval(spec.L.dy, j, i, yv, uv);
            if (e(j, i) != 0.0)
                s(j, i) += e(j, i) * model.eval(spec.g.dy, j, i, yv, uv);
        }
    return solve_backward(model, c, s, opts);
}

double objective(const Model& model, const Field& y, const Field& u)
{
    require_aligned(y, u, "objective");
    const Field& w = model.weights();
    double sum = 0.0;
    for (int j = 0; j < model.levels(); ++j)
        for (std::size_t i = 0; i < model.nodes(); ++i)
            sum += w(j, i) * model.eval(model.spec().L.value, j, i, y(j, i), u(j, i));
    return sum;
}

Field solve_linearized(const Model& model, const Field& y, const Field& v, const SolverOptions& opts)
{
    require_aligned(y, v, "solve_linearized");
    Field c(model.grid());
    for (std::size_t k = 0; k < c.size(); ++k)
        c.values()[k] = model.spec().f.df(y.values()[k]);
    return solve_linear_parabolic(model, c, v,
                                  Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.nodes())),
                                  false, opts);
}

double state_residual(const Model& model, const Field& y, const Field& u)
{
    require_aligned(y, u, "state_residual");
    const ProblemSpec& spec = model.spec();
    double r = (y.level(0) - model.initial_state()).lpNorm<Eigen::Infinity>();
    Eigen::VectorXd fy(static_cast<Eigen::Index>(model.nodes()));
    for (int j = 1; j < model.levels(); ++j) {
        for (Eigen::Index i = 0; i < fy.size(); ++i)
            fy[i] = spec.f.f(y(j, static_cast<std::size_t>(i)));
        const Eigen::VectorXd res =
            (y.level(j) - y.level(j - 1)) / model.tau() + model.A() * y.level(j) + fy - u.level(j);
        r = std::max(r, res.lpNorm<Eigen::Infinity>());
    }
    return r;
}

double adjoint_residual(const Model& model, const Field& y, const Field& u, const Field& phi,
                        const Field& e)
{
    require_aligned(y, phi, "adjoint_residual");
    const ProblemSpec& spec = model.spec();
    const Field& w = model.weights();
    const int N = model.levels() - 1;
    const double tau = model.tau();
    const auto n = static_cast<Eigen::Index>(model.nodes());
    double r = phi.level(0).lpNorm<Eigen::Infinity>();
    const SparseMatrix at = model.A().transpose();
    for (int j = 1; j <= N; ++j) {
        const Eigen::VectorXd lam = (w.level(j).array() * phi.level(j).array()).matrix();
        Eigen::VectorXd res = lam / tau + at * lam;
        if (j < N)
            res -= (w.level(j + 1).array() * phi.level(j + 1).array()).matrix() / tau;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            const double yv = y(j, ii), uv = u(j, ii);
            double ell = model.eval(spec.L.dy, j, ii, yv, uv);
            if (e(j, ii) != 0.0)
                ell += e(j, ii) * model.eval(spec.g.dy, j, ii, yv, uv);
            res[i] += spec.f.df(yv) * lam[i];
            res[i] = res[i] / w(j, ii) + ell;
        }
        r = std::max(r, res.lpNorm<Eigen::Infinity>());
    }
    return r;
}

} // namespace parakkt
