#include "oracle.hpp"

#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace parakkt {

NLPInstance::NLPInstance(const Model& model)
    : model_(&model), n_(model.nodes()), N_(model.levels() - 1)
{
    if (num_vars() > oracle_max_variables)
        fail(ErrorKind::config, "oracle: " + std::to_string(num_vars()) + " variables exceed the limit of " +
                                    std::to_string(oracle_max_variables));
    weights_ = model.weights().flat();
    y0_ = model.initial_state();

    // Central-difference check of both Jacobians at a fixed pseudo-random point.
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> d(-0.5, 0.5);
    Eigen::VectorXd z(static_cast<Eigen::Index>(num_vars()));
    for (Eigen::Index k = 0; k < z.size(); ++k)
        z[k] = d(rng);
    const Eigen::MatrixXd jf = jacobian_F(z), jg = jacobian_G(z);
    double scale_f = 1.0, scale_g = 1.0;
    scale_f = std::max(scale_f, jf.cwiseAbs().maxCoeff());
    scale_g = std::max(scale_g, jg.cwiseAbs().maxCoeff());
    double err = 0.0;
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        const double h = 1e-6 * std::max(1.0, std::abs(z[k]));
        Eigen::VectorXd zp = z, zm = z;
        zp[k] += h;
        zm[k] -= h;
        const Eigen::VectorXd cf = (F(zp) - F(zm)) / (2.0 * h);
        const Eigen::VectorXd cg = (G(zp) - G(zm)) / (2.0 * h);
        err = std::max(err, (cf - jf.col(k)).lpNorm<Eigen::Infinity>() / scale_f);
        err = std::max(err, (cg - jg.col(k)).lpNorm<Eigen::Infinity>() / scale_g);
    }
    jac_check_ = err;
    if (!(err <= 1e-6))
        fail(ErrorKind::internal, "oracle: Jacobian disagrees with finite differences (" + format17(err) + ")");
}

double NLPInstance::y_at(const Eigen::VectorXd& z, int j, std::size_t i) const
{
    return j == 0 ? y0_[static_cast<Eigen::Index>(i)] : z[static_cast<Eigen::Index>(y_index(j, i))];
}

double NLPInstance::objective(const Eigen::VectorXd& z) const
{
    const Model& m = *model_;
    double s = 0.0;
    for (int j = 0; j <= N_; ++j)
        for (std::size_t i = 0; i < n_; ++i)
            s += m.weights()(j, i) *
                 m.eval(m.spec().L.value, j, i, y_at(z, j, i), z[static_cast<Eigen::Index>(u_index(j, i))]);
    return s;
}

Eigen::VectorXd NLPInstance::gradient(const Eigen::VectorXd& z) const
{
    const Model& m = *model_;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_vars()));
    for (int j = 0; j <= N_; ++j)
        for (std::size_t i = 0; i < n_; ++i) {
            const double w = m.weights()(j, i);
            const double y = y_at(z, j, i), u = z[static_cast<Eigen::Index>(u_index(j, i))];
            if (j >= 1)
                g[static_cast<Eigen::Index>(y_index(j, i))] = w * m.eval(m.spec().L.dy, j, i, y, u);
            g[static_cast<Eigen::Index>(u_index(j, i))] = w * m.eval(m.spec().L.du, j, i, y, u);
        }
    return g;
}

Eigen::VectorXd NLPInstance::F(const Eigen::VectorXd& z) const
{
    const Model& m = *model_;
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::VectorXd out(static_cast<Eigen::Index>(num_eq()));
    Eigen::VectorXd prev = y0_;
    for (int j = 1; j <= N_; ++j) {
        const Eigen::VectorXd cur = z.segment(static_cast<Eigen::Index>(y_index(j, 0)), n);
        const Eigen::VectorXd u = z.segment(static_cast<Eigen::Index>(u_index(j, 0)), n);
        Eigen::VectorXd fy(n);
        for (Eigen::Index i = 0; i < n; ++i)
            fy[i] = m.spec().f.f(cur[i]);
        out.segment(static_cast<Eigen::Index>(eq_row(j, 0)), n) = (cur - prev) / m.tau() + m.A() * cur + fy - u;
        prev = cur;
    }
    return out;
}

Eigen::MatrixXd NLPInstance::jacobian_F(const Eigen::VectorXd& z) const
{
    const Model& m = *model_;
    const Eigen::MatrixXd a = Eigen::MatrixXd(m.A());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_eq()),
                                              static_cast<Eigen::Index>(num_vars()));
    const auto n = static_cast<Eigen::Index>(n_);
    for (int j = 1; j <= N_; ++j) {
        const auto r0 = static_cast<Eigen::Index>(eq_row(j, 0));
        const auto c0 = static_cast<Eigen::Index>(y_index(j, 0));
        J.block(r0, c0, n, n) = a;
        for (Eigen::Index i = 0; i < n; ++i) {
            J(r0 + i, c0 + i) += 1.0 / m.tau() + m.spec().f.df(z[c0 + i]);
            if (j >= 2)
                J(r0 + i, static_cast<Eigen::Index>(y_index(j - 1, 0)) + i) = -1.0 / m.tau();
            J(r0 + i, static_cast<Eigen::Index>(u_index(j, 0)) + i) = -1.0;
        }
    }
    return J;
}

Eigen::VectorXd NLPInstance::G(const Eigen::VectorXd& z) const
{
    const Model& m = *model_;
    Eigen::VectorXd out(static_cast<Eigen::Index>(num_ineq()));
    for (int j = 0; j <= N_; ++j)
        for (std::size_t i = 0; i < n_; ++i)
            out[static_cast<Eigen::Index>(ineq_row(j, i))] =
                m.eval(m.spec().g.value, j, i, y_at(z, j, i), z[static_cast<Eigen::Index>(u_index(j, i))]);
    return out;
}

Eigen::MatrixXd NLPInstance::jacobian_G(const Eigen::VectorXd& z) const
{
    const Model& m = *model_;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_ineq()),
                                              static_cast<Eigen::Index>(num_vars()));
    for (int j = 0; j <= N_; ++j)
        for (std::size_t i = 0; i < n_; ++i) {
            const auto r = static_cast<Eigen::Index>(ineq_row(j, i));
            const double y = y_at(z, j, i), u = z[static_cast<Eigen::Index>(u_index(j, i))];
            if (j >= 1)
                J(r, static_cast<Eigen::Index>(y_index(j, i))) = m.eval(m.spec().g.dy, j, i, y, u);
            J(r, static_cast<Eigen::Index>(u_index(j, i))) = m.eval(m.spec().g.du, j, i, y, u);
        }
    return J;
}

Eigen::MatrixXd NLPInstance::lagrangian_hessian(const Eigen::VectorXd& z, const Eigen::VectorXd& lambda,
                                                const Eigen::VectorXd& mu) const
{
    const Model& m = *model_;
    const ProblemSpec& spec = m.spec();
    const auto nv = static_cast<Eigen::Index>(num_vars());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nv, nv);
    for (int j = 0; j <= N_; ++j)
        for (std::size_t i = 0; i < n_; ++i) {
            const double w = m.weights()(j, i);
            const double y = y_at(z, j, i);
            const auto ku = static_cast<Eigen::Index>(u_index(j, i));
            const double u = z[ku];
            const double mk = mu[static_cast<Eigen::Index>(ineq_row(j, i))];
            H(ku, ku) += w * m.eval(spec.L.duu, j, i, y, u) + mk * m.eval(spec.g.duu, j, i, y, u);
            if (j == 0)
                continue;
            const auto ky = static_cast<Eigen::Index>(y_index(j, i));
            const double lam = lambda[static_cast<Eigen::Index>(eq_row(j, i))];
            H(ky, ky) += w * m.eval(spec.L.dyy, j, i, y, u) + mk * m.eval(spec.g.dyy, j, i, y, u) +
                         lam * spec.f.ddf(y);
            const double cross = w * m.eval(spec.L.dyu, j, i, y, u) + mk * m.eval(spec.g.dyu, j, i, y, u);
            H(ky, ku) += cross;
            H(ku, ky) += cross;
        }
    return H;
}

Eigen::VectorXd NLPInstance::pack(const Field& y, const Field& u) const
{
    require_aligned(y, u, "oracle pack");
    if (y.grid() != model_->grid())
        fail(ErrorKind::config, "oracle: fields live on a different grid");
    Eigen::VectorXd z(static_cast<Eigen::Index>(num_vars()));
    for (int j = 0; j <= N_; ++j)
        for (std::size_t i = 0; i < n_; ++i) {
            if (j >= 1)
                z[static_cast<Eigen::Index>(y_index(j, i))] = y(j, i);
            z[static_cast<Eigen::Index>(u_index(j, i))] = u(j, i);
        }
    return z;
}

void NLPInstance::unpack(const Eigen::VectorXd& z, Field& y, Field& u) const
{
    y = Field(model_->grid());
    u = Field(model_->grid());
    for (int j = 0; j <= N_; ++j)
        for (std::size_t i = 0; i < n_; ++i) {
            y(j, i) = y_at(z, j, i);
            u(j, i) = z[static_cast<Eigen::Index>(u_index(j, i))];
        }
}

NLPInstance discretize_to_nlp(const Model& model)
{
    return NLPInstance(model);
}

namespace {

std::string dump_active(const std::vector<std::size_t>& active)
{
    std::string s = "{";
    for (std::size_t k = 0; k < active.size(); ++k)
        s += (k ? "," : "") + std::to_string(active[k]);
    return s + "}";
}

} // namespace

NLPSolution solve_nlp_active_set(const NLPInstance& nlp, const Eigen::VectorXd* start)
{
    const auto nv = static_cast<Eigen::Index>(nlp.num_vars());
    const auto ne = static_cast<Eigen::Index>(nlp.num_eq());
    const auto ni = static_cast<Eigen::Index>(nlp.num_ineq());
    const Eigen::VectorXd& w = nlp.node_weights();

    NLPSolution sol;
    sol.z = start ? *start : Eigen::VectorXd::Zero(nv);
    if (sol.z.size() != nv)
        fail(ErrorKind::config, "oracle: start vector has the wrong size");
    sol.lambda = Eigen::VectorXd::Zero(ne);
    sol.mu = Eigen::VectorXd::Zero(ni);
    std::vector<char> active(static_cast<std::size_t>(ni), 0);

    auto active_list = [&] {
        std::vector<std::size_t> a;
        for (Eigen::Index k = 0; k < ni; ++k)
            if (active[static_cast<std::size_t>(k)])
                a.push_back(static_cast<std::size_t>(k));
        return a;
    };

    constexpr int max_changes = 500;
    constexpr int max_newton = 100;
    for (;;) {
        const auto act = active_list();
        const auto na = static_cast<Eigen::Index>(act.size());
        const Eigen::Index dim = nv + ne + na;

        // Newton on the equality-constrained KKT system of this active set.
        for (int it = 0;; ++it) {
            for (Eigen::Index k = 0; k < ni; ++k)
                if (!active[static_cast<std::size_t>(k)])
                    sol.mu[k] = 0.0;
            const Eigen::MatrixXd jf = nlp.jacobian_F(sol.z);
            const Eigen::MatrixXd jg = nlp.jacobian_G(sol.z);
            const Eigen::VectorXd g = nlp.G(sol.z);
            Eigen::VectorXd r(dim);
            r.head(nv) = nlp.gradient(sol.z) + jf.transpose() * sol.lambda + jg.transpose() * sol.mu;
            r.segment(nv, ne) = nlp.F(sol.z);
            for (Eigen::Index a = 0; a < na; ++a)
                r[nv + ne + a] = g[static_cast<Eigen::Index>(act[static_cast<std::size_t>(a)])];
            const double rn = r.lpNorm<Eigen::Infinity>();
            if (rn <= 1e-13 || it >= max_newton) {
                if (rn > 1e-9)
                    fail(ErrorKind::solver, "oracle: Newton on the KKT system did not converge (residual " +
                                                format17(rn) + ", active set " + dump_active(act) + ")");
                break;
            }
            Eigen::MatrixXd K = Eigen::MatrixXd::Zero(dim, dim);
            K.topLeftCorner(nv, nv) = nlp.lagrangian_hessian(sol.z, sol.lambda, sol.mu);
            K.block(0, nv, nv, ne) = jf.transpose();
            K.block(nv, 0, ne, nv) = jf;
            for (Eigen::Index a = 0; a < na; ++a) {
                const auto row = static_cast<Eigen::Index>(act[static_cast<std::size_t>(a)]);
                K.block(0, nv + ne + a, nv, 1) = jg.row(row).transpose();
                K.block(nv + ne + a, 0, 1, nv) = jg.row(row);
            }
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
            if (!(lu.rcond() > 1e-14))
                fail(ErrorKind::solver, "oracle: singular KKT matrix with active set " + dump_active(act));
            const Eigen::VectorXd delta = lu.solve(-r);
            const double before = rn;
            sol.z += delta.head(nv);
            sol.lambda += delta.segment(nv, ne);
            for (Eigen::Index a = 0; a < na; ++a)
                sol.mu[static_cast<Eigen::Index>(act[static_cast<std::size_t>(a)])] += delta[nv + ne + a];
            ++sol.newton_iterations;
            // Stop once the update no longer reduces the residual materially.
            if (delta.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + sol.z.lpNorm<Eigen::Infinity>()) &&
                before <= 1e-9)
                break;
        }

        const Eigen::VectorXd g = nlp.G(sol.z);
        bool changed = false;
        for (Eigen::Index k = 0; k < ni; ++k) {
            const bool want = sol.mu[k] / w[k] + g[k] > 0.0;
            if (want != static_cast<bool>(active[static_cast<std::size_t>(k)])) {
                active[static_cast<std::size_t>(k)] = want;
                changed = true;
                ++sol.active_changes;
            }
        }
        if (!changed)
            break;
        if (sol.active_changes > max_changes)
            fail(ErrorKind::solver, "oracle: active-set cycling (last active set " + dump_active(active_list()) + ")");
    }

    sol.active_set = active_list();
    const Eigen::VectorXd g = nlp.G(sol.z);
    const Eigen::VectorXd grad = nlp.gradient(sol.z) + nlp.jacobian_F(sol.z).transpose() * sol.lambda +
                                 nlp.jacobian_G(sol.z).transpose() * sol.mu;
    sol.stationarity = grad.lpNorm<Eigen::Infinity>();
    sol.complementarity = std::abs(sol.mu.dot(g));
    sol.eq_violation = nlp.F(sol.z).lpNorm<Eigen::Infinity>();
    sol.ineq_violation = std::max(0.0, g.maxCoeff());
    sol.converged = sol.stationarity <= 1e-9 && sol.complementarity <= 1e-10 &&
                    (sol.mu.size() == 0 || sol.mu.minCoeff() >= 0.0) && sol.eq_violation <= 1e-10 &&
                    sol.ineq_violation <= 1e-10;
    return sol;
}

std::string MultiplierDiscrepancy::to_text() const
{
    std::string s;
    s += "scaled = " + std::string(scaled ? "1" : "0") + "\n";
    s += "e_linf = " + format17(e_linf) + "\n";
    s += "e_l2 = " + format17(e_l2) + "\n";
    s += "phi_linf = " + format17(phi_linf) + "\n";
    s += "phi_l2 = " + format17(phi_l2) + "\n";
    return s;
}

KKTPoint oracle_point(const NLPInstance& nlp, const NLPSolution& sol, bool scale)
{
    const Model& m = nlp.model();
    KKTPoint p;
    nlp.unpack(sol.z, p.y, p.u);
    p.phi = Field(m.grid());
    p.e = Field(m.grid());
    for (int j = 0; j <= nlp.steps(); ++j)
        for (std::size_t i = 0; i < nlp.nodes(); ++i) {
            const double w = scale ? m.weights()(j, i) : 1.0;
            p.e(j, i) = sol.mu[static_cast<Eigen::Index>(nlp.ineq_row(j, i))] / w;
            if (j >= 1)
                p.phi(j, i) = sol.lambda[static_cast<Eigen::Index>(nlp.eq_row(j, i))] / w;
        }
    p.J = nlp.objective(sol.z);
    return p;
}

MultiplierDiscrepancy compare_multipliers(const NLPSolution& sol, const KKTPoint& point, const NLPInstance& nlp,
                                          bool scale)
{
    if (point.e.grid() != nlp.model().grid() || point.phi.grid() != nlp.model().grid())
        fail(ErrorKind::config, "compare_multipliers: KKT point lives on a different grid");
    const KKTPoint o = oracle_point(nlp, sol, scale);
    const Field& w = nlp.model().weights();
    MultiplierDiscrepancy d;
    d.scaled = scale;
    Field de(w.grid()), dp(w.grid());
    de.flat() = o.e.flat() - point.e.flat();
    dp.flat() = o.phi.flat() - point.phi.flat();
    d.e_linf = de.max_abs();
    d.phi_linf = dp.max_abs();
    d.e_l2 = std::sqrt(inner(de, de, w));
    d.phi_l2 = std::sqrt(inner(dp, dp, w));
    return d;
}

} // namespace parakkt
