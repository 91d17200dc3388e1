#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace parakkt {

/// Spatial position. Unused coordinates are zero (x[1] in one dimension).
using Point = std::array<double, 2>;

using PointMap = std::function<double(const Point& x)>;
using SpaceTimeMap = std::function<double(const Point& x, double t)>;
using PointwiseMap = std::function<double(const Point& x, double t, double y, double u)>;

/// A C^2 function of (x, t, y, u) together with its first and second partials
/// in (y, u). The mixed partial serves both off-diagonal Hessian entries.
struct ScalarMap2 {
    PointwiseMap value;
    PointwiseMap dy;
    PointwiseMap du;
    PointwiseMap dyy;
    PointwiseMap dyu;
    PointwiseMap duu;
};

/// The semilinear term f(y) with derivatives; lower_slope is the declared
/// bound f'(y) >= C_f.
struct Nonlinearity {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> ddf;
    double lower_slope = 0.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Box of (y, u) values over which the hypotheses are audited.
struct AuditBox {
    Interval y{-2.0, 2.0};
    Interval u{-2.0, 2.0};
};

/// Optional closed-form reference: an exact state together with the control
/// that produces it (manufactured solutions).
struct ManufacturedSolution {
    SpaceTimeMap state;
    SpaceTimeMap forcing;
};

/// Optimal control problem
///   min  int_Q L(x,t,y,u)
///   s.t. y_t + A y + f(y) = u in Q,  y = 0 on the lateral boundary,
///        y(.,0) = y0,  g(x,t,y,u) <= 0 in Q,
/// on the box Omega = (0, extent[0]) x (0, extent[1]) (dim = 2) or
/// (0, extent[0]) (dim = 1), with A y = -sum_ij D_j(a_ij D_i y).
struct ProblemSpec {
    std::string name;
    int dim = 1;
    std::array<double, 2> extent{1.0, 1.0};
    double horizon = 1.0;

    /// a[i][j](x); entries beyond dim are ignored. Defaults to the identity.
    std::array<std::array<PointMap, 2>, 2> coeff;

    Nonlinearity f;
    ScalarMap2 L;
    ScalarMap2 g;
    PointMap y0;

    double gamma1 = 1.0;
    double gamma2 = 1.0;
    AuditBox audit_box;

    std::optional<ManufacturedSolution> manufactured;

    /// Problem-file text this spec was parsed from, when it came from one.
    std::string source;

    /// Fills unset coefficient entries with the identity matrix.
    void set_identity_coefficients();
};

struct HypothesisReport {
    double alpha_hat = 0.0;     // min sampled eigenvalue of a(x)
    double max_asymmetry = 0.0; // max |a_12 - a_21|
    double cf_hat = 0.0;        // min sampled f'(y)
    double f_at_zero = 0.0;
    double min_gu = 0.0;
    double min_abs_gu = 0.0;
    double min_Luu = 0.0;
    bool pass_ellipticity = false;
    bool pass_monotone_f = false;
    bool pass_gu_nonzero = false;
    bool pass_uniform_bounds = false;
    std::size_t sample_count = 0;
    Point argmin_gu_x{};
    double argmin_gu_t = 0.0;
    double argmin_gu_y = 0.0;
    double argmin_gu_u = 0.0;

    bool all_pass() const { return pass_ellipticity && pass_monotone_f && pass_gu_nonzero && pass_uniform_bounds; }
};

/// Audits ellipticity, the slope of f and the bounds on g_u and L_uu on a
/// deterministic Halton sample of Omega x [0,T] x box. The seed shifts the Halton index. Throws a
/// hypothesis error naming the map and sample point on a non-finite value.
HypothesisReport validate_hypotheses(const ProblemSpec& spec, const AuditBox& box,
                                     std::size_t n_samples, std::uint64_t seed = 0);

/// Worst central-difference mismatch of a supplied partial.
struct DerivativeCheck {
    std::string worst_map;   // e.g. "g.du"
    double worst_error = 0.0;
    Point x{};
    double t = 0.0;
    double y = 0.0;
    double u = 0.0;
};

/// Compares every supplied partial of L, g and f against central differences
/// of the next-lower derivative (step 1e-4) at n random points of the audit
/// box. Error is |fd - exact| / (1 + |exact|).
DerivativeCheck check_derivatives(const ProblemSpec& spec, const AuditBox& box, std::size_t n,
                                  std::uint64_t seed);

/// Halton radical inverse in the given prime base.
double radical_inverse(std::uint64_t index, unsigned base);

} // namespace parakkt
