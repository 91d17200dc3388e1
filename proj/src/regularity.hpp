#pragma once

#include "kkt.hpp"
#include "model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace parakkt {

struct HolderBin {
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;
    double max_increment = 0.0;
};

/// A grid offset together with the largest increment of the field over all
/// node pairs separated by it.
struct HolderOffset {
    int d1 = 0, d2 = 0, dt = 0;
    double distance = 0.0;
    double max_increment = 0.0;
};

struct HolderFit {
    double alpha_hat = 1.0;
    double H_hat = 0.0;
    std::size_t n_pairs = 0;   // number of sampled offsets
    double residual = 0.0;     // rms residual of the log-log fit
    bool constant_field = false;
    std::vector<HolderBin> bins;
    std::vector<HolderOffset> offsets;

    /// bin_lo,bin_hi,n,max_increment
    std::string bins_csv() const;
    /// |v(z1) - v(z2)| <= H |z1 - z2|^alpha (1 + slack) on every sampled offset.
    bool bound_holds(double slack = 0.05) const;
};

inline constexpr double holder_fit_slack = 0.05;

/// Empirical Hoelder exponent in the space-time metric. Offsets are drawn
/// with log-uniform length between the grid resolution max(h, tau) and half
/// the diameter of the node cloud, each offset is swept over the whole grid,
/// and the per-bin maxima over 16 logarithmic bins are fitted by least
/// squares (bins with at least 10 offsets).
HolderFit estimate_holder(const Field& field, std::size_t n_pairs, std::uint64_t seed);

struct ContinuityReport {
    HolderFit y, u, phi, e, gu_e;
    double active_boundary_jump = 0.0;
    std::size_t boundary_pairs = 0;
    std::string domain_note;
};

/// Fits on ybar, ubar, phi, e and g_u e over levels 1..N (the control at the
/// initial level does not enter the dynamics), plus the largest jump of e
/// between adjacent nodes of which exactly one is strongly active.
ContinuityReport multiplier_continuity_report(const Model& model, const KKTPoint& point,
                                              std::size_t n_pairs, std::uint64_t seed);

/// Largest |e_a - e_b| over neighbouring nodes (in space or time) where
/// exactly one of the two is strongly active.
double active_boundary_jump(const Field& e, std::size_t* pairs = nullptr);

/// Copy of levels 1..N on the shortened time grid.
Field drop_initial_level(const Field& f);

} // namespace parakkt
