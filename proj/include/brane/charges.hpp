#pragma once

#include <optional>
#include <vector>

#include "brane/field.hpp"

namespace brane {

inline constexpr double kDefaultBoundaryTol = 1e-10;
inline constexpr std::size_t kSupportMargin = 10;

/// Integrated currents on one slice. Indices run over the ambient
/// coordinates x^mu = (t, x^1..x^M, z), mu = 0..M+1.
struct ChargeSet {
    double t = 0.0;
    int m = 1;
    /// P^mu = integral of H^{mu 0}.
    std::vector<double> P;
    /// Row-major (M+2)x(M+2) antisymmetric matrix of
    /// M^{mu nu} = integral of (x^mu H^{nu 0} - x^nu H^{mu 0}).
    std::vector<double> L;
    /// integral of x^mu H^{00}; moments[0] is exactly t * P[0].
    std::vector<double> moments;
    /// Fields are quiet near the lattice boundary, so charges weighted by the
    /// non-periodic coordinates x^i are meaningful.
    bool compact_support_ok = false;

    int rank() const noexcept { return m + 2; }
    double lorentz(int mu, int nu) const { return L[static_cast<std::size_t>(mu * rank() + nu)]; }
};

/// True iff |z - z[0]| and |p| stay below tol within `margin` cells of the
/// lattice boundary on every axis.
bool has_compact_support(const FieldState& s, double tol = kDefaultBoundaryTol, std::size_t margin = kSupportMargin);

ChargeSet charges(const FieldState& s, StencilOrder order = StencilOrder::fourth, double gamma_min = kDefaultGammaMin,
                  double boundary_tol = kDefaultBoundaryTol);

/// Moments per snapshot for the requested components.
struct MomentSeries {
    std::vector<double> t;
    std::vector<int> mus;
    /// values[k][j] is the moment of component mus[k] at time t[j].
    std::vector<std::vector<double>> values;
    std::vector<ChargeSet> charges;

    const std::vector<double>& of(int mu) const;
};

/// Throws SupportError when a spatial mu (1..M) is requested for a snapshot
/// without compact support, GridMismatch if snapshots are on different grids.
MomentSeries moment_series(const std::vector<FieldState>& run, std::vector<int> mus,
                           StencilOrder order = StencilOrder::fourth, double gamma_min = kDefaultGammaMin,
                           double boundary_tol = kDefaultBoundaryTol);
MomentSeries moment_series(const std::vector<ChargeSet>& charges, std::vector<int> mus);

/// Least-squares line through one moment component.
struct MomentFit {
    int mu = 0;
    double C = 0.0;
    double P_fit = 0.0;
    double max_residual = 0.0;
    /// |P_fit - P^mu| with P^mu the quadrature charge at the first sample;
    /// empty when the series carries no charges.
    std::optional<double> slope_mismatch;
    /// Reported only: the moment is monotone over the samples.
    bool monotone = false;
};

/// Throws InsufficientSamples for fewer than three samples.
MomentFit fit_moment_linearity(const MomentSeries& series, int mu);

/// max over time of |Q(t) - Q(0)| / max(1, |Q(0)|).
struct ChargeDrift {
    std::vector<double> P;
    /// Row-major (M+2)x(M+2), antisymmetric entries mirrored.
    std::vector<double> L;

    double max_P() const;
};

ChargeDrift charge_drift(const std::vector<ChargeSet>& run);

}  // namespace brane
