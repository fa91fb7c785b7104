#pragma once

#include <vector>

#include "brane/charges.hpp"
#include "brane/stress.hpp"

namespace brane {

/// Gradients and currents of one snapshot, computed once and shared by the
/// residual kernels.
struct SnapshotCurrents {
    FieldState state;
    GradientField grad;
    StressField stress;
};

SnapshotCurrents currents(const FieldState& s, StencilOrder order, double gamma_min = kDefaultGammaMin);

/// Pointwise divergence d_a H^{a mu} for every mu = 0..M+1, with the time
/// derivative taken as a centred difference across prev/next and the space
/// part by stencils on `now`. Throws GridMismatch for mismatched grids or
/// unequal time spacing.
std::vector<ScalarLattice> divergence_eq4(const SnapshotCurrents& prev, const SnapshotCurrents& now,
                                          const SnapshotCurrents& next, StencilOrder order);

/// Max-norm of divergence_eq4 per mu.
std::vector<double> residual_eq4(const SnapshotCurrents& prev, const SnapshotCurrents& now,
                                 const SnapshotCurrents& next, StencilOrder order);
std::vector<double> residual_eq4(const FieldState& prev, const FieldState& now, const FieldState& next,
                                 StencilOrder order, double gamma_min = kDefaultGammaMin);

/// Which Lorentz-current pairs to evaluate. Pairs with a spatial index need
/// compact support; `non_spatial` keeps only (0, M+1).
enum class Eq5Pairs { all, non_spatial };

struct Eq5Entry {
    int mu;
    int nu;
    double value;
};

/// Max-norm of d_a (x^mu H^{nu a} - x^nu H^{mu a}) for mu < nu, evaluated in
/// product-rule form on the middle snapshot:
///   (d_a x^mu) H^{nu a} - (d_a x^nu) H^{mu a} + x^mu D^nu - x^nu D^mu
/// with d_a x^i = delta, d_a z = z_a and D the divergence_eq4 field.
/// Throws SupportError for spatial pairs when `now` lacks compact support.
std::vector<Eq5Entry> residual_eq5(const SnapshotCurrents& prev, const SnapshotCurrents& now,
                                   const SnapshotCurrents& next, StencilOrder order, Eq5Pairs pairs = Eq5Pairs::all,
                                   double boundary_tol = kDefaultBoundaryTol);
std::vector<Eq5Entry> residual_eq5(const FieldState& prev, const FieldState& now, const FieldState& next,
                                   StencilOrder order, Eq5Pairs pairs = Eq5Pairs::all,
                                   double gamma_min = kDefaultGammaMin, double boundary_tol = kDefaultBoundaryTol);

struct ResidualReport {
    double t = 0.0;
    std::vector<double> eq4;
    std::vector<Eq5Entry> eq5;
    double identity = 0.0;
    double harmonic = 0.0;
    double min_gamma = 0.0;

    double eq5_max() const;
};

/// All residual diagnostics at `now`. Spatial Lorentz pairs are included only
/// when the slice has compact support.
ResidualReport residual_report(const FieldState& prev, const FieldState& now, const FieldState& next,
                               StencilOrder order, double gamma_min = kDefaultGammaMin,
                               double boundary_tol = kDefaultBoundaryTol);

/// One diagnostics.csv row.
struct DiagnosticsRow {
    ChargeSet charges;
    ResidualReport residuals;

    double t() const noexcept { return charges.t; }
};

DiagnosticsRow diagnostics_row(const FieldState& prev, const FieldState& now, const FieldState& next,
                               StencilOrder order, double gamma_min = kDefaultGammaMin,
                               double boundary_tol = kDefaultBoundaryTol);

}  // namespace brane
