#pragma once

#include <vector>

#include "brane/field.hpp"

namespace brane {

/// Packed storage for a symmetric (M+1)x(M+1) block of lattices; each
/// unordered pair (a, b) is stored once.
class SymmetricBlock {
public:
    SymmetricBlock(int dim, std::vector<ScalarLattice> packed);

    int dim() const noexcept { return dim_; }
    const ScalarLattice& operator()(int a, int b) const { return packed_[slot(a, b)]; }
    ScalarLattice& operator()(int a, int b) { return packed_[slot(a, b)]; }

    static int slot_count(int dim) noexcept { return dim * (dim + 1) / 2; }

private:
    int slot(int a, int b) const;

    int dim_;
    std::vector<ScalarLattice> packed_;
};

/// Pointwise Noether currents of the graph:
///   H^{ab}     = z^a z^b / sqrt(Gamma) + eta^{ab} sqrt(Gamma)
///   H^{a,M+1}  = z^a / sqrt(Gamma)          (stored in `hlast`)
struct StressField {
    Grid grid;
    double t;
    SymmetricBlock h;
    std::vector<ScalarLattice> hlast;
    ScalarLattice gamma;

    int m() const noexcept { return grid.m(); }
};

/// Induced metric g_ab = eta_ab - z_a z_b with determinant and inverse.
struct InducedMetric {
    SymmetricBlock g;
    ScalarLattice det;
    SymmetricBlock ginv;
};

/// Minkowski metric component eta_ab = eta^ab = diag(1, -1, ..., -1).
inline double eta(int a, int b) noexcept { return a != b ? 0.0 : (a == 0 ? 1.0 : -1.0); }

/// Upper-index gradient z^a (p, -d_i z) and lower-index z_a (p, d_i z).
const ScalarLattice& lower_gradient(const GradientField& gf, int a);
double upper_gradient(const GradientField& gf, int a, std::size_t i);

/// Action density -sqrt(1 - p^2 + |grad z|^2).
ScalarLattice lagrangian_density(const GradientField& gf);

StressField stress_tensor(const GradientField& gf);

/// max over points and b of |z_a H^{ab} - H^{b,M+1}|.
double identity_residual(const GradientField& gf, const StressField& sf);

/// Throws SingularMetric if |det g| < 1e-14 anywhere.
InducedMetric induced_metric(const GradientField& gf);

/// max over points and a, b <= M of |H^{ab} - sqrt(|det g|) g^{ab}|.
double harmonic_identity_residual(const GradientField& gf, const StressField& sf, const InducedMetric& im);

/// Discrete divergence d_a H^{a,M+1} on one slice; the time derivative comes
/// from the evolution right-hand side through the chain rule. Vanishes for
/// solutions up to truncation error.
double mean_curvature_residual(const FieldState& s, StencilOrder order, double gamma_min = kDefaultGammaMin);

}  // namespace brane
