#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "brane/grid.hpp"

namespace brane {

inline constexpr double kDefaultGammaMin = 1e-8;

/// Height function z and its time derivative p on one time slice.
struct FieldState {
    FieldState(const Grid& grid, double t, ScalarLattice z, ScalarLattice p);

    Grid grid;
    double t;
    ScalarLattice z;
    ScalarLattice p;
};

/// Spacetime gradient of z on a slice together with the Lorentz factor.
///
/// Index convention used throughout the library: the lower gradient is
/// z_a = (p, d_1 z, ..., d_M z) and the upper one is z^a = (p, -d_1 z, ...),
/// with eta = diag(1, -1, ..., -1). gamma = 1 - z^c z_c = 1 - p^2 + |grad z|^2.
struct GradientField {
    double t;
    ScalarLattice zt;
    std::vector<ScalarLattice> zx;
    ScalarLattice gamma;
    ScalarLattice sqrt_gamma;

    const Grid& grid() const noexcept { return zt.grid(); }
    int m() const noexcept { return zt.grid().m(); }
};

/// gamma = 1 - zt^2 + sum zx_i^2, accumulated in axis order.
ScalarLattice lorentz_gamma(const ScalarLattice& zt, const std::vector<ScalarLattice>& zx);

/// Assembles a GradientField from explicit components. Throws
/// DegenerateEvolution if min gamma < gamma_min.
GradientField make_gradient_field(double t, ScalarLattice zt, std::vector<ScalarLattice> zx,
                                  double gamma_min = kDefaultGammaMin);

/// Spatial derivatives by stencil, zt copied from p.
GradientField gradients(const FieldState& s, StencilOrder order, double gamma_min = kDefaultGammaMin);

/// Minimum of gamma over the lattice (fourth-order gradients). Never throws
/// on small or negative margins.
double degeneracy_margin(const FieldState& s, StencilOrder order = StencilOrder::fourth);

enum class InitialKind { vacuum, uniform, gaussian, traveling, superposed, random_bandlimited };

std::string to_string(InitialKind kind);
InitialKind initial_kind_from_string(const std::string& name);

/// Initial data description. Which fields matter depends on the kind:
///   uniform            p = velocity, z = 0 (amplitude must be 0)
///   gaussian           z = A exp(-|x-c|^2/w^2), p = -velocity * dz/dx0
///   traveling (m=1)    right-mover z = f(x-c), p = -f'
///   superposed (m=1)   right-mover at center[0] plus left-mover at center[1]
///   random_bandlimited seeded Fourier modes 1..6 with |z|,|p| ~ amplitude,
///                      rescaled so that min gamma >= 0.5
struct InitialSpec {
    InitialKind kind = InitialKind::vacuum;
    double amplitude = 0.1;
    double width = 0.5;
    std::vector<double> center;
    double velocity = 0.0;
    std::uint64_t seed = 0;
};

/// Throws ConfigError on kind/dimension mismatch and DegenerateEvolution if
/// the constructed data violate gamma > gamma_min.
FieldState make_initial(const Grid& g, const InitialSpec& spec, double gamma_min = kDefaultGammaMin);

/// Gaussian profile helpers shared by initial data and exact solutions.
double gaussian_profile(double x, double amplitude, double width);
double gaussian_slope(double x, double amplitude, double width);
double gaussian_curvature(double x, double amplitude, double width);

/// Shortest signed periodic displacement x - c on an axis of length L.
double periodic_offset(double x, double c, double length);

}  // namespace brane
