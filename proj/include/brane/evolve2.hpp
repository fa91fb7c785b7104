#pragma once

#include <optional>
#include <string>
#include <vector>

#include "brane/field.hpp"
#include "brane/residuals.hpp"

namespace brane {

enum class Scheme { mol4_rk4, lxf, richtmyer };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct SolverConfig {
    Scheme scheme = Scheme::mol4_rk4;
    double cfl = 0.4;
    double t_end = 1.0;
    double snapshot_every = 1.0;
    /// Kreiss-Oliger coefficient; 0 disables dissipation.
    double dissipation = 0.0;
    double gamma_min = kDefaultGammaMin;
    double boundary_tol = kDefaultBoundaryTol;
    /// Compute a diagnostics row per snapshot.
    bool diagnostics = true;

    /// Throws ConfigError unless cfl in (0,1), t_end > 0, snapshot_every > 0
    /// and dissipation >= 0.
    void validate() const;
};

/// Time derivatives of (z, p).
struct Rhs {
    ScalarLattice dz;
    ScalarLattice dp;
};

/// dz = p and
///   dp = [Gamma * lap z + 2p sum_i z_i p_i - sum_ij z_i z_j z_ij] / (1 + |grad z|^2),
/// the height equation solved for z_tt. Throws DegenerateEvolution if
/// min Gamma < gamma_min.
Rhs rhs(const FieldState& s, StencilOrder order, double gamma_min = kDefaultGammaMin);

/// max(1, max |lambda|) over the lattice and axes, with lambda the
/// characteristic speeds along each coordinate axis.
double max_characteristic_speed(const FieldState& s, StencilOrder order = StencilOrder::fourth,
                                double gamma_min = kDefaultGammaMin);

/// cfl * min(dx) / max_characteristic_speed.
double stable_dt(const FieldState& s, double cfl, double gamma_min = kDefaultGammaMin);

/// One classical RK4 step of size dt (negative dt steps backward). Throws
/// CflViolation when |dt| exceeds stable_dt and DegenerateEvolution from any
/// stage.
FieldState step_rk4(const FieldState& s, double dt, const SolverConfig& cfg,
                    StencilOrder order = StencilOrder::fourth);

enum class RunStatus { completed, degenerate, cfl_violation, realizability };

struct RunFailure {
    RunStatus status;
    std::string kind;
    std::string message;
    double t;
    std::vector<std::size_t> location;
    double gamma = 0.0;
};

/// Rethrows a recorded failure as the matching typed error.
[[noreturn]] void raise_failure(const RunFailure& f);

struct RunRecord {
    std::vector<FieldState> snapshots;
    std::vector<DiagnosticsRow> diagnostics;
    /// Set when the run stopped early; snapshots and diagnostics hold
    /// everything produced before the failure.
    std::optional<RunFailure> failure;
    double dt = 0.0;

    bool ok() const noexcept { return !failure.has_value(); }
};

/// Evolves to cfg.t_end with a step fixed at t = 0, recording a snapshot at
/// t = 0 and every cfg.snapshot_every (the last one at t_end). Conservative
/// schemes are dispatched to the first-order solver (m = 1 only).
/// Degeneracy and CFL failures end the run cleanly with `failure` set.
RunRecord simulate(const FieldState& init, const SolverConfig& cfg);

/// Snapshot times t_k = min(k * every, t_end).
std::vector<double> snapshot_schedule(double t_end, double every);

}  // namespace brane
