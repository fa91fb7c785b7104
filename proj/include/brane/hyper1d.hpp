#pragma once

#include <cstdint>
#include <vector>

#include "brane/evolve2.hpp"
#include "brane/field.hpp"

namespace brane {

/// One-dimensional height equation as a first-order system in the
/// derivative variables p = z_t and q = z_x:
///   (1+q^2) p_t - 2pq p_x - (1-p^2) q_x = 0,   q_t - p_x = 0.
struct PrimitiveState1D {
    Grid grid;
    double t;
    ScalarLattice p;
    ScalarLattice q;
};

/// Conserved densities of the flux-form system:
///   q                 flux -p             (gradient compatibility)
///   u = H^{00}        flux H^{10} = -pq/sqrt(Gamma)
///   w = H^{0,M+1}     flux H^{1,M+1} = -q/sqrt(Gamma)
/// The solver advances all three and recovers p from (q, w), which is
/// explicit and valid for every real (q, w). u is carried as an exactly
/// conserved companion. sigma is the sign of p.
struct ConservedState1D {
    Grid grid;
    double t;
    ScalarLattice q;
    ScalarLattice u;
    ScalarLattice w;
    std::vector<std::int8_t> sigma;
};

struct CharacteristicSpeeds {
    ScalarLattice lambda_plus;
    ScalarLattice lambda_minus;
};

/// Speeds plus Riemann invariants. Both fields are linearly degenerate and
/// r_plus = lambda_minus is carried at speed lambda_plus, r_minus =
/// lambda_plus at speed lambda_minus.
struct CharacteristicData {
    ScalarLattice lambda_plus;
    ScalarLattice lambda_minus;
    ScalarLattice r_plus;
    ScalarLattice r_minus;
};

/// Throws ConfigError unless m = 1.
PrimitiveState1D to_primitive(const FieldState& s, StencilOrder order = StencilOrder::second);

/// u = (1+q^2)/sqrt(Gamma), w = p/sqrt(Gamma), sigma = sign(p). Throws
/// DegenerateEvolution if Gamma < gamma_min.
ConservedState1D conserved_from_primitive(const PrimitiveState1D& ps, double gamma_min = kDefaultGammaMin);

/// Inversion through (q, u, sigma): s = (1+q^2)/u, p = sigma sqrt(max(0, u s - s^2)).
/// Throws RealizabilityError if u < sqrt(1+q^2) (1 - 1e-12).
PrimitiveState1D primitive_from_conserved(const ConservedState1D& cs);

/// Inversion through (q, w): p = w sqrt((1+q^2)/(1+w^2)). Used by the solver.
PrimitiveState1D primitive_from_transverse(const ConservedState1D& cs);

/// lambda = (-pq +- sqrt(Gamma)) / (1+q^2). Throws DegenerateEvolution if
/// Gamma < gamma_min.
CharacteristicSpeeds char_speeds(const PrimitiveState1D& ps, double gamma_min = kDefaultGammaMin);

CharacteristicData riemann_invariants(const PrimitiveState1D& ps, double gamma_min = kDefaultGammaMin);

/// Max-norms of d_t r_+ + lambda_+ d_x r_+ and d_t r_- + lambda_- d_x r_-
/// from three equally spaced states (centred differences in time and space).
struct AdvectionResidual {
    double plus;
    double minus;
};
AdvectionResidual riemann_advection_residual(const PrimitiveState1D& prev, const PrimitiveState1D& now,
                                             const PrimitiveState1D& next);

/// u - (1+q^2)/sqrt(Gamma(p, q)) in max-norm, with p recovered from (q, w).
double constraint_defect(const ConservedState1D& cs);

/// One flux-form step: Lax-Friedrichs (first order) or Richtmyer two-step
/// Lax-Wendroff (second order). Throws CflViolation if |dt| > cfl dx / max|lambda|
/// and RealizabilityError if the recovered Gamma drops below gamma_min.
ConservedState1D step_conservative(const ConservedState1D& cs, double dt, Scheme scheme, double cfl = 0.9,
                                   double gamma_min = kDefaultGammaMin);

/// Conservative run emitting FieldState snapshots. z is rebuilt by
/// trapezoidal integration of z_t = p along the run.
struct ConservativeRun {
    RunRecord record;
    std::vector<ConservedState1D> states;
};
ConservativeRun simulate_conservative(const FieldState& init, const SolverConfig& cfg);

/// Second-order path against the conservative path from identical data.
struct CrossValidationReport {
    std::vector<double> t;
    std::vector<double> diff_p;
    std::vector<double> diff_q;

    double max_diff() const;
};

/// Runs the mol4_rk4 path and the conservative path (cfg.scheme must be lxf
/// or richtmyer) over cfg's schedule and reports L-infinity (p, q)
/// differences at matching snapshot times.
CrossValidationReport cross_validate(const FieldState& init, const SolverConfig& cfg);

/// cross_validate at `levels` successively refined grids.
struct CrossValidationStudy {
    std::vector<std::size_t> n;
    std::vector<double> max_diff;
    /// max_diff[k] / max_diff[k+1].
    std::vector<double> ratio;
};
CrossValidationStudy cross_validate_study(const Grid& coarse, const InitialSpec& spec, const SolverConfig& cfg,
                                          int levels);

}  // namespace brane
