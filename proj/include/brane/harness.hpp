#pragma once

#include <optional>
#include <string>
#include <vector>

#include "brane/io.hpp"

namespace brane {

enum class ErrorMode { exact, self };

struct ConvergenceRow {
    std::size_t n = 0;
    double error = 0.0;
    /// log2(previous error / this error); empty on the first row.
    std::optional<double> order;
};

struct ConvergenceTable {
    ErrorMode mode = ErrorMode::self;
    double t = 0.0;
    std::vector<ConvergenceRow> rows;

    std::string format() const;
};

/// Exact traveling solution z = f(x - t - c), p = -f'(x - t - c) at time t.
FieldState traveling_exact(const Grid& g, const InitialSpec& spec, double t, double gamma_min = kDefaultGammaMin);

/// Samples a field given on refine(coarse) at the coarse points: injection
/// when the points coincide, fourth-order midpoint interpolation otherwise.
ScalarLattice restrict_to(const ScalarLattice& fine, const Grid& coarse);

/// Runs cfg at `levels` successively refined grids (in parallel) and tabulates
/// the L-infinity error of z at t_end. Traveling data use the exact solution;
/// everything else uses differences between neighbouring levels.
ConvergenceTable convergence_study(const ExperimentConfig& cfg, int levels);

}  // namespace brane
