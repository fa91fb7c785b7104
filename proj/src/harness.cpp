#include "brane/harness.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <future>

#include "brane/error.hpp"

namespace brane {

std::string ConvergenceTable::format() const {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "# %s L-infinity error of z at t=%.6g\n",
                  mode == ErrorMode::exact ? "exact" : "self-convergence", t);
    out += line;
    std::snprintf(line, sizeof line, "%10s %16s %8s\n", "n", "error", "order");
    out += line;
    for (const ConvergenceRow& r : rows) {
        if (r.order)
            std::snprintf(line, sizeof line, "%10zu %16.6e %8.3f\n", r.n, r.error, *r.order);
        else
            std::snprintf(line, sizeof line, "%10zu %16.6e %8s\n", r.n, r.error, "-");
        out += line;
    }
    return out;
}

FieldState traveling_exact(const Grid& g, const InitialSpec& spec, double t, double gamma_min) {
    if (spec.kind != InitialKind::traveling) throw ConfigError("traveling_exact: initial kind must be traveling");
    InitialSpec shifted = spec;
    const double c = spec.center.empty() ? 0.0 : spec.center[0];
    shifted.center = {c + t};
    FieldState s = make_initial(g, shifted, gamma_min);
    s.t = t;
    return s;
}

ScalarLattice restrict_to(const ScalarLattice& fine, const Grid& coarse) {
    const Grid& fg = fine.grid();
    if (!(refine(coarse) == fg)) throw GridMismatch("restrict_to: fine grid is not refine(coarse)");
    const int m = coarse.m();

    // Offset of coarse point 0 from fine point 0, in fine spacings: 0 or 1/2.
    std::array<bool, 2> mid{false, false};
    for (int a = 0; a < m; ++a) {
        const double off = (coarse.origin(a) - fg.origin(a)) / fg.dx(a);
        if (std::abs(off) < 1e-9)
            mid[a] = false;
        else if (std::abs(off - 0.5) < 1e-9)
            mid[a] = true;
        else
            throw GridMismatch("restrict_to: coarse points are neither fine points nor fine midpoints");
    }

    auto along = [&](std::size_t nf, bool midpoint, std::size_t i, auto&& at) {
        if (!midpoint) return at(2 * i);
        const std::size_t k = 2 * i;
        return (-at((k + nf - 1) % nf) + 9.0 * at(k) + 9.0 * at((k + 1) % nf) - at((k + 2) % nf)) / 16.0;
    };

    if (m == 1) {
        return ScalarLattice::generate(coarse, [&](std::size_t i) {
            return along(fg.n(0), mid[0], i, [&](std::size_t j) { return fine[j]; });
        });
    }
    const std::size_t n1 = fg.n(1);
    return ScalarLattice::generate(coarse, [&](std::size_t flat) {
        const std::size_t i = flat / coarse.n(1), j = flat % coarse.n(1);
        return along(fg.n(0), mid[0], i, [&](std::size_t r) {
            return along(n1, mid[1], j, [&](std::size_t c) { return fine[r * n1 + c]; });
        });
    });
}

ConvergenceTable convergence_study(const ExperimentConfig& cfg, int levels) {
    if (levels < 2) throw ConfigError("converge: need at least 2 levels");
    ConvergenceTable table;
    table.mode = cfg.initial.kind == InitialKind::traveling ? ErrorMode::exact : ErrorMode::self;
    table.t = cfg.solver.t_end;

    std::vector<Grid> grids{cfg.grid()};
    for (int l = 1; l < levels; ++l) grids.push_back(refine(grids.back()));

    SolverConfig solver = cfg.solver;
    solver.diagnostics = false;
    solver.snapshot_every = solver.t_end;
    std::vector<std::future<FieldState>> jobs;
    for (const Grid& g : grids) {
        jobs.push_back(std::async(std::launch::async, [g, &cfg, solver] {
            const RunRecord rec = simulate(make_initial(g, cfg.initial, solver.gamma_min), solver);
            if (rec.failure) raise_failure(*rec.failure);
            return rec.snapshots.back();
        }));
    }
    std::vector<FieldState> finals;
    for (auto& j : jobs) finals.push_back(j.get());

    std::vector<double> errors;
    if (table.mode == ErrorMode::exact) {
        for (const FieldState& s : finals) {
            const FieldState ex = traveling_exact(s.grid, cfg.initial, s.t, cfg.solver.gamma_min);
            double e = 0.0;
            for (std::size_t i = 0; i < s.grid.size(); ++i) e = std::max(e, std::abs(s.z[i] - ex.z[i]));
            errors.push_back(e);
        }
    } else {
        for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
            const ScalarLattice fine = restrict_to(finals[k + 1].z, grids[k]);
            double e = 0.0;
            for (std::size_t i = 0; i < grids[k].size(); ++i) e = std::max(e, std::abs(finals[k].z[i] - fine[i]));
            errors.push_back(e);
        }
    }

    for (std::size_t k = 0; k < errors.size(); ++k) {
        ConvergenceRow row{grids[k].n(0), errors[k], std::nullopt};
        if (k > 0 && errors[k - 1] > 0.0 && errors[k] > 0.0) row.order = convergence_order(errors[k - 1], errors[k]);
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace brane
