#include "brane/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "brane/error.hpp"

namespace brane {

namespace {

// H^{a mu} for a <= M and mu <= M+1.
const ScalarLattice& current(const StressField& sf, int a, int mu) {
    return mu == sf.m() + 1 ? sf.hlast[a] : sf.h(a, mu);
}

void check_triple(const SnapshotCurrents& prev, const SnapshotCurrents& now, const SnapshotCurrents& next) {
    if (!(prev.state.grid == now.state.grid) || !(next.state.grid == now.state.grid))
        throw GridMismatch("residual: snapshots on different grids");
    const double h1 = now.state.t - prev.state.t;
    const double h2 = next.state.t - now.state.t;
    if (!(h1 > 0.0) || !(h2 > 0.0)) throw GridMismatch("residual: snapshot times must increase");
    if (std::abs(h1 - h2) > 1e-8 * std::max(h1, h2))
        throw GridMismatch("residual: snapshots are not equally spaced in time");
}

}  // namespace

SnapshotCurrents currents(const FieldState& s, StencilOrder order, double gamma_min) {
    GradientField gf = gradients(s, order, gamma_min);
    StressField sf = stress_tensor(gf);
    return SnapshotCurrents{s, std::move(gf), std::move(sf)};
}

std::vector<ScalarLattice> divergence_eq4(const SnapshotCurrents& prev, const SnapshotCurrents& now,
                                          const SnapshotCurrents& next, StencilOrder order) {
    check_triple(prev, now, next);
    const Grid& g = now.state.grid;
    const int m = g.m();
    const double span = next.state.t - prev.state.t;

    std::vector<ScalarLattice> out;
    for (int mu = 0; mu <= m + 1; ++mu) {
        const ScalarLattice& before = current(prev.stress, 0, mu);
        const ScalarLattice& after = current(next.stress, 0, mu);
        std::vector<double> div(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) div[i] = (after[i] - before[i]) / span;
        for (int a = 1; a <= m; ++a) {
            const ScalarLattice d = deriv1(current(now.stress, a, mu), a - 1, order);
            for (std::size_t i = 0; i < g.size(); ++i) div[i] += d[i];
        }
        out.emplace_back(g, std::move(div));
    }
    return out;
}

std::vector<double> residual_eq4(const SnapshotCurrents& prev, const SnapshotCurrents& now,
                                 const SnapshotCurrents& next, StencilOrder order) {
    std::vector<double> out;
    for (const ScalarLattice& d : divergence_eq4(prev, now, next, order)) out.push_back(d.max_abs());
    return out;
}

std::vector<double> residual_eq4(const FieldState& prev, const FieldState& now, const FieldState& next,
                                 StencilOrder order, double gamma_min) {
    return residual_eq4(currents(prev, order, gamma_min), currents(now, order, gamma_min),
                        currents(next, order, gamma_min), order);
}

std::vector<Eq5Entry> residual_eq5(const SnapshotCurrents& prev, const SnapshotCurrents& now,
                                   const SnapshotCurrents& next, StencilOrder order, Eq5Pairs pairs,
                                   double boundary_tol) {
    const std::vector<ScalarLattice> div = divergence_eq4(prev, now, next, order);
    const Grid& g = now.state.grid;
    const int m = g.m();
    const int top = m + 1;
    const StressField& sf = now.stress;
    const GradientField& gf = now.grad;

    auto is_spatial = [&](int mu) { return mu >= 1 && mu <= m; };
    bool want_spatial = pairs == Eq5Pairs::all;
    if (want_spatial && !has_compact_support(now.state, boundary_tol))
        throw SupportError("residual_eq5: spatial Lorentz currents need compact support at t=" +
                           std::to_string(now.state.t));

    // x^mu at point i.
    auto position = [&](int mu, std::size_t i) {
        if (mu == 0) return now.state.t;
        if (mu == top) return now.state.z[i];
        return g.coordinate(mu - 1, g.unflatten(i)[mu - 1]);
    };
    // (d_a x^mu) H^{nu a}.
    auto transport = [&](int mu, int nu, std::size_t i) {
        if (mu <= m) return current(sf, mu, nu)[i];
        double s = 0.0;
        for (int a = 0; a <= m; ++a) s += lower_gradient(gf, a)[i] * sf.h(nu, a)[i];
        return s;
    };

    std::vector<Eq5Entry> out;
    for (int mu = 0; mu <= top; ++mu) {
        for (int nu = mu + 1; nu <= top; ++nu) {
            if (!want_spatial && (is_spatial(mu) || is_spatial(nu))) continue;
            double worst = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double r = transport(mu, nu, i) - transport(nu, mu, i) + position(mu, i) * div[nu][i] -
                                 position(nu, i) * div[mu][i];
                worst = std::max(worst, std::abs(r));
            }
            out.push_back({mu, nu, worst});
        }
    }
    return out;
}

std::vector<Eq5Entry> residual_eq5(const FieldState& prev, const FieldState& now, const FieldState& next,
                                   StencilOrder order, Eq5Pairs pairs, double gamma_min, double boundary_tol) {
    return residual_eq5(currents(prev, order, gamma_min), currents(now, order, gamma_min),
                        currents(next, order, gamma_min), order, pairs, boundary_tol);
}

double ResidualReport::eq5_max() const {
    double r = 0.0;
    for (const Eq5Entry& e : eq5) r = std::max(r, e.value);
    return r;
}

ResidualReport residual_report(const FieldState& prev, const FieldState& now, const FieldState& next,
                               StencilOrder order, double gamma_min, double boundary_tol) {
    const SnapshotCurrents a = currents(prev, order, gamma_min);
    const SnapshotCurrents b = currents(now, order, gamma_min);
    const SnapshotCurrents c = currents(next, order, gamma_min);

    ResidualReport rep;
    rep.t = now.t;
    rep.eq4 = residual_eq4(a, b, c, order);
    const Eq5Pairs pairs = has_compact_support(now, boundary_tol) ? Eq5Pairs::all : Eq5Pairs::non_spatial;
    rep.eq5 = residual_eq5(a, b, c, order, pairs, boundary_tol);
    rep.identity = identity_residual(b.grad, b.stress);
    rep.harmonic = harmonic_identity_residual(b.grad, b.stress, induced_metric(b.grad));
    rep.min_gamma = b.grad.gamma.min();
    return rep;
}

DiagnosticsRow diagnostics_row(const FieldState& prev, const FieldState& now, const FieldState& next,
                               StencilOrder order, double gamma_min, double boundary_tol) {
    return DiagnosticsRow{charges(now, order, gamma_min, boundary_tol),
                          residual_report(prev, now, next, order, gamma_min, boundary_tol)};
}

}  // namespace brane
