#include "brane/charges.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "brane/error.hpp"
#include "brane/stress.hpp"

namespace brane {

namespace {

// Ambient coordinate x^mu (1 <= mu <= M+1) sampled on the slice.
ScalarLattice position(const FieldState& s, int mu) {
    const Grid& g = s.grid;
    if (mu == g.m() + 1) return s.z;
    const int axis = mu - 1;
    return ScalarLattice::generate(g, [&](std::size_t i) { return g.coordinate(axis, g.unflatten(i)[axis]); });
}

double weighted_integral(const ScalarLattice& a, const ScalarLattice& b) {
    return integrate(ScalarLattice::generate(a.grid(), [&](std::size_t i) { return a[i] * b[i]; }));
}

}  // namespace

bool has_compact_support(const FieldState& s, double tol, std::size_t margin) {
    const Grid& g = s.grid;
    const double zref = s.z[0];
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto idx = g.unflatten(i);
        bool near_edge = false;
        for (int a = 0; a < g.m(); ++a) {
            const std::size_t k = idx[a];
            if (k < margin || k + margin >= g.n(a)) near_edge = true;
        }
        if (near_edge && (std::abs(s.z[i] - zref) >= tol || std::abs(s.p[i]) >= tol)) return false;
    }
    return true;
}

ChargeSet charges(const FieldState& s, StencilOrder order, double gamma_min, double boundary_tol) {
    const GradientField gf = gradients(s, order, gamma_min);
    const StressField sf = stress_tensor(gf);
    const int m = s.grid.m();
    const int rank = m + 2;

    std::vector<ScalarLattice> density;  // H^{mu 0}
    for (int mu = 0; mu <= m; ++mu) density.push_back(sf.h(mu, 0));
    density.push_back(sf.hlast[0]);

    ChargeSet cs;
    cs.t = s.t;
    cs.m = m;
    cs.compact_support_ok = has_compact_support(s, boundary_tol);
    cs.P.resize(rank);
    cs.moments.resize(rank);
    cs.L.assign(static_cast<std::size_t>(rank * rank), 0.0);

    for (int mu = 0; mu < rank; ++mu) cs.P[mu] = integrate(density[mu]);

    std::vector<ScalarLattice> x;  // index mu-1
    for (int mu = 1; mu < rank; ++mu) x.push_back(position(s, mu));

    cs.moments[0] = s.t * cs.P[0];
    for (int mu = 1; mu < rank; ++mu) cs.moments[mu] = weighted_integral(x[mu - 1], density[0]);

    auto set = [&](int mu, int nu, double v) {
        cs.L[static_cast<std::size_t>(mu * rank + nu)] = v;
        cs.L[static_cast<std::size_t>(nu * rank + mu)] = -v;
    };
    for (int nu = 1; nu < rank; ++nu) set(0, nu, s.t * cs.P[nu] - cs.moments[nu]);
    for (int mu = 1; mu < rank; ++mu) {
        for (int nu = mu + 1; nu < rank; ++nu) {
            const ScalarLattice& xm = x[mu - 1];
            const ScalarLattice& xn = x[nu - 1];
            const ScalarLattice integrand = ScalarLattice::generate(s.grid, [&](std::size_t i) {
                return xm[i] * density[nu][i] - xn[i] * density[mu][i];
            });
            set(mu, nu, integrate(integrand));
        }
    }
    return cs;
}

const std::vector<double>& MomentSeries::of(int mu) const {
    for (std::size_t k = 0; k < mus.size(); ++k)
        if (mus[k] == mu) return values[k];
    throw ConfigError("moment series: component " + std::to_string(mu) + " not recorded");
}

MomentSeries moment_series(const std::vector<ChargeSet>& run, std::vector<int> mus) {
    MomentSeries out;
    out.mus = std::move(mus);
    out.values.resize(out.mus.size());
    for (const ChargeSet& cs : run) {
        for (std::size_t k = 0; k < out.mus.size(); ++k) {
            const int mu = out.mus[k];
            if (mu < 0 || mu >= cs.rank()) throw ConfigError("moment series: component out of range");
            if (mu >= 1 && mu <= cs.m && !cs.compact_support_ok)
                throw SupportError("moment series: spatial moment " + std::to_string(mu) + " at t=" +
                                   std::to_string(cs.t) + " without compact support");
            out.values[k].push_back(cs.moments[mu]);
        }
        out.t.push_back(cs.t);
        out.charges.push_back(cs);
    }
    return out;
}

MomentSeries moment_series(const std::vector<FieldState>& run, std::vector<int> mus, StencilOrder order,
                           double gamma_min, double boundary_tol) {
    std::vector<ChargeSet> cs;
    for (const FieldState& s : run) {
        if (!(s.grid == run.front().grid)) throw GridMismatch("moment series: snapshots on different grids");
        cs.push_back(charges(s, order, gamma_min, boundary_tol));
    }
    return moment_series(cs, std::move(mus));
}

MomentFit fit_moment_linearity(const MomentSeries& series, int mu) {
    const std::vector<double>& y = series.of(mu);
    const std::size_t n = y.size();
    if (n < 3) throw InsufficientSamples("fit_moment_linearity: need at least 3 samples, got " + std::to_string(n));

    // Centre the abscissa for a well-conditioned normal equation.
    double tbar = 0.0, ybar = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        tbar += series.t[j];
        ybar += y[j];
    }
    tbar /= static_cast<double>(n);
    ybar /= static_cast<double>(n);
    double stt = 0.0, sty = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double dt = series.t[j] - tbar;
        stt += dt * dt;
        sty += dt * (y[j] - ybar);
    }
    if (!(stt > 0.0)) throw InsufficientSamples("fit_moment_linearity: sample times coincide");

    MomentFit fit;
    fit.mu = mu;
    fit.P_fit = sty / stt;
    fit.C = ybar - fit.P_fit * tbar;
    for (std::size_t j = 0; j < n; ++j)
        fit.max_residual = std::max(fit.max_residual, std::abs(y[j] - (fit.C + fit.P_fit * series.t[j])));
    if (!series.charges.empty()) fit.slope_mismatch = std::abs(fit.P_fit - series.charges.front().P[mu]);

    bool up = true, down = true;
    for (std::size_t j = 1; j < n; ++j) {
        up = up && y[j] >= y[j - 1];
        down = down && y[j] <= y[j - 1];
    }
    fit.monotone = up || down;
    return fit;
}

double ChargeDrift::max_P() const {
    double r = 0.0;
    for (double v : P) r = std::max(r, v);
    return r;
}

ChargeDrift charge_drift(const std::vector<ChargeSet>& run) {
    if (run.empty()) throw InsufficientSamples("charge_drift: empty run");
    const ChargeSet& first = run.front();
    ChargeDrift d;
    d.P.assign(first.P.size(), 0.0);
    d.L.assign(first.L.size(), 0.0);
    for (const ChargeSet& cs : run) {
        for (std::size_t k = 0; k < d.P.size(); ++k)
            d.P[k] = std::max(d.P[k], std::abs(cs.P[k] - first.P[k]) / std::max(1.0, std::abs(first.P[k])));
        for (std::size_t k = 0; k < d.L.size(); ++k)
            d.L[k] = std::max(d.L[k], std::abs(cs.L[k] - first.L[k]) / std::max(1.0, std::abs(first.L[k])));
    }
    return d;
}

}  // namespace brane
