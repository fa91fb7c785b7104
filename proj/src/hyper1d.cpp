#include "brane/hyper1d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "brane/error.hpp"

namespace brane {

namespace {

void require_line(const Grid& g, const char* what) {
    if (g.m() != 1) throw ConfigError(std::string(what) + ": first-order system is defined for m=1 only");
}

std::int8_t sign_of(double v) {
    return static_cast<std::int8_t>((v > 0.0) - (v < 0.0));
}

void check_gamma(const Grid& g, double t, double gamma, std::size_t i, double gamma_min) {
    if (gamma < gamma_min)
        throw DegenerateEvolution("gamma=" + std::to_string(gamma) + " below guard at t=" + std::to_string(t), t,
                                  g.unflatten(i), gamma);
}

struct Fluxes {
    std::vector<double> q, u, w;
};

// p from (q, w) and the three fluxes; the recovered Gamma is checked.
Fluxes fluxes(std::span<const double> q, std::span<const double> w, std::vector<double>& p, double t,
              double gamma_min) {
    const std::size_t n = q.size();
    Fluxes f{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    p.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 1.0 + q[i] * q[i];
        const double gamma = a / (1.0 + w[i] * w[i]);
        if (!(gamma >= gamma_min) || !std::isfinite(gamma))
            throw RealizabilityError("conservative state left the timelike region (Gamma=" + std::to_string(gamma) +
                                     ") at t=" + std::to_string(t) + ", index " + std::to_string(i));
        const double root = std::sqrt(gamma);
        p[i] = w[i] * std::sqrt(a / (1.0 + w[i] * w[i]));
        f.q[i] = -p[i];
        f.u[i] = -p[i] * q[i] / root;
        f.w[i] = -q[i] / root;
    }
    return f;
}

double max_speed(std::span<const double> p, std::span<const double> q) {
    double c = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double a = 1.0 + q[i] * q[i];
        const double root = std::sqrt(std::max(0.0, 1.0 - p[i] * p[i] + q[i] * q[i]));
        c = std::max({c, std::abs(-p[i] * q[i] + root) / a, std::abs(-p[i] * q[i] - root) / a});
    }
    return c;
}

}  // namespace

PrimitiveState1D to_primitive(const FieldState& s, StencilOrder order) {
    require_line(s.grid, "to_primitive");
    return PrimitiveState1D{s.grid, s.t, s.p, deriv1(s.z, 0, order)};
}

ConservedState1D conserved_from_primitive(const PrimitiveState1D& ps, double gamma_min) {
    require_line(ps.grid, "conserved_from_primitive");
    const Grid& g = ps.grid;
    std::vector<double> u(g.size()), w(g.size());
    std::vector<std::int8_t> sigma(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double p = ps.p[i], q = ps.q[i];
        const double gamma = 1.0 - p * p + q * q;
        check_gamma(g, ps.t, gamma, i, gamma_min);
        const double root = std::sqrt(gamma);
        u[i] = (1.0 + q * q) / root;
        w[i] = p / root;
        sigma[i] = sign_of(p);
    }
    return ConservedState1D{g, ps.t, ps.q, ScalarLattice(g, std::move(u)), ScalarLattice(g, std::move(w)),
                            std::move(sigma)};
}

PrimitiveState1D primitive_from_conserved(const ConservedState1D& cs) {
    const Grid& g = cs.grid;
    std::vector<double> p(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double q = cs.q[i], u = cs.u[i];
        const double floor = std::sqrt(1.0 + q * q);
        if (u < floor * (1.0 - 1e-12))
            throw RealizabilityError("u=" + std::to_string(u) + " below sqrt(1+q^2)=" + std::to_string(floor) +
                                     " at index " + std::to_string(i));
        const double s = (1.0 + q * q) / u;
        p[i] = cs.sigma[i] * std::sqrt(std::max(0.0, u * s - s * s));
    }
    return PrimitiveState1D{g, cs.t, ScalarLattice(g, std::move(p)), cs.q};
}

PrimitiveState1D primitive_from_transverse(const ConservedState1D& cs) {
    const Grid& g = cs.grid;
    return PrimitiveState1D{g, cs.t, ScalarLattice::generate(g, [&](std::size_t i) {
                                const double q = cs.q[i], w = cs.w[i];
                                return w * std::sqrt((1.0 + q * q) / (1.0 + w * w));
                            }),
                            cs.q};
}

CharacteristicSpeeds char_speeds(const PrimitiveState1D& ps, double gamma_min) {
    const Grid& g = ps.grid;
    std::vector<double> lp(g.size()), lm(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double p = ps.p[i], q = ps.q[i];
        const double gamma = 1.0 - p * p + q * q;
        check_gamma(g, ps.t, gamma, i, gamma_min);
        const double root = std::sqrt(gamma);
        const double a = 1.0 + q * q;
        lp[i] = (-p * q + root) / a;
        lm[i] = (-p * q - root) / a;
    }
    return CharacteristicSpeeds{ScalarLattice(g, std::move(lp)), ScalarLattice(g, std::move(lm))};
}

CharacteristicData riemann_invariants(const PrimitiveState1D& ps, double gamma_min) {
    CharacteristicSpeeds sp = char_speeds(ps, gamma_min);
    ScalarLattice r_plus = sp.lambda_minus;
    ScalarLattice r_minus = sp.lambda_plus;
    return CharacteristicData{std::move(sp.lambda_plus), std::move(sp.lambda_minus), std::move(r_plus),
                              std::move(r_minus)};
}

AdvectionResidual riemann_advection_residual(const PrimitiveState1D& prev, const PrimitiveState1D& now,
                                             const PrimitiveState1D& next) {
    if (!(prev.grid == now.grid) || !(next.grid == now.grid))
        throw GridMismatch("riemann_advection_residual: grids differ");
    const double h1 = now.t - prev.t, h2 = next.t - now.t;
    if (!(h1 > 0.0) || std::abs(h1 - h2) > 1e-8 * h1)
        throw GridMismatch("riemann_advection_residual: states must be equally spaced in time");

    const CharacteristicData a = riemann_invariants(prev), b = riemann_invariants(now), c = riemann_invariants(next);
    const ScalarLattice dplus = deriv1(b.r_plus, 0, StencilOrder::second);
    const ScalarLattice dminus = deriv1(b.r_minus, 0, StencilOrder::second);
    const double span = next.t - prev.t;
    AdvectionResidual res{0.0, 0.0};
    for (std::size_t i = 0; i < now.grid.size(); ++i) {
        const double rp = (c.r_plus[i] - a.r_plus[i]) / span + b.lambda_plus[i] * dplus[i];
        const double rm = (c.r_minus[i] - a.r_minus[i]) / span + b.lambda_minus[i] * dminus[i];
        res.plus = std::max(res.plus, std::abs(rp));
        res.minus = std::max(res.minus, std::abs(rm));
    }
    return res;
}

double constraint_defect(const ConservedState1D& cs) {
    const PrimitiveState1D ps = primitive_from_transverse(cs);
    double worst = 0.0;
    for (std::size_t i = 0; i < cs.grid.size(); ++i) {
        const double p = ps.p[i], q = cs.q[i];
        const double expected = (1.0 + q * q) / std::sqrt(1.0 - p * p + q * q);
        worst = std::max(worst, std::abs(cs.u[i] - expected));
    }
    return worst;
}

ConservedState1D step_conservative(const ConservedState1D& cs, double dt, Scheme scheme, double cfl,
                                   double gamma_min) {
    require_line(cs.grid, "step_conservative");
    if (scheme == Scheme::mol4_rk4) throw ConfigError("step_conservative: scheme must be lxf or richtmyer");
    const Grid& g = cs.grid;
    const std::size_t n = g.size();
    const double dx = g.dx(0);
    const double r = dt / dx;

    std::vector<double> p;
    const Fluxes f = fluxes(cs.q.values(), cs.w.values(), p, cs.t, gamma_min);
    const double limit = cfl * dx / max_speed(p, cs.q.values());
    if (std::abs(dt) > limit * (1.0 + 1e-12))
        throw CflViolation("step_conservative: |dt|=" + std::to_string(std::abs(dt)) + " exceeds CFL limit " +
                           std::to_string(limit) + " at t=" + std::to_string(cs.t));

    const auto q = cs.q.values(), u = cs.u.values(), w = cs.w.values();
    std::vector<double> qn(n), un(n), wn(n);
    if (scheme == Scheme::lxf) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t ip = (i + 1) % n, im = (i + n - 1) % n;
            qn[i] = 0.5 * (q[ip] + q[im]) - 0.5 * r * (f.q[ip] - f.q[im]);
            un[i] = 0.5 * (u[ip] + u[im]) - 0.5 * r * (f.u[ip] - f.u[im]);
            wn[i] = 0.5 * (w[ip] + w[im]) - 0.5 * r * (f.w[ip] - f.w[im]);
        }
    } else {
        // Predictor at i+1/2, t+dt/2.
        // The fluxes do not depend on u, so only q and w need predicting.
        std::vector<double> qh(n), wh(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t ip = (i + 1) % n;
            qh[i] = 0.5 * (q[i] + q[ip]) - 0.5 * r * (f.q[ip] - f.q[i]);
            wh[i] = 0.5 * (w[i] + w[ip]) - 0.5 * r * (f.w[ip] - f.w[i]);
        }
        std::vector<double> ph;
        const Fluxes fh = fluxes(qh, wh, ph, cs.t + 0.5 * dt, gamma_min);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t im = (i + n - 1) % n;
            qn[i] = q[i] - r * (fh.q[i] - fh.q[im]);
            un[i] = u[i] - r * (fh.u[i] - fh.u[im]);
            wn[i] = w[i] - r * (fh.w[i] - fh.w[im]);
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(qn[i]) || !std::isfinite(un[i]) || !std::isfinite(wn[i]))
            throw RealizabilityError("step_conservative: non-finite density at index " + std::to_string(i));
    }
    std::vector<std::int8_t> sigma(n);
    for (std::size_t i = 0; i < n; ++i) sigma[i] = sign_of(wn[i]);
    ConservedState1D out{g, cs.t + dt, ScalarLattice(g, std::move(qn)), ScalarLattice(g, std::move(un)),
                         ScalarLattice(g, std::move(wn)), std::move(sigma)};
    // Surface a lightlike excursion of the updated state immediately.
    std::vector<double> pn;
    fluxes(out.q.values(), out.w.values(), pn, out.t, gamma_min);
    return out;
}

namespace {

struct Track {
    ConservedState1D cs;
    std::vector<double> z;
    ScalarLattice p;
};

Track advance(const Track& tr, double h, const SolverConfig& cfg) {
    ConservedState1D next = step_conservative(tr.cs, h, cfg.scheme, cfg.cfl, cfg.gamma_min);
    ScalarLattice p = primitive_from_transverse(next).p;
    std::vector<double> z(tr.z);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += 0.5 * h * (tr.p[i] + p[i]);
    return Track{std::move(next), std::move(z), std::move(p)};
}

FieldState as_field(const Track& tr) {
    return FieldState(tr.cs.grid, tr.cs.t, ScalarLattice(tr.cs.grid, tr.z), tr.p);
}

}  // namespace

ConservativeRun simulate_conservative(const FieldState& init, const SolverConfig& cfg) {
    cfg.validate();
    require_line(init.grid, "simulate_conservative");
    if (cfg.scheme == Scheme::mol4_rk4) throw ConfigError("simulate_conservative: scheme must be lxf or richtmyer");

    ConservativeRun run;
    RunRecord& rec = run.record;
    const std::vector<double> times = snapshot_schedule(cfg.t_end, cfg.snapshot_every);
    double t_reached = init.t;
    try {
        ConservedState1D cs0 = conserved_from_primitive(to_primitive(init, StencilOrder::second), cfg.gamma_min);
        Track track{cs0, std::vector<double>(init.z.values().begin(), init.z.values().end()),
                    primitive_from_transverse(cs0).p};
        const PrimitiveState1D ps0 = primitive_from_transverse(cs0);
        const double dt0 = cfg.cfl * init.grid.dx(0) / std::max(1.0, max_speed(ps0.p.values(), ps0.q.values()));

        auto record_snapshot = [&](const Track& tr, double h) {
            run.states.push_back(tr.cs);
            const FieldState now = as_field(tr);
            rec.snapshots.push_back(now);
            if (cfg.diagnostics) {
                const FieldState before = as_field(advance(tr, -h, cfg));
                const FieldState after = as_field(advance(tr, h, cfg));
                rec.diagnostics.push_back(
                    diagnostics_row(before, now, after, StencilOrder::fourth, cfg.gamma_min, cfg.boundary_tol));
            }
        };

        for (std::size_t k = 1; k < times.size(); ++k) {
            const double seg = times[k] - times[k - 1];
            const auto steps = static_cast<std::size_t>(std::ceil(seg / dt0 * (1.0 - 1e-12)));
            const double h = seg / static_cast<double>(steps);
            if (k == 1) {
                rec.dt = h;
                record_snapshot(track, h);
            }
            for (std::size_t j = 1; j <= steps; ++j) {
                track = advance(track, h, cfg);
                track.cs.t = j == steps ? times[k] : times[k - 1] + static_cast<double>(j) * h;
                t_reached = track.cs.t;
            }
            record_snapshot(track, rec.dt);
        }
    } catch (const DegenerateEvolution& e) {
        rec.failure = RunFailure{RunStatus::degenerate, e.kind(), e.what(), e.t(), e.location(), e.gamma()};
    } catch (const CflViolation& e) {
        rec.failure = RunFailure{RunStatus::cfl_violation, e.kind(), e.what(), t_reached, {}};
    } catch (const RealizabilityError& e) {
        rec.failure = RunFailure{RunStatus::realizability, e.kind(), e.what(), t_reached, {}};
    }
    return run;
}

double CrossValidationReport::max_diff() const {
    double r = 0.0;
    for (double v : diff_p) r = std::max(r, v);
    for (double v : diff_q) r = std::max(r, v);
    return r;
}

CrossValidationReport cross_validate(const FieldState& init, const SolverConfig& cfg) {
    require_line(init.grid, "cross_validate");
    if (cfg.scheme == Scheme::mol4_rk4) throw ConfigError("cross_validate: choose lxf or richtmyer for the conservative path");

    SolverConfig second = cfg;
    second.scheme = Scheme::mol4_rk4;
    second.diagnostics = false;
    SolverConfig first = cfg;
    first.diagnostics = false;

    const RunRecord a = simulate(init, second);
    if (a.failure) raise_failure(*a.failure);
    const ConservativeRun b = simulate_conservative(init, first);
    if (b.record.failure) raise_failure(*b.record.failure);

    CrossValidationReport rep;
    for (std::size_t k = 0; k < a.snapshots.size() && k < b.states.size(); ++k) {
        const FieldState& s = a.snapshots[k];
        const PrimitiveState1D pa = to_primitive(s, StencilOrder::fourth);
        const PrimitiveState1D pb = primitive_from_transverse(b.states[k]);
        double dp = 0.0, dq = 0.0;
        for (std::size_t i = 0; i < s.grid.size(); ++i) {
            dp = std::max(dp, std::abs(pa.p[i] - pb.p[i]));
            dq = std::max(dq, std::abs(pa.q[i] - pb.q[i]));
        }
        rep.t.push_back(s.t);
        rep.diff_p.push_back(dp);
        rep.diff_q.push_back(dq);
    }
    return rep;
}

CrossValidationStudy cross_validate_study(const Grid& coarse, const InitialSpec& spec, const SolverConfig& cfg,
                                          int levels) {
    if (levels < 1) throw ConfigError("cross_validate_study: need at least one level");
    CrossValidationStudy st;
    Grid g = coarse;
    for (int l = 0; l < levels; ++l) {
        const FieldState init = make_initial(g, spec, cfg.gamma_min);
        st.n.push_back(g.n(0));
        st.max_diff.push_back(cross_validate(init, cfg).max_diff());
        g = refine(g);
    }
    for (std::size_t k = 0; k + 1 < st.max_diff.size(); ++k) st.ratio.push_back(st.max_diff[k] / st.max_diff[k + 1]);
    return st;
}

}  // namespace brane
