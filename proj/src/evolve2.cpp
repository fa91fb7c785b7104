#include "brane/evolve2.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "brane/error.hpp"
#include "brane/hyper1d.hpp"

namespace brane {

std::string to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::mol4_rk4: return "mol4_rk4";
        case Scheme::lxf: return "lxf";
        case Scheme::richtmyer: return "richtmyer";
    }
    return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
    for (Scheme s : {Scheme::mol4_rk4, Scheme::lxf, Scheme::richtmyer})
        if (to_string(s) == name) return s;
    throw ConfigError("unknown scheme '" + name + "'");
}

void SolverConfig::validate() const {
    if (!(cfl > 0.0 && cfl < 1.0)) throw ConfigError("solver: cfl must lie in (0,1)");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("solver: t_end must be positive");
    if (!(snapshot_every > 0.0) || !std::isfinite(snapshot_every))
        throw ConfigError("solver: snapshot_every must be positive");
    if (!(dissipation >= 0.0) || !std::isfinite(dissipation)) throw ConfigError("solver: dissipation must be >= 0");
    if (!(gamma_min > 0.0)) throw ConfigError("guards: gamma_min must be positive");
    if (!(boundary_tol > 0.0)) throw ConfigError("guards: boundary_tol must be positive");
}

Rhs rhs(const FieldState& s, StencilOrder order, double gamma_min) {
    const GradientField gf = gradients(s, order, gamma_min);
    const Grid& g = s.grid;
    const int m = g.m();

    std::vector<ScalarLattice> dp;
    for (int a = 0; a < m; ++a) dp.push_back(deriv1(s.p, a, order));
    // Second derivatives, upper triangle in (a, b).
    std::vector<ScalarLattice> dzz;
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) dzz.push_back(deriv2(s.z, a, b, order));
    auto second = [&](int a, int b, std::size_t i) {
        if (a > b) std::swap(a, b);
        const int slot = a * m - a * (a - 1) / 2 + (b - a);
        return dzz[static_cast<std::size_t>(slot)][i];
    };

    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double p = s.p[i];
        double lap = 0.0, grad2 = 0.0, cross = 0.0, quad = 0.0;
        for (int a = 0; a < m; ++a) {
            const double za = gf.zx[a][i];
            lap += second(a, a, i);
            grad2 += za * za;
            cross += za * dp[a][i];
            for (int b = 0; b < m; ++b) quad += za * gf.zx[b][i] * second(a, b, i);
        }
        out[i] = (gf.gamma[i] * lap + 2.0 * p * cross - quad) / (1.0 + grad2);
    }
    return Rhs{s.p, ScalarLattice(g, std::move(out))};
}

double max_characteristic_speed(const FieldState& s, StencilOrder order, double gamma_min) {
    double c = 1.0;
    if (s.grid.m() == 1) {
        const CharacteristicSpeeds cd = char_speeds(to_primitive(s, order), gamma_min);
        return std::max({c, cd.lambda_plus.max_abs(), cd.lambda_minus.max_abs()});
    }
    // Along axis k: lambda = (-p z_k +- sqrt(Gamma (A - z_k^2))) / A with A = 1 + |grad z|^2.
    const GradientField gf = gradients(s, order, gamma_min);
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        double a = 1.0;
        for (const auto& d : gf.zx) a += d[i] * d[i];
        for (const auto& d : gf.zx) {
            const double root = std::sqrt(gf.gamma[i] * (a - d[i] * d[i]));
            const double b = -s.p[i] * d[i];
            c = std::max({c, std::abs(b + root) / a, std::abs(b - root) / a});
        }
    }
    return c;
}

double stable_dt(const FieldState& s, double cfl, double gamma_min) {
    return cfl * s.grid.min_dx() / max_characteristic_speed(s, StencilOrder::fourth, gamma_min);
}

FieldState step_rk4(const FieldState& s, double dt, const SolverConfig& cfg, StencilOrder order) {
    const double limit = stable_dt(s, cfg.cfl, cfg.gamma_min);
    if (std::abs(dt) > limit * (1.0 + 1e-12))
        throw CflViolation("step_rk4: |dt|=" + std::to_string(std::abs(dt)) + " exceeds CFL limit " +
                           std::to_string(limit) + " at t=" + std::to_string(s.t));

    const Grid& g = s.grid;
    const std::size_t n = g.size();
    auto stage = [&](const FieldState& x) {
        Rhs r = rhs(x, order, cfg.gamma_min);
        if (cfg.dissipation > 0.0) {
            std::vector<double> dp(r.dp.values().begin(), r.dp.values().end());
            for (int a = 0; a < g.m(); ++a) {
                const ScalarLattice d4 = fourth_difference(x.p, a);
                for (std::size_t i = 0; i < n; ++i) dp[i] -= cfg.dissipation * d4[i];
            }
            r.dp = ScalarLattice(g, std::move(dp));
        }
        return r;
    };
    auto shifted = [&](const Rhs& k, double h) {
        return FieldState(g, s.t + h,
                          ScalarLattice::generate(g, [&](std::size_t i) { return s.z[i] + h * k.dz[i]; }),
                          ScalarLattice::generate(g, [&](std::size_t i) { return s.p[i] + h * k.dp[i]; }));
    };

    const Rhs k1 = stage(s);
    const Rhs k2 = stage(shifted(k1, 0.5 * dt));
    const Rhs k3 = stage(shifted(k2, 0.5 * dt));
    const Rhs k4 = stage(shifted(k3, dt));
    const double w = dt / 6.0;
    auto combine = [&](const ScalarLattice& base, auto pick) {
        return ScalarLattice::generate(g, [&](std::size_t i) {
            return base[i] + w * (pick(k1)[i] + 2.0 * pick(k2)[i] + 2.0 * pick(k3)[i] + pick(k4)[i]);
        });
    };
    return FieldState(g, s.t + dt, combine(s.z, [](const Rhs& k) -> const ScalarLattice& { return k.dz; }),
                      combine(s.p, [](const Rhs& k) -> const ScalarLattice& { return k.dp; }));
}

std::vector<double> snapshot_schedule(double t_end, double every) {
    std::vector<double> ts{0.0};
    for (std::size_t k = 1;; ++k) {
        const double t = static_cast<double>(k) * every;
        if (t >= t_end * (1.0 - 1e-12)) {
            ts.push_back(t_end);
            break;
        }
        ts.push_back(t);
    }
    return ts;
}

namespace {

RunFailure failure_from(const Error& e, double t) {
    RunFailure f{RunStatus::completed, e.kind(), e.what(), t, {}};
    if (const auto* d = dynamic_cast<const DegenerateEvolution*>(&e)) {
        f.status = RunStatus::degenerate;
        f.t = d->t();
        f.location = d->location();
        f.gamma = d->gamma();
    } else if (dynamic_cast<const CflViolation*>(&e)) {
        f.status = RunStatus::cfl_violation;
    } else if (dynamic_cast<const RealizabilityError*>(&e) || dynamic_cast<const NonFiniteError*>(&e)) {
        f.status = RunStatus::realizability;
    } else {
        throw;
    }
    return f;
}

}  // namespace

void raise_failure(const RunFailure& f) {
    switch (f.status) {
        case RunStatus::degenerate: throw DegenerateEvolution(f.message, f.t, f.location, f.gamma);
        case RunStatus::cfl_violation: throw CflViolation(f.message);
        case RunStatus::realizability: throw RealizabilityError(f.message);
        case RunStatus::completed: break;
    }
    throw Error(f.message);
}

RunRecord simulate(const FieldState& init, const SolverConfig& cfg) {
    cfg.validate();
    if (cfg.scheme != Scheme::mol4_rk4) return simulate_conservative(init, cfg).record;

    RunRecord rec;
    const StencilOrder order = StencilOrder::fourth;
    const std::vector<double> times = snapshot_schedule(cfg.t_end, cfg.snapshot_every);
    FieldState state = init;
    try {
        const double dt0 = stable_dt(init, cfg.cfl, cfg.gamma_min);
        rec.dt = dt0;
        auto record_snapshot = [&](const FieldState& s, double h) {
            rec.snapshots.push_back(s);
            if (cfg.diagnostics) {
                const FieldState before = step_rk4(s, -h, cfg, order);
                const FieldState after = step_rk4(s, h, cfg, order);
                rec.diagnostics.push_back(diagnostics_row(before, s, after, order, cfg.gamma_min, cfg.boundary_tol));
            }
        };

        bool first = true;
        for (std::size_t k = 1; k < times.size(); ++k) {
            const double seg = times[k] - times[k - 1];
            const auto steps = static_cast<std::size_t>(std::ceil(seg / dt0 * (1.0 - 1e-12)));
            const double h = seg / static_cast<double>(steps);
            if (first) {
                rec.dt = h;
                record_snapshot(state, h);
                first = false;
            }
            for (std::size_t j = 1; j <= steps; ++j) {
                state = step_rk4(state, h, cfg, order);
                state.t = j == steps ? times[k] : times[k - 1] + static_cast<double>(j) * h;
            }
            record_snapshot(state, rec.dt);
        }
    } catch (const Error& e) {
        rec.failure = failure_from(e, state.t);
    }
    return rec;
}

}  // namespace brane
