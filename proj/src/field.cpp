#include "brane/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "brane/error.hpp"

namespace brane {

namespace {

// Uniform in [-1, 1) from the raw 64-bit stream, independent of the
// standard library's distribution implementations.
double signed_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

void require_m(const Grid& g, int m, InitialKind kind) {
    if (g.m() != m)
        throw ConfigError("initial kind '" + to_string(kind) + "' requires m=" + std::to_string(m) + ", grid has m=" +
                          std::to_string(g.m()));
}

double center_at(const InitialSpec& spec, std::size_t i, double fallback) {
    return i < spec.center.size() ? spec.center[i] : fallback;
}

FieldState random_bandlimited(const Grid& g, const InitialSpec& spec, double gamma_min) {
    constexpr int kmax = 6;
    std::mt19937_64 rng(spec.seed);
    struct Mode {
        int k0, k1;
        double zc, zs, pc, ps;
    };
    std::vector<Mode> modes;
    if (g.m() == 1) {
        for (int k = 1; k <= kmax; ++k) {
            const double scale = spec.amplitude / k;
            modes.push_back({k, 0, scale * signed_unit(rng), scale * signed_unit(rng), scale * signed_unit(rng),
                             scale * signed_unit(rng)});
        }
    } else {
        for (int k0 = 0; k0 <= kmax / 2; ++k0) {
            for (int k1 = -kmax / 2; k1 <= kmax / 2; ++k1) {
                if (k0 == 0 && k1 <= 0) continue;
                const double scale = spec.amplitude / std::hypot(k0, k1);
                modes.push_back({k0, k1, scale * signed_unit(rng), scale * signed_unit(rng),
                                 scale * signed_unit(rng), scale * signed_unit(rng)});
            }
        }
    }

    const double two_pi = 2.0 * std::numbers::pi;
    auto phase = [&](const Mode& md, std::size_t flat) {
        const auto idx = g.unflatten(flat);
        double ph = two_pi * md.k0 * static_cast<double>(idx[0]) / static_cast<double>(g.n(0));
        if (g.m() == 2) ph += two_pi * md.k1 * static_cast<double>(idx[1]) / static_cast<double>(g.n(1));
        return ph;
    };
    std::vector<double> z(g.size(), 0.0), p(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (const Mode& md : modes) {
            const double ph = phase(md, i);
            z[i] += md.zc * std::cos(ph) + md.zs * std::sin(ph);
            p[i] += md.pc * std::cos(ph) + md.ps * std::sin(ph);
        }
    }

    // Scale both fields so that gamma = 1 + s^2 (|grad z|^2 - p^2) stays >= 0.5.
    for (int attempt = 0; attempt < 8; ++attempt) {
        FieldState s(g, 0.0, ScalarLattice(g, z), ScalarLattice(g, p));
        const double margin = degeneracy_margin(s);
        if (margin >= 0.5) {
            if (margin <= gamma_min)
                throw DegenerateEvolution("random_bandlimited: gamma below guard", 0.0, {}, margin);
            return s;
        }
        const double deficit = 1.0 - margin;
        const double factor = std::sqrt(0.5 / deficit) * (1.0 - 1e-9);
        for (double& v : z) v *= factor;
        for (double& v : p) v *= factor;
    }
    throw ConfigError("random_bandlimited: failed to cap amplitude");
}

}  // namespace

FieldState::FieldState(const Grid& grid_, double t_, ScalarLattice z_, ScalarLattice p_)
    : grid(grid_), t(t_), z(std::move(z_)), p(std::move(p_)) {
    if (!(z.grid() == grid) || !(p.grid() == grid)) throw GridMismatch("field state: z and p must share the grid");
    if (!std::isfinite(t)) throw NonFiniteError("field state: non-finite time");
}

ScalarLattice lorentz_gamma(const ScalarLattice& zt, const std::vector<ScalarLattice>& zx) {
    return ScalarLattice::generate(zt.grid(), [&](std::size_t i) {
        double g = 1.0 - zt[i] * zt[i];
        for (const auto& d : zx) g += d[i] * d[i];
        return g;
    });
}

GradientField make_gradient_field(double t, ScalarLattice zt, std::vector<ScalarLattice> zx, double gamma_min) {
    const Grid& g = zt.grid();
    if (static_cast<int>(zx.size()) != g.m()) throw GridMismatch("gradient field: need one spatial component per axis");
    for (const auto& d : zx)
        if (!(d.grid() == g)) throw GridMismatch("gradient field: components on different grids");

    ScalarLattice gamma = lorentz_gamma(zt, zx);
    const auto gv = gamma.values();
    const auto it = std::min_element(gv.begin(), gv.end());
    if (*it < gamma_min) {
        const std::size_t flat = static_cast<std::size_t>(it - gv.begin());
        throw DegenerateEvolution("gamma=" + std::to_string(*it) + " below guard " + std::to_string(gamma_min) +
                                      " at t=" + std::to_string(t),
                                  t, g.unflatten(flat), *it);
    }
    ScalarLattice sq = ScalarLattice::generate(g, [&](std::size_t i) { return std::sqrt(gamma[i]); });
    return GradientField{t, std::move(zt), std::move(zx), std::move(gamma), std::move(sq)};
}

GradientField gradients(const FieldState& s, StencilOrder order, double gamma_min) {
    std::vector<ScalarLattice> zx;
    zx.reserve(s.grid.m());
    for (int a = 0; a < s.grid.m(); ++a) zx.push_back(deriv1(s.z, a, order));
    return make_gradient_field(s.t, s.p, std::move(zx), gamma_min);
}

double degeneracy_margin(const FieldState& s, StencilOrder order) {
    std::vector<ScalarLattice> zx;
    for (int a = 0; a < s.grid.m(); ++a) zx.push_back(deriv1(s.z, a, order));
    return lorentz_gamma(s.p, zx).min();
}

std::string to_string(InitialKind kind) {
    switch (kind) {
        case InitialKind::vacuum: return "vacuum";
        case InitialKind::uniform: return "uniform";
        case InitialKind::gaussian: return "gaussian";
        case InitialKind::traveling: return "traveling";
        case InitialKind::superposed: return "superposed";
        case InitialKind::random_bandlimited: return "random_bandlimited";
    }
    return "unknown";
}

InitialKind initial_kind_from_string(const std::string& name) {
    for (InitialKind k : {InitialKind::vacuum, InitialKind::uniform, InitialKind::gaussian, InitialKind::traveling,
                          InitialKind::superposed, InitialKind::random_bandlimited}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown initial kind '" + name + "'");
}

double gaussian_profile(double x, double amplitude, double width) {
    return amplitude * std::exp(-(x * x) / (width * width));
}

double gaussian_slope(double x, double amplitude, double width) {
    return -2.0 * x / (width * width) * gaussian_profile(x, amplitude, width);
}

double gaussian_curvature(double x, double amplitude, double width) {
    const double w2 = width * width;
    return (4.0 * x * x / (w2 * w2) - 2.0 / w2) * gaussian_profile(x, amplitude, width);
}

double periodic_offset(double x, double c, double length) {
    double d = std::fmod(x - c, length);
    if (d >= 0.5 * length) d -= length;
    if (d < -0.5 * length) d += length;
    return d;
}

FieldState make_initial(const Grid& g, const InitialSpec& spec, double gamma_min) {
    if (!(spec.width > 0.0) && (spec.kind == InitialKind::gaussian || spec.kind == InitialKind::traveling ||
                                spec.kind == InitialKind::superposed))
        throw ConfigError("initial: width must be positive");
    if (!std::isfinite(spec.amplitude) || !std::isfinite(spec.velocity))
        throw ConfigError("initial: amplitude and velocity must be finite");

    const double A = spec.amplitude, w = spec.width;
    auto finish = [&](ScalarLattice z, ScalarLattice p) {
        FieldState s(g, 0.0, std::move(z), std::move(p));
        const double margin = degeneracy_margin(s);
        if (margin < gamma_min)
            throw DegenerateEvolution("initial data violate gamma > " + std::to_string(gamma_min), 0.0, {}, margin);
        return s;
    };

    switch (spec.kind) {
        case InitialKind::vacuum:
            return finish(ScalarLattice(g, 0.0), ScalarLattice(g, 0.0));

        case InitialKind::uniform:
            if (spec.amplitude != 0.0)
                throw ConfigError("initial 'uniform': a tilted plane z = a*x is not periodic; amplitude must be 0");
            return finish(ScalarLattice(g, 0.0), ScalarLattice(g, spec.velocity));

        case InitialKind::gaussian: {
            const double c0 = center_at(spec, 0, 0.0), c1 = center_at(spec, 1, 0.0);
            auto offset = [&](double x, int axis, double c) { return periodic_offset(x, c, g.length(axis)); };
            if (g.m() == 1) {
                auto z = ScalarLattice::sample(g, [&](double x) { return gaussian_profile(offset(x, 0, c0), A, w); });
                auto p = ScalarLattice::sample(
                    g, [&](double x) { return -spec.velocity * gaussian_slope(offset(x, 0, c0), A, w); });
                return finish(std::move(z), std::move(p));
            }
            auto radial = [&](double x, double y) {
                const double dx = offset(x, 0, c0), dy = offset(y, 1, c1);
                return A * std::exp(-(dx * dx + dy * dy) / (w * w));
            };
            auto z = ScalarLattice::sample(g, radial);
            auto p = ScalarLattice::sample(g, [&](double x, double y) {
                const double dx = offset(x, 0, c0);
                return spec.velocity * 2.0 * dx / (w * w) * radial(x, y);
            });
            return finish(std::move(z), std::move(p));
        }

        case InitialKind::traveling: {
            require_m(g, 1, spec.kind);
            const double c = center_at(spec, 0, 0.0);
            auto z = ScalarLattice::sample(g, [&](double x) { return gaussian_profile(periodic_offset(x, c, g.length(0)), A, w); });
            auto p = ScalarLattice::sample(g, [&](double x) { return -gaussian_slope(periodic_offset(x, c, g.length(0)), A, w); });
            return finish(std::move(z), std::move(p));
        }

        case InitialKind::superposed: {
            require_m(g, 1, spec.kind);
            const double cr = center_at(spec, 0, -0.25 * g.length(0));
            const double cl = center_at(spec, 1, 0.25 * g.length(0));
            const double L = g.length(0);
            auto z = ScalarLattice::sample(g, [&](double x) {
                return gaussian_profile(periodic_offset(x, cr, L), A, w) + gaussian_profile(periodic_offset(x, cl, L), A, w);
            });
            // Right-mover f(x-t) has p = -f', left-mover g(x+t) has p = +g'.
            auto p = ScalarLattice::sample(g, [&](double x) {
                return -gaussian_slope(periodic_offset(x, cr, L), A, w) + gaussian_slope(periodic_offset(x, cl, L), A, w);
            });
            return finish(std::move(z), std::move(p));
        }

        case InitialKind::random_bandlimited:
            return random_bandlimited(g, spec, gamma_min);
    }
    throw ConfigError("initial: unhandled kind");
}

}  // namespace brane
