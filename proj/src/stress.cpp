#include "brane/stress.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "brane/error.hpp"
#include "brane/evolve2.hpp"

namespace brane {

SymmetricBlock::SymmetricBlock(int dim, std::vector<ScalarLattice> packed) : dim_(dim), packed_(std::move(packed)) {
    if (static_cast<int>(packed_.size()) != slot_count(dim_))
        throw GridMismatch("symmetric block: expected " + std::to_string(slot_count(dim_)) + " components");
}

int SymmetricBlock::slot(int a, int b) const {
    if (a > b) std::swap(a, b);
    if (a < 0 || b >= dim_) throw GridMismatch("symmetric block: index out of range");
    // Row-major upper triangle.
    return a * dim_ - a * (a - 1) / 2 + (b - a);
}

const ScalarLattice& lower_gradient(const GradientField& gf, int a) {
    return a == 0 ? gf.zt : gf.zx[static_cast<std::size_t>(a - 1)];
}

double upper_gradient(const GradientField& gf, int a, std::size_t i) {
    return a == 0 ? gf.zt[i] : -gf.zx[static_cast<std::size_t>(a - 1)][i];
}

ScalarLattice lagrangian_density(const GradientField& gf) {
    return ScalarLattice::generate(gf.grid(), [&](std::size_t i) { return -gf.sqrt_gamma[i]; });
}

StressField stress_tensor(const GradientField& gf) {
    const Grid& g = gf.grid();
    const int dim = g.m() + 1;
    std::vector<ScalarLattice> packed;
    packed.reserve(SymmetricBlock::slot_count(dim));
    for (int a = 0; a < dim; ++a) {
        for (int b = a; b < dim; ++b) {
            const double e = eta(a, b);
            packed.push_back(ScalarLattice::generate(g, [&](std::size_t i) {
                const double sg = gf.sqrt_gamma[i];
                return upper_gradient(gf, a, i) * upper_gradient(gf, b, i) / sg + e * sg;
            }));
        }
    }
    std::vector<ScalarLattice> hlast;
    for (int a = 0; a < dim; ++a)
        hlast.push_back(ScalarLattice::generate(g, [&](std::size_t i) { return upper_gradient(gf, a, i) / gf.sqrt_gamma[i]; }));
    return StressField{g, gf.t, SymmetricBlock(dim, std::move(packed)), std::move(hlast), gf.gamma};
}

double identity_residual(const GradientField& gf, const StressField& sf) {
    if (!(gf.grid() == sf.grid)) throw GridMismatch("identity_residual: grids differ");
    const int dim = sf.m() + 1;
    double worst = 0.0;
    for (int b = 0; b < dim; ++b) {
        for (std::size_t i = 0; i < sf.grid.size(); ++i) {
            double contraction = 0.0;
            for (int a = 0; a < dim; ++a) contraction += lower_gradient(gf, a)[i] * sf.h(a, b)[i];
            worst = std::max(worst, std::abs(contraction - sf.hlast[b][i]));
        }
    }
    return worst;
}

InducedMetric induced_metric(const GradientField& gf) {
    const Grid& g = gf.grid();
    const int dim = g.m() + 1;
    const std::size_t npts = g.size();

    std::vector<std::vector<double>> gp(SymmetricBlock::slot_count(dim), std::vector<double>(npts));
    std::vector<std::vector<double>> ip(SymmetricBlock::slot_count(dim), std::vector<double>(npts));
    std::vector<double> det(npts);

    for (std::size_t i = 0; i < npts; ++i) {
        double m[3][3] = {};
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                m[a][b] = eta(a, b) - lower_gradient(gf, a)[i] * lower_gradient(gf, b)[i];

        double inv[3][3] = {};
        double d;
        if (dim == 2) {
            d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            inv[0][0] = m[1][1];
            inv[1][1] = m[0][0];
            inv[0][1] = inv[1][0] = -m[0][1];
        } else {
            inv[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
            inv[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
            inv[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
            inv[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
            inv[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
            inv[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            d = m[0][0] * inv[0][0] + m[0][1] * (m[1][2] * m[2][0] - m[1][0] * m[2][2]) +
                m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        }
        if (std::abs(d) < 1e-14) {
            throw SingularMetric("induced metric: |det g| = " + std::to_string(std::abs(d)) + " at flat index " +
                                 std::to_string(i));
        }
        det[i] = d;
        int slot = 0;
        for (int a = 0; a < dim; ++a) {
            for (int b = a; b < dim; ++b, ++slot) {
                gp[slot][i] = m[a][b];
                ip[slot][i] = inv[a][b] / d;
            }
        }
    }

    std::vector<ScalarLattice> gl, il;
    for (auto& v : gp) gl.emplace_back(g, std::move(v));
    for (auto& v : ip) il.emplace_back(g, std::move(v));
    return InducedMetric{SymmetricBlock(dim, std::move(gl)), ScalarLattice(g, std::move(det)),
                         SymmetricBlock(dim, std::move(il))};
}

double harmonic_identity_residual(const GradientField& gf, const StressField& sf, const InducedMetric& im) {
    if (!(gf.grid() == sf.grid) || !(im.det.grid() == sf.grid)) throw GridMismatch("harmonic_identity_residual: grids differ");
    const int dim = sf.m() + 1;
    double worst = 0.0;
    for (std::size_t i = 0; i < sf.grid.size(); ++i) {
        const double root = std::sqrt(std::abs(im.det[i]));
        for (int a = 0; a < dim; ++a)
            for (int b = a; b < dim; ++b) worst = std::max(worst, std::abs(sf.h(a, b)[i] - root * im.ginv(a, b)[i]));
    }
    return worst;
}

double mean_curvature_residual(const FieldState& s, StencilOrder order, double gamma_min) {
    const GradientField gf = gradients(s, order, gamma_min);
    const Rhs rates = rhs(s, order, gamma_min);
    const Grid& g = s.grid;
    const int m = g.m();

    // d_t (p / sqrt(Gamma)) with Gamma_t = -2 p p_t + 2 sum_i z_i (d_i p).
    std::vector<ScalarLattice> dp;
    for (int a = 0; a < m; ++a) dp.push_back(deriv1(s.p, a, order));
    std::vector<double> div(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double p = s.p[i], pt = rates.dp[i], gam = gf.gamma[i], sg = gf.sqrt_gamma[i];
        double gamma_t = -2.0 * p * pt;
        for (int a = 0; a < m; ++a) gamma_t += 2.0 * gf.zx[a][i] * dp[a][i];
        div[i] = pt / sg - 0.5 * p * gamma_t / (gam * sg);
    }
    for (int a = 0; a < m; ++a) {
        const ScalarLattice flux = ScalarLattice::generate(g, [&](std::size_t i) { return -gf.zx[a][i] / gf.sqrt_gamma[i]; });
        const ScalarLattice d = deriv1(flux, a, order);
        for (std::size_t i = 0; i < g.size(); ++i) div[i] += d[i];
    }
    double worst = 0.0;
    for (double v : div) worst = std::max(worst, std::abs(v));
    return worst;
}

}  // namespace brane
