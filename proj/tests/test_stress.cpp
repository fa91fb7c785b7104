#include <doctest.h>

#include <cmath>

#include "brane/error.hpp"
#include "brane/stress.hpp"
#include "support.hpp"

using namespace brane;
using namespace testing;

namespace {

GradientField constant_gradient(double p, double q) {
    const Grid g = Grid::line(8, 1.0);
    return make_gradient_field(0.0, ScalarLattice(g, p), {ScalarLattice(g, q)});
}

}  // namespace

TEST_CASE("lagrangian density") {
    CHECK(lagrangian_density(gradients(vacuum(Grid::line(8, 1.0)), StencilOrder::fourth)).max() == -1.0);
    CHECK(lagrangian_density(constant_gradient(0.6, 0.0))[3] == doctest::Approx(-0.8).epsilon(1e-15));
    CHECK(lagrangian_density(constant_gradient(0.0, 0.5))[0] == doctest::Approx(-1.118034).epsilon(1e-6));
}

TEST_CASE("stress tensor examples") {
    SUBCASE("vacuum") {
        const StressField sf = stress_tensor(gradients(vacuum(Grid::line(8, 1.0)), StencilOrder::fourth));
        CHECK(sf.h(0, 0).min() == 1.0);
        CHECK(sf.h(0, 1).max_abs() == 0.0);
        CHECK(sf.h(1, 1).max() == -1.0);
        CHECK(sf.hlast[0].max_abs() == 0.0);
        CHECK(sf.hlast[1].max_abs() == 0.0);
    }
    SUBCASE("uniform p = 0.6") {
        const StressField sf = stress_tensor(constant_gradient(0.6, 0.0));
        CHECK(sf.h(0, 0)[0] == doctest::Approx(1.25).epsilon(1e-15));
        CHECK(sf.h(0, 1)[0] == 0.0);
        CHECK(sf.h(1, 1)[0] == doctest::Approx(-0.8).epsilon(1e-15));
        CHECK(sf.hlast[0][0] == doctest::Approx(0.75).epsilon(1e-15));
        CHECK(sf.hlast[1][0] == 0.0);
    }
    SUBCASE("static slope 0.5") {
        const StressField sf = stress_tensor(constant_gradient(0.0, 0.5));
        CHECK(sf.h(0, 0)[0] == doctest::Approx(1.118034).epsilon(1e-6));
        CHECK(sf.h(1, 1)[0] == doctest::Approx(-0.894427).epsilon(1e-6));
        CHECK(sf.hlast[1][0] == doctest::Approx(-0.447214).epsilon(1e-6));
        CHECK(sf.hlast[0][0] == 0.0);
    }
    SUBCASE("symmetric storage") {
        const Grid g = Grid::square(16, kTwoPi);
        const StressField sf = stress_tensor(gradients(random_state(g, 5), StencilOrder::fourth));
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) CHECK(&sf.h(a, b) == &sf.h(b, a));
    }
}

TEST_CASE("stress tensor against an independent evaluation") {
    for (const Grid& g : {Grid::line(64, kTwoPi), Grid::square(16, kTwoPi)}) {
        const FieldState s = random_state(g, 9, 0.3);
        const GradientField gf = gradients(s, StencilOrder::fourth);
        const StressField sf = stress_tensor(gf);
        const int m = g.m();
        for (std::size_t i = 0; i < g.size(); ++i) {
            std::vector<double> up{s.p[i]};
            double gamma = 1.0 - s.p[i] * s.p[i];
            for (int k = 0; k < m; ++k) {
                up.push_back(-gf.zx[k][i]);
                gamma += gf.zx[k][i] * gf.zx[k][i];
            }
            const double root = std::sqrt(gamma);
            double trace = 0.0, zz = s.p[i] * s.p[i];
            for (int k = 0; k < m; ++k) zz -= gf.zx[k][i] * gf.zx[k][i];
            for (int a = 0; a <= m; ++a) {
                CHECK(sf.hlast[a][i] == doctest::Approx(up[a] / root).epsilon(1e-14));
                for (int b = 0; b <= m; ++b)
                    CHECK(sf.h(a, b)[i] == doctest::Approx(up[a] * up[b] / root + eta(a, b) * root).epsilon(1e-14));
                trace += eta(a, a) * sf.h(a, a)[i];
            }
            // eta_ab H^ab = z^c z_c / sqrt(Gamma) + (M+1) sqrt(Gamma).
            CHECK(trace == doctest::Approx(zz / root + (m + 1) * root).epsilon(1e-13));
            // H^00 >= sqrt(1 + |grad z|^2) >= 1.
            CHECK(sf.h(0, 0)[i] >= std::sqrt(gamma + s.p[i] * s.p[i]) * (1 - 1e-15));
            CHECK(sf.h(0, 0)[i] > 1.0);
        }
    }
}

TEST_CASE("contraction identity") {
    CHECK(identity_residual(gradients(vacuum(Grid::line(16, 1.0)), StencilOrder::fourth),
                            stress_tensor(gradients(vacuum(Grid::line(16, 1.0)), StencilOrder::fourth))) == 0.0);
    const GradientField u = constant_gradient(0.6, 0.0);
    CHECK(identity_residual(u, stress_tensor(u)) <= 1e-15);

    const FieldState s = random_state(Grid::line(128, kTwoPi), 7);
    const GradientField gf = gradients(s, StencilOrder::fourth);
    CHECK(identity_residual(gf, stress_tensor(gf)) <= 1e-13);

    const FieldState s2 = random_state(Grid::square(32, kTwoPi), 7, 0.4);
    const GradientField gf2 = gradients(s2, StencilOrder::fourth);
    CHECK(identity_residual(gf2, stress_tensor(gf2)) <= 1e-13);
}

TEST_CASE("induced metric") {
    SUBCASE("vacuum") {
        const InducedMetric im = induced_metric(gradients(vacuum(Grid::line(8, 1.0)), StencilOrder::fourth));
        CHECK(im.g(0, 0)[0] == 1.0);
        CHECK(im.g(1, 1)[0] == -1.0);
        CHECK(im.g(0, 1)[0] == 0.0);
        CHECK(im.det[0] == -1.0);
    }
    SUBCASE("uniform p = 0.6") {
        const InducedMetric im = induced_metric(constant_gradient(0.6, 0.0));
        CHECK(im.g(0, 0)[0] == doctest::Approx(0.64).epsilon(1e-15));
        CHECK(im.g(1, 1)[0] == -1.0);
        CHECK(im.det[0] == doctest::Approx(-0.64).epsilon(1e-15));
        CHECK(std::sqrt(std::abs(im.det[0])) == doctest::Approx(0.8).epsilon(1e-15));
    }
    SUBCASE("random data: det and inverse") {
        for (const Grid& g : {Grid::line(64, kTwoPi), Grid::square(16, kTwoPi)}) {
            const GradientField gf = gradients(random_state(g, 21, 0.3), StencilOrder::fourth);
            const InducedMetric im = induced_metric(gf);
            const int d = g.m() + 1;
            for (std::size_t i = 0; i < g.size(); ++i) {
                CHECK(std::abs(std::abs(im.det[i]) - gf.gamma[i]) <= 8 * kEps * gf.gamma[i] * 4);
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b) {
                        double s = 0.0, scale = 0.0;
                        for (int c = 0; c < d; ++c) {
                            s += im.ginv(a, c)[i] * im.g(c, b)[i];
                            scale += std::abs(im.ginv(a, c)[i] * im.g(c, b)[i]);
                        }
                        CHECK(std::abs(s - (a == b ? 1.0 : 0.0)) <= 8 * kEps * std::max(1.0, scale));
                    }
            }
        }
    }
    SUBCASE("singular metric") {
        const Grid g = Grid::line(8, 1.0);
        const GradientField gf = make_gradient_field(0.0, ScalarLattice(g, 1.0), {ScalarLattice(g, 0.0)}, 0.0);
        CHECK_THROWS_AS(induced_metric(gf), SingularMetric);
    }
}

TEST_CASE("harmonic gauge identity") {
    const GradientField v = gradients(vacuum(Grid::square(8, 1.0)), StencilOrder::fourth);
    CHECK(harmonic_identity_residual(v, stress_tensor(v), induced_metric(v)) == 0.0);
    const GradientField u = constant_gradient(0.6, 0.0);
    CHECK(harmonic_identity_residual(u, stress_tensor(u), induced_metric(u)) <= 1e-15);
    for (const Grid& g : {Grid::line(128, kTwoPi), Grid::square(32, kTwoPi)}) {
        const GradientField gf = gradients(random_state(g, 7), StencilOrder::fourth);
        CHECK(harmonic_identity_residual(gf, stress_tensor(gf), induced_metric(gf)) <= 1e-12);
    }
}

TEST_CASE("mean curvature residual") {
    CHECK(mean_curvature_residual(vacuum(Grid::line(16, 1.0)), StencilOrder::fourth) == 0.0);
    CHECK(mean_curvature_residual(vacuum(Grid::square(16, 1.0)), StencilOrder::fourth) == 0.0);
    CHECK(mean_curvature_residual(uniform_state(Grid::line(16, 1.0), 0.6), StencilOrder::fourth) <= 1e-15);

    auto traveling = [](std::size_t n) {
        return mean_curvature_residual(make_initial(Grid::line(n, kTwoPi), traveling_spec(0.2, 0.5)),
                                       StencilOrder::fourth);
    };
    const double a = traveling(256), b = traveling(512);
    CHECK(a < 1e-4);
    CHECK(a / b >= 8.0);

    // M=2: truncation level, fourth order.
    auto gauss2 = [](std::size_t n) {
        return mean_curvature_residual(make_initial(Grid::square(n, kTwoPi), gaussian_spec(0.1, 0.8, 0.3)),
                                       StencilOrder::fourth);
    };
    CHECK(gauss2(32) / gauss2(64) >= 8.0);
}
