#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <string>

#include "brane/field.hpp"
#include "brane/grid.hpp"

namespace testing {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();
inline constexpr double kTwoPi = 6.283185307179586;

inline double max_diff(const brane::ScalarLattice& a, const brane::ScalarLattice& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

template <class Fz, class Fp>
brane::FieldState line_state(std::size_t n, double length, Fz&& z, Fp&& p, double t = 0.0) {
    const brane::Grid g = brane::Grid::line(n, length);
    return brane::FieldState(g, t, brane::ScalarLattice::sample(g, z), brane::ScalarLattice::sample(g, p));
}

inline brane::FieldState uniform_state(const brane::Grid& g, double p) {
    return brane::FieldState(g, 0.0, brane::ScalarLattice(g, 0.0), brane::ScalarLattice(g, p));
}

inline brane::FieldState vacuum(const brane::Grid& g) {
    return uniform_state(g, 0.0);
}

inline brane::FieldState random_state(const brane::Grid& g, std::uint64_t seed, double amplitude = 0.1) {
    brane::InitialSpec spec;
    spec.kind = brane::InitialKind::random_bandlimited;
    spec.amplitude = amplitude;
    spec.seed = seed;
    return brane::make_initial(g, spec);
}

inline brane::InitialSpec gaussian_spec(double amplitude, double width, double velocity = 0.0) {
    brane::InitialSpec spec;
    spec.kind = brane::InitialKind::gaussian;
    spec.amplitude = amplitude;
    spec.width = width;
    spec.velocity = velocity;
    return spec;
}

inline brane::InitialSpec traveling_spec(double amplitude, double width) {
    brane::InitialSpec spec;
    spec.kind = brane::InitialKind::traveling;
    spec.amplitude = amplitude;
    spec.width = width;
    return spec;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    std::random_device rd;
    auto dir = std::filesystem::temp_directory_path() / ("brane_" + name + "_" + std::to_string(rd()));
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing
