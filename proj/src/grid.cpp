#include "brane/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "brane/error.hpp"

namespace brane {

namespace {

void check_axis(const Grid& g, int axis) {
    if (axis < 0 || axis >= g.m())
        throw ConfigError("axis " + std::to_string(axis) + " out of range for m=" + std::to_string(g.m()));
}

// Calls fn(base, stride, n) once per grid line parallel to `axis`.
template <class Fn>
void for_each_line(const Grid& g, int axis, Fn&& fn) {
    const std::size_t n = g.n(axis);
    const std::size_t stride = g.stride(axis);
    const std::size_t lines = g.size() / n;
    for (std::size_t l = 0; l < lines; ++l) {
        const std::size_t base = (stride == 1) ? l * n : l;
        fn(base, stride, n);
    }
}

}  // namespace

Grid Grid::make(std::span<const std::size_t> n, std::span<const double> length) {
    if (n.size() != length.size()) throw ConfigError("grid: n and length differ in size");
    std::vector<double> origin(n.size());
    for (std::size_t a = 0; a < n.size(); ++a) {
        if (n[a] == 0) throw ConfigError("grid: n must be positive");
        // -(n-1)/2 * dx, so that the centre is exactly zero.
        origin[a] = -(0.5 * static_cast<double>(n[a] - 1)) * (length[a] / static_cast<double>(n[a]));
    }
    return make(n, length, origin);
}

Grid Grid::make(std::span<const std::size_t> n, std::span<const double> length, std::span<const double> origin) {
    const std::size_t m = n.size();
    if (m != 1 && m != 2) throw ConfigError("grid: dimension must be 1 or 2, got " + std::to_string(m));
    if (length.size() != m || origin.size() != m) throw ConfigError("grid: n, length and origin differ in size");
    Grid g;
    g.m_ = static_cast<int>(m);
    for (std::size_t a = 0; a < m; ++a) {
        if (n[a] < 8 || n[a] % 2 != 0)
            throw ConfigError("grid: n[" + std::to_string(a) + "]=" + std::to_string(n[a]) + " must be even and >= 8");
        if (!std::isfinite(length[a]) || length[a] <= 0.0) throw ConfigError("grid: length must be finite and positive");
        if (!std::isfinite(origin[a])) throw ConfigError("grid: origin must be finite");
        g.n_[a] = n[a];
        g.length_[a] = length[a];
        g.dx_[a] = length[a] / static_cast<double>(n[a]);
        g.origin_[a] = origin[a];
    }
    return g;
}

Grid Grid::from_spacing(std::span<const std::size_t> n, std::span<const double> dx, std::span<const double> origin) {
    if (n.size() != dx.size()) throw ConfigError("grid: n and dx differ in size");
    std::vector<double> length(n.size());
    for (std::size_t a = 0; a < n.size(); ++a) {
        if (!std::isfinite(dx[a]) || dx[a] <= 0.0) throw ConfigError("grid: dx must be finite and positive");
        const double nn = static_cast<double>(n[a]);
        double candidate = dx[a] * nn;
        bool found = false;
        // n*dx lands within a few ulps of a length that divides back to dx.
        for (int step = 0; step < 64 && !found; ++step) {
            for (double dir : {+1.0, -1.0}) {
                double trial = candidate;
                for (int k = 0; k < step; ++k) trial = std::nextafter(trial, dir * INFINITY);
                if (trial / nn == dx[a]) {
                    length[a] = trial;
                    found = true;
                    break;
                }
            }
        }
        if (!found) throw ConfigError("grid: no length reproduces dx exactly");
    }
    return make(n, length, origin);
}

Grid Grid::line(std::size_t n, double length) {
    const std::size_t nn[] = {n};
    const double ll[] = {length};
    return make(nn, ll);
}

Grid Grid::square(std::size_t n, double length) {
    const std::size_t nn[] = {n, n};
    const double ll[] = {length, length};
    return make(nn, ll);
}

double Grid::min_dx() const {
    return m_ == 1 ? dx_[0] : std::min(dx_[0], dx_[1]);
}

double Grid::cell_volume() const {
    return m_ == 1 ? dx_[0] : dx_[0] * dx_[1];
}

std::size_t Grid::size() const noexcept {
    return m_ == 1 ? n_[0] : n_[0] * n_[1];
}

std::vector<std::size_t> Grid::unflatten(std::size_t flat) const {
    if (m_ == 1) return {flat};
    return {flat / n_[1], flat % n_[1]};
}

ScalarLattice::ScalarLattice(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw GridMismatch("lattice: " + std::to_string(values_.size()) + " values for " +
                           std::to_string(grid_.size()) + " points");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) throw NonFiniteError("lattice: non-finite value at index " + std::to_string(i));
    }
}

ScalarLattice::ScalarLattice(const Grid& grid, double value) : ScalarLattice(grid, std::vector<double>(grid.size(), value)) {}

double ScalarLattice::max_abs() const noexcept {
    double r = 0.0;
    for (double v : values_) r = std::max(r, std::abs(v));
    return r;
}

double ScalarLattice::min() const noexcept {
    return *std::min_element(values_.begin(), values_.end());
}

double ScalarLattice::max() const noexcept {
    return *std::max_element(values_.begin(), values_.end());
}

ScalarLattice deriv1(const ScalarLattice& f, int axis, StencilOrder order) {
    const Grid& g = f.grid();
    check_axis(g, axis);
    const auto v = f.values();
    std::vector<double> out(v.size());
    const double dx = g.dx(axis);
    for_each_line(g, axis, [&](std::size_t base, std::size_t s, std::size_t n) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t jp1 = (j + 1) % n, jm1 = (j + n - 1) % n;
            const double d1 = v[base + jp1 * s] - v[base + jm1 * s];
            if (order == StencilOrder::second) {
                out[base + j * s] = d1 / (2.0 * dx);
            } else {
                const std::size_t jp2 = (j + 2) % n, jm2 = (j + n - 2) % n;
                const double d2 = v[base + jp2 * s] - v[base + jm2 * s];
                out[base + j * s] = (8.0 * d1 - d2) / (12.0 * dx);
            }
        }
    });
    return ScalarLattice(g, std::move(out));
}

ScalarLattice deriv2(const ScalarLattice& f, int axis1, int axis2, StencilOrder order) {
    const Grid& g = f.grid();
    check_axis(g, axis1);
    check_axis(g, axis2);
    if (axis1 != axis2) return deriv1(deriv1(f, axis1, order), axis2, order);

    const auto v = f.values();
    std::vector<double> out(v.size());
    const double dx2 = g.dx(axis1) * g.dx(axis1);
    for_each_line(g, axis1, [&](std::size_t base, std::size_t s, std::size_t n) {
        for (std::size_t j = 0; j < n; ++j) {
            const double c = v[base + j * s];
            // Differences against the centre keep constants exactly zero.
            const double a1 = (v[base + ((j + 1) % n) * s] - c) + (v[base + ((j + n - 1) % n) * s] - c);
            if (order == StencilOrder::second) {
                out[base + j * s] = a1 / dx2;
            } else {
                const double a2 = (v[base + ((j + 2) % n) * s] - c) + (v[base + ((j + n - 2) % n) * s] - c);
                out[base + j * s] = (16.0 * a1 - a2) / (12.0 * dx2);
            }
        }
    });
    return ScalarLattice(g, std::move(out));
}

ScalarLattice fourth_difference(const ScalarLattice& f, int axis) {
    const Grid& g = f.grid();
    check_axis(g, axis);
    const auto v = f.values();
    std::vector<double> out(v.size());
    for_each_line(g, axis, [&](std::size_t base, std::size_t s, std::size_t n) {
        for (std::size_t j = 0; j < n; ++j) {
            const double c = v[base + j * s];
            const double a1 = (v[base + ((j + 1) % n) * s] - c) + (v[base + ((j + n - 1) % n) * s] - c);
            const double a2 = (v[base + ((j + 2) % n) * s] - c) + (v[base + ((j + n - 2) % n) * s] - c);
            out[base + j * s] = a2 - 4.0 * a1;
        }
    });
    return ScalarLattice(g, std::move(out));
}

// Shewchuk's partials with a final round-half-even correction; the result is
// the exactly rounded sum regardless of input order.
double exact_sum(std::span<const double> values) {
    std::vector<double> partials;
    for (double x : values) {
        std::size_t i = 0;
        for (std::size_t j = 0; j < partials.size(); ++j) {
            double y = partials[j];
            if (std::abs(x) < std::abs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) partials[i++] = lo;
            x = hi;
        }
        partials.resize(i);
        partials.push_back(x);
    }
    if (partials.empty()) return 0.0;

    std::size_t n = partials.size();
    double hi = partials[--n];
    double lo = 0.0;
    while (n > 0) {
        const double x = hi;
        const double y = partials[--n];
        hi = x + y;
        lo = y - (hi - x);
        if (lo != 0.0) break;
    }
    if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
        const double y = lo * 2.0;
        const double x = hi + y;
        if (y == x - hi) hi = x;
    }
    return hi;
}

double integrate(const ScalarLattice& f) {
    return exact_sum(f.values()) * f.grid().cell_volume();
}

Grid refine(const Grid& g) {
    std::vector<std::size_t> n(g.m());
    std::vector<double> length(g.m()), origin(g.m());
    for (int a = 0; a < g.m(); ++a) {
        n[a] = 2 * g.n(a);
        length[a] = g.length(a);
        // Same centre, hence the same left cell edge.
        origin[a] = g.centre(a) - (0.5 * static_cast<double>(n[a] - 1)) * (length[a] / static_cast<double>(n[a]));
    }
    return Grid::make(n, length, origin);
}

double convergence_order(double coarse_err, double fine_err) {
    if (!(coarse_err > 0.0) || !(fine_err > 0.0))
        throw NonPositiveError("convergence_order: errors must be strictly positive");
    return std::log2(coarse_err / fine_err);
}

}  // namespace brane
