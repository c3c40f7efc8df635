#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "potts/model.hpp"

namespace potts::test {

inline bool close(double a, double b, double rel, double abs = 0.0) {
    return std::abs(a - b) <= abs + rel * std::max(std::abs(a), std::abs(b));
}

// Interior points with every coordinate at least `margin`.
inline std::vector<SimplexPoint> random_interior(int count, std::uint64_t seed, double margin = 0.02) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<SimplexPoint> out;
    while (static_cast<int>(out.size()) < count) {
        const double a = u(gen), b = u(gen);
        const SimplexPoint x{a, b};
        if (x.x1 >= margin && x.x2 >= margin && x.x0() >= margin) out.push_back(x);
    }
    return out;
}

inline Vec2 fd_gradient(const SimplexPoint& x, const ModelParams& p, double h = 1e-5) {
    auto F = [&](double a, double b) { return potential({a, b}, p); };
    return {(F(x.x1 + h, x.x2) - F(x.x1 - h, x.x2)) / (2 * h), (F(x.x1, x.x2 + h) - F(x.x1, x.x2 - h)) / (2 * h)};
}

// Central differences of the analytic gradient.
inline Mat2 fd_hessian(const SimplexPoint& x, const ModelParams& p, double h = 1e-5) {
    const Vec2 a = gradient({x.x1 + h, x.x2}, p), b = gradient({x.x1 - h, x.x2}, p);
    const Vec2 c = gradient({x.x1, x.x2 + h}, p), d = gradient({x.x1, x.x2 - h}, p);
    return {(a.x - b.x) / (2 * h), (c.x - d.x) / (2 * h), (a.y - b.y) / (2 * h), (c.y - d.y) / (2 * h)};
}

// H_N(sigma) by the double sum over sites, independent of the count formulas.
inline double pairwise_energy(const std::vector<int>& spins, const ModelParams& p) {
    const double N = static_cast<double>(spins.size());
    const double hx = p.r * std::cos(p.theta), hy = p.r * std::sin(p.theta);
    double pair = 0.0, field = 0.0;
    for (int a : spins) {
        const double ax = std::cos(2 * kPi * a / 3), ay = std::sin(2 * kPi * a / 3);
        field += hx * ax + hy * ay;
        for (int b : spins) pair += ax * std::cos(2 * kPi * b / 3) + ay * std::sin(2 * kPi * b / 3);
    }
    return -pair / (2 * N) - field;
}

}  // namespace potts::test
