#include "potts/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace potts {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;

void require_interior(const SimplexPoint& x, const char* what) {
    if (!x.interior()) {
        throw BoundaryPoint(std::string(what) + ": point must be strictly interior, got x=(" +
                            std::to_string(x.x0()) + ", " + std::to_string(x.x1) + ", " +
                            std::to_string(x.x2) + ")");
    }
}

double xlog3x(double x) { return x > 0.0 ? x * std::log(3.0 * x) : 0.0; }

}  // namespace

Vec2 spin_vector(int k) {
    switch (((k % 3) + 3) % 3) {
        case 0: return {1.0, 0.0};
        case 1: return {-0.5, 0.5 * kSqrt3};
        default: return {-0.5, -0.5 * kSqrt3};
    }
}

void ModelParams::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be positive");
    if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("field magnitude must be nonnegative");
    if (!(theta >= 0.0 && theta < 2.0 * kPi)) throw InvalidArgument("field angle must lie in [0, 2pi)");
}

Vec2 ModelParams::field() const { return {r * std::cos(theta), r * std::sin(theta)}; }

double ModelParams::field_projection(int k) const {
    if (r == 0.0) return 0.0;
    return r * std::cos(theta - kTwoPiOver3 * k);
}

bool SimplexPoint::in_simplex(double tol) const {
    return x1 >= -tol && x2 >= -tol && x0() >= -tol;
}

bool SimplexPoint::interior() const { return x1 > 0.0 && x2 > 0.0 && x0() > 0.0; }

SimplexPoint LatticeState::to_simplex() const {
    const double n = N();
    return {n1 / n, n2 / n};
}

LatticeState nearest_lattice(const SimplexPoint& x, int N) {
    std::array<double, 3> target{std::max(0.0, x.x0()) * N, std::max(0.0, x.x1) * N,
                                 std::max(0.0, x.x2) * N};
    std::array<int, 3> n{};
    int used = 0;
    for (int k = 0; k < 3; ++k) {
        n[k] = static_cast<int>(std::floor(target[k]));
        used += n[k];
    }
    while (used < N) {
        int best = 0;
        double frac = -1.0;
        for (int k = 0; k < 3; ++k) {
            const double f = target[k] - n[k];
            if (f > frac) {
                frac = f;
                best = k;
            }
        }
        ++n[best];
        ++used;
    }
    while (used > N) {
        int best = 0;
        double frac = 2.0;
        for (int k = 0; k < 3; ++k) {
            const double f = target[k] - n[k];
            if (n[k] > 0 && f < frac) {
                frac = f;
                best = k;
            }
        }
        --n[best];
        --used;
    }
    return {n[0], n[1], n[2]};
}

std::size_t lattice_index(int n1, int n2, int N) {
    // Row n1 holds N - n1 + 1 entries.
    const auto a = static_cast<std::size_t>(n1);
    const auto rows_before = a * static_cast<std::size_t>(N + 1) - a * (a - 1) / 2;
    return rows_before + static_cast<std::size_t>(n2);
}

std::vector<LatticeState> enumerate_lattice(int N) {
    std::vector<LatticeState> out;
    out.reserve(lattice_size(N));
    for (int n1 = 0; n1 <= N; ++n1)
        for (int n2 = 0; n2 <= N - n1; ++n2) out.push_back({N - n1 - n2, n1, n2});
    return out;
}

LatticeState SpinConfiguration::counts() const {
    LatticeState s;
    for (auto k : spins) {
        if (k == 0) ++s.n0;
        else if (k == 1) ++s.n1;
        else ++s.n2;
    }
    return s;
}

SpinConfiguration SpinConfiguration::rotated(int i, int times) const {
    SpinConfiguration out = *this;
    auto& k = out.spins[static_cast<std::size_t>(i)];
    k = static_cast<std::uint8_t>((k + times) % 3);
    return out;
}

Vec2 SpinConfiguration::magnetization() const {
    Vec2 m;
    for (auto k : spins) {
        const Vec2 v = spin_vector(k);
        m.x += v.x;
        m.y += v.y;
    }
    const double n = size();
    return {m.x / n, m.y / n};
}

Vec2 psi(const SimplexPoint& x) {
    const Vec2 v1 = spin_vector(1), v2 = spin_vector(2);
    const double a = 2.0 * x.x1 + x.x2 - 1.0;
    const double b = x.x1 + 2.0 * x.x2 - 1.0;
    return {a * v1.x + b * v2.x, a * v1.y + b * v2.y};
}

SimplexPoint psi_inverse(const Vec2& m) {
    // m.x = 1 - 1.5 (x1 + x2), m.y = (sqrt3/2)(x1 - x2)
    const double sum = (1.0 - m.x) / 1.5;
    const double diff = 2.0 * m.y / kSqrt3;
    return {0.5 * (sum + diff), 0.5 * (sum - diff)};
}

LatticeState psi_inverse(const Vec2& m, int N) {
    const SimplexPoint x = psi_inverse(m);
    const int n1 = static_cast<int>(std::lround(x.x1 * N));
    const int n2 = static_cast<int>(std::lround(x.x2 * N));
    return {N - n1 - n2, n1, n2};
}

double field_term(const SimplexPoint& x, const ModelParams& p) {
    if (p.r == 0.0) return 0.0;
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += x.coord(k) * std::cos(p.theta - kTwoPiOver3 * k);
    return p.r * s;
}

double hamiltonian(const SimplexPoint& x, const ModelParams& p) {
    const double x0 = x.x0();
    const double sq = x0 * x0 + x.x1 * x.x1 + x.x2 * x.x2;
    return -0.75 * sq + 0.25 - field_term(x, p);
}

double scaled_hamiltonian(const LatticeState& s, const ModelParams& p) {
    const std::int64_t a = s.n0, b = s.n1, c = s.n2;
    const std::int64_t norm2 = a * a + b * b + c * c - a * b - a * c - b * c;
    double e = -static_cast<double>(norm2) / (2.0 * s.N());
    if (p.r != 0.0) {
        for (int k = 0; k < 3; ++k) e -= s.count(k) * p.field_projection(k);
    }
    return e;
}

double hamiltonian(const LatticeState& s, const ModelParams& p) {
    return scaled_hamiltonian(s, p) / s.N();
}

double spin_hamiltonian(const SpinConfiguration& sigma, const ModelParams& p) {
    const int n = sigma.size();
    double pair = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec2 vi = spin_vector(sigma.spins[static_cast<std::size_t>(i)]);
        for (int j = 0; j < n; ++j) {
            const Vec2 vj = spin_vector(sigma.spins[static_cast<std::size_t>(j)]);
            pair += vi.x * vj.x + vi.y * vj.y;
        }
    }
    const Vec2 h = p.field();
    double lin = 0.0;
    for (auto k : sigma.spins) {
        const Vec2 v = spin_vector(k);
        lin += h.x * v.x + h.y * v.y;
    }
    return -pair / (2.0 * n) - lin;
}

double entropy(const SimplexPoint& x) { return xlog3x(x.x0()) + xlog3x(x.x1) + xlog3x(x.x2); }

double potential(const SimplexPoint& x, const ModelParams& p) {
    return hamiltonian(x, p) + entropy(x) / p.beta;
}

Vec2 gradient(const SimplexPoint& x, const ModelParams& p) {
    require_interior(x, "gradient");
    const double x0 = x.x0();
    const double c0 = std::cos(p.theta);
    const double f1 = p.r * (std::cos(p.theta - kTwoPiOver3) - c0);
    const double f2 = p.r * (std::cos(p.theta - 2.0 * kTwoPiOver3) - c0);
    return {-1.5 * (x.x1 - x0) + std::log(x.x1 / x0) / p.beta - f1,
            -1.5 * (x.x2 - x0) + std::log(x.x2 / x0) / p.beta - f2};
}

Mat2 hessian(const SimplexPoint& x, const ModelParams& p) {
    require_interior(x, "hessian");
    const double b0 = 1.0 / (p.beta * x.x0());
    const double off = b0 - 1.5;
    return {b0 + 1.0 / (p.beta * x.x1) - 3.0, off, off, b0 + 1.0 / (p.beta * x.x2) - 3.0};
}

double hessian_det_formula(const SimplexPoint& x, const ModelParams& p) {
    require_interior(x, "hessian_det_formula");
    const double x0 = x.x0(), x1 = x.x1, x2 = x.x2;
    const double b = p.beta;
    const double pairs = 1.0 / (x0 * x1) + 1.0 / (x0 * x2) + 1.0 / (x1 * x2);
    const double inv = 1.0 / x0 + 1.0 / x1 + 1.0 / x2;
    return pairs / (b * b) - 3.0 * inv / b + 6.75;
}

SymmetricEigen symmetric_eigen(const Mat2& m) {
    const double mean = 0.5 * (m.a11 + m.a22);
    const double half = 0.5 * (m.a11 - m.a22);
    const double b = m.a12;
    const double disc = std::hypot(half, b);
    SymmetricEigen e;
    e.lo = mean - disc;
    e.hi = mean + disc;
    if (disc == 0.0) {
        e.lo_vector = {1.0, 0.0};
        return e;
    }
    const Vec2 u{b, e.lo - m.a11};
    const Vec2 w{e.lo - m.a22, b};
    const double nu = std::hypot(u.x, u.y), nw = std::hypot(w.x, w.y);
    e.lo_vector = nu >= nw ? Vec2{u.x / nu, u.y / nu} : Vec2{w.x / nw, w.y / nw};
    return e;
}

std::optional<double> AHessianSpectrum::negative_eigenvalue() const {
    if (!(det < 0.0)) return std::nullopt;
    return std::min(eigenvalues[0].real(), eigenvalues[1].real());
}

AHessianSpectrum a_hessian_spectrum(const SimplexPoint& x, const ModelParams& p) {
    const Mat2 h = hessian(x, p);
    const Mat2 ah{h.a11, h.a12, h.a21 - h.a11, h.a22 - h.a12};
    AHessianSpectrum s;
    s.trace = ah.trace();
    s.det = ah.det();
    const std::complex<double> root = std::sqrt(std::complex<double>(0.25 * s.trace * s.trace - s.det, 0.0));
    s.eigenvalues = {0.5 * s.trace - root, 0.5 * s.trace + root};
    return s;
}

double a_hessian_trace_formula(const SimplexPoint& x, const ModelParams& p) {
    require_interior(x, "a_hessian_trace_formula");
    return (1.0 / x.x0() + 1.0 / x.x1 + 1.0 / x.x2) / p.beta - 4.5;
}

LogFactorial::LogFactorial(int max) : table_(static_cast<std::size_t>(std::max(max, 1)) + 1, 0.0) {
    for (std::size_t n = 2; n < table_.size(); ++n) table_[n] = table_[n - 1] + std::log(static_cast<double>(n));
}

double log_multinomial(const LatticeState& s, const LogFactorial& lf) {
    return lf(s.N()) - lf(s.n0) - lf(s.n1) - lf(s.n2);
}

double Measure::total() const {
    double t = 0.0;
    for (double w : weights) t += w;
    return t;
}

double Measure::at(const LatticeState& s) const { return weights[lattice_index(s.n1, s.n2, N)]; }

double log_stationary_weight(const LatticeState& s, const ModelParams& p, const LogFactorial& lf) {
    const int N = s.N();
    return std::log(2.0 * kPi * N) + log_multinomial(s, lf) - N * std::log(3.0) -
           p.beta * scaled_hamiltonian(s, p);
}

Measure exact_stationary(int N, const ModelParams& p) {
    if (N < 1) throw InvalidArgument("exact_stationary: N must be positive");
    if (N > kMaxEnumerationN)
        throw SizeLimit("exact_stationary: N=" + std::to_string(N) + " exceeds enumeration limit " +
                        std::to_string(kMaxEnumerationN));
    const LogFactorial lf(N);
    Measure m;
    m.N = N;
    m.states = enumerate_lattice(N);
    m.weights.resize(m.states.size());
    double top = -INFINITY;
    for (std::size_t i = 0; i < m.states.size(); ++i) {
        m.weights[i] = log_stationary_weight(m.states[i], p, lf);
        top = std::max(top, m.weights[i]);
    }
    double z = 0.0;
    for (double& w : m.weights) {
        w = std::exp(w - top);
        z += w;
    }
    for (double& w : m.weights) w /= z;
    return m;
}

double g_correction(const SimplexPoint& x, const ModelParams& p) {
    require_interior(x, "g_correction");
    return std::log(x.x0() * x.x1 * x.x2) / (2.0 * p.beta);
}

double finite_size_potential(const SimplexPoint& x, int N, const ModelParams& p) {
    return potential(x, p) + g_correction(x, p) / N;
}

double finite_size_potential(const LatticeState& s, const ModelParams& p, FiniteSizeMode mode) {
    const int N = s.N();
    if (mode == FiniteSizeMode::Asymptotic) {
        // x0 = 1 - x1 - x2 need not round to 0 when n0 = 0.
        if (s.n0 == 0 || s.n1 == 0 || s.n2 == 0)
            throw BoundaryPoint("finite_size_potential: asymptotic mode needs an interior state");
        return finite_size_potential(s.to_simplex(), N, p);
    }
    const LogFactorial lf(N);
    return -log_stationary_weight(s, p, lf) / (p.beta * N);
}

}  // namespace potts
