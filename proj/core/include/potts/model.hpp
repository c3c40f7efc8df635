#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "potts/errors.hpp"

namespace potts {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPiOver3 = 2.0 * std::numbers::pi / 3.0;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// General 2x2 matrix, row major.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }
};

Vec2 spin_vector(int k);

struct ModelParams {
    double beta = 1.0;
    double r = 0.0;      // field magnitude
    double theta = 0.0;  // field angle in [0, 2pi)

    // Throws InvalidArgument when the invariants are violated.
    void validate() const;
    Vec2 field() const;
    // h . v_k
    double field_projection(int k) const;
};

struct SimplexPoint {
    double x1 = 0.0;
    double x2 = 0.0;

    double x0() const { return 1.0 - x1 - x2; }
    double coord(int k) const { return k == 0 ? x0() : (k == 1 ? x1 : x2); }
    bool in_simplex(double tol = 0.0) const;
    bool interior() const;
};

struct LatticeState {
    int n0 = 0;
    int n1 = 0;
    int n2 = 0;

    int N() const { return n0 + n1 + n2; }
    int count(int k) const { return k == 0 ? n0 : (k == 1 ? n1 : n2); }
    SimplexPoint to_simplex() const;
    bool valid() const { return n0 >= 0 && n1 >= 0 && n2 >= 0 && N() > 0; }
    friend bool operator==(const LatticeState&, const LatticeState&) = default;
};

// Lattice point of Xi_N closest to x (largest-remainder rounding).
LatticeState nearest_lattice(const SimplexPoint& x, int N);

// Index of a lattice state in the triangular enumeration used throughout:
// states are ordered by n1, then n2.
inline std::size_t lattice_size(int N) { return static_cast<std::size_t>(N + 1) * (N + 2) / 2; }
std::size_t lattice_index(int n1, int n2, int N);
std::vector<LatticeState> enumerate_lattice(int N);

// Spins are stored as k in {0,1,2}, meaning v_k.
struct SpinConfiguration {
    std::vector<std::uint8_t> spins;

    int size() const { return static_cast<int>(spins.size()); }
    LatticeState counts() const;
    // Counter-clockwise rotation of site i: v_k -> v_{k+1}.
    SpinConfiguration rotated(int i, int times = 1) const;
    Vec2 magnetization() const;
};

Vec2 psi(const SimplexPoint& x);
SimplexPoint psi_inverse(const Vec2& m);
LatticeState psi_inverse(const Vec2& m, int N);

double hamiltonian(const SimplexPoint& x, const ModelParams& p);
double hamiltonian(const LatticeState& s, const ModelParams& p);
// N * H(x), with the quadratic part computed from integer counts.
double scaled_hamiltonian(const LatticeState& s, const ModelParams& p);
// Pairwise-sum form on a full spin configuration.
double spin_hamiltonian(const SpinConfiguration& sigma, const ModelParams& p);

double entropy(const SimplexPoint& x);
// Linear field term r * sum_i x_i cos(theta - 2 pi i / 3).
double field_term(const SimplexPoint& x, const ModelParams& p);
double potential(const SimplexPoint& x, const ModelParams& p);
Vec2 gradient(const SimplexPoint& x, const ModelParams& p);
Mat2 hessian(const SimplexPoint& x, const ModelParams& p);
double hessian_det_formula(const SimplexPoint& x, const ModelParams& p);

struct SymmetricEigen {
    double lo = 0.0;
    double hi = 0.0;
    Vec2 lo_vector;  // unit eigenvector for lo
};
SymmetricEigen symmetric_eigen(const Mat2& m);

struct AHessianSpectrum {
    std::array<std::complex<double>, 2> eigenvalues;
    double trace = 0.0;
    double det = 0.0;
    // The unique negative eigenvalue when det < 0.
    std::optional<double> negative_eigenvalue() const;
};
// Spectrum of A * Hess F with A = [[1,0],[-1,1]].
AHessianSpectrum a_hessian_spectrum(const SimplexPoint& x, const ModelParams& p);
double a_hessian_trace_formula(const SimplexPoint& x, const ModelParams& p);

// log n! for n <= max, by summation.
class LogFactorial {
public:
    explicit LogFactorial(int max);
    double operator()(int n) const { return table_[static_cast<std::size_t>(n)]; }

private:
    std::vector<double> table_;
};

double log_multinomial(const LatticeState& s, const LogFactorial& lf);

struct Measure {
    int N = 0;
    std::vector<LatticeState> states;
    std::vector<double> weights;

    double total() const;
    double at(const LatticeState& s) const;
};

inline constexpr int kMaxEnumerationN = 200;

// nu(x) proportional to 3^-N multinomial(N; n) exp(-beta N H(x)).
Measure exact_stationary(int N, const ModelParams& p);
// Unnormalized log weight with the Gaussian factor 2 pi N included, so that
// -(beta N)^-1 times it matches F + log(x0 x1 x2)/(2 beta N) up to O(1/N^2).
double log_stationary_weight(const LatticeState& s, const ModelParams& p, const LogFactorial& lf);

enum class FiniteSizeMode { Exact, Asymptotic };

double finite_size_potential(const LatticeState& s, const ModelParams& p, FiniteSizeMode mode);
double finite_size_potential(const SimplexPoint& x, int N, const ModelParams& p);
// log(x0 x1 x2) / (2 beta)
double g_correction(const SimplexPoint& x, const ModelParams& p);

}  // namespace potts
