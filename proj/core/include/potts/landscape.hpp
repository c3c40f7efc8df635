#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "potts/model.hpp"

namespace potts {

inline constexpr double kDegeneracyTol = 1e-8;

enum class PointKind { LocalMin, Saddle, LocalMax, Degenerate };
const char* to_string(PointKind k);

struct CriticalPoint {
    SimplexPoint location;
    PointKind kind = PointKind::Degenerate;
    double height = 0.0;
    double hessian_det = 0.0;
    std::array<double, 2> hessian_eigs{};
    std::optional<double> a_hessian_negative_eig;  // -mu at saddles
    std::string label;
    // 0..2 for m_i, 3 for p when it is a minimum, -1 otherwise.
    int valley_index = -1;
};

// Classifies x as a critical point of F (does not check the gradient).
CriticalPoint make_critical_point(const SimplexPoint& x, const ModelParams& p, std::string label);

// ---- scalar functions of the zero-field and field analyses ----

// f_r(t) = 2/(3(1 - r - 3t)) log((1-2t)/t), with f_0(1/3) = 2.
double f_opposed(double t, double r);
// Same with 1 + r in place of 1 - r (field aligned with v_0).
double f_aligned(double t, double r);
double h_fn(double t);
double g0_fn(double t);
double k0_fn(double t);

struct Diagnostics {
    double f_r = 0.0;
    double h = 0.0;
    double g0 = 0.0;
    double k0 = 0.0;
};
Diagnostics diagnostics(double t, double r);

struct M0Beta3 {
    double m0 = 0.0;
    double beta3 = 0.0;
};
// Cached after the first call.
const M0Beta3& find_m0_beta3();
double find_beta2();
// Sign change of the Hessian factor at p.
double find_beta1();

enum class FieldFamily { Opposed, Aligned };

struct BranchRoots {
    std::optional<double> p;
    std::optional<double> u;
    std::optional<double> q;
};
BranchRoots solve_branch_roots(double beta, double r, FieldFamily family = FieldFamily::Opposed);
// Root of h(t) = r on (0, 1/3), 0 <= r < 1.
double m0_of_r(double r);

struct HeightsDepths {
    double p_beta = 0.0;
    double q_beta = 0.0;
    double H = 0.0;  // F(sigma_0)
    double h = 0.0;  // F(m_0)
    std::map<int, double> theta;
};
HeightsDepths heights_and_depths(double beta);

struct LineProfile {
    double F = 0.0;
    double dF = 0.0;
    // (3/beta)(3t - 1)(f_0(t) - beta)
    double dF_identity = 0.0;
};
LineProfile line_profile(int i, double t, double beta);
SimplexPoint line_point(int i, double t);
// Lines k_i(t) through sigma_i along which F is minimized at t = 0.
SimplexPoint k_line_point(int i, double t, double q_beta);

// ---- G/H/K inversions (the one-dimensional profile) ----

double g_profile(double beta, double x);
double g_profile_peak(double beta);  // g_beta = G(2/(3 beta))
struct ProfileInverses {
    double H = 0.0;
    double K = 0.0;
};
ProfileInverses g_profile_inverses(double beta, double y);

struct OffDiagonal {
    std::optional<double> y1;
    double y2 = 0.0;
    std::vector<std::pair<std::string, SimplexPoint>> points;
};
// Off-line critical points for the field opposed to v_0 (theta = pi).
OffDiagonal solve_offdiagonal(double beta, double r);

// ---- thresholds ----

double r1_threshold(double beta);
double r2_threshold(double beta);
double r_star_threshold(double beta);
// Fold of the central maximum with sigma_0 for the aligned family.
double r_beta_threshold(double beta);
// Fold of the off-line minimum/saddle pairs for the aligned family.
double r_fold_threshold(double beta);
// Roots x0 of the aligned-family off-line reduction at (beta, r).
std::vector<double> aligned_offdiagonal_x0(double beta, double r);
std::map<std::string, double> field_thresholds(double beta, FieldFamily family);

// ---- critical points ----

struct FamilyInfo {
    FieldFamily family;
    int shift;  // theta = canonical + 2 pi shift / 3
};
// Recognizes theta as a multiple of pi/3 (to 1e-12).
std::optional<FamilyInfo> field_family(double theta);

std::vector<CriticalPoint> critical_points(const ModelParams& p);
std::vector<CriticalPoint> critical_points_multistart(const ModelParams& p, int grid = 40);
std::vector<CriticalPoint> critical_points_zero_field(double beta);

// Newton polish of a critical point; returns nullopt if it does not converge.
std::optional<SimplexPoint> newton_polish(const SimplexPoint& x, const ModelParams& p, double tol = 1e-12,
                                          int max_iter = 60);

// ---- descent ----

struct DescentResult {
    SimplexPoint end;
    double gradient_norm = 0.0;
    bool converged = false;
    int iterations = 0;
};
// Monotone descent: Newton direction where the Hessian is positive definite,
// gradient otherwise, Armijo backtracking, step length capped at 1e-2.
DescentResult descend(const SimplexPoint& x, const ModelParams& p, int max_iter = 20000);

// ---- continuation ----

struct TrackedPoint {
    std::string label;
    SimplexPoint start;
    SimplexPoint end;
    PointKind kind = PointKind::Degenerate;
    double end_height = 0.0;
    double r_reached = 0.0;
    bool folded = false;
    // d/dr of F at the tracked point, r = 0 (envelope theorem).
    double height_slope_at_zero = 0.0;
};
TrackedPoint continue_point(const SimplexPoint& x0, const ModelParams& p, double r_target, std::string label = "",
                            bool throw_on_fold = true);
std::vector<TrackedPoint> continuation_small_field(double beta, double theta, double r_target);

// ---- regimes and valleys ----

enum class Regime {
    NoMetastability,
    ZF_I,
    ZF_II,
    ZF_III,
    ZF_Beta2,
    ZF_Beta1Degenerate,
    FieldPi_I,
    FieldPi_II,
    FieldPi_III,
    Field0_I,
    Field0_II,
    SmallField_CaseI,
    SmallField_CaseII,
    SmallField_CaseIII,
    NumericGeneric,
};
const char* to_string(Regime r);

// Minima reached from one side of a saddle, with weights summing to 1. A
// side whose descent runs into another saddle splits evenly.
using EndpointSplit = std::vector<std::pair<int, double>>;

struct SaddleLink {
    int saddle = -1;  // index into critical_points
    int a = -1;       // representative minima on both sides
    int b = -1;
    EndpointSplit a_split;
    EndpointSplit b_split;
};

struct Gate {
    int saddle = -1;
    int target_minimum = -1;              // descent endpoint on the far side
    EndpointSplit target_split;           // all endpoints on the far side
    std::vector<int> target_cluster;      // its cluster when the gate opens
};

// A cluster of minima leaving its basin through the saddles of one level.
struct ExitEvent {
    std::vector<int> cluster;  // indices of minima in critical_points
    double level = 0.0;
    double bottom = 0.0;
    double depth = 0.0;  // beta (level - bottom)
    std::vector<Gate> gates;
};

struct Valley {
    int index = -1;
    CriticalPoint minimum;
    double depth = 0.0;
    std::vector<CriticalPoint> gate_saddles;
    double height_reference = 0.0;
};

struct Adjacency {
    int i = -1;
    int j = -1;
    std::vector<std::string> saddles;
};

struct RegimeReport {
    ModelParams params;
    Regime regime = Regime::NumericGeneric;
    std::map<std::string, double> thresholds;
    std::vector<CriticalPoint> critical_points;
    std::vector<int> index_set;
    std::vector<Valley> valleys;
    std::vector<Adjacency> adjacency;
    std::vector<SaddleLink> saddle_graph;
    std::vector<ExitEvent> events;
    bool degenerate = false;
    std::string degeneracy_reason;

    const CriticalPoint* find(const std::string& label) const;
    const Valley* valley(int index) const;
    int minimum_of_valley(int index) const;  // index into critical_points
};

RegimeReport classify_regime(const ModelParams& p);

// Saddle-to-minimum connections by descent along the unstable direction.
std::vector<SaddleLink> saddle_graph(const std::vector<CriticalPoint>& points, const ModelParams& p);
// Merge tree over saddle levels.
std::vector<ExitEvent> exit_events(const std::vector<CriticalPoint>& points, const std::vector<SaddleLink>& links,
                                   const ModelParams& p);

// Default epsilon: 0.1 times the smallest F-depth of the valleys.
double default_epsilon(const RegimeReport& report);

struct MetastableSets {
    int N = 0;
    double epsilon = 0.0;
    std::vector<int> valley_indices;
    std::vector<std::vector<LatticeState>> sets;
};
// Membership by level and descent to the valley minimum.
MetastableSets metastable_sets(const RegimeReport& report, double epsilon, int N);
MetastableSets metastable_sets(const ModelParams& p, double epsilon, int N);

// Per-state valley label (-1 outside every set) by flood fill of the
// sublevel set from the minimum; index by lattice_index.
std::vector<signed char> label_lattice(const RegimeReport& report, double epsilon, int N);

// ---- phase diagram ----

struct PhaseDiagram {
    FieldFamily family = FieldFamily::Opposed;
    std::vector<double> betas;
    std::vector<double> rs;
    std::vector<Regime> labels;  // row-major: beta outer, r inner
    std::map<std::string, std::vector<std::pair<double, double>>> boundaries;

    Regime at(std::size_t ib, std::size_t ir) const { return labels[ib * rs.size() + ir]; }
};
PhaseDiagram phase_diagram(double beta_lo, double beta_hi, double r_lo, double r_hi, FieldFamily family,
                           int beta_resolution, int r_resolution);

}  // namespace potts
