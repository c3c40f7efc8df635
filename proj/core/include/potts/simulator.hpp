#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "potts/kinetics.hpp"
#include "potts/landscape.hpp"
#include "potts/model.hpp"

namespace potts {

// ---- reduced chain ----

// Moves of the reduced chain, in this order: v0 -> v1, v1 -> v2, v2 -> v0.
struct ReducedRates {
    std::array<LatticeState, 3> target;
    std::array<double, 3> rate{};
};
ReducedRates reduced_rates(const LatticeState& s, const ModelParams& p);

// Dense generator over enumerate_lattice(N) order (row = from).
struct DenseGenerator {
    int N = 0;
    std::size_t size = 0;
    std::vector<double> q;  // size * size, off-diagonal rates, diagonal = -row sum

    double at(std::size_t i, std::size_t j) const { return q[i * size + j]; }
};
DenseGenerator reduced_generator(int N, const ModelParams& p);

// Spin-level generator lumped by counts, built from every configuration of
// {0,1,2}^N. `spread` is the largest disagreement between the lumped rows of
// two configurations with the same counts (zero for an exact lumping).
struct LumpedGenerator {
    DenseGenerator generator;
    double spread = 0.0;
};
inline constexpr int kMaxSpinN = 9;
LumpedGenerator lumped_spin_generator(int N, const ModelParams& p);

// ---- stationarity and reversibility oracles ----

// Hook that may alter a rate before the residual is computed (mutation tests).
using RateMutation = std::function<double(const LatticeState& from, int move, double rate)>;

inline constexpr int kMaxGeneratorN = 60;
// max_x |(nu^T L)(x)| / (nu(x) q(x)) with q(x) the total exit rate of x.
double stationarity_residual(int N, const ModelParams& p, const RateMutation& mutate = {});

struct ReversibilityWitness {
    LatticeState x;
    LatticeState y;
    double forward = 0.0;   // nu(x) r(x, y)
    double backward = 0.0;  // nu(y) r(y, x)
    double asymmetry = 0.0; // |forward - backward| / max(forward, backward)
};
// Pair with the largest detailed-balance asymmetry.
ReversibilityWitness detailed_balance_witness(int N, const ModelParams& p);

struct CycleCheck {
    std::array<double, 3> edge_residual{};  // |R / (w_N R~) - 1| per edge
    double residual = 0.0;                  // max over edges
    double w_N = 0.0;
    double w = 0.0;
};
// Compares the reduced rates on the cycle based at x with w_N(x) times the
// cycle rates built from F_{beta,N}.
CycleCheck cycle_decomposition_check(const LatticeState& x, const ModelParams& p,
                                     FiniteSizeMode mode = FiniteSizeMode::Asymptotic);

// ---- random numbers ----

// SplitMix64 stream; a replica's stream is fixed by (seed, replica).
class Rng {
public:
    explicit Rng(std::uint64_t state) : state_(state) {}
    static Rng stream(std::uint64_t seed, std::uint64_t replica);

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // Uniform on (0, 1), never 0 or 1.
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
    double exponential() { return -std::log(uniform()); }

private:
    std::uint64_t state_;
};

// ---- rate table and simulation context ----

inline constexpr int kMaxSimulationN = 3000;

class RateTable {
public:
    struct Entry {
        double c0 = 0.0;     // rate of move 0
        double c1 = 0.0;     // cumulative rate of moves 0 and 1
        double total = 0.0;  // total exit rate
        std::int32_t next[3] = {-1, -1, -1};
    };

    RateTable(int N, const ModelParams& p);

    int N() const { return N_; }
    std::size_t size() const { return entries_.size(); }
    const Entry& operator[](std::size_t i) const { return entries_[i]; }
    std::size_t index_of(const LatticeState& s) const { return lattice_index(s.n1, s.n2, N_); }
    LatticeState state_of(std::size_t i) const;

private:
    int N_;
    std::vector<Entry> entries_;
    std::vector<std::int32_t> n1_, n2_;
};

struct SimulationConfig {
    ModelParams params;
    int N = 0;
    std::uint64_t seed = 0;
    int replicas = 1;
    std::optional<int> start_valley;
    std::optional<LatticeState> start_state;
    std::vector<int> targets;          // valley indices; empty means every other valley
    double horizon = INFINITY;         // run_trajectory stop time
    std::uint64_t event_budget = 0;    // per replica; 0 picks the default budget
    std::optional<double> epsilon;     // metastable-set margin; default from the report
    int threads = 0;                   // 0: POTTS_THREADS or hardware concurrency
    bool record_state_occupation = false;
};

// Everything replicas share: landscape report, valley labels, rates.
struct SimulationContext {
    SimulationConfig config;
    RegimeReport report;
    double epsilon = 0.0;
    std::vector<signed char> labels;  // per lattice index, -1 outside every set
    std::shared_ptr<const RateTable> table;
    std::size_t start = 0;
    int start_label = -1;
    std::vector<char> is_target;      // per valley label (index label)
    std::uint64_t event_budget = 0;
    std::optional<TransitionPrediction> prediction;
};
std::shared_ptr<const SimulationContext> prepare_simulation(const SimulationConfig& config);

struct Visit {
    int valley = -1;
    double entry_time = 0.0;
    double sojourn = 0.0;  // until a different valley is entered, or the end
};

struct TrajectorySummary {
    std::vector<Visit> visits;  // consecutive labels differ
    double total_time = 0.0;
    std::uint64_t events = 0;
    bool budget_exceeded = false;
    bool hit = false;
    int hit_target = -1;
    LatticeState final_state;
    // Time spent with each label; index 0 is outside every set, k+1 is valley k.
    std::array<double, 5> label_time{};
    std::vector<double> state_time;  // per lattice index, when requested
};

// Runs until the horizon or the budget; with stop_on_hit also until the first
// entry into a target set.
TrajectorySummary run_trajectory(const SimulationContext& ctx, std::uint64_t replica, bool stop_on_hit = false);
TrajectorySummary run_trajectory(const SimulationConfig& config, std::uint64_t replica);

// ---- hitting experiments ----

struct HittingSample {
    std::uint64_t replica = 0;
    double time = 0.0;
    int target = -1;
    std::uint64_t events = 0;
    bool censored = false;
    std::array<double, 5> label_time{};
};

struct HittingStats {
    std::vector<HittingSample> samples;  // in replica order
    int completed = 0;
    int censored = 0;
    double mean = 0.0;
    double mean_se = 0.0;
    double sd = 0.0;
    double cv = 0.0;
    double cv_se = 0.0;
    std::map<int, double> frequency;
    std::map<int, double> frequency_se;
    // Fraction of total hitting time spent in each label (pooled over replicas).
    std::array<double, 5> label_fraction{};
    std::uint64_t total_events = 0;
    std::optional<TransitionPrediction> prediction;
};
HittingStats hitting_experiment(const SimulationConfig& config);
HittingStats hitting_experiment(const SimulationContext& ctx);
HittingStats summarize_hitting(std::vector<HittingSample> samples, std::uint64_t seed);

struct ScalingPoint {
    int N = 0;
    HittingStats stats;
    double exact_mean = NAN;  // from the linear system, when small enough
};
struct ScalingStudy {
    std::vector<ScalingPoint> points;
    double slope = 0.0;
    double intercept = 0.0;
    double depth = 0.0;  // theta from the landscape
};
ScalingStudy scaling_study(const SimulationConfig& base, const std::vector<int>& Ns);

inline constexpr int kMaxExactHittingN = 400;
// Mean hitting time of the target sets from ctx.start, by a sparse solve.
double exact_mean_hitting_time(const SimulationContext& ctx);
struct HittingMoments {
    double mean = 0.0;
    double second = 0.0;  // E[tau^2]
    double cv() const { return std::sqrt(std::max(0.0, second - mean * mean)) / mean; }
};
HittingMoments exact_hitting_moments(const SimulationContext& ctx);
// Law of the first target set entered from ctx.start, by the same solve.
std::map<int, double> exact_hitting_distribution(const SimulationContext& ctx);
// Expected time in each label before the first target entry, indexed as
// TrajectorySummary::label_time.
std::array<double, 5> exact_hitting_occupation(const SimulationContext& ctx);

// Default thread count: POTTS_THREADS if set, else hardware concurrency.
int default_threads();

}  // namespace potts
