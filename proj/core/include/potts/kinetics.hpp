#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "potts/landscape.hpp"

namespace potts {

// A positive quantity carried with its logarithm; value overflows to inf
// long before the log does.
struct LogValue {
    double value = 0.0;
    double log = -INFINITY;

    static LogValue from_log(double l);
};

// (x0 x1 x2)^(1/3)
double weight_w(const SimplexPoint& x);
// e^{-beta G}/sqrt(beta^2 det Hess F) at a non-degenerate minimum.
double nu_mass(const CriticalPoint& m, const ModelParams& p);
// e^{-beta G} w mu / sqrt(-det Hess F) at a saddle.
double omega_saddle(const CriticalPoint& s, const ModelParams& p);
// mu at a saddle: minus the negative eigenvalue of A * Hess F.
double mu_saddle(const CriticalPoint& s, const ModelParams& p);

struct EKQuantities {
    std::map<int, double> nu;     // keyed by index into critical_points
    std::map<int, double> omega;  // keyed by saddle index
    std::map<int, double> mu;
};
EKQuantities ek_quantities(const RegimeReport& report);

// Limit chain on one exponential time scale. States are valley indices.
struct LimitChain {
    double depth = 0.0;                     // theta of the moving valleys
    std::vector<int> states;                // sorted
    std::vector<std::vector<double>> rate;  // rate[a][b] between states[a], states[b]
    std::vector<int> movers;                // valleys that leave on this scale
    std::vector<int> absorbing;

    int position(int state) const;
    double rate_between(int i, int j) const;
    double total_rate(int i) const;
    std::map<int, double> jump_distribution(int i) const;
};

// One chain per distinct valley depth, shallowest first.
std::vector<LimitChain> limit_chains(const RegimeReport& report);
// Chain on the scale where `from` moves; without `from`, the slowest scale
// that has any transition.
LimitChain limit_chain(const RegimeReport& report, std::optional<int> from = std::nullopt);

struct TransitionPrediction {
    int from = -1;
    double depth = 0.0;
    LogValue time_scale;  // 2 pi N e^{depth N}
    LogValue mean_time;
    double total_rate = 0.0;
    bool stable = false;  // no transition on any scale; mean_time is inf
    std::map<int, double> jump_distribution;
};
TransitionPrediction predict_transition(const RegimeReport& report, int N, int from);

}  // namespace potts
