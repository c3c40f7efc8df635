#include "potts/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace potts {

LogValue LogValue::from_log(double l) { return {std::exp(l), l}; }

double weight_w(const SimplexPoint& x) { return std::cbrt(x.x0() * x.x1 * x.x2); }

namespace {

double product(const SimplexPoint& x) {
    if (!x.interior()) throw BoundaryPoint("EK quantities need an interior point");
    return x.x0() * x.x1 * x.x2;
}

}  // namespace

double nu_mass(const CriticalPoint& m, const ModelParams& p) {
    const double prod = product(m.location);
    const double det = hessian(m.location, p).det();
    if (!(det > kDegeneracyTol)) throw DegenerateInput("nu_mass: Hessian is degenerate or not positive");
    return 1.0 / std::sqrt(prod) / std::sqrt(p.beta * p.beta * det);
}

double mu_saddle(const CriticalPoint& s, const ModelParams& p) {
    const auto spec = a_hessian_spectrum(s.location, p);
    const auto neg = spec.negative_eigenvalue();
    if (!neg) throw NotASaddle("mu_saddle: A * Hess F has no negative eigenvalue");
    return -*neg;
}

double omega_saddle(const CriticalPoint& s, const ModelParams& p) {
    const double prod = product(s.location);
    const double det = hessian(s.location, p).det();
    if (!(det < 0.0)) throw NotASaddle("omega_saddle: det Hess F is not negative");
    return 1.0 / std::sqrt(prod) * weight_w(s.location) * mu_saddle(s, p) / std::sqrt(-det);
}

EKQuantities ek_quantities(const RegimeReport& report) {
    EKQuantities ek;
    const auto& pts = report.critical_points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const int k = static_cast<int>(i);
        if (pts[i].kind == PointKind::LocalMin) ek.nu[k] = nu_mass(pts[i], report.params);
        if (pts[i].kind == PointKind::Saddle) {
            ek.mu[k] = mu_saddle(pts[i], report.params);
            ek.omega[k] = omega_saddle(pts[i], report.params);
        }
    }
    return ek;
}

int LimitChain::position(int state) const {
    const auto it = std::find(states.begin(), states.end(), state);
    return it == states.end() ? -1 : static_cast<int>(it - states.begin());
}

double LimitChain::rate_between(int i, int j) const {
    const int a = position(i), b = position(j);
    if (a < 0 || b < 0) return 0.0;
    return rate[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

double LimitChain::total_rate(int i) const {
    const int a = position(i);
    if (a < 0) return 0.0;
    double s = 0.0;
    for (double r : rate[static_cast<std::size_t>(a)]) s += r;
    return s;
}

std::map<int, double> LimitChain::jump_distribution(int i) const {
    std::map<int, double> out;
    const double total = total_rate(i);
    if (total <= 0.0) return out;
    for (int j : states) {
        const double r = rate_between(i, j);
        if (r > 0.0) out[j] = r / total;
    }
    return out;
}

namespace {

bool same_depth(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

const ExitEvent* exit_of(const RegimeReport& rep, const std::vector<int>& cluster) {
    std::vector<int> want = cluster;
    std::sort(want.begin(), want.end());
    for (const auto& ev : rep.events) {
        std::vector<int> c = ev.cluster;
        std::sort(c.begin(), c.end());
        if (c == want) return &ev;
    }
    return nullptr;
}

// Bottom minima of a cluster: those at the cluster's lowest height.
std::vector<int> bottom_minima(const RegimeReport& rep, const ExitEvent& ev) {
    std::vector<int> out;
    for (int m : ev.cluster)
        if (std::abs(rep.critical_points[static_cast<std::size_t>(m)].height - ev.bottom) <=
            1e-10 * std::max(1.0, std::abs(ev.bottom)))
            out.push_back(m);
    return out;
}

// Valley distribution reached through a gate, on the scale `depth`: clusters
// that leave on a faster scale are traced out by their own exit law.
std::map<int, double> route(const RegimeReport& rep, const EKQuantities& ek, const Gate& gate, double depth) {
    std::map<int, double> out;
    std::deque<std::pair<const Gate*, double>> work{{&gate, 1.0}};
    for (int iter = 0; !work.empty() && iter < 100000; ++iter) {
        const auto [g, mass] = work.front();
        work.pop_front();
        if (mass < 1e-300) continue;
        const ExitEvent* next = exit_of(rep, g->target_cluster);
        if (next == nullptr || next->depth > depth || same_depth(next->depth, depth)) {
            for (const auto& [m, w] : g->target_split)
                out[rep.critical_points[static_cast<std::size_t>(m)].valley_index] += mass * w;
            continue;
        }
        double total = 0.0;
        for (const auto& h : next->gates) total += ek.omega.at(h.saddle);
        for (const auto& h : next->gates) work.emplace_back(&h, mass * ek.omega.at(h.saddle) / total);
    }
    return out;
}

}  // namespace

std::vector<LimitChain> limit_chains(const RegimeReport& report) {
    if (report.degenerate)
        throw DegenerateRegime("no limit chain in a degenerate regime: " + report.degeneracy_reason);
    if (report.valleys.empty() || report.events.empty()) throw NoValleys("limit chain: the regime has no valleys");
    const EKQuantities ek = ek_quantities(report);
    const auto& pts = report.critical_points;

    std::vector<double> depths;
    for (const auto& ev : report.events) {
        bool seen = false;
        for (double d : depths) seen = seen || same_depth(ev.depth, d);
        if (!seen) depths.push_back(ev.depth);
    }
    std::sort(depths.begin(), depths.end());

    std::vector<LimitChain> chains;
    for (double depth : depths) {
        std::map<int, std::map<int, double>> rows;
        std::set<int> movers;
        for (const auto& ev : report.events) {
            if (!same_depth(ev.depth, depth)) continue;
            const auto bottoms = bottom_minima(report, ev);
            double nu = 0.0;
            for (int m : bottoms) nu += ek.nu.at(m);
            std::set<int> own;
            for (int m : ev.cluster) own.insert(pts[static_cast<std::size_t>(m)].valley_index);
            std::map<int, double> out;
            for (const auto& g : ev.gates) {
                const double rate = ek.omega.at(g.saddle) / nu;
                for (const auto& [j, prob] : route(report, ek, g, depth))
                    if (!own.count(j)) out[j] += rate * prob;
            }
            for (int m : bottoms) {
                const int i = pts[static_cast<std::size_t>(m)].valley_index;
                movers.insert(i);
                for (const auto& [j, r] : out) rows[i][j] += r;
            }
        }
        LimitChain c;
        c.depth = depth;
        std::set<int> states(movers.begin(), movers.end());
        for (const auto& [i, row] : rows)
            for (const auto& [j, r] : row) states.insert(j);
        c.states.assign(states.begin(), states.end());
        c.movers.assign(movers.begin(), movers.end());
        for (int s : c.states)
            if (!movers.count(s)) c.absorbing.push_back(s);
        c.rate.assign(c.states.size(), std::vector<double>(c.states.size(), 0.0));
        for (const auto& [i, row] : rows)
            for (const auto& [j, r] : row)
                c.rate[static_cast<std::size_t>(c.position(i))][static_cast<std::size_t>(c.position(j))] = r;
        chains.push_back(std::move(c));
    }
    return chains;
}

LimitChain limit_chain(const RegimeReport& report, std::optional<int> from) {
    const auto chains = limit_chains(report);
    if (from) {
        for (const auto& c : chains)
            if (std::find(c.movers.begin(), c.movers.end(), *from) != c.movers.end()) return c;
        throw OutOfRange("limit_chain: valley " + std::to_string(*from) + " never leaves on any scale");
    }
    for (auto it = chains.rbegin(); it != chains.rend(); ++it)
        for (int i : it->movers)
            if (it->total_rate(i) > 0.0) return *it;
    return chains.back();
}

TransitionPrediction predict_transition(const RegimeReport& report, int N, int from) {
    if (N < 1) throw InvalidArgument("predict_transition: N must be positive");
    if (report.valley(from) == nullptr)
        throw OutOfRange("predict_transition: " + std::to_string(from) + " is not a valley index");
    TransitionPrediction out;
    out.from = from;
    const auto chains = limit_chains(report);
    const LimitChain* chain = nullptr;
    for (const auto& c : chains)
        if (std::find(c.movers.begin(), c.movers.end(), from) != c.movers.end()) {
            chain = &c;
            break;
        }
    out.depth = chain ? chain->depth : report.valley(from)->depth;
    out.time_scale = LogValue::from_log(std::log(2.0 * kPi * N) + out.depth * N);
    out.total_rate = chain ? chain->total_rate(from) : 0.0;
    if (out.total_rate <= 0.0) {
        out.stable = true;
        out.mean_time = {INFINITY, INFINITY};
        return out;
    }
    out.mean_time = LogValue::from_log(out.time_scale.log - std::log(out.total_rate));
    out.jump_distribution = chain->jump_distribution(from);
    return out;
}

}  // namespace potts
