#include "potts/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <thread>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace potts {

namespace {

LatticeState shifted(const LatticeState& s, int d0, int d1, int d2) { return {s.n0 + d0, s.n1 + d1, s.n2 + d2}; }

// Mean of N H over the rotation cycle of a v0 site in base state b.
double cycle_mean(const LatticeState& b, const ModelParams& p) {
    return (scaled_hamiltonian(b, p) + scaled_hamiltonian(shifted(b, -1, 1, 0), p) +
            scaled_hamiltonian(shifted(b, -1, 0, 1), p)) /
           3.0;
}

}  // namespace

ReducedRates reduced_rates(const LatticeState& s, const ModelParams& p) {
    if (!s.valid()) throw InvalidArgument("reduced_rates: invalid counts");
    ReducedRates out;
    const double N = s.N();
    const double hs = scaled_hamiltonian(s, p);
    out.target = {s, s, s};
    if (s.n0 > 0) {
        out.target[0] = shifted(s, -1, 1, 0);
        out.rate[0] = s.n0 / N * std::exp(-p.beta * (cycle_mean(s, p) - hs));
    }
    if (s.n1 > 0) {
        out.target[1] = shifted(s, 0, -1, 1);
        out.rate[1] = s.n1 / N * std::exp(-p.beta * (cycle_mean(shifted(s, 1, -1, 0), p) - hs));
    }
    if (s.n2 > 0) {
        out.target[2] = shifted(s, 1, 0, -1);
        out.rate[2] = s.n2 / N * std::exp(-p.beta * (cycle_mean(shifted(s, 1, 0, -1), p) - hs));
    }
    return out;
}

DenseGenerator reduced_generator(int N, const ModelParams& p) {
    if (N < 1 || N > kMaxGeneratorN) throw SizeLimit("reduced_generator: N out of range");
    DenseGenerator g;
    g.N = N;
    g.size = lattice_size(N);
    g.q.assign(g.size * g.size, 0.0);
    for (const auto& s : enumerate_lattice(N)) {
        const std::size_t i = lattice_index(s.n1, s.n2, N);
        const auto r = reduced_rates(s, p);
        for (int k = 0; k < 3; ++k) {
            if (r.rate[static_cast<std::size_t>(k)] == 0.0) continue;
            const auto& t = r.target[static_cast<std::size_t>(k)];
            g.q[i * g.size + lattice_index(t.n1, t.n2, N)] += r.rate[static_cast<std::size_t>(k)];
            g.q[i * g.size + i] -= r.rate[static_cast<std::size_t>(k)];
        }
    }
    return g;
}

LumpedGenerator lumped_spin_generator(int N, const ModelParams& p) {
    if (N < 1 || N > kMaxSpinN) throw SizeLimit("lumped_spin_generator: N must lie in [1, 9]");
    std::size_t configs = 1;
    for (int i = 0; i < N; ++i) configs *= 3;

    LumpedGenerator out;
    DenseGenerator& g = out.generator;
    g.N = N;
    g.size = lattice_size(N);
    g.q.assign(g.size * g.size, 0.0);
    std::vector<char> filled(g.size, 0);

    SpinConfiguration sigma;
    sigma.spins.assign(static_cast<std::size_t>(N), 0);
    std::vector<double> row(g.size);
    for (std::size_t code = 0; code < configs; ++code) {
        std::size_t c = code;
        for (int i = 0; i < N; ++i) {
            sigma.spins[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(c % 3);
            c /= 3;
        }
        const double h = spin_hamiltonian(sigma, p);
        std::fill(row.begin(), row.end(), 0.0);
        for (int i = 0; i < N; ++i) {
            const SpinConfiguration once = sigma.rotated(i, 1);
            const SpinConfiguration twice = sigma.rotated(i, 2);
            const double mean = (h + spin_hamiltonian(once, p) + spin_hamiltonian(twice, p)) / 3.0;
            const double rate = std::exp(-p.beta * (mean - h)) / N;
            const LatticeState t = once.counts();
            row[lattice_index(t.n1, t.n2, N)] += rate;
        }
        const LatticeState s = sigma.counts();
        const std::size_t i = lattice_index(s.n1, s.n2, N);
        double total = 0.0;
        for (double r : row) total += r;
        row[i] -= total;
        double* dst = &g.q[i * g.size];
        if (!filled[i]) {
            std::copy(row.begin(), row.end(), dst);
            filled[i] = 1;
        } else {
            for (std::size_t j = 0; j < g.size; ++j) {
                const double scale = std::max(std::abs(dst[j]), 1e-300);
                out.spread = std::max(out.spread, std::abs(dst[j] - row[j]) / scale);
            }
        }
    }
    return out;
}

double stationarity_residual(int N, const ModelParams& p, const RateMutation& mutate) {
    if (N < 1 || N > kMaxGeneratorN) throw SizeLimit("stationarity_residual: N must lie in [1, 60]");
    const LogFactorial lf(N);
    const auto states = enumerate_lattice(N);
    std::vector<double> logw(states.size());
    std::vector<ReducedRates> rates(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        logw[i] = log_stationary_weight(states[i], p, lf);
        rates[i] = reduced_rates(states[i], p);
        if (mutate)
            for (int k = 0; k < 3; ++k)
                rates[i].rate[static_cast<std::size_t>(k)] = mutate(states[i], k, rates[i].rate[static_cast<std::size_t>(k)]);
    }
    // Inflow to x relative to nu(x): sum_y (nu(y)/nu(x)) r(y, x).
    std::vector<double> inflow(states.size(), 0.0);
    std::vector<double> outflow(states.size(), 0.0);
    std::vector<std::vector<std::pair<std::size_t, double>>> in(states.size());
    for (std::size_t i = 0; i < states.size(); ++i)
        for (int k = 0; k < 3; ++k) {
            const double r = rates[i].rate[static_cast<std::size_t>(k)];
            if (r == 0.0) continue;
            const auto& t = rates[i].target[static_cast<std::size_t>(k)];
            in[lattice_index(t.n1, t.n2, N)].emplace_back(i, r);
            outflow[i] += r;
        }
    double worst = 0.0;
    for (std::size_t j = 0; j < states.size(); ++j) {
        double s = 0.0;
        for (const auto& [i, r] : in[j]) s += std::exp(logw[i] - logw[j]) * r;
        inflow[j] = s;
        worst = std::max(worst, std::abs(inflow[j] - outflow[j]) / outflow[j]);
    }
    return worst;
}

ReversibilityWitness detailed_balance_witness(int N, const ModelParams& p) {
    const Measure nu = exact_stationary(N, p);
    ReversibilityWitness best;
    best.asymmetry = -1.0;
    for (std::size_t i = 0; i < nu.states.size(); ++i) {
        const auto& x = nu.states[i];
        const auto rx = reduced_rates(x, p);
        for (int k = 0; k < 3; ++k) {
            if (rx.rate[static_cast<std::size_t>(k)] == 0.0) continue;
            const auto& y = rx.target[static_cast<std::size_t>(k)];
            const auto ry = reduced_rates(y, p);
            double back = 0.0;
            for (int m = 0; m < 3; ++m)
                if (ry.rate[static_cast<std::size_t>(m)] > 0.0 && ry.target[static_cast<std::size_t>(m)] == x)
                    back += ry.rate[static_cast<std::size_t>(m)];
            const double f = nu.weights[i] * rx.rate[static_cast<std::size_t>(k)];
            const double b = nu.at(y) * back;
            const double a = std::abs(f - b) / std::max(f, b);
            if (a > best.asymmetry) best = {x, y, f, b, a};
        }
    }
    return best;
}

CycleCheck cycle_decomposition_check(const LatticeState& x, const ModelParams& p, FiniteSizeMode mode) {
    if (!x.valid() || x.n0 < 1) throw InvalidArgument("cycle_decomposition_check: the cycle must fit in the simplex");
    const int N = x.N();
    const std::array<LatticeState, 3> s = {x, shifted(x, -1, 1, 0), shifted(x, -1, 0, 1)};
    const std::array<double, 3> R = {reduced_rates(s[0], p).rate[0], reduced_rates(s[1], p).rate[1],
                                     reduced_rates(s[2], p).rate[2]};
    std::array<double, 3> F{};
    for (int i = 0; i < 3; ++i) F[static_cast<std::size_t>(i)] = finite_size_potential(s[static_cast<std::size_t>(i)], p, mode);
    const double mean = (F[0] + F[1] + F[2]) / 3.0;
    CycleCheck out;
    const double x0 = static_cast<double>(x.n0) / N, x1 = static_cast<double>(x.n1) / N, x2 = static_cast<double>(x.n2) / N;
    out.w_N = std::cbrt(x0 * (x1 + 1.0 / N) * (x2 + 1.0 / N));
    out.w = std::cbrt(x0 * x1 * x2);
    for (std::size_t i = 0; i < 3; ++i) {
        const double cycle_rate = std::exp(-p.beta * N * (mean - F[i]));
        out.edge_residual[i] = std::abs(R[i] / (out.w_N * cycle_rate) - 1.0);
        out.residual = std::max(out.residual, out.edge_residual[i]);
    }
    return out;
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t replica) {
    Rng mix(seed ^ 0x6a09e667f3bcc909ULL);
    const std::uint64_t a = mix.next();
    Rng mix2(a ^ (replica * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL));
    mix2.next();
    return Rng(mix2.next());
}

RateTable::RateTable(int N, const ModelParams& p) : N_(N) {
    if (N < 1 || N > kMaxSimulationN)
        throw SizeLimit("RateTable: N=" + std::to_string(N) + " exceeds " + std::to_string(kMaxSimulationN));
    const std::size_t n = lattice_size(N);
    entries_.resize(n);
    n1_.resize(n);
    n2_.resize(n);
    for (int a = 0; a <= N; ++a)
        for (int b = 0; a + b <= N; ++b) {
            const LatticeState s{N - a - b, a, b};
            const std::size_t i = lattice_index(a, b, N);
            n1_[i] = a;
            n2_[i] = b;
            const auto r = reduced_rates(s, p);
            Entry& e = entries_[i];
            e.c0 = r.rate[0];
            e.c1 = r.rate[0] + r.rate[1];
            e.total = e.c1 + r.rate[2];
            for (int k = 0; k < 3; ++k) {
                const auto& t = r.target[static_cast<std::size_t>(k)];
                e.next[k] = static_cast<std::int32_t>(lattice_index(t.n1, t.n2, N));
            }
        }
}

LatticeState RateTable::state_of(std::size_t i) const { return {N_ - n1_[i] - n2_[i], n1_[i], n2_[i]}; }

int default_threads() {
    if (const char* env = std::getenv("POTTS_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::shared_ptr<const SimulationContext> prepare_simulation(const SimulationConfig& config) {
    config.params.validate();
    if (config.N < 1) throw InvalidArgument("simulation: N must be positive");
    if (config.N > kMaxSimulationN) throw SizeLimit("simulation: N exceeds " + std::to_string(kMaxSimulationN));
    if (config.replicas < 1) throw InvalidArgument("simulation: replicas must be positive");
    auto ctx = std::make_shared<SimulationContext>();
    ctx->config = config;
    ctx->report = classify_regime(config.params);
    const int N = config.N;
    const bool needs_valleys = config.start_valley.has_value() || !config.targets.empty();
    const bool has_valleys = !ctx->report.valleys.empty() && !ctx->report.degenerate;
    if (has_valleys) {
        ctx->epsilon = config.epsilon ? *config.epsilon : default_epsilon(ctx->report);
        ctx->labels = label_lattice(ctx->report, ctx->epsilon, N);
    } else {
        if (needs_valleys) {
            if (ctx->report.degenerate)
                throw DegenerateRegime("simulation targets need valleys: " + ctx->report.degeneracy_reason);
            throw NoValleys("simulation targets need valleys, and the regime has none");
        }
        ctx->labels.assign(lattice_size(N), -1);
    }
    ctx->table = std::make_shared<RateTable>(N, config.params);

    if (config.start_state) {
        const auto& s = *config.start_state;
        if (!s.valid() || s.N() != N) throw InvalidArgument("simulation: start state does not match N");
        ctx->start = lattice_index(s.n1, s.n2, N);
    } else if (config.start_valley) {
        const Valley* v = ctx->report.valley(*config.start_valley);
        if (v == nullptr) throw OutOfRange("simulation: no valley " + std::to_string(*config.start_valley));
        const LatticeState s = nearest_lattice(v->minimum.location, N);
        ctx->start = lattice_index(s.n1, s.n2, N);
    } else {
        throw InvalidArgument("simulation: a start valley or start state is required");
    }
    ctx->start_label = ctx->labels[ctx->start];

    ctx->is_target.assign(4, 0);
    if (config.targets.empty()) {
        const int from = config.start_valley ? *config.start_valley : ctx->start_label;
        for (const auto& v : ctx->report.valleys)
            if (v.index != from && has_valleys) ctx->is_target[static_cast<std::size_t>(v.index)] = 1;
    } else {
        for (int t : config.targets) {
            if (ctx->report.valley(t) == nullptr) throw OutOfRange("simulation: no valley " + std::to_string(t));
            ctx->is_target[static_cast<std::size_t>(t)] = 1;
        }
    }

    if (config.start_valley && has_valleys) {
        try {
            ctx->prediction = predict_transition(ctx->report, N, *config.start_valley);
        } catch (const Error&) {
        }
    }
    if (config.event_budget > 0) {
        ctx->event_budget = config.event_budget;
    } else if (ctx->prediction && !ctx->prediction->stable) {
        // Forty predicted means: an exponential tail that far out has mass
        // e^-20 even when the prediction is low by a factor of two.
        const double expected = 40.0 * ctx->prediction->mean_time.value * (*ctx->table)[ctx->start].total;
        ctx->event_budget = static_cast<std::uint64_t>(std::clamp(expected, 1e7, 1e12));
    } else {
        ctx->event_budget = 1000000000ULL;
    }
    return ctx;
}

TrajectorySummary run_trajectory(const SimulationContext& ctx, std::uint64_t replica, bool stop_on_hit) {
    const RateTable& table = *ctx.table;
    const signed char* labels = ctx.labels.data();
    const char* target = ctx.is_target.data();
    const double horizon = ctx.config.horizon;
    const std::uint64_t budget = ctx.event_budget;
    Rng rng = Rng::stream(ctx.config.seed, replica);

    TrajectorySummary out;
    if (ctx.config.record_state_occupation) out.state_time.assign(table.size(), 0.0);
    double* state_time = out.state_time.empty() ? nullptr : out.state_time.data();

    std::size_t idx = ctx.start;
    int label = labels[idx];
    int last_valley = label;
    if (label >= 0) out.visits.push_back({label, 0.0, 0.0});
    double time = 0.0, comp = 0.0;  // Neumaier sum
    std::array<double, 5> label_time{};
    std::uint64_t events = 0;

    for (;;) {
        if (stop_on_hit && label >= 0 && target[label]) {
            out.hit = true;
            out.hit_target = label;
            break;
        }
        if (events >= budget) {
            out.budget_exceeded = true;
            break;
        }
        const RateTable::Entry& e = table[idx];
        const double dt = rng.exponential() / e.total;
        const double now = time + comp;
        if (now + dt > horizon) {
            label_time[static_cast<std::size_t>(label + 1)] += horizon - now;
            if (state_time) state_time[idx] += horizon - now;
            time = horizon;
            comp = 0.0;
            break;
        }
        label_time[static_cast<std::size_t>(label + 1)] += dt;
        if (state_time) state_time[idx] += dt;
        const double t = time + dt;
        comp += std::abs(time) >= dt ? (time - t) + dt : (dt - t) + time;
        time = t;

        const double v = rng.uniform() * e.total;
        idx = static_cast<std::size_t>(e.next[v < e.c0 ? 0 : (v < e.c1 ? 1 : 2)]);
        ++events;
        label = labels[idx];
        if (label >= 0 && label != last_valley) {
            const double entry = time + comp;
            if (!out.visits.empty()) out.visits.back().sojourn = entry - out.visits.back().entry_time;
            out.visits.push_back({label, entry, 0.0});
            last_valley = label;
        }
    }
    out.total_time = time + comp;
    if (!out.visits.empty()) out.visits.back().sojourn = out.total_time - out.visits.back().entry_time;
    out.events = events;
    out.label_time = label_time;
    out.final_state = table.state_of(idx);
    return out;
}

TrajectorySummary run_trajectory(const SimulationConfig& config, std::uint64_t replica) {
    return run_trajectory(*prepare_simulation(config), replica, false);
}

HittingStats summarize_hitting(std::vector<HittingSample> samples, std::uint64_t seed) {
    HittingStats st;
    std::vector<double> times;
    std::map<int, int> counts;
    double total_time = 0.0;
    for (const auto& s : samples) {
        st.total_events += s.events;
        if (s.censored) {
            ++st.censored;
            continue;
        }
        times.push_back(s.time);
        ++counts[s.target];
        total_time += s.time;
        for (std::size_t k = 0; k < 5; ++k) st.label_fraction[k] += s.label_time[k];
    }
    st.samples = std::move(samples);
    st.completed = static_cast<int>(times.size());
    const double n = st.completed;
    if (st.completed == 0) return st;
    for (auto& f : st.label_fraction) f /= total_time;

    auto moments = [](const std::vector<double>& v, double& mean, double& sd) {
        double s = 0.0;
        for (double x : v) s += x;
        mean = s / static_cast<double>(v.size());
        double q = 0.0;
        for (double x : v) q += (x - mean) * (x - mean);
        sd = v.size() > 1 ? std::sqrt(q / static_cast<double>(v.size() - 1)) : 0.0;
    };
    moments(times, st.mean, st.sd);
    st.cv = st.mean > 0.0 ? st.sd / st.mean : 0.0;
    st.mean_se = st.sd / std::sqrt(n);
    for (const auto& [t, c] : counts) {
        const double f = c / n;
        st.frequency[t] = f;
        st.frequency_se[t] = std::sqrt(f * (1.0 - f) / n);
    }

    if (st.completed > 1) {
        Rng rng(seed ^ 0xb5ad4eceda1ce2a9ULL);
        constexpr int kBoot = 1000;
        std::vector<double> resample(times.size());
        std::vector<double> cvs;
        cvs.reserve(kBoot);
        for (int b = 0; b < kBoot; ++b) {
            for (auto& x : resample) x = times[static_cast<std::size_t>(rng.next() % times.size())];
            double m = 0.0, s = 0.0;
            moments(resample, m, s);
            cvs.push_back(m > 0.0 ? s / m : 0.0);
        }
        double m = 0.0, s = 0.0;
        moments(cvs, m, s);
        st.cv_se = s;
    }
    return st;
}

namespace {

HittingStats run_hitting(const SimulationContext& ctx) {
    if (ctx.start_label >= 0 && ctx.is_target[static_cast<std::size_t>(ctx.start_label)])
        throw InvalidArgument("hitting experiment: the start lies in a target set");
    const int replicas = ctx.config.replicas;
    std::vector<HittingSample> samples(static_cast<std::size_t>(replicas));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next++; r < replicas; r = next++) {
            const auto t = run_trajectory(ctx, static_cast<std::uint64_t>(r), true);
            auto& s = samples[static_cast<std::size_t>(r)];
            s.replica = static_cast<std::uint64_t>(r);
            s.time = t.total_time;
            s.target = t.hit_target;
            s.events = t.events;
            s.censored = !t.hit;
            s.label_time = t.label_time;
        }
    };
    const int threads = std::clamp(ctx.config.threads > 0 ? ctx.config.threads : default_threads(), 1, replicas);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    HittingStats st = summarize_hitting(std::move(samples), ctx.config.seed);
    st.prediction = ctx.prediction;
    return st;
}

}  // namespace

HittingStats hitting_experiment(const SimulationConfig& config) { return run_hitting(*prepare_simulation(config)); }
HittingStats hitting_experiment(const SimulationContext& ctx) { return run_hitting(ctx); }

namespace {

// Generator restricted to the states outside the target sets.
struct RestrictedGenerator {
    std::vector<std::int64_t> unknown;  // per lattice index, -1 inside a target set
    std::int64_t size = 0;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

void factor_restricted(const SimulationContext& ctx, RestrictedGenerator& g) {
    const RateTable& table = *ctx.table;
    if (table.N() > kMaxExactHittingN) throw SizeLimit("exact hitting quantities: N exceeds 400");
    const std::size_t n = table.size();
    g.unknown.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const int l = ctx.labels[i];
        if (!(l >= 0 && ctx.is_target[static_cast<std::size_t>(l)])) g.unknown[i] = g.size++;
    }
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(g.size) * 4);
    for (std::size_t i = 0; i < n; ++i) {
        if (g.unknown[i] < 0) continue;
        const auto& e = table[i];
        const double r[3] = {e.c0, e.c1 - e.c0, e.total - e.c1};
        trip.emplace_back(g.unknown[i], g.unknown[i], -e.total);
        for (int k = 0; k < 3; ++k) {
            if (r[k] == 0.0) continue;
            const std::int64_t j = g.unknown[static_cast<std::size_t>(e.next[k])];
            if (j >= 0) trip.emplace_back(g.unknown[i], j, r[k]);
        }
    }
    Eigen::SparseMatrix<double> A(g.size, g.size);
    A.setFromTriplets(trip.begin(), trip.end());
    g.lu.compute(A);
    if (g.lu.info() != Eigen::Success) throw NoSolution("exact hitting quantities: factorization failed");
}

}  // namespace

double exact_mean_hitting_time(const SimulationContext& ctx) {
    RestrictedGenerator g;
    factor_restricted(ctx, g);
    if (g.unknown[ctx.start] < 0) return 0.0;
    const Eigen::VectorXd tau = g.lu.solve(Eigen::VectorXd::Constant(g.size, -1.0));
    return tau[g.unknown[ctx.start]];
}

HittingMoments exact_hitting_moments(const SimulationContext& ctx) {
    RestrictedGenerator g;
    factor_restricted(ctx, g);
    HittingMoments m;
    if (g.unknown[ctx.start] < 0) return m;
    // L t1 = -1 and L t2 = -2 t1 off the targets.
    const Eigen::VectorXd t1 = g.lu.solve(Eigen::VectorXd::Constant(g.size, -1.0));
    const Eigen::VectorXd t2 = g.lu.solve(-2.0 * t1);
    m.mean = t1[g.unknown[ctx.start]];
    m.second = t2[g.unknown[ctx.start]];
    return m;
}

std::map<int, double> exact_hitting_distribution(const SimulationContext& ctx) {
    RestrictedGenerator g;
    factor_restricted(ctx, g);
    std::map<int, double> out;
    const int start_label = ctx.labels[ctx.start];
    if (g.unknown[ctx.start] < 0) {
        out[start_label] = 1.0;
        return out;
    }
    const RateTable& table = *ctx.table;
    for (std::size_t t = 0; t < ctx.is_target.size(); ++t) {
        if (!ctx.is_target[t]) continue;
        // Committor: L h = 0 off the targets, h = 1 on set t, 0 on the others.
        Eigen::VectorXd b = Eigen::VectorXd::Zero(g.size);
        for (std::size_t i = 0; i < table.size(); ++i) {
            if (g.unknown[i] < 0) continue;
            const auto& e = table[i];
            const double r[3] = {e.c0, e.c1 - e.c0, e.total - e.c1};
            for (int k = 0; k < 3; ++k)
                if (r[k] > 0.0 && ctx.labels[static_cast<std::size_t>(e.next[k])] == static_cast<int>(t))
                    b[g.unknown[i]] -= r[k];
        }
        const Eigen::VectorXd h = g.lu.solve(b);
        out[static_cast<int>(t)] = h[g.unknown[ctx.start]];
    }
    return out;
}

std::array<double, 5> exact_hitting_occupation(const SimulationContext& ctx) {
    RestrictedGenerator g;
    factor_restricted(ctx, g);
    std::array<double, 5> out{};
    if (g.unknown[ctx.start] < 0) return out;
    for (int label = -1; label < 4; ++label) {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(g.size);
        bool any = false;
        for (std::size_t i = 0; i < ctx.labels.size(); ++i)
            if (g.unknown[i] >= 0 && ctx.labels[i] == label) {
                b[g.unknown[i]] = -1.0;
                any = true;
            }
        if (!any) continue;
        out[static_cast<std::size_t>(label + 1)] = g.lu.solve(b)[g.unknown[ctx.start]];
    }
    return out;
}

ScalingStudy scaling_study(const SimulationConfig& base, const std::vector<int>& Ns) {
    if (Ns.size() < 2) throw InvalidArgument("scaling_study: need at least two sizes");
    ScalingStudy study;
    std::vector<double> xs, ys;
    for (int N : Ns) {
        SimulationConfig c = base;
        c.N = N;
        const auto ctx = prepare_simulation(c);
        ScalingPoint pt;
        pt.N = N;
        pt.stats = run_hitting(*ctx);
        if (N <= kMaxExactHittingN) pt.exact_mean = exact_mean_hitting_time(*ctx);
        if (ctx->prediction) study.depth = ctx->prediction->depth;
        if (pt.stats.completed > 0) {
            xs.push_back(N);
            ys.push_back(std::log(pt.stats.mean));
        }
        study.points.push_back(std::move(pt));
    }
    if (xs.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= static_cast<double>(xs.size());
        my /= static_cast<double>(xs.size());
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        study.slope = sxy / sxx;
        study.intercept = my - study.slope * mx;
    }
    return study;
}

}  // namespace potts
