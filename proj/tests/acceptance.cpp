// Acceptance checks 1-10. One line per criterion, exit status 1 if any fails.
//
//   acceptance [criterion ...]
//
// With no arguments every criterion runs. Criteria 7 and 8 are Monte Carlo
// runs of several minutes on one core; POTTS_THREADS sets the replica threads.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "potts/kinetics.hpp"
#include "potts/landscape.hpp"
#include "potts/model.hpp"
#include "potts/simulator.hpp"

using namespace potts;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

struct Criterion {
    int id;
    const char* title;
    double limit_seconds;
    std::function<void(Outcome&)> run;
};

const std::string kSigma = "\xcf\x83";

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

// ---- 1 ----
void critical_constants(Outcome& o) {
    const auto& mb = find_m0_beta3();
    const double b2 = find_beta2(), b1 = find_beta1();
    o.detail.precision(10);
    o.detail << "m0=" << mb.m0 << " beta3=" << mb.beta3 << " beta2=" << b2 << " beta1=" << b1;
    o.require(std::abs(mb.m0 - 0.2076) <= 1e-3, "m0");
    o.require(std::abs(mb.beta3 - 1.8304) <= 1e-3, "beta3");
    o.require(std::abs(b2 - 1.8484) <= 1e-3, "beta2");
    o.require(b1 == 2.0, "beta1 exactly 2");
    // The Hessian at p changes sign across beta1.
    const SimplexPoint p{1.0 / 3, 1.0 / 3};
    o.require(hessian(p, {b1 - 1e-6, 0, 0}).a11 > 0 && hessian(p, {b1 + 1e-6, 0, 0}).a11 < 0, "sign change at beta1");
}

// ---- 2 ----
void census(Outcome& o) {
    using K = PointKind;
    const double b3 = find_m0_beta3().beta3;
    const std::string s = kSigma;
    const std::vector<std::pair<double, std::map<std::string, K>>> expected = {
        {1.5, {{"p", K::LocalMin}}},
        {b3, {{"m0", K::Degenerate}, {"m1", K::Degenerate}, {"m2", K::Degenerate}, {"p", K::LocalMin}}},
        {1.9,
         {{"m0", K::LocalMin}, {"m1", K::LocalMin}, {"m2", K::LocalMin}, {"p", K::LocalMin},
          {s + "0", K::Saddle}, {s + "1", K::Saddle}, {s + "2", K::Saddle}}},
        {2.0, {{"m0", K::LocalMin}, {"m1", K::LocalMin}, {"m2", K::LocalMin}, {"p", K::Degenerate}}},
        {2.4,
         {{"m0", K::LocalMin}, {"m1", K::LocalMin}, {"m2", K::LocalMin}, {"p", K::LocalMax},
          {s + "0", K::Saddle}, {s + "1", K::Saddle}, {s + "2", K::Saddle}}},
    };
    for (const auto& [beta, want] : expected) {
        std::map<std::string, K> got;
        for (const auto& c : critical_points({beta, 0, 0})) got[c.label] = c.kind;
        o.detail << "beta=" << beta << ":" << got.size() << " ";
        o.require(got == want, "census at beta=" + std::to_string(beta));
    }
}

// ---- 3 ----
void thresholds(Outcome& o) {
    const double r1 = r1_threshold(2.0), r2 = r2_threshold(2.0), rb = r_beta_threshold(2.0);
    o.detail.precision(15);
    o.detail << "r1(2)=" << r1 << " r2(2)=" << r2 << " h(1/6)=" << h_fn(1.0 / 6) << " r_beta(2)=" << rb;
    o.require(r1 == 0.0, "r1(2) = 0");
    o.require(std::abs(r2 - h_fn(1.0 / 6)) <= 1e-12, "r2(2) = h(1/6)");
    o.require(rb == 0.0, "r_beta(2) = 0");
    int ordered = 0;
    for (int k = 1; k <= 50; ++k) {
        const double beta = 2.0 + 4.0 * k / 50;
        ordered += r1_threshold(beta) < r2_threshold(beta);
    }
    o.detail << " r1<r2 on " << ordered << "/50";
    o.require(ordered == 50, "r1 < r2 on the grid");
}

// ---- 4 ----
void stationarity(Outcome& o) {
    double worst = 0;
    for (int N : {6, 8, 12})
        for (double beta : {1.5, 2.4})
            for (double r : {0.0, 0.3}) worst = std::max(worst, stationarity_residual(N, {beta, r, r > 0 ? kPi : 0.0}));
    const auto w = detailed_balance_witness(6, {1.9, 0, 0});
    o.detail << "max residual=" << worst << " witness asymmetry=" << w.asymmetry << " between (" << w.x.n0 << ","
             << w.x.n1 << "," << w.x.n2 << ") and (" << w.y.n0 << "," << w.y.n1 << "," << w.y.n2 << ")";
    o.require(worst <= 1e-10, "residual <= 1e-10");
    o.require(w.asymmetry > 1e-3, "non-reversibility witness");
}

// ---- 5 ----
void aggregation(Outcome& o) {
    double worst = 0, spread = 0;
    const ModelParams params[] = {{1.5, 0, 0}, {2.4, 0.3, kPi}, {1.9, 0.4, 1.0}};
    for (const auto& p : params)
        for (int N = 1; N <= 8; ++N) {
            const auto lumped = lumped_spin_generator(N, p);
            const auto red = reduced_generator(N, p);
            double scale = 0, diff = 0;
            for (std::size_t i = 0; i < red.q.size(); ++i) {
                scale = std::max(scale, std::abs(red.q[i]));
                diff = std::max(diff, std::abs(red.q[i] - lumped.generator.q[i]));
            }
            worst = std::max(worst, diff / scale);
            spread = std::max(spread, lumped.spread);
        }
    o.detail << "max relative difference=" << worst << " class spread=" << spread;
    o.require(worst <= 1e-14, "lumped == reduced");
    o.require(spread <= 1e-14, "lumping is exact");
}

// ---- 6 ----
void derivatives(Outcome& o) {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const ModelParams params[] = {{1.7, 0, 0}, {2.4, 0.3, kPi}, {3.1, 0.15, 0.7}, {1.2, 0.8, 4.0}};
    double gerr = 0, herr = 0;
    int points = 0;
    while (points < 100) {
        const SimplexPoint x{u(gen), u(gen)};
        if (std::min({x.x0(), x.x1, x.x2}) < 0.02) continue;
        const ModelParams& p = params[points++ % 4];
        const double h = 1e-5;
        auto F = [&](double a, double b) { return potential({a, b}, p); };
        const Vec2 g = gradient(x, p);
        const Vec2 fd{(F(x.x1 + h, x.x2) - F(x.x1 - h, x.x2)) / (2 * h),
                      (F(x.x1, x.x2 + h) - F(x.x1, x.x2 - h)) / (2 * h)};
        gerr = std::max(gerr, std::max(std::abs(g.x - fd.x), std::abs(g.y - fd.y)) /
                                  std::max({1.0, std::abs(g.x), std::abs(g.y)}));
        const Mat2 H = hessian(x, p);
        const Vec2 a = gradient({x.x1 + h, x.x2}, p), b = gradient({x.x1 - h, x.x2}, p);
        const Vec2 c = gradient({x.x1, x.x2 + h}, p), d = gradient({x.x1, x.x2 - h}, p);
        const double fh[4] = {(a.x - b.x) / (2 * h), (c.x - d.x) / (2 * h), (a.y - b.y) / (2 * h),
                              (c.y - d.y) / (2 * h)};
        const double an[4] = {H.a11, H.a12, H.a21, H.a22};
        double scale = 1.0, diff = 0;
        for (int k = 0; k < 4; ++k) {
            scale = std::max(scale, std::abs(an[k]));
            diff = std::max(diff, std::abs(an[k] - fh[k]));
        }
        herr = std::max(herr, diff / scale);
    }
    o.detail << "gradient err=" << gerr << " hessian err=" << herr;
    o.require(gerr <= 1e-6, "gradient");
    o.require(herr <= 1e-6, "hessian");

    // Slopes of the critical heights at r = 0 against continuation.
    const double beta = 2.4, delta = 1e-4;
    const auto hd = heights_and_depths(beta);
    double worst = 0;
    for (double theta : {0.0, 0.9, kPi, 4.4}) {
        const ModelParams zero{beta, 0, theta};
        for (const auto& c : critical_points_zero_field(beta)) {
            if (c.label == "p") continue;
            const int i = c.label.back() - '0';
            const double coord = c.kind == PointKind::LocalMin ? hd.p_beta : hd.q_beta;
            const double slope = (3 * coord - 1) * std::cos(theta - 2 * kPi * i / 3);
            const auto t = continue_point(c.location, zero, delta, c.label);
            worst = std::max(worst, std::abs((t.end_height - potential(c.location, zero)) / delta - slope));
            worst = std::max(worst, std::abs(t.height_slope_at_zero - slope));
        }
    }
    o.detail << " slope err=" << worst << " (delta=" << delta << ")";
    o.require(worst <= 10 * delta, "slopes to O(delta)");
}

// ---- 7 ----
void eyring_kramers(Outcome& o) {
    SimulationConfig base;
    base.params = {2.4, 0, 0};
    base.seed = 20240607;
    base.replicas = 400;
    base.start_valley = 0;
    const std::vector<int> Ns{40, 60, 80};
    const auto study = scaling_study(base, Ns);
    o.detail.precision(4);
    const double dev = std::abs(study.slope / study.depth - 1);
    o.detail << "slope=" << study.slope << " theta=" << study.depth << " (" << 100 * dev << "%)";
    o.require(dev <= 0.10, "slope within 10%");
    for (const auto& pt : study.points) {
        const auto& st = pt.stats;
        SimulationConfig c = base;
        c.N = pt.N;
        const auto split = exact_hitting_distribution(*prepare_simulation(c));
        const double f1 = st.frequency.count(1) ? st.frequency.at(1) : 0.0;
        const double se = std::sqrt(0.25 / st.completed);
        o.detail << "; N=" << pt.N << " mean=" << st.mean << "±" << st.mean_se << " exact=" << pt.exact_mean
                 << " EK=" << st.prediction->mean_time.value << " cv=" << st.cv << "±" << st.cv_se
                 << " P(m1)=" << f1 << " exact P(m1)=" << split.at(1) << " censored=" << st.censored;
        o.require(st.censored == 0, "no censoring at N=" + std::to_string(pt.N));
        o.require(std::abs(st.cv - 1) <= 0.15, "|CV-1| at N=" + std::to_string(pt.N));
        o.require(std::abs(f1 - 0.5) <= 3 * se, "1/2 split within 3 sigma at N=" + std::to_string(pt.N));
        if (pt.N == 80) {
            const double ratio = st.mean / st.prediction->mean_time.value;
            o.detail << " mean/EK=" << ratio;
            o.require(ratio >= 0.5 && ratio <= 2.0, "N=80 mean within factor 2 of EK");
        }
    }
}

// ---- 8 ----
void entropic_passage(Outcome& o) {
    const ModelParams p{1.86, 0, 0};
    const auto rep = classify_regime(p);
    const auto ek = ek_quantities(rep);
    const double nu = ek.nu.at(rep.minimum_of_valley(0)), nu3 = ek.nu.at(rep.minimum_of_valley(3));
    const double gap = -p.beta * heights_and_depths(p.beta).h;  // theta(i) - theta(3)
    // Predicted share of an energetic transition spent in the entropic well:
    // x/(1+x) with x = (nu3/(3 nu)) e^{-gap N}. Smallest multiple of 3 with
    // share <= 5%, unless the event budget runs out first.
    const double total_budget = 2e10;
    const int replicas = 400;
    int N = 3;
    for (int n = 3; n <= kMaxSimulationN; n += 3) {
        SimulationConfig c;
        c.params = p;
        c.N = n;
        c.start_valley = 0;
        c.targets = {1, 2};
        const double x = nu3 / (3 * nu) * std::exp(-gap * n);
        if (n % 300 == 0 || x / (1 + x) <= 0.05) {
            const auto ctx = prepare_simulation(c);
            const double events = ctx->prediction->mean_time.value * (*ctx->table)[ctx->start].total;
            if (events * replicas > total_budget) break;
        }
        N = n;
        if (x / (1 + x) <= 0.05) break;
    }
    o.detail.precision(4);
    o.detail << "N=" << N;

    SimulationConfig from3;
    from3.params = p;
    from3.N = N;
    from3.seed = 8;
    from3.replicas = replicas;
    from3.start_valley = 3;
    const auto st3 = hitting_experiment(from3);
    o.detail << " from E(3):";
    o.require(st3.censored == 0, "no censoring from E(3)");
    for (int j = 0; j < 3; ++j) {
        const double f = st3.frequency.count(j) ? st3.frequency.at(j) : 0.0;
        const double se = std::sqrt((1.0 / 3) * (2.0 / 3) / st3.completed);
        o.detail << " " << f;
        o.require(std::abs(f - 1.0 / 3) <= 3 * se, "1/3 split for target " + std::to_string(j));
    }

    SimulationConfig from0 = from3;
    from0.seed = 88;
    from0.start_valley = 0;
    from0.targets = {1, 2};
    const auto st0 = hitting_experiment(from0);
    const double share = st0.label_fraction[4];
    o.detail << "; E(3) share of m0 -> {m1,m2} time=" << share << " (outside all sets " << st0.label_fraction[0]
             << ", mean=" << st0.mean << " EK=" << st0.prediction->mean_time.value << ")";
    o.require(st0.censored == 0, "no censoring from E(0)");
    o.require(share < 0.10, "E(3) share < 10%");
}

// ---- 9 ----
void cycle_residual(Outcome& o) {
    const std::vector<int> Ns{50, 100, 200, 400};
    const SimplexPoint points[] = {{0.3, 0.26}, {0.2, 0.5}, {0.6, 0.1}, {0.34, 0.34}};
    const ModelParams params[] = {{2.4, 0, 0}, {1.86, 0.1, 1.3}};
    double worst = -INFINITY;
    for (const auto& p : params)
        for (const auto& x : points) {
            std::vector<double> lx, ly;
            for (int N : Ns) {
                lx.push_back(std::log(N));
                ly.push_back(std::log(cycle_decomposition_check(nearest_lattice(x, N), p).residual));
            }
            worst = std::max(worst, ols_slope(lx, ly));
        }
    o.detail << "worst log-log slope=" << worst;
    o.require(worst <= -0.9, "slope <= -0.9");
}

// ---- 10 ----
void identities(Outcome& o) {
    double line = 0;
    for (double beta : {1.9, 2.0, 2.4, 3.5})
        for (int i = 0; i < 3; ++i)
            for (int k = 1; k < 1000; ++k) {
                const auto lp = line_profile(i, 0.5 * k / 1000, beta);
                line = std::max(line, std::abs(lp.dF - lp.dF_identity) / std::max(1.0, std::abs(lp.dF)));
            }
    double occ = 0;
    for (int k = 1; k < 1000; ++k) {
        const double r = k / 1000.0, m = m0_of_r(r);
        occ = std::max(occ, rel(f_opposed(m, r), 2.0 / (9 * m * (1 - 2 * m))));
    }
    double det = 0, trace = 0;
    const int n = 300;
    for (double beta : {1.5, 2.4})
        for (int a = 1; a < n; ++a)
            for (int b = 1; a + b < n; ++b) {
                const SimplexPoint x{double(a) / n, double(b) / n};
                const ModelParams p{beta, 0.2, 0.5};
                const Mat2 H = hessian(x, p);
                const double scale = std::max({1.0, std::abs(H.a11 * H.a22), std::abs(H.a12 * H.a21)});
                det = std::max(det, std::abs(hessian_det_formula(x, p) - H.det()) / scale);
                const auto s = a_hessian_spectrum(x, p);
                trace = std::max(trace, std::abs(s.trace - a_hessian_trace_formula(x, p)) / std::max(1.0, std::abs(s.trace)));
            }
    o.detail << "line=" << line << " occ=" << occ << " det=" << det << " trace=" << trace;
    o.require(line <= 1e-9, "line derivative identity");
    o.require(occ <= 1e-9, "occupation relation");
    o.require(det <= 1e-9, "determinant formula");
    o.require(trace <= 1e-9, "trace formula");
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "critical constants", 1, critical_constants},
        {2, "critical-point census", 1, census},
        {3, "field thresholds", 1, thresholds},
        {4, "exact stationarity", 30, stationarity},
        {5, "aggregation equivalence", 10, aggregation},
        {6, "derivative checks", 5, derivatives},
        {7, "Eyring-Kramers scaling", 1800, eyring_kramers},
        {8, "regime II phenomenology", 1800, entropic_passage},
        {9, "cycle-decomposition residual", 60, cycle_residual},
        {10, "identity suite", 5, identities},
    };
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.limit_seconds) {
            o.pass = false;
            o.detail << " [over the " << c.limit_seconds << " s limit]";
        }
        failures += !o.pass;
        std::printf("criterion %2d %s  %-30s %s (%.2f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title,
                    o.detail.str().c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
