#include <cmath>
#include <functional>
#include <numeric>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "potts/errors.hpp"
#include "potts/landscape.hpp"
#include "potts/simulator.hpp"

namespace potts::cli {

namespace {

using nlohmann::json;

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    // value <= tolerance unless `above`
    bool above = false;

    bool pass() const { return std::isfinite(value) && (above ? value > tolerance : value <= tolerance); }
};

double max_relative(const std::vector<double>& a, const std::vector<double>& b) {
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        scale = std::max(scale, std::abs(a[i]));
        diff = std::max(diff, std::abs(a[i] - b[i]));
    }
    return diff / scale;
}

void fast_suite(std::vector<Check>& out) {
    const auto& mb = find_m0_beta3();
    out.push_back({"m0", std::abs(mb.m0 - 0.2076), 1e-3});
    out.push_back({"beta3", std::abs(mb.beta3 - 1.8304), 1e-3});
    out.push_back({"beta2", std::abs(find_beta2() - 1.8484), 1e-3});
    out.push_back({"beta1", std::abs(find_beta1() - 2.0), 0.0});

    int census = 0;
    for (const auto& c : critical_points({2.4, 0, 0}))
        census += c.kind == PointKind::LocalMin ? 1 : (c.kind == PointKind::Saddle ? 10 : 100);
    out.push_back({"census beta=2.4 (3 minima, 3 saddles, 1 maximum)", std::abs(census - 133.0), 0.0});

    out.push_back({"r1 at beta=2", std::abs(r1_threshold(2.0)), 0.0});
    out.push_back({"r2 at beta=2 vs h(1/6)", std::abs(r2_threshold(2.0) - h_fn(1.0 / 6)), 1e-12});

    const ModelParams cases[] = {{1.5, 0, 0}, {2.4, 0, 0}, {2.4, 0.3, kPi}, {1.9, 0.2, 1.0}};
    double residual = 0.0;
    for (int N : {4, 6, 8})
        for (const auto& p : cases) residual = std::max(residual, stationarity_residual(N, p));
    out.push_back({"stationarity residual N<=8", residual, 1e-10});

    // One rate off by 1% must be detected.
    const RateMutation mutant = [](const LatticeState& s, int move, double rate) {
        return s == LatticeState{4, 2, 2} && move == 0 ? rate * 1.01 : rate;
    };
    out.push_back({"perturbed-rate mutant detected", stationarity_residual(8, {2.4, 0, 0}, mutant), 1e-10, true});
    out.push_back({"detailed-balance violation", detailed_balance_witness(6, {1.9, 0, 0}).asymmetry, 1e-3, true});

    double lumping = 0.0;
    for (int N = 1; N <= 6; ++N)
        for (const auto& p : cases)
            lumping = std::max(lumping, max_relative(reduced_generator(N, p).q, lumped_spin_generator(N, p).generator.q));
    out.push_back({"lumped vs reduced generator", lumping, 1e-13});

    double fd = 0.0;
    const double h = 1e-5;
    for (const auto& p : cases)
        for (const SimplexPoint x : {SimplexPoint{0.2, 0.3}, SimplexPoint{0.6, 0.15}, SimplexPoint{0.1, 0.05}}) {
            const Vec2 g = gradient(x, p);
            const double dx = (potential({x.x1 + h, x.x2}, p) - potential({x.x1 - h, x.x2}, p)) / (2 * h);
            const double dy = (potential({x.x1, x.x2 + h}, p) - potential({x.x1, x.x2 - h}, p)) / (2 * h);
            fd = std::max(fd, std::max(std::abs(g.x - dx), std::abs(g.y - dy)) / std::max({1.0, std::abs(g.x), std::abs(g.y)}));
        }
    out.push_back({"gradient vs finite differences", fd, 1e-6});

    double identity = 0.0;
    for (int k = 1; k < 200; ++k) {
        const auto lp = line_profile(k % 3, 0.5 * k / 200, 2.4);
        identity = std::max(identity, std::abs(lp.dF - lp.dF_identity) / std::max(1.0, std::abs(lp.dF)));
        const double r = k / 200.0, m = m0_of_r(r);
        identity = std::max(identity, std::abs(f_opposed(m, r) * 9 * m * (1 - 2 * m) / 2 - 1));
        const SimplexPoint x{0.9 * k / 200, 0.45 * (1 - 0.9 * k / 200)};
        const ModelParams p{1.9, 0.2, 0.5};
        const Mat2 H = hessian(x, p);
        identity = std::max(identity, std::abs(hessian_det_formula(x, p) - H.det()) / std::max(1.0, std::abs(H.det())));
        const double tr = a_hessian_spectrum(x, p).trace;
        identity = std::max(identity, std::abs(tr - a_hessian_trace_formula(x, p)) / std::max(1.0, std::abs(tr)));
    }
    out.push_back({"identity suite", identity, 1e-9});

    std::vector<double> lx, ly;
    for (int N : {50, 100, 200, 400}) {
        lx.push_back(std::log(N));
        ly.push_back(std::log(cycle_decomposition_check(nearest_lattice({0.3, 0.26}, N), {2.4, 0, 0}).residual));
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / 4, my = std::accumulate(ly.begin(), ly.end(), 0.0) / 4;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < 4; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    out.push_back({"cycle residual log-log slope", sxy / sxx, -0.9});
}

// Monte Carlo against the exact linear-system answer at beta = 2.4.
void full_suite(std::vector<Check>& out, int threads) {
    SimulationConfig base;
    base.params = {2.4, 0, 0};
    base.seed = 2024;
    base.replicas = 200;
    base.start_valley = 0;
    base.threads = threads;
    const auto study = scaling_study(base, {30, 45, 60});
    for (const auto& pt : study.points) {
        const auto& st = pt.stats;
        const std::string tag = " N=" + std::to_string(pt.N);
        out.push_back({"mean vs exact, in standard errors," + tag, std::abs(st.mean - pt.exact_mean) / st.mean_se, 4.0});
        out.push_back({"|cv - 1|" + tag, std::abs(st.cv - 1.0), 0.2});
        // The finite-N split favours m1 (the rotation is not reflection
        // symmetric); compare with the exact committor, not with 1/2.
        SimulationConfig at = base;
        at.N = pt.N;
        const double exact = exact_hitting_distribution(*prepare_simulation(at)).at(1);
        const double f1 = st.frequency.count(1) ? st.frequency.at(1) : 0.0;
        out.push_back({"first-hit share of m1 vs exact committor, in standard errors," + tag,
                       std::abs(f1 - exact) / std::sqrt(exact * (1 - exact) / st.completed), 4.0});
    }
    out.push_back({"log-mean slope vs depth", std::abs(study.slope / study.depth - 1.0), 0.25});
}

}  // namespace

int cmd_validate(const RunConfig& c, std::ostream& out) {
    if (c.level != "fast" && c.level != "full") throw InvalidArgument("validate: level must be fast or full");
    std::vector<Check> checks;
    fast_suite(checks);
    if (c.level == "full") full_suite(checks, c.threads);

    bool ok = true;
    for (const auto& ch : checks) ok = ok && ch.pass();
    if (c.format == Format::Csv) {
        out << "check,value,tolerance,pass\n";
        for (const auto& ch : checks)
            out << '"' << ch.name << "\"," << num(ch.value) << ',' << (ch.above ? ">" : "<=") << num(ch.tolerance)
                << ',' << (ch.pass() ? "true" : "false") << '\n';
    } else {
        json doc = {{"schema_version", 1}, {"command", "validate"}, {"level", c.level}, {"pass", ok}};
        doc["checks"] = json::array();
        for (const auto& ch : checks)
            doc["checks"].push_back({{"name", ch.name},
                                     {"value", ch.value},
                                     {"tolerance", ch.tolerance},
                                     {"relation", ch.above ? ">" : "<="},
                                     {"pass", ch.pass()}});
        out << doc.dump(2) << '\n';
    }
    return ok ? 0 : 1;
}

}  // namespace potts::cli
