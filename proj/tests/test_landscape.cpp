#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "potts/landscape.hpp"
#include "support.hpp"

using namespace potts;
using potts::test::close;

namespace {

int count_kind(const std::vector<CriticalPoint>& pts, PointKind k) {
    return static_cast<int>(std::count_if(pts.begin(), pts.end(), [k](const auto& c) { return c.kind == k; }));
}

const CriticalPoint& by_label(const std::vector<CriticalPoint>& pts, const std::string& label) {
    for (const auto& c : pts)
        if (c.label == label) return c;
    throw std::runtime_error("no point " + label);
}

const std::string kSigma = "\xcf\x83";  // σ

}  // namespace

TEST_CASE("diagnostics") {
    CHECK(close(f_opposed(1.0 / 3, 0.0), 2.0, 1e-15));
    CHECK(std::abs(h_fn(1.0 / 3)) < 1e-15);
    CHECK(close(h_fn(1e-12), 1.0, 1e-9));
    CHECK(std::abs(g0_fn(1.0 / 3)) < 1e-14);
    CHECK_THROWS_AS(diagnostics(0.3, 0.1), SingularInput);
    const auto d = diagnostics(0.2, 0.05);
    CHECK(close(d.f_r, 2.0 / (3.0 * (1 - 0.05 - 0.6)) * std::log(0.6 / 0.2), 1e-14));
    CHECK(close(d.h, -3 * 0.2 * 0.6 * std::log(3.0) - 0.6 + 1, 1e-14));
}

TEST_CASE("critical temperatures") {
    const auto& mb = find_m0_beta3();
    CHECK(std::abs(mb.m0 - 0.2076) < 1e-3);
    CHECK(std::abs(mb.beta3 - 1.8304) < 1e-3);
    CHECK(std::abs(g0_fn(mb.m0)) < 1e-9);
    CHECK(std::abs(h_fn(mb.m0)) < 1e-12);
    CHECK(close(f_opposed(mb.m0, 0.0), mb.beta3, 1e-12));
    // m0 minimizes f0.
    CHECK(f_opposed(mb.m0 - 1e-4, 0.0) > mb.beta3);
    CHECK(f_opposed(mb.m0 + 1e-4, 0.0) > mb.beta3);

    const double b2 = find_beta2();
    CHECK(std::abs(b2 - 1.8484) < 1e-3);
    CHECK(mb.beta3 < b2);
    CHECK(b2 < 2.0);
    CHECK(std::abs(heights_and_depths(b2).h) < 1e-10);
    CHECK(heights_and_depths(1.84).h > 0.0);
    CHECK(heights_and_depths(1.95).h < 0.0);
    CHECK(find_beta1() == 2.0);
}

TEST_CASE("branch roots") {
    const auto r2 = solve_branch_roots(2.0, 0.0);
    REQUIRE(r2.q);
    CHECK(close(*r2.q, 1.0 / 3, 1e-12));
    const auto& mb = find_m0_beta3();
    const auto r3 = solve_branch_roots(mb.beta3, 0.0);
    REQUIRE(r3.p);
    REQUIRE(r3.q);
    CHECK(close(*r3.p, mb.m0, 1e-9));
    CHECK(close(*r3.q, mb.m0, 1e-9));
    CHECK_THROWS_AS(solve_branch_roots(1.7, 0.0), NoRoot);

    for (double beta : {2.2, 2.4, 3.0, 4.5}) {
        const auto u = solve_branch_roots(beta, r1_threshold(beta)).u;
        REQUIRE(u);
        CHECK(close(*u, 2.0 / (3.0 * beta), 1e-9));
    }
    // Three roots below r2, one above; q stays beyond 1/3.
    const double beta = 2.4, rr2 = r2_threshold(beta);
    const auto a = solve_branch_roots(beta, 0.5 * rr2);
    REQUIRE((a.p && a.u && a.q));
    CHECK(*a.p < *a.u);
    CHECK(*a.u < *a.q);
    CHECK(*a.q > 1.0 / 3);
    const auto b = solve_branch_roots(beta, 1.5 * rr2);
    CHECK_FALSE(b.p);
    CHECK_FALSE(b.u);
    CHECK(b.q);
}

TEST_CASE("u(r) decreases") {
    const double beta = 2.4, rr2 = r2_threshold(beta);
    double prev = INFINITY;
    for (int k = 1; k < 40; ++k) {
        const auto u = solve_branch_roots(beta, rr2 * k / 40.0).u;
        REQUIRE(u);
        CHECK(*u < prev);
        prev = *u;
    }
}

TEST_CASE("heights and depths") {
    for (double beta : {1.84, 1.9, 1.99}) CHECK(heights_and_depths(beta).H > 0.0);
    const auto hd = heights_and_depths(2.4);
    CHECK(hd.theta.size() == 3);
    CHECK(hd.theta.at(0) == hd.theta.at(1));
    CHECK(hd.theta.at(1) == hd.theta.at(2));
    CHECK(std::abs(hd.theta.at(0) - 0.160302) < 1e-6);
    CHECK(heights_and_depths(1.9).theta.size() == 4);
    CHECK_THROWS_AS(heights_and_depths(1.8), NoValleys);
}

TEST_CASE("line profile identity") {
    const double beta = 2.4;
    const double p = heights_and_depths(beta).p_beta;
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(line_profile(i, 1.0 / 3, beta).dF) < 1e-12);
        CHECK(std::abs(line_profile(i, p, beta).dF) < 1e-9);
        for (double t = 0.01; t < 0.495; t += 0.0137) {
            const auto lp = line_profile(i, t, beta);
            CHECK(close(lp.dF, lp.dF_identity, 1e-9, 1e-12));
            const double h = 1e-6;
            auto F = [&](double s) { return potential(line_point(i, s), {beta, 0, 0}); };
            CHECK(close((F(t + h) - F(t - h)) / (2 * h), lp.dF_identity, 1e-6, 1e-8));
        }
    }
}

TEST_CASE("zero-field census") {
    const double b3 = find_m0_beta3().beta3;
    const auto low = critical_points({1.5, 0, 0});
    REQUIRE(low.size() == 1);
    CHECK(low[0].label == "p");
    CHECK(low[0].kind == PointKind::LocalMin);

    const auto at3 = critical_points({b3, 0, 0});
    CHECK(at3.size() == 4);
    CHECK(count_kind(at3, PointKind::Degenerate) == 3);
    CHECK(by_label(at3, "p").kind == PointKind::LocalMin);

    const auto at1 = critical_points({2.0, 0, 0});
    CHECK(at1.size() == 4);
    CHECK(count_kind(at1, PointKind::LocalMin) == 3);
    CHECK(by_label(at1, "p").kind == PointKind::Degenerate);

    const auto high = critical_points({2.4, 0, 0});
    CHECK(high.size() == 7);
    CHECK(count_kind(high, PointKind::LocalMin) == 3);
    CHECK(count_kind(high, PointKind::Saddle) == 3);
    CHECK(by_label(high, "p").kind == PointKind::LocalMax);

    for (int k = 0; k <= 80; ++k) {
        const double beta = b3 + 1e-3 + (4.0 - b3 - 1e-3) * k / 80.0;
        if (std::abs(beta - 2.0) < 1e-3) continue;
        const auto pts = critical_points({beta, 0, 0});
        CAPTURE(beta);
        REQUIRE(pts.size() == 7);
        CHECK(count_kind(pts, PointKind::Saddle) == 3);
        if (beta < 2.0) {
            CHECK(count_kind(pts, PointKind::LocalMin) == 4);
        } else {
            CHECK(count_kind(pts, PointKind::LocalMin) == 3);
            CHECK(count_kind(pts, PointKind::LocalMax) == 1);
        }
    }
}

TEST_CASE("critical points satisfy the invariants") {
    const ModelParams cases[] = {{1.9, 0, 0},       {2.4, 0, 0},        {2.4, 0.02, kPi},   {2.4, 0.08, kPi},
                                 {2.4, 0.2, kPi},   {2.4, 0.05, 0.0},   {3.0, 0.1, 2 * kPi / 3},
                                 {2.4, 0.03, 1.0},  {2.6, 0.05, 4.0}};
    for (const auto& p : cases) {
        CAPTURE(p.r);
        CAPTURE(p.theta);
        for (const auto& c : critical_points(p)) {
            const Vec2 g = gradient(c.location, p);
            CHECK(std::hypot(g.x, g.y) <= 1e-9);
            if (c.kind == PointKind::Saddle) {
                const auto e = symmetric_eigen(hessian(c.location, p));
                CHECK(e.lo < 0.0);
                CHECK(e.hi > 0.0);
                const auto a = a_hessian_spectrum(c.location, p);
                int neg = 0;
                for (const auto& l : a.eigenvalues) neg += (std::abs(l.imag()) < 1e-12 && l.real() < 0.0);
                CHECK(neg == 1);
                CHECK(c.a_hessian_negative_eig.has_value());
            }
        }
    }
}

TEST_CASE("multistart agrees with the closed form") {
    for (double beta : {1.9, 2.4, 3.2}) {
        const ModelParams p{beta, 0, 0};
        const auto exact = critical_points(p);
        const auto found = critical_points_multistart(p);
        CHECK(found.size() == exact.size());
        for (const auto& c : exact) {
            double best = INFINITY;
            for (const auto& d : found)
                best = std::min(best, std::hypot(c.location.x1 - d.location.x1, c.location.x2 - d.location.x2));
            CHECK(best <= 1e-8);
        }
    }
}

TEST_CASE("multistart labels are unique after a fold") {
    // Past r1 at a generic angle one saddle has merged into p; the two
    // remaining saddles would both look like sigma_2 geometrically.
    const auto pts = critical_points_multistart({2.4, 0.05, 1.0});
    std::set<std::string> labels;
    for (const auto& c : pts) labels.insert(c.label);
    CHECK(pts.size() == 5);
    CHECK((labels == std::set<std::string>{"m0", "m1", "m2", kSigma + "1", kSigma + "2"}));
    // Continuity with a field below the fold, where all seven survive.
    std::set<std::string> before;
    for (const auto& c : critical_points_multistart({2.4, 0.01, 1.0})) before.insert(c.label);
    CHECK(before.size() == 7);
}

TEST_CASE("profile inverses") {
    for (double beta : {2.2, 2.4, 4.0}) {
        const double l = 2.0 / (3.0 * beta), g = g_profile_peak(beta);
        const auto top = g_profile_inverses(beta, g);
        CHECK(close(top.H, l, 1e-12));
        CHECK(close(top.K, l, 1e-12));
        CHECK(close(2 * top.H + top.K, 2.0 / beta, 1e-12));
        CHECK_THROWS_AS(g_profile_inverses(beta, g + 1e-6), OutOfRange);

        double s1_prev = INFINITY;
        std::vector<double> s2;
        for (int k = 200; k >= 0; --k) {
            const double y = g - 3.0 * k / 200.0;
            const auto v = g_profile_inverses(beta, y);
            CHECK(v.H <= l);
            CHECK(v.K >= l);
            CHECK(close(g_profile(beta, v.H), y, 1e-10, 1e-10));
            CHECK(close(g_profile(beta, v.K), y, 1e-10, 1e-10));
            const double s1 = v.H + v.K;
            CHECK(s1 <= s1_prev + 1e-12);  // increasing y, so S1 must fall
            s1_prev = s1;
            s2.push_back(2 * v.H + v.K);
        }
        // S2 falls then rises: a single interior turning point.
        const auto turn = std::min_element(s2.begin(), s2.end()) - s2.begin();
        CHECK(turn > 0);
        CHECK(turn < static_cast<long>(s2.size()) - 1);
        for (long i = 1; i <= turn; ++i) CHECK(s2[i] <= s2[i - 1] + 1e-12);
        for (long i = turn + 1; i < static_cast<long>(s2.size()); ++i) CHECK(s2[i] >= s2[i - 1] - 1e-12);
    }
}

TEST_CASE("off-diagonal points of the opposed field") {
    const double beta = 2.4;
    const auto zf = critical_points({beta, 0, 0});
    const auto near = solve_offdiagonal(beta, 1e-9);
    REQUIRE(near.y1);
    const auto& s2 = by_label(zf, kSigma + "2");
    bool matched = false;
    for (const auto& [name, x] : near.points)
        if (name == kSigma + "2")
            matched = std::hypot(x.x1 - s2.location.x1, x.x2 - s2.location.x2) < 1e-6;
    CHECK(matched);

    const double r1 = r1_threshold(beta);
    CHECK(solve_offdiagonal(beta, 0.9 * r1).y1.has_value());
    const auto above = solve_offdiagonal(beta, 1.05 * r1);
    CHECK_FALSE(above.y1.has_value());
    CHECK(above.points.size() == 2);
    for (const auto& [name, x] : solve_offdiagonal(beta, 0.5 * r1).points) {
        const Vec2 g = gradient(x, {beta, 0.5 * r1, kPi});
        CHECK(std::hypot(g.x, g.y) < 1e-9);
    }
}

TEST_CASE("field thresholds") {
    CHECK(r1_threshold(2.0) == 0.0);
    CHECK(close(r2_threshold(2.0), h_fn(1.0 / 6), 1e-12));
    CHECK(std::abs(r2_threshold(2.0) - 0.0379) < 1e-4);
    CHECK(r_beta_threshold(2.0) == 0.0);
    for (int k = 1; k <= 50; ++k) {
        const double beta = 2.0 + 4.0 * k / 50.0;
        CHECK(r1_threshold(beta) < r2_threshold(beta));
    }
    const double beta = 2.4;
    const double rs = r_star_threshold(beta);
    CHECK(rs > 0.0);
    CHECK(rs < r2_threshold(beta));
    const auto roots = solve_branch_roots(beta, rs);
    const ModelParams p{beta, rs, kPi};
    CHECK(std::abs(potential({*roots.p, *roots.p}, p) - potential({*roots.q, *roots.q}, p)) < 1e-12);
    CHECK(r_fold_threshold(beta) > r_beta_threshold(beta));
    const auto t = field_thresholds(beta, FieldFamily::Opposed);
    CHECK(t.count("r1"));
    CHECK(t.count("r2"));
    CHECK(t.count("r_star"));
}

TEST_CASE("m0(r) and the occupation relation") {
    double prev_m = INFINITY, prev_f = -INFINITY;
    for (int k = 1; k < 100; ++k) {
        const double r = k / 100.0;
        const double m = m0_of_r(r);
        const double f = f_opposed(m, r);
        CHECK(m < prev_m);
        CHECK(f > prev_f);
        CHECK(close(f, 2.0 / (9.0 * m * (1 - 2 * m)), 1e-10));
        prev_m = m;
        prev_f = f;
    }
}

TEST_CASE("opposed field: minima and saddle ordering") {
    const double beta = 2.4, r1 = r1_threshold(beta), r2 = r2_threshold(beta);
    for (int k = 1; k < 40; ++k) {
        const double r = r2 * k / 40.0;
        if (std::abs(r - r1) < 1e-3) continue;
        CAPTURE(r);
        const auto pts = critical_points({beta, r, kPi});
        const double f0 = by_label(pts, "m0").height;
        const double f1 = by_label(pts, "m1").height, f2 = by_label(pts, "m2").height;
        CHECK(close(f1, f2, 1e-12, 1e-14));
        CHECK(f1 < f0);
        const double s0 = by_label(pts, kSigma + "0").height;
        int saddles = 0;
        for (const auto& c : pts)
            if (c.kind == PointKind::Saddle && c.label != kSigma + "0") {
                ++saddles;
                CHECK(s0 < c.height);
            }
        CHECK(saddles == (r < r1 ? 2 : 1));
    }
}

TEST_CASE("small-field derivative formulas") {
    const double beta = 2.4, theta = 0.9;
    const auto hd = heights_and_depths(beta);
    const ModelParams zero{beta, 0, theta};
    for (const auto& c : critical_points_zero_field(beta)) {
        if (c.label == "p") continue;
        const int i = c.label.back() - '0';
        const bool minimum = c.kind == PointKind::LocalMin;
        const double coord = minimum ? hd.p_beta : hd.q_beta;
        const double slope = (3 * coord - 1) * std::cos(theta - 2 * kPi * i / 3);
        double err[2];
        for (int k = 0; k < 2; ++k) {
            const double delta = k == 0 ? 1e-4 : 5e-5;
            const auto t = continue_point(c.location, zero, delta, c.label);
            CHECK(close(t.height_slope_at_zero, slope, 1e-10, 1e-12));
            const double fd = (t.end_height - potential(c.location, zero)) / delta;
            err[k] = std::abs(fd - slope);
            CHECK(err[k] <= 20 * delta);
        }
        // Halving delta halves the error: first order.
        if (err[0] > 1e-9) CHECK(std::abs(err[0] / err[1] - 2.0) < 0.1);
    }
    // The aligned field removes m1 at the fold.
    const auto m1 = by_label(critical_points({2.4, 0, 0}), "m1").location;
    CHECK_THROWS_AS((continue_point(m1, {2.4, 0, 0}, 0.5, "m1")), FoldDetected);
}

TEST_CASE("regime classification") {
    const auto zf1 = classify_regime({2.4, 0, 0});
    CHECK(zf1.regime == Regime::ZF_I);
    CHECK(zf1.valleys.size() == 3);
    CHECK(zf1.adjacency.size() == 3);
    for (const auto& a : zf1.adjacency) {
        REQUIRE(a.saddles.size() == 1);
        CHECK(a.saddles[0] == kSigma + std::to_string(3 - a.i - a.j));
    }

    const auto zf2 = classify_regime({1.86, 0, 0});
    CHECK(zf2.regime == Regime::ZF_II);
    CHECK(zf2.valleys.size() == 4);
    for (const auto& a : zf2.adjacency) {
        CHECK(a.j == 3);  // no energetic pair shares a saddle
        REQUIRE(a.saddles.size() == 1);
        CHECK(a.saddles[0] == kSigma + std::to_string(a.i));
    }

    CHECK(classify_regime({1.5, 0, 0}).regime == Regime::NoMetastability);
    CHECK(classify_regime({1.845, 0, 0}).regime == Regime::ZF_III);
    CHECK(classify_regime({find_beta2(), 0, 0}).regime == Regime::ZF_Beta2);
    const auto deg = classify_regime({2.0, 0, 0});
    CHECK(deg.regime == Regime::ZF_Beta1Degenerate);
    CHECK(deg.degenerate);

    const double beta = 2.4;
    CHECK(classify_regime({beta, 0.02, kPi}).regime == Regime::FieldPi_I);
    const auto f2 = classify_regime({beta, 0.08, kPi});
    CHECK(f2.regime == Regime::FieldPi_II);
    const auto* s0 = f2.find(kSigma + "0");
    REQUIRE(s0);
    int saddles = 0;
    for (const auto& c : f2.critical_points)
        if (c.kind == PointKind::Saddle) {
            ++saddles;
            if (&c != s0) CHECK(s0->height < c.height);
        }
    CHECK(saddles == 2);
    CHECK(classify_regime({beta, 0.2, kPi}).regime == Regime::FieldPi_III);
    CHECK(classify_regime({beta, r1_threshold(beta), kPi}).degenerate);
    CHECK(classify_regime({beta, 0.05, 0.0}).regime == Regime::Field0_I);
    CHECK(classify_regime({beta, 0.3, 0.0}).regime == Regime::Field0_II);
    CHECK(classify_regime({beta, 0.01, 1.0}).regime == Regime::SmallField_CaseIII);
}

TEST_CASE("metastable sets") {
    const ModelParams p{2.4, 0, 0};
    const auto rep = classify_regime(p);
    const double eps = default_epsilon(rep);
    const int N = 120;
    const auto ms = metastable_sets(rep, eps, N);
    REQUIRE(ms.sets.size() == 3);
    std::set<std::tuple<int, int, int>> seen;
    std::size_t total = 0;
    for (std::size_t k = 0; k < ms.sets.size(); ++k) {
        CHECK_FALSE(ms.sets[k].empty());
        const auto m = nearest_lattice(rep.valley(ms.valley_indices[k])->minimum.location, N);
        CHECK(std::find(ms.sets[k].begin(), ms.sets[k].end(), m) != ms.sets[k].end());
        for (const auto& s : ms.sets[k]) seen.insert({s.n0, s.n1, s.n2});
        total += ms.sets[k].size();
    }
    CHECK(seen.size() == total);  // disjoint

    // Flood fill agrees with descent membership.
    const auto labels = label_lattice(rep, eps, N);
    std::size_t labelled = 0;
    for (auto l : labels) labelled += l >= 0;
    CHECK(labelled == total);
    for (std::size_t k = 0; k < ms.sets.size(); ++k)
        for (const auto& s : ms.sets[k]) CHECK(labels[lattice_index(s.n1, s.n2, N)] == ms.valley_indices[k]);

    // Saddle points are outside every set.
    for (const auto& c : rep.critical_points)
        if (c.kind == PointKind::Saddle) {
            const SimplexPoint x = c.location;
            CHECK(potential(x, p) >= rep.valley(0)->height_reference - eps);
        }
    CHECK_THROWS_AS(metastable_sets(rep, 10.0, N), EpsilonTooLarge);
    CHECK_THROWS_AS(metastable_sets(rep, 0.0, N), InvalidArgument);
    CHECK_THROWS_AS((metastable_sets(ModelParams{1.5, 0, 0}, 0.01, N)), NoValleys);
}

TEST_CASE("phase diagram") {
    const auto pi = phase_diagram(2.2, 4.0, 0.0, 0.4, FieldFamily::Opposed, 8, 400);
    for (std::size_t ib = 0; ib < pi.betas.size(); ++ib) {
        std::vector<Regime> bands;
        for (std::size_t ir = 1; ir < pi.rs.size(); ++ir) {
            const Regime g = pi.at(ib, ir);
            if (bands.empty() || bands.back() != g) bands.push_back(g);
        }
        CHECK((bands == std::vector<Regime>{Regime::FieldPi_I, Regime::FieldPi_II, Regime::FieldPi_III}));
    }
    const auto zero = phase_diagram(2.2, 4.0, 0.0, 2.0, FieldFamily::Aligned, 6, 400);
    for (std::size_t ib = 0; ib < zero.betas.size(); ++ib) {
        std::vector<Regime> bands;
        for (std::size_t ir = 1; ir < zero.rs.size(); ++ir) {
            const Regime g = zero.at(ib, ir);
            if (bands.empty() || bands.back() != g) bands.push_back(g);
        }
        CHECK((bands == std::vector<Regime>{Regime::Field0_I, Regime::Field0_II}));
    }
    const auto edge = phase_diagram(2.0, 3.0, 0.0, 0.3, FieldFamily::Opposed, 5, 5);
    CHECK(edge.boundaries.at("r1").front().second == 0.0);
    const auto edge0 = phase_diagram(2.0, 3.0, 0.0, 0.3, FieldFamily::Aligned, 5, 5);
    CHECK(edge0.boundaries.at("r_beta").front().second == 0.0);
    CHECK_THROWS_AS(phase_diagram(2.0, 3.0, 0.0, 0.3, FieldFamily::Opposed, 2001, 5), InvalidArgument);
}
