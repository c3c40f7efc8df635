// Scalar functions, critical temperatures, branch roots and field thresholds.
#include <algorithm>
#include <cmath>
#include <string>

#include "potts/landscape.hpp"
#include "potts/roots.hpp"

namespace potts {

namespace {

constexpr double kLogTiny = -690.0;  // log of the smallest t we bracket with

// log((1 - 2t)/t) in terms of u = 1 - 3t, accurate near t = 1/3.
double log_ratio_u(double u) { return std::log1p(2.0 * u) - std::log1p(-u); }

double log_ratio(double t) {
    const double u = 1.0 - 3.0 * t;
    if (std::abs(u) < 0.25) return log_ratio_u(u);
    return std::log((1.0 - 2.0 * t) / t);
}

// h(1/3 + delta), exact zero at delta = 0.
double h_offset(double delta) {
    const double u = -3.0 * delta;
    return -(1.0 - u) * (1.0 + 2.0 * u) * log_ratio_u(u) / 3.0 + u;
}

// sqrt(1/16 - 1/(9 beta)) - 1/12, computed without cancellation.
double quarter_root_offset(double beta) {
    const double disc = 1.0 / 16.0 - 1.0 / (9.0 * beta);
    if (disc < 0.0) throw OutOfRange("threshold: requires beta >= 16/9");
    return (beta - 2.0) / (18.0 * beta) / (std::sqrt(disc) + 1.0 / 12.0);
}

double f_general(double t, double one_minus) {
    const double d = one_minus - 3.0 * t;
    if (std::abs(d) <= 1e-14) {
        if (one_minus == 1.0) return 2.0;
        throw SingularInput("f_r: t = " + std::to_string(t) + " is the singularity (1 -/+ r)/3");
    }
    return 2.0 * log_ratio(t) / (3.0 * d);
}

double root_in_log_t(const std::function<double(double)>& f, double t_hi) {
    return std::exp(bracketed_root([&](double s) { return f(std::exp(s)); }, kLogTiny, std::log(t_hi)));
}

}  // namespace

double f_opposed(double t, double r) { return f_general(t, 1.0 - r); }
double f_aligned(double t, double r) { return f_general(t, 1.0 + r); }

double h_fn(double t) { return -3.0 * t * (1.0 - 2.0 * t) * log_ratio(t) - 3.0 * t + 1.0; }

double g0_fn(double t) {
    return (std::log(t) + 1.0 / (3.0 * t)) - (std::log(1.0 - 2.0 * t) + 1.0 / (3.0 * (1.0 - 2.0 * t)));
}

double k0_fn(double t) { return (2.0 - 3.0 * t) * std::log(1.0 - 2.0 * t) + (3.0 * t + 1.0) * std::log(t); }

Diagnostics diagnostics(double t, double r) {
    if (!(t > 0.0 && t < 0.5)) throw InvalidArgument("diagnostics: t must lie in (0, 1/2)");
    if (r < 0.0) throw InvalidArgument("diagnostics: r must be nonnegative");
    return {f_opposed(t, r), h_fn(t), g0_fn(t), k0_fn(t)};
}

const M0Beta3& find_m0_beta3() {
    static const M0Beta3 value = [] {
        M0Beta3 v;
        v.m0 = bracketed_root(h_fn, 1e-6, 0.25, 1e-16);
        v.beta3 = f_opposed(v.m0, 0.0);
        return v;
    }();
    return value;
}

double find_beta1() {
    // Hessian at p is 3(2 - beta)/(2 beta) [[2,1],[1,2]].
    auto factor = [](double beta) { return 3.0 * (2.0 - beta) / (2.0 * beta); };
    double lo = 1.0, hi = 3.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = factor(mid);
        if (f == 0.0) return mid;
        if (f > 0.0) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-15) break;
    }
    return 0.5 * (lo + hi);
}

double m0_of_r(double r) {
    if (r == 0.0) return find_m0_beta3().m0;
    if (!(r > 0.0 && r < 1.0)) throw NoRoot("m0_of_r: requires 0 <= r < 1");
    return root_in_log_t([r](double t) { return h_fn(t) - r; }, find_m0_beta3().m0);
}

BranchRoots solve_branch_roots(double beta, double r, FieldFamily family) {
    if (!(beta > 0.0)) throw InvalidArgument("solve_branch_roots: beta must be positive");
    if (r < 0.0) throw InvalidArgument("solve_branch_roots: r must be nonnegative");
    BranchRoots out;
    // Parametrizations keep brackets valid when roots crowd the ends.
    auto q_near_half = [&](const std::function<double(double)>& f, double t_lo) {
        const double e_hi = 1.0 - 2.0 * t_lo;
        auto g = [&](double s) { return f(0.5 * (1.0 - std::exp(s))); };
        return 0.5 * (1.0 - std::exp(bracketed_root(g, kLogTiny, std::log(e_hi))));
    };

    if (r == 0.0) {
        const auto& mb = find_m0_beta3();
        if (std::abs(beta - mb.beta3) <= 1e-12) {
            out.p = out.q = mb.m0;
            return out;
        }
        if (beta < mb.beta3) throw NoRoot("solve_branch_roots: no root of f_0 = beta for beta < beta_3");
        auto f = [beta](double t) { return f_opposed(t, 0.0) - beta; };
        out.p = root_in_log_t(f, mb.m0);
        if (beta == 2.0) out.q = 1.0 / 3.0;
        else out.q = q_near_half(f, mb.m0);
        return out;
    }

    if (family == FieldFamily::Opposed) {
        auto f = [beta, r](double t) { return f_opposed(t, r) - beta; };
        out.q = q_near_half(f, 1.0 / 3.0);
        if (r >= 1.0) return out;
        const double m = m0_of_r(r);
        const double fmin = f_opposed(m, r);
        if (std::abs(fmin - beta) <= 1e-14 * beta) {
            out.p = out.u = m;
        } else if (fmin < beta) {
            out.p = root_in_log_t(f, m);
            // u lies between m0(r) and the singularity; bracket in d = 1 - r - 3t.
            const double d_hi = 1.0 - r - 3.0 * m;
            auto g = [&](double s) {
                const double d = std::exp(s);
                return 2.0 * log_ratio((1.0 - r - d) / 3.0) / (3.0 * d) - beta;
            };
            const double d = std::exp(bracketed_root(g, kLogTiny, std::log(d_hi)));
            out.u = (1.0 - r - d) / 3.0;
        }
        return out;
    }

    auto f = [beta, r](double t) { return f_aligned(t, r) - beta; };
    out.p = root_in_log_t(f, 1.0 / 3.0);
    const double k = (1.0 + r) / 3.0;
    if (k >= 0.5) return out;
    const double tstar = bracketed_root([r](double t) { return h_fn(t) + r; }, 1.0 / 3.0, 0.5 - 1e-15);
    if (tstar <= k) return out;
    const double fmin = f_aligned(tstar, r);
    if (std::abs(fmin - beta) <= 1e-14 * beta) {
        out.u = out.q = tstar;
    } else if (fmin < beta) {
        const double d_hi = 3.0 * tstar - 1.0 - r;
        auto g = [&](double s) {
            const double d = std::exp(s);
            return 2.0 * log_ratio((1.0 + r + d) / 3.0) / (-3.0 * d) - beta;
        };
        const double d = std::exp(bracketed_root(g, kLogTiny, std::log(d_hi)));
        out.u = (1.0 + r + d) / 3.0;
        out.q = q_near_half(f, tstar);
    }
    return out;
}

double find_beta2() {
    static const double value = [] {
        const double b3 = find_m0_beta3().beta3;
        auto hb = [](double beta) {
            const auto roots = solve_branch_roots(beta, 0.0);
            const double p = *roots.p;
            return potential({p, p}, ModelParams{beta, 0.0, 0.0});
        };
        return bracketed_root(hb, b3 + 1e-9, 2.0 - 1e-9, 1e-16);
    }();
    return value;
}

HeightsDepths heights_and_depths(double beta) {
    const double b3 = find_m0_beta3().beta3;
    if (!(beta > b3 + 1e-12))
        throw NoValleys("heights_and_depths: valleys exist only for beta > beta_3 = " + std::to_string(b3));
    const auto roots = solve_branch_roots(beta, 0.0);
    const ModelParams mp{beta, 0.0, 0.0};
    HeightsDepths hd;
    hd.p_beta = *roots.p;
    hd.q_beta = *roots.q;
    hd.H = potential({hd.q_beta, hd.q_beta}, mp);
    hd.h = potential({hd.p_beta, hd.p_beta}, mp);
    for (int i = 0; i < 3; ++i) hd.theta[i] = beta * (hd.H - hd.h);
    if (beta < 2.0) hd.theta[3] = beta * hd.H;
    return hd;
}

SimplexPoint line_point(int i, double t) {
    switch (i) {
        case 0: return {t, t};
        case 1: return {1.0 - 2.0 * t, t};
        case 2: return {t, 1.0 - 2.0 * t};
        default: throw InvalidArgument("line index must be 0, 1 or 2");
    }
}

SimplexPoint k_line_point(int i, double t, double q) {
    switch (i) {
        case 0: return {q - t, q + t};
        case 1: return {1.0 - 2.0 * q, q + t};
        case 2: return {q - t, 1.0 - 2.0 * q};
        default: throw InvalidArgument("line index must be 0, 1 or 2");
    }
}

LineProfile line_profile(int i, double t, double beta) {
    if (!(t >= 0.0 && t <= 0.5)) throw InvalidArgument("line_profile: t must lie in [0, 1/2]");
    const ModelParams mp{beta, 0.0, 0.0};
    const SimplexPoint x = line_point(i, t);
    LineProfile lp;
    lp.F = potential(x, mp);
    const double f0 = (t == 0.0 || t == 0.5) ? INFINITY : f_opposed(t, 0.0);
    lp.dF_identity = (3.0 / beta) * (3.0 * t - 1.0) * (f0 - beta);
    if (x.interior()) {
        static constexpr double dir[3][2] = {{1.0, 1.0}, {-2.0, 1.0}, {1.0, -2.0}};
        const Vec2 g = gradient(x, mp);
        lp.dF = g.x * dir[i][0] + g.y * dir[i][1];
    } else {
        lp.dF = lp.dF_identity;
    }
    return lp;
}

double g_profile(double beta, double x) { return std::log(x) / beta - 1.5 * x; }

double g_profile_peak(double beta) { return g_profile(beta, 2.0 / (3.0 * beta)); }

ProfileInverses g_profile_inverses(double beta, double y) {
    const double l = 2.0 / (3.0 * beta);
    const double g = g_profile_peak(beta);
    if (y > g + 1e-15 * std::max(1.0, std::abs(g)))
        throw OutOfRange("g_profile_inverses: y exceeds the profile maximum g_beta");
    if (y >= g) return {l, l};
    ProfileInverses out;
    auto in_log = [&](double s) { return s / beta - 1.5 * std::exp(s) - y; };
    out.H = std::exp(bracketed_root(in_log, beta * y - 1.0, std::log(l), 1e-16));
    double hi = 2.0 * l;
    while (g_profile(beta, hi) >= y) hi *= 2.0;
    out.K = bracketed_root([&](double x) { return g_profile(beta, x) - y; }, l, hi, 1e-16);
    return out;
}

OffDiagonal solve_offdiagonal(double beta, double r) {
    if (!(beta > 2.0)) throw InvalidArgument("solve_offdiagonal: requires beta > 2");
    if (r < 0.0) throw InvalidArgument("solve_offdiagonal: r must be nonnegative");
    const double g = g_profile_peak(beta);
    const double shift = 1.5 * r;
    const double y_lo = g_profile(beta, 1.0) - shift - 0.5;
    auto S = [&](double y) { return g_profile_inverses(beta, y); };

    OffDiagonal out;
    auto R2 = [&](double y) {
        const auto a = S(y - shift), b = S(y);
        return a.H + b.H + b.K - 1.0;
    };
    out.y2 = bracketed_root(R2, y_lo, g, 1e-16);
    const auto m = S(out.y2);
    out.points.emplace_back("m2", SimplexPoint{m.H, m.K});
    out.points.emplace_back("m1", SimplexPoint{m.K, m.H});

    auto R1 = [&](double y) {
        const auto a = S(y - shift), b = S(y);
        return a.K + b.H + b.K - 1.0;
    };
    if (R1(g) <= 0.0) {
        out.y1 = bracketed_root(R1, y_lo, g, 1e-16);
        const auto s = S(*out.y1);
        out.points.emplace_back("σ1", SimplexPoint{s.H, s.K});
        out.points.emplace_back("σ2", SimplexPoint{s.K, s.H});
    }
    return out;
}

double r1_threshold(double beta) {
    return 1.0 - 2.0 / beta - (2.0 / (3.0 * beta)) * std::log(1.5 * beta - 2.0);
}

double r2_threshold(double beta) { return h_fn(1.0 / 6.0 - quarter_root_offset(beta)); }

double r_beta_threshold(double beta) {
    const double v = -h_offset(quarter_root_offset(beta));
    return v == 0.0 ? 0.0 : v;  // no negative zero
}

double r_star_threshold(double beta) {
    if (!(beta > 2.0)) throw InvalidArgument("r_star_threshold: requires beta > 2");
    const double r2 = r2_threshold(beta);
    auto gap = [beta](double r) {
        const auto roots = solve_branch_roots(beta, r, FieldFamily::Opposed);
        if (!roots.p) throw NoRoot("r_star_threshold: m0(r) vanished inside (0, r2)");
        const ModelParams mp{beta, r, kPi};
        return potential({*roots.p, *roots.p}, mp) - potential({*roots.q, *roots.q}, mp);
    };
    return bracketed_root(gap, 0.0, r2 * (1.0 - 1e-9), 1e-15);
}

namespace {

// x0 + H(y) + K(y) - 1 with y = G(x0) - 3r/2; zero at off-line critical points
// of the aligned family.
double aligned_phi(double beta, double r, double x0) {
    const auto s = g_profile_inverses(beta, g_profile(beta, x0) - 1.5 * r);
    return x0 + s.H + s.K - 1.0;
}

double aligned_phi_min(double beta, double r) {
    const int n = 600;
    double best = INFINITY;
    int ib = 1;
    for (int i = 1; i < n; ++i) {
        const double v = aligned_phi(beta, r, static_cast<double>(i) / n);
        if (v < best) {
            best = v;
            ib = i;
        }
    }
    const double x = golden_min([&](double x0) { return aligned_phi(beta, r, x0); },
                                static_cast<double>(ib - 1) / n + 1e-12, static_cast<double>(ib + 1) / n - 1e-12,
                                1e-13);
    return std::min(best, aligned_phi(beta, r, x));
}

}  // namespace

std::vector<double> aligned_offdiagonal_x0(double beta, double r) {
    return scan_roots([&](double x0) { return aligned_phi(beta, r, x0); }, 1e-9, 1.0 - 1e-9, 4000, 1e-16);
}

double r_fold_threshold(double beta) {
    if (!(beta > 2.0)) throw InvalidArgument("r_fold_threshold: requires beta > 2");
    double hi = 0.05;
    while (aligned_phi_min(beta, hi) <= 0.0) hi *= 2.0;
    return bracketed_root([beta](double r) { return aligned_phi_min(beta, r); }, 0.0, hi, 1e-14);
}

std::map<std::string, double> field_thresholds(double beta, FieldFamily family) {
    if (!(beta > 2.0)) throw InvalidArgument("field_thresholds: requires beta > 2");
    std::map<std::string, double> t;
    if (family == FieldFamily::Opposed) {
        t["r1"] = r1_threshold(beta);
        t["r2"] = r2_threshold(beta);
        t["r_star"] = r_star_threshold(beta);
    } else {
        t["r_beta"] = r_beta_threshold(beta);
        t["r_fold"] = r_fold_threshold(beta);
    }
    return t;
}

}  // namespace potts
