// Critical points: closed forms, multistart, descent and continuation.
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>

#include "potts/landscape.hpp"

namespace potts {

namespace {

double norm(const Vec2& v) { return std::hypot(v.x, v.y); }

// Solves H d = -g.
std::optional<Vec2> newton_step(const Mat2& h, const Vec2& g) {
    const double det = h.det();
    if (std::abs(det) < 1e-300) return std::nullopt;
    return Vec2{-(h.a22 * g.x - h.a12 * g.y) / det, -(-h.a21 * g.x + h.a11 * g.y) / det};
}

bool strictly_inside(const SimplexPoint& x) { return x.x1 > 0.0 && x.x2 > 0.0 && x.x0() > 0.0; }

int valley_index_of(const std::string& label, PointKind kind) {
    if (kind != PointKind::LocalMin) return -1;
    if (label == "m0") return 0;
    if (label == "m1") return 1;
    if (label == "m2") return 2;
    if (label == "p") return 3;
    return -1;
}

// Coordinate that differs most from the mean of the other two.
int odd_coordinate(const SimplexPoint& x) {
    int best = 0;
    double gap = -1.0;
    for (int k = 0; k < 3; ++k) {
        const double other = 0.5 * (x.coord((k + 1) % 3) + x.coord((k + 2) % 3));
        const double g = std::abs(x.coord(k) - other);
        if (g > gap) {
            gap = g;
            best = k;
        }
    }
    return best;
}

int largest_coordinate(const SimplexPoint& x) {
    int best = 0;
    for (int k = 1; k < 3; ++k)
        if (x.coord(k) > x.coord(best)) best = k;
    return best;
}

// When two points carry the same label prefix+k, relabel that prefix group by
// the injective assignment of k maximizing the summed score. Groups larger
// than three keep their labels with primes appended to repeats.
template <class Score>
void unique_labels(std::vector<CriticalPoint>& pts, const std::string& prefix, Score score) {
    std::vector<CriticalPoint*> group;
    for (auto& c : pts)
        if (c.label.rfind(prefix, 0) == 0) group.push_back(&c);
    bool clash = false;
    for (std::size_t a = 0; a < group.size(); ++a)
        for (std::size_t b = a + 1; b < group.size(); ++b) clash = clash || group[a]->label == group[b]->label;
    if (!clash) return;
    if (group.size() > 3) {
        std::map<std::string, int> seen;
        for (auto* c : group) c->label += std::string(static_cast<std::size_t>(seen[c->label]++), '\'');
        return;
    }
    std::array<int, 3> perm{0, 1, 2}, best{};
    double best_score = -1.0;
    do {
        double s = 0.0;
        for (std::size_t a = 0; a < group.size(); ++a) s += score(group[a]->location, perm[a]);
        if (s > best_score) {
            best_score = s;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (std::size_t a = 0; a < group.size(); ++a) {
        group[a]->label = prefix + std::to_string(best[a]);
        group[a]->valley_index = valley_index_of(group[a]->label, group[a]->kind);
    }
}

std::string geometric_label(const SimplexPoint& x, PointKind kind) {
    const double spread =
        std::max({std::abs(x.x0() - 1.0 / 3.0), std::abs(x.x1 - 1.0 / 3.0), std::abs(x.x2 - 1.0 / 3.0)});
    switch (kind) {
        case PointKind::LocalMax: return "p";
        case PointKind::Saddle: return "σ" + std::to_string(odd_coordinate(x));
        case PointKind::LocalMin:
        case PointKind::Degenerate:
            if (spread < 0.05) return "p";
            return "m" + std::to_string(largest_coordinate(x));
    }
    return "?";
}

// x' with x'_j = x_{j+k}; inverse of rotate_to_actual.
SimplexPoint rotate_to_actual(const SimplexPoint& canonical, int k) {
    double c[3] = {canonical.x0(), canonical.x1, canonical.x2};
    double a[3];
    for (int j = 0; j < 3; ++j) a[(j + k) % 3] = c[j];
    return {a[1], a[2]};
}

std::string shift_label(const std::string& label, int k) {
    if (label == "p" || k == 0) return label;
    const char digit = label.back();
    const int i = (digit - '0' + k) % 3;
    return label.substr(0, label.size() - 1) + std::to_string(i);
}

void sort_points(std::vector<CriticalPoint>& pts) {
    auto rank = [](const CriticalPoint& c) {
        if (c.label.rfind("m", 0) == 0) return 0;
        if (c.label.rfind("σ", 0) == 0) return 1;
        return 2;
    };
    std::stable_sort(pts.begin(), pts.end(), [&](const CriticalPoint& a, const CriticalPoint& b) {
        if (rank(a) != rank(b)) return rank(a) < rank(b);
        return a.label < b.label;
    });
}

}  // namespace

const char* to_string(PointKind k) {
    switch (k) {
        case PointKind::LocalMin: return "LocalMin";
        case PointKind::Saddle: return "Saddle";
        case PointKind::LocalMax: return "LocalMax";
        case PointKind::Degenerate: return "Degenerate";
    }
    return "?";
}

CriticalPoint make_critical_point(const SimplexPoint& x, const ModelParams& p, std::string label) {
    CriticalPoint c;
    c.location = x;
    c.height = potential(x, p);
    const Mat2 h = hessian(x, p);
    c.hessian_det = h.det();
    const auto eig = symmetric_eigen(h);
    c.hessian_eigs = {eig.lo, eig.hi};
    if (std::abs(c.hessian_det) < kDegeneracyTol) c.kind = PointKind::Degenerate;
    else if (c.hessian_det < 0.0) c.kind = PointKind::Saddle;
    else c.kind = h.trace() > 0.0 ? PointKind::LocalMin : PointKind::LocalMax;
    if (c.kind == PointKind::Saddle) c.a_hessian_negative_eig = a_hessian_spectrum(x, p).negative_eigenvalue();
    c.label = label.empty() ? geometric_label(x, c.kind) : std::move(label);
    c.valley_index = valley_index_of(c.label, c.kind);
    return c;
}

std::optional<SimplexPoint> newton_polish(const SimplexPoint& start, const ModelParams& p, double tol,
                                          int max_iter) {
    SimplexPoint x = start;
    if (!strictly_inside(x)) return std::nullopt;
    double gn = norm(gradient(x, p));
    for (int it = 0; it < max_iter && gn > tol; ++it) {
        const Vec2 g = gradient(x, p);
        auto d = newton_step(hessian(x, p), g);
        if (!d) d = Vec2{-g.x, -g.y};
        double a = 1.0;
        bool moved = false;
        for (int k = 0; k < 60; ++k, a *= 0.5) {
            const SimplexPoint y{x.x1 + a * d->x, x.x2 + a * d->y};
            if (!strictly_inside(y)) continue;
            const double gy = norm(gradient(y, p));
            if (gy < gn || k == 59) {
                x = y;
                gn = gy;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    if (!(gn <= std::max(tol, 1e-9))) return std::nullopt;
    return x;
}

std::vector<CriticalPoint> critical_points_zero_field(double beta) {
    const ModelParams mp{beta, 0.0, 0.0};
    const SimplexPoint centre{1.0 / 3.0, 1.0 / 3.0};
    std::vector<CriticalPoint> out;
    const auto& mb = find_m0_beta3();
    const bool at_beta3 = std::abs(beta - mb.beta3) <= 1e-12;
    if (beta < mb.beta3 && !at_beta3) {
        out.push_back(make_critical_point(centre, mp, "p"));
        return out;
    }
    const auto roots = solve_branch_roots(beta, 0.0);
    const double p = *roots.p, q = *roots.q;
    for (int i = 0; i < 3; ++i) out.push_back(make_critical_point(line_point(i, p), mp, "m" + std::to_string(i)));
    if (!at_beta3 && beta != 2.0)
        for (int i = 0; i < 3; ++i)
            out.push_back(make_critical_point(line_point(i, q), mp, "σ" + std::to_string(i)));
    out.push_back(make_critical_point(centre, mp, "p"));
    if (at_beta3)
        for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)].kind = PointKind::Degenerate;
    for (auto& c : out) c.valley_index = valley_index_of(c.label, c.kind);
    return out;
}

std::optional<FamilyInfo> field_family(double theta) {
    const double unit = kPi / 3.0;
    const double n = theta / unit;
    const double k = std::round(n);
    if (std::abs(n - k) > 1e-12) return std::nullopt;
    const int j = static_cast<int>(k) % 6;
    // Even multiples of pi/3 are 2 pi s/3: aligned with v_s.
    if (j % 2 == 0) return FamilyInfo{FieldFamily::Aligned, j / 2};
    // Odd multiples are pi + 2 pi s/3.
    return FamilyInfo{FieldFamily::Opposed, ((j - 3) / 2 + 3) % 3};
}

namespace {

std::vector<CriticalPoint> canonical_family_points(double beta, double r, FieldFamily fam) {
    const ModelParams mp{beta, r, fam == FieldFamily::Opposed ? kPi : 0.0};
    std::vector<std::pair<std::string, SimplexPoint>> raw;
    const auto roots = solve_branch_roots(beta, r, fam);
    if (roots.p) raw.emplace_back("m0", line_point(0, *roots.p));
    if (roots.u && (!roots.p || *roots.u != *roots.p) && (!roots.q || *roots.u != *roots.q))
        raw.emplace_back("p", line_point(0, *roots.u));
    if (roots.q) raw.emplace_back("σ0", line_point(0, *roots.q));

    if (fam == FieldFamily::Opposed) {
        for (auto& pt : solve_offdiagonal(beta, r).points) raw.push_back(pt);
    } else {
        const double shift = 1.5 * r;
        for (double x0 : aligned_offdiagonal_x0(beta, r)) {
            const auto s = g_profile_inverses(beta, g_profile(beta, x0) - shift);
            raw.emplace_back("", SimplexPoint{s.H, s.K});
            raw.emplace_back("", SimplexPoint{s.K, s.H});
        }
    }

    std::vector<CriticalPoint> out;
    for (auto& [label, x] : raw) {
        const auto polished = newton_polish(x, mp, 1e-13);
        out.push_back(make_critical_point(polished.value_or(x), mp, label));
    }
    return out;
}

}  // namespace

std::vector<CriticalPoint> critical_points_multistart(const ModelParams& p, int grid) {
    std::vector<SimplexPoint> found;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid - i; ++j) {
            const SimplexPoint start{(i + 0.5) / grid, (j + 0.5) / grid};
            if (!(start.x0() > 0.25 / grid)) continue;
            const auto x = newton_polish(start, p, 1e-13, 200);
            if (!x) continue;
            bool dup = false;
            for (const auto& f : found) {
                if (std::hypot(f.x1 - x->x1, f.x2 - x->x2) < 1e-7) {
                    dup = true;
                    break;
                }
            }
            if (!dup) found.push_back(*x);
        }
    }
    std::vector<CriticalPoint> out;
    for (const auto& x : found) out.push_back(make_critical_point(x, p, ""));
    unique_labels(out, "σ", [](const SimplexPoint& x, int k) {
        return std::abs(x.coord(k) - 0.5 * (x.coord((k + 1) % 3) + x.coord((k + 2) % 3)));
    });
    unique_labels(out, "m", [](const SimplexPoint& x, int k) { return x.coord(k); });
    sort_points(out);
    return out;
}

std::vector<CriticalPoint> critical_points(const ModelParams& p) {
    p.validate();
    if (p.r == 0.0) return critical_points_zero_field(p.beta);
    const auto fam = field_family(p.theta);
    if (fam && p.beta > 2.0) {
        auto pts = canonical_family_points(p.beta, p.r, fam->family);
        for (auto& c : pts) {
            c.location = rotate_to_actual(c.location, fam->shift);
            c.label = shift_label(c.label, fam->shift);
            // Heights and spectra are invariant under the relabelling.
            c.valley_index = valley_index_of(c.label, c.kind);
        }
        sort_points(pts);
        return pts;
    }
    return critical_points_multistart(p);
}

DescentResult descend(const SimplexPoint& start, const ModelParams& p, int max_iter) {
    DescentResult r;
    SimplexPoint x = start;
    double f = potential(x, p);
    for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
        const Vec2 g = gradient(x, p);
        r.gradient_norm = norm(g);
        if (r.gradient_norm < 1e-11) {
            r.converged = true;
            break;
        }
        const Mat2 h = hessian(x, p);
        Vec2 d{-g.x, -g.y};
        if (h.det() > 0.0 && h.trace() > 0.0) {
            if (auto n = newton_step(h, g)) d = *n;
        }
        const double len = norm(d);
        if (len > 1e-2) d = {d.x * 1e-2 / len, d.y * 1e-2 / len};
        const double slope = g.x * d.x + g.y * d.y;
        double a = 1.0;
        bool accepted = false;
        for (int k = 0; k < 80; ++k, a *= 0.5) {
            const SimplexPoint y{x.x1 + a * d.x, x.x2 + a * d.y};
            if (!strictly_inside(y)) continue;
            const double fy = potential(y, p);
            if (fy <= f + 1e-4 * a * slope) {
                x = y;
                f = fy;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            r.converged = r.gradient_norm < 1e-7;
            break;
        }
    }
    r.end = x;
    return r;
}

TrackedPoint continue_point(const SimplexPoint& start, const ModelParams& base, double r_target, std::string label,
                            bool throw_on_fold) {
    ModelParams p = base;
    p.r = 0.0;
    TrackedPoint t;
    t.label = std::move(label);
    t.start = start;
    const double c0 = std::cos(p.theta);
    const Vec2 dr_grad{-(std::cos(p.theta - kTwoPiOver3) - c0), -(std::cos(p.theta - 2.0 * kTwoPiOver3) - c0)};
    t.height_slope_at_zero = -field_term(start, ModelParams{p.beta, 1.0, p.theta});

    const double det0 = hessian(start, p).det();
    if (std::abs(det0) < kDegeneracyTol) throw DegenerateInput("continue_point: degenerate starting point");
    SimplexPoint x = start;
    double r = 0.0, step = std::min(1e-3, r_target);
    while (r < r_target) {
        const double r_new = std::min(r + step, r_target);
        p.r = r;
        const auto tangent = newton_step(hessian(x, p), dr_grad);
        bool ok = false;
        SimplexPoint y;
        if (tangent) {
            y = {x.x1 + (r_new - r) * tangent->x, x.x2 + (r_new - r) * tangent->y};
            p.r = r_new;
            for (int it = 0; it < 30 && strictly_inside(y); ++it) {
                const Vec2 g = gradient(y, p);
                if (norm(g) <= 1e-11) {
                    ok = true;
                    break;
                }
                const auto d = newton_step(hessian(y, p), g);
                if (!d) break;
                y = {y.x1 + d->x, y.x2 + d->y};
            }
            ok = ok && strictly_inside(y) && (hessian(y, p).det() > 0.0) == (det0 > 0.0);
        }
        if (ok) {
            x = y;
            r = r_new;
            step = std::min(2.0 * step, 1e-3);
        } else {
            step *= 0.5;
            if (step < 1e-6) {
                t.folded = true;
                break;
            }
        }
    }
    p.r = r;
    t.end = x;
    t.r_reached = r;
    t.end_height = potential(x, p);
    t.kind = make_critical_point(x, p, t.label).kind;
    if (t.folded && throw_on_fold)
        throw FoldDetected("continue_point: " + (t.label.empty() ? std::string("critical point") : t.label) +
                           " disappears near r = " + std::to_string(r));
    return t;
}

std::vector<TrackedPoint> continuation_small_field(double beta, double theta, double r_target) {
    const double b3 = find_m0_beta3().beta3;
    if (!(beta > b3)) throw InvalidArgument("continuation_small_field: requires beta > beta_3");
    std::vector<TrackedPoint> out;
    const ModelParams p{beta, 0.0, theta};
    for (const auto& c : critical_points_zero_field(beta)) {
        if (c.kind == PointKind::Degenerate) continue;
        out.push_back(continue_point(c.location, p, r_target, c.label, false));
    }
    return out;
}

}  // namespace potts
