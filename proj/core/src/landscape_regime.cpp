// Regime classification, valley structure, metastable sets and phase diagrams.
#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <string>

#include "potts/landscape.hpp"

namespace potts {

const char* to_string(Regime r) {
    switch (r) {
        case Regime::NoMetastability: return "NoMetastability";
        case Regime::ZF_I: return "ZF-I";
        case Regime::ZF_II: return "ZF-II";
        case Regime::ZF_III: return "ZF-III";
        case Regime::ZF_Beta2: return "ZF-β₂";
        case Regime::ZF_Beta1Degenerate: return "ZF-β₁-degenerate";
        case Regime::FieldPi_I: return "Field-π-I";
        case Regime::FieldPi_II: return "Field-π-II";
        case Regime::FieldPi_III: return "Field-π-III";
        case Regime::Field0_I: return "Field-0-I";
        case Regime::Field0_II: return "Field-0-II";
        case Regime::SmallField_CaseI: return "SmallField-CaseI";
        case Regime::SmallField_CaseII: return "SmallField-CaseII";
        case Regime::SmallField_CaseIII: return "SmallField-CaseIII";
        case Regime::NumericGeneric: return "NumericGeneric";
    }
    return "?";
}

const CriticalPoint* RegimeReport::find(const std::string& label) const {
    for (const auto& c : critical_points)
        if (c.label == label) return &c;
    return nullptr;
}

const Valley* RegimeReport::valley(int index) const {
    for (const auto& v : valleys)
        if (v.index == index) return &v;
    return nullptr;
}

int RegimeReport::minimum_of_valley(int index) const {
    for (std::size_t i = 0; i < critical_points.size(); ++i)
        if (critical_points[i].valley_index == index) return static_cast<int>(i);
    return -1;
}

namespace {

Regime zero_field_regime(double beta) {
    const double b3 = find_m0_beta3().beta3;
    const double b2 = find_beta2();
    if (beta <= b3 + 1e-12) return Regime::NoMetastability;
    if (std::abs(beta - b2) <= 1e-9) return Regime::ZF_Beta2;
    if (beta < b2) return Regime::ZF_III;
    if (beta < 2.0) return Regime::ZF_II;
    if (beta == 2.0) return Regime::ZF_Beta1Degenerate;
    return Regime::ZF_I;
}

int nearest_minimum(const std::vector<CriticalPoint>& pts, const SimplexPoint& x, double tol) {
    int best = -1;
    double dist = tol;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].kind != PointKind::LocalMin) continue;
        const double d = std::hypot(pts[i].location.x1 - x.x1, pts[i].location.x2 - x.x2);
        if (d < dist) {
            dist = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

SimplexPoint nudge_inside(const SimplexPoint& x) {
    const double e = 1e-9;
    double c[3] = {std::max(x.x0(), e), std::max(x.x1, e), std::max(x.x2, e)};
    const double s = c[0] + c[1] + c[2];
    return {c[1] / s, c[2] / s};
}

int descend_to_minimum(const std::vector<CriticalPoint>& pts, const SimplexPoint& x, const ModelParams& p) {
    const auto d = descend(nudge_inside(x), p);
    return nearest_minimum(pts, d.end, 1e-4);
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    }
    void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace

std::vector<SaddleLink> saddle_graph(const std::vector<CriticalPoint>& pts, const ModelParams& p) {
    std::vector<SaddleLink> links;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& c = pts[i];
        if (c.kind != PointKind::Saddle) continue;
        const auto eig = symmetric_eigen(hessian(c.location, p));
        const Vec2 v = eig.lo_vector;
        const double base = std::min(1e-3, 0.1 * std::min({c.location.x0(), c.location.x1, c.location.x2}));
        const Vec2 w{-v.y, v.x};
        SaddleLink link;
        link.saddle = static_cast<int>(i);
        for (int side = 0; side < 2; ++side) {
            const double sign = side == 0 ? 1.0 : -1.0;
            EndpointSplit split;
            for (double scale : {1.0, 0.1, 0.01}) {
                const double d = sign * base * scale;
                const double eta = 0.05 * std::abs(d);
                int hits[2];
                for (int k = 0; k < 2; ++k) {
                    const double e = k == 0 ? eta : -eta;
                    const SimplexPoint y{c.location.x1 + d * v.x + e * w.x, c.location.x2 + d * v.y + e * w.y};
                    hits[k] = y.interior() ? nearest_minimum(pts, descend(y, p).end, 1e-5) : -1;
                }
                if (hits[0] < 0 || hits[1] < 0) continue;
                if (hits[0] == hits[1]) split = {{hits[0], 1.0}};
                else split = {{hits[0], 0.5}, {hits[1], 0.5}};
                break;
            }
            (side == 0 ? link.a : link.b) = split.empty() ? -1 : split.front().first;
            (side == 0 ? link.a_split : link.b_split) = split;
        }
        links.push_back(link);
    }
    return links;
}

std::vector<ExitEvent> exit_events(const std::vector<CriticalPoint>& pts, const std::vector<SaddleLink>& links,
                                   const ModelParams& p) {
    std::vector<SaddleLink> usable;
    for (const auto& l : links)
        if (l.a >= 0 && l.b >= 0 && l.a != l.b) usable.push_back(l);
    std::sort(usable.begin(), usable.end(), [&](const SaddleLink& x, const SaddleLink& y) {
        return pts[static_cast<std::size_t>(x.saddle)].height < pts[static_cast<std::size_t>(y.saddle)].height;
    });

    UnionFind uf(pts.size());
    auto members = [&](int root) {
        std::vector<int> m;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (pts[i].kind == PointKind::LocalMin && uf.find(static_cast<int>(i)) == root) m.push_back(static_cast<int>(i));
        return m;
    };

    std::vector<ExitEvent> events;
    std::size_t i = 0;
    while (i < usable.size()) {
        const double level = pts[static_cast<std::size_t>(usable[i].saddle)].height;
        std::size_t j = i;
        while (j < usable.size() &&
               std::abs(pts[static_cast<std::size_t>(usable[j].saddle)].height - level) <=
                   1e-10 * std::max(1.0, std::abs(level)))
            ++j;
        std::map<int, ExitEvent> by_root;
        for (std::size_t k = i; k < j; ++k) {
            const auto& l = usable[k];
            const int ra = uf.find(l.a), rb = uf.find(l.b);
            if (ra == rb) continue;
            by_root[ra].gates.push_back({l.saddle, l.b, l.b_split, members(rb)});
            by_root[rb].gates.push_back({l.saddle, l.a, l.a_split, members(ra)});
        }
        for (auto& [root, ev] : by_root) {
            ev.cluster = members(root);
            ev.level = level;
            ev.bottom = INFINITY;
            for (int m : ev.cluster) ev.bottom = std::min(ev.bottom, pts[static_cast<std::size_t>(m)].height);
            ev.depth = p.beta * (level - ev.bottom);
            events.push_back(ev);
        }
        for (std::size_t k = i; k < j; ++k) uf.unite(usable[k].a, usable[k].b);
        i = j;
    }
    return events;
}

RegimeReport classify_regime(const ModelParams& p) {
    p.validate();
    RegimeReport rep;
    rep.params = p;
    const auto& mb = find_m0_beta3();
    rep.thresholds = {{"beta1", find_beta1()}, {"beta2", find_beta2()}, {"beta3", mb.beta3}, {"m0", mb.m0}};
    rep.critical_points = critical_points(p);
    const auto& pts = rep.critical_points;

    const auto fam = field_family(p.theta);
    if (p.r == 0.0) {
        rep.regime = zero_field_regime(p.beta);
    } else if (fam && p.beta > 2.0) {
        for (const auto& [k, v] : field_thresholds(p.beta, fam->family)) rep.thresholds[k] = v;
        if (fam->family == FieldFamily::Opposed) {
            const double r1 = rep.thresholds["r1"], r2 = rep.thresholds["r2"];
            if (p.r <= r1 + 1e-12 * std::max(1.0, r1)) rep.regime = Regime::FieldPi_I;
            else if (p.r < r2) rep.regime = Regime::FieldPi_II;
            else rep.regime = Regime::FieldPi_III;
            if (std::abs(p.r - r1) <= 1e-12 * std::max(1.0, r1)) {
                rep.degenerate = true;
                rep.degeneracy_reason = "r = r1 (the central critical point is degenerate)";
            }
        } else {
            rep.regime = p.r < rep.thresholds["r_fold"] ? Regime::Field0_I : Regime::Field0_II;
        }
    } else {
        int mins = 0, saddles = 0, maxima = 0;
        for (const auto& c : pts) {
            mins += c.kind == PointKind::LocalMin;
            saddles += c.kind == PointKind::Saddle;
            maxima += c.kind == PointKind::LocalMax;
        }
        rep.regime = (p.beta > 2.0 && mins == 3 && saddles == 3 && maxima == 1) ? Regime::SmallField_CaseIII
                                                                                : Regime::NumericGeneric;
    }

    for (const auto& c : pts) {
        if (c.kind != PointKind::Degenerate) continue;
        rep.degenerate = true;
        if (!rep.degeneracy_reason.empty()) rep.degeneracy_reason += "; ";
        rep.degeneracy_reason += c.label + " is degenerate";
    }
    if (rep.regime == Regime::ZF_Beta1Degenerate) rep.degeneracy_reason = "beta = beta1 = 2 (p is degenerate)";

    for (const auto& c : pts)
        if (c.valley_index >= 0) rep.index_set.push_back(c.valley_index);
    std::sort(rep.index_set.begin(), rep.index_set.end());
    if (rep.regime == Regime::NoMetastability) rep.index_set.clear();

    if (rep.regime == Regime::ZF_Beta1Degenerate) {
        const CriticalPoint* centre = rep.find("p");
        for (const auto& c : pts) {
            if (c.kind != PointKind::LocalMin) continue;
            Valley v;
            v.index = c.valley_index;
            v.minimum = c;
            v.height_reference = centre->height;
            v.depth = p.beta * (centre->height - c.height);
            v.gate_saddles = {*centre};
            rep.valleys.push_back(v);
        }
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) rep.adjacency.push_back({i, j, {"p"}});
        return rep;
    }
    if (rep.regime == Regime::NoMetastability) return rep;

    rep.saddle_graph = saddle_graph(pts, p);
    rep.events = exit_events(pts, rep.saddle_graph, p);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& c = pts[i];
        if (c.kind != PointKind::LocalMin || c.valley_index < 0) continue;
        for (const auto& ev : rep.events) {
            if (ev.cluster.size() != 1 || ev.cluster[0] != static_cast<int>(i)) continue;
            Valley v;
            v.index = c.valley_index;
            v.minimum = c;
            v.depth = ev.depth;
            v.height_reference = ev.level;
            for (const auto& g : ev.gates) v.gate_saddles.push_back(pts[static_cast<std::size_t>(g.saddle)]);
            rep.valleys.push_back(v);
        }
    }
    std::sort(rep.valleys.begin(), rep.valleys.end(), [](const Valley& a, const Valley& b) { return a.index < b.index; });

    std::map<std::pair<int, int>, std::vector<std::string>> adj;
    for (const auto& l : rep.saddle_graph) {
        if (l.a < 0 || l.b < 0 || l.a == l.b) continue;
        for (const auto& ea : l.a_split)
            for (const auto& eb : l.b_split) {
                int i = pts[static_cast<std::size_t>(ea.first)].valley_index;
                int j = pts[static_cast<std::size_t>(eb.first)].valley_index;
                if (i == j) continue;
                if (i > j) std::swap(i, j);
                adj[{i, j}].push_back(pts[static_cast<std::size_t>(l.saddle)].label);
            }
    }
    for (auto& [key, labels] : adj) {
        std::sort(labels.begin(), labels.end());
        rep.adjacency.push_back({key.first, key.second, labels});
    }
    return rep;
}

double default_epsilon(const RegimeReport& report) {
    if (report.valleys.empty()) throw NoValleys("default_epsilon: the regime has no valleys");
    double m = INFINITY;
    for (const auto& v : report.valleys) m = std::min(m, v.height_reference - v.minimum.height);
    return 0.1 * m;
}

namespace {

void check_epsilon(const RegimeReport& report, double epsilon) {
    if (report.degenerate)
        throw DegenerateRegime("metastable sets are not defined in a degenerate regime: " + report.degeneracy_reason);
    if (report.valleys.empty()) throw NoValleys("metastable sets: the regime has no valleys");
    if (!(epsilon > 0.0)) throw InvalidArgument("metastable sets: epsilon must be positive");
    for (const auto& v : report.valleys)
        if (!(epsilon < v.height_reference - v.minimum.height))
            throw EpsilonTooLarge("epsilon " + std::to_string(epsilon) + " empties valley " + std::to_string(v.index));
}

}  // namespace

MetastableSets metastable_sets(const RegimeReport& report, double epsilon, int N) {
    check_epsilon(report, epsilon);
    const ModelParams& p = report.params;
    MetastableSets out;
    out.N = N;
    out.epsilon = epsilon;
    for (const auto& v : report.valleys) out.valley_indices.push_back(v.index);
    out.sets.resize(report.valleys.size());
    double top = -INFINITY;
    for (const auto& v : report.valleys) top = std::max(top, v.height_reference - epsilon);
    for (const auto& s : enumerate_lattice(N)) {
        const SimplexPoint x = s.to_simplex();
        const double f = potential(x, p);
        if (!(f < top)) continue;
        const int m = descend_to_minimum(report.critical_points, x, p);
        if (m < 0) continue;
        for (std::size_t k = 0; k < report.valleys.size(); ++k) {
            const auto& v = report.valleys[k];
            if (report.minimum_of_valley(v.index) == m && f < v.height_reference - epsilon) out.sets[k].push_back(s);
        }
    }
    return out;
}

MetastableSets metastable_sets(const ModelParams& p, double epsilon, int N) {
    return metastable_sets(classify_regime(p), epsilon, N);
}

std::vector<signed char> label_lattice(const RegimeReport& report, double epsilon, int N) {
    check_epsilon(report, epsilon);
    const ModelParams& p = report.params;
    std::vector<signed char> labels(lattice_size(N), -1);
    std::vector<char> seen(lattice_size(N), 0);
    for (const auto& v : report.valleys) {
        const double level = v.height_reference - epsilon;
        std::fill(seen.begin(), seen.end(), 0);
        const LatticeState start = nearest_lattice(v.minimum.location, N);
        if (!(potential(start.to_simplex(), p) < level)) continue;
        std::deque<std::pair<int, int>> queue{{start.n1, start.n2}};
        seen[lattice_index(start.n1, start.n2, N)] = 1;
        while (!queue.empty()) {
            const auto [a, b] = queue.front();
            queue.pop_front();
            labels[lattice_index(a, b, N)] = static_cast<signed char>(v.index);
            static constexpr int moves[6][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}};
            for (const auto& mv : moves) {
                const int c = a + mv[0], d = b + mv[1];
                if (c < 0 || d < 0 || c + d > N) continue;
                const std::size_t idx = lattice_index(c, d, N);
                if (seen[idx]) continue;
                seen[idx] = 1;
                const SimplexPoint x{static_cast<double>(c) / N, static_cast<double>(d) / N};
                if (potential(x, p) < level) queue.emplace_back(c, d);
            }
        }
    }
    return labels;
}

PhaseDiagram phase_diagram(double beta_lo, double beta_hi, double r_lo, double r_hi, FieldFamily family,
                           int nb, int nr) {
    if (nb < 1 || nr < 1 || nb > 2000 || nr > 2000)
        throw InvalidArgument("phase_diagram: resolution must lie in [1, 2000] per axis");
    if (!(beta_lo > 0.0) || beta_hi < beta_lo || r_lo < 0.0 || r_hi < r_lo)
        throw InvalidArgument("phase_diagram: invalid ranges");
    PhaseDiagram d;
    d.family = family;
    auto axis = [](double lo, double hi, int n) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        return v;
    };
    d.betas = axis(beta_lo, beta_hi, nb);
    d.rs = axis(r_lo, r_hi, nr);
    d.labels.reserve(d.betas.size() * d.rs.size());
    for (double beta : d.betas) {
        double t1 = 0.0, t2 = 0.0;
        if (beta > 2.0) {
            if (family == FieldFamily::Opposed) {
                t1 = r1_threshold(beta);
                t2 = r2_threshold(beta);
                d.boundaries["r1"].emplace_back(beta, t1);
                d.boundaries["r2"].emplace_back(beta, t2);
            } else {
                t1 = r_fold_threshold(beta);
                d.boundaries["r_fold"].emplace_back(beta, t1);
                d.boundaries["r_beta"].emplace_back(beta, r_beta_threshold(beta));
            }
        } else if (beta == 2.0) {
            for (const char* name : family == FieldFamily::Opposed ? std::vector<const char*>{"r1", "r2"}
                                                                   : std::vector<const char*>{"r_fold", "r_beta"})
                d.boundaries[name].emplace_back(beta, 0.0);
        }
        for (double r : d.rs) {
            Regime g;
            if (r == 0.0) g = zero_field_regime(beta);
            else if (beta <= 2.0) g = Regime::NumericGeneric;
            else if (family == FieldFamily::Opposed) g = r <= t1 ? Regime::FieldPi_I : (r < t2 ? Regime::FieldPi_II : Regime::FieldPi_III);
            else g = r < t1 ? Regime::Field0_I : Regime::Field0_II;
            d.labels.push_back(g);
        }
    }
    return d;
}

}  // namespace potts
