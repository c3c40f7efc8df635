#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>

#include <nlohmann/json.hpp>

#include "potts/errors.hpp"
#include "potts/kinetics.hpp"
#include "potts/landscape.hpp"
#include "potts/simulator.hpp"

namespace potts::cli {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Angle parse_angle(const std::string& text) {
    static const std::regex symbolic(R"(\s*([+-]?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+))?\s*)");
    std::smatch m;
    Angle a;
    if (std::regex_match(text, m, symbolic)) {
        const std::string k = m[1].str();
        const double num_part = k.empty() || k == "+" ? 1.0 : (k == "-" ? -1.0 : std::stod(k));
        const double den = m[2].matched ? std::stod(m[2].str()) : 1.0;
        if (den == 0.0) throw InvalidArgument("angle: zero denominator");
        a.radians = num_part * kPi / den;
        // A multiple of pi/3 when 3 num / den is an integer.
        const double thirds = 3.0 * num_part / den;
        a.symbolic = std::abs(thirds - std::round(thirds)) < 1e-12;
    } else {
        std::size_t used = 0;
        try {
            a.radians = std::stod(text, &used);
        } catch (const std::exception&) {
            throw InvalidArgument("angle: cannot parse '" + text + "'");
        }
        if (used != text.size()) throw InvalidArgument("angle: cannot parse '" + text + "'");
        a.symbolic = a.radians == 0.0;
    }
    a.radians = std::fmod(a.radians, 2.0 * kPi);
    if (a.radians < 0.0) a.radians += 2.0 * kPi;
    if (a.symbolic) {
        // Snap to the exact double of the multiple of pi/3.
        const int k = static_cast<int>(std::lround(a.radians / (kPi / 3))) % 6;
        a.radians = k * kPi / 3;
    }
    return a;
}

std::pair<double, double> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            const double v = std::stod(text);
            return {v, v};
        }
        return {std::stod(text.substr(0, dots)), std::stod(text.substr(dots + 2))};
    } catch (const std::exception&) {
        throw InvalidArgument("range: cannot parse '" + text + "'");
    }
}

ModelParams RunConfig::params() const {
    ModelParams p{beta, r, parse_angle(theta).radians};
    p.validate();
    return p;
}

namespace {

json params_json(const ModelParams& p) { return {{"beta", p.beta}, {"r", p.r}, {"theta", p.theta}}; }

json document(const std::string& command, const ModelParams& p) {
    return {{"schema_version", kSchemaVersion}, {"command", command}, {"params", params_json(p)}};
}

json point_json(const CriticalPoint& c) {
    json j = {{"label", c.label},
              {"kind", to_string(c.kind)},
              {"x", {c.location.x0(), c.location.x1, c.location.x2}},
              {"height", c.height},
              {"hessian_det", c.hessian_det},
              {"hessian_eigs", {c.hessian_eigs[0], c.hessian_eigs[1]}},
              {"valley_index", c.valley_index}};
    if (c.a_hessian_negative_eig) j["mu"] = -*c.a_hessian_negative_eig;
    return j;
}

json split_json(const std::map<int, double>& d) {
    json j = json::object();
    for (const auto& [k, v] : d) j[std::to_string(k)] = v;
    return j;
}

json report_json(const RegimeReport& rep) {
    json valleys = json::array();
    for (const auto& v : rep.valleys) {
        json gates = json::array();
        for (const auto& s : v.gate_saddles) gates.push_back(s.label);
        valleys.push_back({{"index", v.index}, {"minimum", v.minimum.label}, {"depth", v.depth}, {"gates", gates}});
    }
    json adjacency = json::array();
    for (const auto& a : rep.adjacency) adjacency.push_back({{"i", a.i}, {"j", a.j}, {"saddles", a.saddles}});
    json j = {{"regime", to_string(rep.regime)}, {"thresholds", rep.thresholds}, {"valleys", valleys},
              {"adjacency", adjacency}, {"index_set", rep.index_set}, {"degenerate", rep.degenerate}};
    if (rep.degenerate) j["degeneracy_reason"] = rep.degeneracy_reason;
    return j;
}

json ek_json(const RegimeReport& rep, const EKQuantities& ek) {
    auto keyed = [&](const std::map<int, double>& m) {
        json j = json::object();
        for (const auto& [i, v] : m) j[rep.critical_points[static_cast<std::size_t>(i)].label] = v;
        return j;
    };
    return {{"nu", keyed(ek.nu)}, {"omega", keyed(ek.omega)}, {"mu", keyed(ek.mu)}};
}

json chain_json(const LimitChain& c) {
    return {{"depth", c.depth}, {"states", c.states}, {"rate", c.rate}, {"movers", c.movers},
            {"absorbing", c.absorbing}};
}

json prediction_json(const TransitionPrediction& t) {
    return {{"from", t.from},
            {"depth", t.depth},
            {"time_scale", t.time_scale.value},
            {"time_scale_log", t.time_scale.log},
            {"mean_time", t.mean_time.value},
            {"mean_time_log", t.mean_time.log},
            {"total_rate", t.total_rate},
            {"stable", t.stable},
            {"jump_distribution", split_json(t.jump_distribution)}};
}

void refuse_degenerate(const RegimeReport& rep) {
    if (rep.degenerate) throw DegenerateRegime(rep.degeneracy_reason);
}

}  // namespace

int cmd_landscape(const RunConfig& c, std::ostream& out) {
    const ModelParams p = c.params();
    if (c.measure_n > 0) {
        const Measure m = exact_stationary(c.measure_n, p);
        const double total = m.total();
        out << "n0,n1,n2,weight\n";
        for (std::size_t i = 0; i < m.states.size(); ++i) {
            const auto& s = m.states[i];
            out << s.n0 << ',' << s.n1 << ',' << s.n2 << ',' << num(m.weights[i] / total) << '\n';
        }
        return 0;
    }
    if (c.grid < 2 || c.grid > 2000) throw InvalidArgument("landscape: grid must lie in [2, 2000]");
    const int g = c.grid - 1;
    out << "x1,x2,F\n";
    for (int i = 0; i <= g; ++i)
        for (int j = 0; j <= g; ++j) {
            const SimplexPoint x{static_cast<double>(i) / g, static_cast<double>(j) / g};
            const double F = i + j <= g ? potential(x, p) : NAN;
            out << num(x.x1) << ',' << num(x.x2) << ',' << num(F) << '\n';
        }
    return 0;
}

int cmd_critical(const RunConfig& c, std::ostream& out) {
    const ModelParams p = c.params();
    const bool numeric = c.multistart || (p.r > 0.0 && !parse_angle(c.theta).symbolic);
    const auto points = numeric ? critical_points_multistart(p, c.multistart_grid) : critical_points(p);
    if (c.format == Format::Csv) {
        out << "label,kind,x0,x1,x2,height,hessian_det\n";
        for (const auto& cp : points)
            out << cp.label << ',' << to_string(cp.kind) << ',' << num(cp.location.x0()) << ','
                << num(cp.location.x1) << ',' << num(cp.location.x2) << ',' << num(cp.height) << ','
                << num(cp.hessian_det) << '\n';
        return 0;
    }
    json doc = document("critical", p);
    doc["method"] = numeric ? "multistart" : "closed_form";
    doc["critical_points"] = json::array();
    for (const auto& cp : points) doc["critical_points"].push_back(point_json(cp));
    doc["report"] = report_json(classify_regime(p));
    out << doc.dump(2) << '\n';
    return 0;
}

int cmd_phases(const RunConfig& c, std::ostream& out) {
    const Angle a = parse_angle(c.theta);
    const auto family = field_family(a.radians);
    if (!a.symbolic || !family || family->shift != 0)
        throw InvalidArgument("phases: theta must be 0 (aligned family) or pi (opposed family)");
    const auto [b0, b1] = parse_range(c.beta_range);
    const auto [r0, r1] = parse_range(c.r_range);
    const PhaseDiagram d = phase_diagram(b0, b1, r0, r1, family->family, c.beta_resolution, c.r_resolution);
    if (c.format == Format::Csv) {
        out << "beta,r,regime\n";
        for (std::size_t ib = 0; ib < d.betas.size(); ++ib)
            for (std::size_t ir = 0; ir < d.rs.size(); ++ir)
                out << num(d.betas[ib]) << ',' << num(d.rs[ir]) << ',' << to_string(d.at(ib, ir)) << '\n';
        return 0;
    }
    json doc = {{"schema_version", kSchemaVersion},
                {"command", "phases"},
                {"family", family->family == FieldFamily::Opposed ? "opposed" : "aligned"},
                {"theta", a.radians},
                {"betas", d.betas},
                {"rs", d.rs}};
    json labels = json::array();
    for (Regime r : d.labels) labels.push_back(to_string(r));
    doc["labels"] = labels;
    json bounds = json::object();
    for (const auto& [name, pts] : d.boundaries) {
        json arr = json::array();
        for (const auto& [beta, r] : pts) arr.push_back({beta, r});
        bounds[name] = arr;
    }
    doc["boundaries"] = bounds;
    out << doc.dump(2) << '\n';
    return 0;
}

int cmd_predict(const RunConfig& c, std::ostream& out) {
    const ModelParams p = c.params();
    const RegimeReport rep = classify_regime(p);
    refuse_degenerate(rep);
    const TransitionPrediction t = predict_transition(rep, c.N, c.from);
    json doc = document("predict", p);
    doc["N"] = c.N;
    doc["regime"] = to_string(rep.regime);
    doc["prediction"] = prediction_json(t);
    doc["ek"] = ek_json(rep, ek_quantities(rep));
    doc["chains"] = json::array();
    for (const auto& ch : limit_chains(rep)) doc["chains"].push_back(chain_json(ch));
    out << doc.dump(2) << '\n';
    return 0;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
    SimulationConfig s;
    s.params = c.params();
    s.N = c.N;
    s.seed = c.seed;
    s.replicas = c.replicas;
    s.targets = c.targets;
    s.event_budget = c.budget;
    s.epsilon = c.epsilon;
    s.threads = c.threads;
    if (c.start) {
        if (c.start->size() != 3) throw InvalidArgument("simulate: --start takes n0 n1 n2");
        s.start_state = LatticeState{(*c.start)[0], (*c.start)[1], (*c.start)[2]};
    } else {
        s.start_valley = c.from;
    }
    if (s.N > kMaxSimulationN) throw SizeLimit("simulate: N exceeds " + std::to_string(kMaxSimulationN));
    if (s.replicas < 1) throw InvalidArgument("simulate: replicas must be positive");
    const auto ctx = prepare_simulation(s);
    const HittingStats st = hitting_experiment(*ctx);

    if (!c.visits_path.empty()) {
        // Replays each replica; streams depend only on (seed, replica).
        std::ofstream v(c.visits_path);
        if (!v) throw InvalidArgument("simulate: cannot write " + c.visits_path);
        v << "replica,valley,entry_time,sojourn\n";
        for (int r = 0; r < s.replicas; ++r)
            for (const auto& visit : run_trajectory(*ctx, static_cast<std::uint64_t>(r), true).visits)
                v << r << ',' << visit.valley << ',' << num(visit.entry_time) << ',' << num(visit.sojourn) << '\n';
    }

    if (c.format == Format::Csv) {
        out << "replica,hitting_time,target,events,censored\n";
        for (const auto& h : st.samples)
            out << h.replica << ',' << num(h.time) << ',' << h.target << ',' << h.events << ',' << h.censored
                << '\n';
        return 0;
    }
    json doc = document("simulate", s.params);
    doc["N"] = s.N;
    doc["seed"] = s.seed;
    doc["replicas"] = s.replicas;
    doc["regime"] = to_string(ctx->report.regime);
    doc["epsilon"] = ctx->epsilon;
    doc["start"] = {ctx->table->state_of(ctx->start).n0, ctx->table->state_of(ctx->start).n1,
                    ctx->table->state_of(ctx->start).n2};
    doc["completed"] = st.completed;
    doc["censored"] = st.censored;
    doc["mean"] = st.mean;
    doc["mean_se"] = st.mean_se;
    doc["sd"] = st.sd;
    doc["cv"] = st.cv;
    doc["cv_se"] = st.cv_se;
    doc["frequency"] = split_json(st.frequency);
    doc["frequency_se"] = split_json(st.frequency_se);
    doc["label_fraction"] = {{"outside", st.label_fraction[0]},
                             {"0", st.label_fraction[1]},
                             {"1", st.label_fraction[2]},
                             {"2", st.label_fraction[3]},
                             {"3", st.label_fraction[4]}};
    doc["total_events"] = st.total_events;
    if (st.prediction) doc["prediction"] = prediction_json(*st.prediction);
    out << doc.dump(2) << '\n';
    return 0;
}

}  // namespace potts::cli
