// potts: landscape grids, critical points, phase diagrams, predictions,
// simulations and the validation suite.
//
// Exit codes: 0 success, 1 failure (validation or numerics), 2 usage,
// 3 degenerate regime, 4 size limit.

#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "potts/errors.hpp"

#ifndef POTTS_VERSION
#define POTTS_VERSION "unknown"
#endif

using namespace potts::cli;
using nlohmann::json;

namespace {

const std::set<std::string> kUnrecorded = {"help", "out", "manifest"};

struct Parsed {
    RunConfig config;
    std::string format = "json";
    std::string out;
    std::string manifest;
};

void add_model_options(CLI::App* sub, Parsed& p, bool need_params = true) {
    if (need_params) {
        sub->add_option("--beta", p.config.beta, "inverse temperature")->capture_default_str();
        sub->add_option("--r", p.config.r, "field magnitude")->capture_default_str();
        sub->add_option("--theta", p.config.theta, "field angle: multiple of pi (pi, 2pi/3, ...) or radians")
            ->capture_default_str();
    }
    sub->add_option("--format", p.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--out", p.out, "output file (default stdout)");
    sub->add_option("--manifest", p.manifest, "manifest file (default <out>.manifest.json, else stderr)");
    sub->add_option("--threads", p.config.threads, "worker threads (default POTTS_THREADS or all cores)");
}

void build(CLI::App& app, Parsed& p) {
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", POTTS_VERSION);

    auto* land = app.add_subcommand("landscape", "F on a grid over the simplex (x1,x2,F), or the exact stationary measure");
    add_model_options(land, p);
    land->add_option("--grid", p.config.grid, "points per axis")->capture_default_str();
    land->add_option("--measure", p.config.measure_n, "emit the stationary measure at this N instead (n0,n1,n2,weight)");

    auto* crit = app.add_subcommand("critical", "critical points and regime report");
    add_model_options(crit, p);
    crit->add_flag("--multistart", p.config.multistart, "force the numeric multistart path");
    crit->add_option("--multistart-grid", p.config.multistart_grid)->capture_default_str();

    auto* phases = app.add_subcommand("phases", "regime diagram over (beta, r) for theta 0 or pi");
    add_model_options(phases, p, false);
    phases->add_option("--theta", p.config.theta, "0 or pi")->capture_default_str();
    phases->add_option("--beta", p.config.beta_range, "beta range lo..hi")->capture_default_str();
    phases->add_option("--r", p.config.r_range, "field range lo..hi")->capture_default_str();
    phases->add_option("--beta-resolution", p.config.beta_resolution)->capture_default_str();
    phases->add_option("--r-resolution", p.config.r_resolution)->capture_default_str();

    auto* predict = app.add_subcommand("predict", "Eyring-Kramers mean transition time and jump law");
    add_model_options(predict, p);
    predict->add_option("--n", p.config.N, "number of spins")->capture_default_str();
    predict->add_option("--from", p.config.from, "valley index")->capture_default_str();

    auto* sim = app.add_subcommand("simulate", "kinetic Monte Carlo hitting experiment");
    add_model_options(sim, p);
    sim->add_option("--n", p.config.N, "number of spins")->capture_default_str();
    sim->add_option("--seed", p.config.seed)->required();
    sim->add_option("--replicas", p.config.replicas)->capture_default_str();
    sim->add_option("--from", p.config.from, "start valley")->capture_default_str();
    sim->add_option("--start", p.config.start, "start state n0 n1 n2 (overrides --from)")->expected(3);
    sim->add_option("--targets", p.config.targets, "target valleys (default every other valley)");
    sim->add_option("--budget", p.config.budget, "event budget per replica (0: default)");
    sim->add_option("--epsilon", p.config.epsilon, "metastable-set margin");
    sim->add_option("--visits", p.config.visits_path, "write per-replica valley visits to this CSV");

    auto* val = app.add_subcommand("validate", "invariant suites; exit 1 on any failure");
    add_model_options(val, p, false);
    val->add_option("--level", p.config.level, "fast or full")->check(CLI::IsMember({"fast", "full"}))
        ->capture_default_str();
}

json manifest_of(const CLI::App& sub) {
    json options = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (kUnrecorded.count(name)) continue;
        if (opt->count() > 0) {
            if (opt->get_expected_max() == 0) {
                options[name] = true;
            } else {
                const auto& res = opt->results();
                options[name] = res.size() == 1 && opt->get_expected_max() == 1 ? json(res.front()) : json(res);
            }
        } else if (!opt->get_default_str().empty()) {
            options[name] = opt->get_default_str();
        }
    }
    return {{"schema_version", 1},
            {"tool", "potts"},
            {"version", POTTS_VERSION},
            {"command", sub.get_name()},
            {"options", options}};
}

// Arguments reproducing a manifest; options also given on the command line
// are left to the command line.
std::vector<std::string> manifest_args(const std::string& path, const std::vector<std::string>& rest) {
    std::ifstream in(path);
    if (!in) throw potts::InvalidArgument("cannot read manifest " + path);
    const json m = json::parse(in);
    if (m.at("schema_version").get<int>() != 1) throw potts::InvalidArgument("unsupported manifest schema");
    std::set<std::string> given;
    for (const auto& a : rest)
        if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? a.npos : a.find('=') - 2));
    std::vector<std::string> args{m.at("command").get<std::string>()};
    for (const auto& [name, value] : m.at("options").items()) {
        if (given.count(name)) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back("--" + name);
        } else if (value.is_array()) {
            args.push_back("--" + name);
            for (const auto& v : value) args.push_back(v.get<std::string>());
        } else {
            args.push_back("--" + name);
            args.push_back(value.get<std::string>());
        }
    }
    args.insert(args.end(), rest.begin(), rest.end());
    return args;
}

int dispatch(const std::string& command, const RunConfig& c, std::ostream& out) {
    if (command == "landscape") return cmd_landscape(c, out);
    if (command == "critical") return cmd_critical(c, out);
    if (command == "phases") return cmd_phases(c, out);
    if (command == "predict") return cmd_predict(c, out);
    if (command == "simulate") return cmd_simulate(c, out);
    return cmd_validate(c, out);
}

int run(std::vector<std::string> args) {
    if (args.size() >= 2 && args[0] == "--from-manifest") {
        args = manifest_args(args[1], {args.begin() + 2, args.end()});
    }
    CLI::App app{"Mean-field three-state Potts model with cyclic dynamics"};
    Parsed p;
    build(app, p);
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const CLI::App* sub = app.get_subcommands().front();
    p.config.command = sub->get_name();
    p.config.format = p.format == "csv" ? Format::Csv : Format::Json;

    const std::string manifest = manifest_of(*sub).dump(2);
    if (!p.manifest.empty() || !p.out.empty()) {
        const std::string path = p.manifest.empty() ? p.out + ".manifest.json" : p.manifest;
        std::ofstream m(path);
        if (!m) throw potts::InvalidArgument("cannot write " + path);
        m << manifest << '\n';
    } else {
        std::cerr << "manifest: " << manifest_of(*sub).dump() << '\n';
    }

    if (p.out.empty()) return dispatch(p.config.command, p.config, std::cout);
    std::ofstream out(p.out);
    if (!out) throw potts::InvalidArgument("cannot write " + p.out);
    return dispatch(p.config.command, p.config, out);
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run({argv + 1, argv + argc});
    } catch (const potts::InvalidArgument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const potts::OutOfRange& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const potts::DegenerateRegime& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return 3;
    } catch (const potts::SizeLimit& e) {
        std::cerr << "size limit: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
