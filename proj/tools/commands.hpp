#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "potts/model.hpp"

namespace potts::cli {

enum class Format { Csv, Json };

struct Angle {
    double radians = 0.0;
    bool symbolic = false;  // given as a multiple of pi/3
};
// "0", "pi", "2pi/3", "4*pi/3", "-pi/3" or radians.
Angle parse_angle(const std::string& text);
// "lo..hi" or a single value.
std::pair<double, double> parse_range(const std::string& text);
// 17 significant digits.
std::string num(double v);

struct RunConfig {
    std::string command;
    double beta = 2.4;
    double r = 0.0;
    std::string theta = "0";
    Format format = Format::Json;

    // landscape
    int grid = 101;
    int measure_n = 0;
    // critical
    bool multistart = false;
    int multistart_grid = 40;
    // phases
    std::string beta_range = "1.5..4";
    std::string r_range = "0..0.5";
    int beta_resolution = 101;
    int r_resolution = 101;
    // predict and simulate
    int N = 60;
    int from = 0;
    std::optional<std::vector<int>> start;
    std::vector<int> targets;
    std::uint64_t seed = 0;
    int replicas = 100;
    std::uint64_t budget = 0;
    std::optional<double> epsilon;
    std::string visits_path;
    // validate
    std::string level = "fast";

    int threads = 0;

    ModelParams params() const;
};

int cmd_landscape(const RunConfig& c, std::ostream& out);
int cmd_critical(const RunConfig& c, std::ostream& out);
int cmd_phases(const RunConfig& c, std::ostream& out);
int cmd_predict(const RunConfig& c, std::ostream& out);
int cmd_simulate(const RunConfig& c, std::ostream& out);
int cmd_validate(const RunConfig& c, std::ostream& out);

}  // namespace potts::cli
