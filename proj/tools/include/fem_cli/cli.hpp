#pragma once

#include "fem/problems.hpp"
#include "fem/system.hpp"

#include <array>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fem::cli {

/// Bad flags or contradictory options; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string subcommand;
    std::string problem = "poisson";
    int degree = 1;
    int quad_order = 0;
    int refine = 5;
    std::vector<std::string> bdstr;
    std::optional<std::string> mesh;
    std::optional<std::string> square;
    std::optional<double> h;
    std::optional<std::string> out;
    std::optional<std::string> solution;
    bool info = false;
    double dt = 0.0;
    double t_end = 0.1;
    double nu = 1.0;
    int max_iter = 15;
    double tol = 1e-8;
};

/// Fills defaults and rejects contradictions. Throws UsageError.
[[nodiscard]] RunConfig validate(RunConfig c);

/// "x0,x1,y0,y1" -> bounding box.
[[nodiscard]] std::array<double, 4> parse_square(const std::string& s);

/// CSV-ready table: #Dof, h, one column per error, trailing rate row when
/// the report has two or more levels.
[[nodiscard]] ResultTable report_table(const RateReport& report);

/// Human-readable table with the same cell strings as the CSV.
void emit_table(const RateReport& report, std::ostream& sink);

/// Parses argv, runs the subcommand and returns the exit code
/// (0 success, 2 usage error, 1 runtime error).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace fem::cli
