#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "moserlab/grids.hpp"

namespace moserlab::cli {

inline constexpr const char* tool_version = "1.0.0";

enum ExitCode : int { exit_ok = 0, exit_internal = 1, exit_validation = 2, exit_unwritable = 3 };

/// "4pi", "pi", "-2.5", "1e-3", "1/3", "pi/2".
double parse_number(std::string_view token);

/// Comma list of numbers, or a range "a..b" (integer steps) or
/// "2^a..2^b" (powers of two), or a mix separated by commas.
std::vector<double> parse_number_list(std::string_view text);

/// "0.6+0.2i", "0.5i", "-0.3", "0.3-0.4i".
std::complex<double> parse_complex(std::string_view token);
std::vector<std::complex<double>> parse_complex_list(std::string_view text);

struct GridSpec {
    std::size_t n = 4096;
    Grading grading = Grading::doubly;
    std::size_t angles = 256;
    GridOptions options;
};

/// "n=4096,grading=double,angles=256,tmax=40,gapmin=1e-12"; missing keys keep defaults.
GridSpec parse_grid_spec(std::string_view text);
std::string format_grid_spec(const GridSpec& g);

/// 17 significant digits; inf/nan spelled out.
std::string format_number(double v);

/// Runs the command line; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace moserlab::cli
