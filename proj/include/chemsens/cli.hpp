#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chemsens/pipeline.hpp"

namespace chemsens::cli {

enum class RouteChoice { Full, Adiabatic, Both };

struct Axis {
    std::string param;  // detuning | rate | rate_A | rate_B | density
    bool log = false;
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

struct SweepSpec {
    Axis axis1;
    std::optional<Axis> axis2;
    RouteChoice route = RouteChoice::Full;
};

// "rate=log:1e-6:1e2:41". Throws Error(UsageError).
Axis parse_axis(const std::string& text);
std::vector<double> grid_values(const Axis& axis);

// Dotted override "molecule.gamma_mhz=10" applied to a JSON config; the value
// is parsed as JSON when possible, else stored as a string.
void apply_override(nlohmann::json& config, const std::string& assignment);

// Sets the swept parameter on a JSON config.
void apply_axis_value(nlohmann::json& config, const std::string& param, double value);

std::string csv_header(bool with_deviation);

// Writes the header and one row per grid point in grid order (axis1 outer).
// Returns false if any point failed.
bool run_sweep(const nlohmann::json& base_config, const SweepSpec& spec, unsigned workers, std::ostream& csv);

// Gnuplot script plotting the sensitivity columns of `csv_name` against axis1.
std::string sweep_plot_script(const SweepSpec& spec, const std::string& csv_name);

nlohmann::json point_record(const params::ModelParams& p, const pipeline::PointResult& r);

// Writes the CSVs and gnuplot scripts of a figure into `dir`. Returns the
// written file names. Throws UsageError for an unknown id, IoError on write
// failure.
std::vector<std::string> emit_figure_pack(const std::string& figure_id, const nlohmann::json& base_config,
                                          const std::filesystem::path& dir, unsigned workers);

// Full command line entry point. Returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace chemsens::cli
