#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "plexsim/image.hpp"

namespace plexsim {

/// Exit codes shared by all subcommands: 0 success, 2 configuration or
/// validation failure (stderr names the offending field), 3 numerical
/// failure (stderr names the step).
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Executes a full run: copies the config, streams trace CSVs, writes the
/// graph export and the run manifest. `dump_mna` (optional) receives the
/// first step's assembled system in triplet text form.
int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
            const std::vector<std::string>& overrides = {},
            const std::filesystem::path& dump_mna = {});

/// Parses, resolves and validates without stepping; prints the normalized
/// config echo to `out`.
int cmd_validate(const std::filesystem::path& config_path, std::ostream& out,
                 const std::vector<std::string>& overrides = {});

struct PlaceInputsOptions {
    int k = 20;
    int grid_width = 41;
    int grid_height = 41;
    NodeRect region;
    double amplitude_v = 1.5;
    double t_start_s = 0.0;
    double t_stop_s = 1e-3;
};

/// Selects input electrodes from a grayscale raster and writes an [inputs]
/// config fragment to `output` ("-" for stdout).
int cmd_place_inputs(const std::filesystem::path& image_path, const PlaceInputsOptions& options,
                     const std::filesystem::path& output);

struct SweepOptions {
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> overrides;        // applied to every run
    std::vector<std::string> grid_axes;        // "key=v1,v2,..." cartesian axes
    int jobs = 1;
};

/// Runs the config across a seed list and an optional parameter grid, one
/// output subdirectory per combination. Combinations are independent and run
/// `jobs` at a time.
int cmd_sweep(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
              const SweepOptions& options);

/// Output directory resolution: explicit argument, else $PLEXSIM_OUT_DIR,
/// else "./plexsim_out".
std::filesystem::path resolve_out_dir(const std::filesystem::path& arg);

}  // namespace plexsim
