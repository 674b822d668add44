#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "plexsim/cli.hpp"
#include "plexsim/version.hpp"

namespace {

bool parse_region(const std::string& text, plexsim::NodeRect& rect) {
    int c0, r0, c1, r1;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%d,%d,%d,%d%c", &c0, &r0, &c1, &r1, &tail) != 4) {
        return false;
    }
    rect = {c0, r0, c1, r1};
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"plexsim - memristive plexus + spiking neuron simulator"};
    app.set_version_flag("--version", plexsim::kVersion);
    app.require_subcommand(1);

    // run
    std::string run_config;
    std::string run_out;
    std::vector<std::string> run_overrides;
    std::string run_dump_mna;
    CLI::App* run = app.add_subcommand("run", "execute a simulation run");
    run->add_option("config", run_config, "config file")->required();
    run->add_option("-o,--out", run_out, "output directory (default $PLEXSIM_OUT_DIR or ./plexsim_out)");
    run->add_option("--override", run_overrides, "key=value or section.key=value override");
    run->add_option("--dump-mna", run_dump_mna, "write the first step's assembled system (triplet text)");

    // validate
    std::string val_config;
    std::vector<std::string> val_overrides;
    CLI::App* validate = app.add_subcommand("validate", "validate a config and echo its normalized form");
    validate->add_option("config", val_config, "config file")->required();
    validate->add_option("--override", val_overrides, "key=value override");

    // place-inputs
    std::string pi_image;
    std::string pi_out = "-";
    std::string pi_region;
    plexsim::PlaceInputsOptions pi_opts;
    CLI::App* place = app.add_subcommand("place-inputs",
                                         "choose input electrodes from a grayscale PGM image");
    place->add_option("image", pi_image, "PGM image (P2 or P5)")->required();
    place->add_option("-k", pi_opts.k, "number of electrodes")->required();
    place->add_option("--width", pi_opts.grid_width, "grid width (nodes)")->required();
    place->add_option("--height", pi_opts.grid_height, "grid height (nodes)")->required();
    place->add_option("--region", pi_region, "node rectangle col0,row0,col1,row1")->required();
    place->add_option("--amplitude", pi_opts.amplitude_v, "input amplitude (V)");
    place->add_option("--start", pi_opts.t_start_s, "window start (s)");
    place->add_option("--stop", pi_opts.t_stop_s, "window stop (s)");
    place->add_option("-o,--out", pi_out, "output fragment file ('-' for stdout)");

    // sweep
    std::string sw_config;
    std::string sw_out;
    std::vector<std::string> sw_seeds;
    plexsim::SweepOptions sw_opts;
    CLI::App* sweep = app.add_subcommand("sweep", "run a seed list / parameter grid");
    sweep->add_option("config", sw_config, "config file")->required();
    sweep->add_option("-o,--out", sw_out, "output directory");
    sweep->add_option("--seeds", sw_seeds, "seed values");
    sweep->add_option("--set", sw_opts.grid_axes, "parameter axis key=v1,v2,...");
    sweep->add_option("--override", sw_opts.overrides, "override applied to every run");
    sweep->add_option("-j,--jobs", sw_opts.jobs, "parallel runs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            return plexsim::cmd_run(run_config, run_out, run_overrides, run_dump_mna);
        }
        if (*validate) {
            return plexsim::cmd_validate(val_config, std::cout, val_overrides);
        }
        if (*place) {
            if (!parse_region(pi_region, pi_opts.region)) {
                std::cerr << "place-inputs error: --region expects col0,row0,col1,row1\n";
                return plexsim::kExitConfig;
            }
            return plexsim::cmd_place_inputs(pi_image, pi_opts, pi_out);
        }
        if (*sweep) {
            for (const std::string& s : sw_seeds) {
                try {
                    sw_opts.seeds.push_back(std::stoull(s));
                } catch (...) {
                    std::cerr << "sweep error: bad seed '" << s << "'\n";
                    return plexsim::kExitConfig;
                }
            }
            return plexsim::cmd_sweep(sw_config, sw_out, sw_opts);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return plexsim::kExitConfig;
    }
    return plexsim::kExitConfig;
}
