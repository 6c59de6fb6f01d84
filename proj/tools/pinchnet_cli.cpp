// pinchnet: gain sweeps, coupler kappa sweeps and mismatch studies.

#include "pinchnet/error.hpp"
#include "pinchnet/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct CommonArgs {
    std::string config;
    std::string out = "-";
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "key = value configuration file");
    cmd->add_option("--out", args.out, "output CSV path ('-' for stdout)");
    cmd->add_option("--set", args.overrides, "override one key: --set key=value")->take_all();
}

pinchnet::ExperimentConfig resolve(const CommonArgs& args) {
    pinchnet::ExperimentConfig cfg;
    if (!args.config.empty()) {
        cfg.load_file(args.config);
    }
    for (const auto& item : args.overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw pinchnet::ConfigError(item, "--set expects key=value");
        }
        cfg.set(item.substr(0, eq), item.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

template <typename Writer>
void emit(const std::string& path, Writer&& write) {
    if (path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw pinchnet::ConfigError("out", "cannot open '" + path + "' for writing");
    }
    write(out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pinching-antenna multiport simulator and beamforming experiments"};
    app.require_subcommand(1);

    CommonArgs gain_args;
    auto* gain = app.add_subcommand("gain-sweep", "channel gain versus PA count for each PA model");
    add_common(gain, gain_args);

    CommonArgs kappa_args;
    auto* kappa = app.add_subcommand("kappa-sweep", "coupler amplitude/phase versus kappa");
    add_common(kappa, kappa_args);

    CommonArgs mismatch_args;
    auto* mismatch = app.add_subcommand("mismatch", "general mismatched model versus matched fast path");
    add_common(mismatch, mismatch_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gain->parsed()) {
            const auto cfg = resolve(gain_args);
            const auto rows = pinchnet::run_gain_sweep(cfg);
            emit(gain_args.out, [&](std::ostream& os) { pinchnet::write_gain_csv(os, cfg, rows); });
            for (const auto& r : rows) {
                if (!r.error.empty()) {
                    return 1;
                }
            }
        } else if (kappa->parsed()) {
            const auto cfg = resolve(kappa_args);
            const auto rows = pinchnet::run_kappa_sweep(cfg.varphi_deg * pinchnet::kPi / 180.0, cfg.kappa_grid);
            emit(kappa_args.out, [&](std::ostream& os) { pinchnet::write_kappa_csv(os, cfg, rows); });
        } else if (mismatch->parsed()) {
            const auto cfg = resolve(mismatch_args);
            const auto rows = pinchnet::run_mismatch_study(cfg);
            emit(mismatch_args.out, [&](std::ostream& os) { pinchnet::write_mismatch_csv(os, cfg, rows); });
            for (const auto& r : rows) {
                if (!r.error.empty()) {
                    return 1;
                }
            }
        }
    } catch (const pinchnet::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const pinchnet::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
