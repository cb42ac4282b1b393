#pragma once

#include <optional>
#include <string>

#include <curvlab/flow.hpp>

#include "config.hpp"

namespace curvlab::cli {

// Everything the front end can pass to a command. Unset fields fall back to
// the config file, then to the command's defaults.
struct Options {
    std::optional<std::string> config;
    std::optional<std::string> preset;
    std::optional<std::string> out;
    std::optional<std::string> suite;
    std::optional<int> n, b, samples, threads, N;
    std::optional<double> s, d;
    std::optional<long long> seed;
};

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIntegration = 2;

int cmd_simulate(const Options& o);
int cmd_bifurcation(const Options& o);
int cmd_stability_table(const Options& o);
int cmd_unduloid(const Options& o);
int cmd_verify(const Options& o);

// Settings accepted by `simulate`, after preset expansion.
struct SimulationSetup {
    FlowConfig flow;
    std::optional<std::pair<double, double>> fit_window;
    bool write_profiles = false;
    std::string out_dir = ".";
};

// Expands `preset`, then validates every key; errors name the key.
SimulationSetup simulation_setup(KeyValueConfig cfg);

// --threads, then CURVLAB_THREADS, then the hardware concurrency.
int resolve_threads(std::optional<int> flag);

}  // namespace curvlab::cli
