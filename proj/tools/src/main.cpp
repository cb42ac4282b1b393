#include <CLI11.hpp>

#include <iostream>

#include <curvlab/errors.hpp>

#include "commands.hpp"

using namespace curvlab::cli;

namespace {

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--seed", o.seed, "Seed recorded in the manifest and used by randomized checks");
    cmd->add_option("--threads", o.threads, "Worker threads (falls back to CURVLAB_THREADS)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"curvlab: axisymmetric weighted-volume-preserving curvature flows"};
    app.require_subcommand(1);
    Options o;

    auto* sim = app.add_subcommand("simulate", "Integrate a flow from a key = value config or preset");
    sim->add_option("--config", o.config, "Config file (key = value, # comments)");
    sim->add_option("--preset", o.preset, "cylinder, vpmcf-stable or axis-approach");
    sim->add_option("--n", o.n, "Dimension n (overrides the config)");
    sim->add_option("--out", o.out, "Output directory");
    add_common(sim, o);

    auto* bif = app.add_subcommand("bifurcation", "Tabulate the stationary family eta(s)");
    bif->add_option("--n", o.n, "Dimension n")->required();
    bif->add_option("--b", o.b, "Mixed-volume index b (0 <= b <= n-1)");
    bif->add_option("--samples", o.samples, "Number of s samples (default 200)");
    bif->add_option("--d", o.d, "Plate distance (default 1)");
    bif->add_option("--out", o.out, "Output CSV path");
    add_common(bif, o);

    auto* tab = app.add_subcommand("stability-table", "Exact mixed-volume stability table");
    tab->add_option("--n", o.n, "Largest n (default 30)");
    tab->add_option("--b", o.b, "Largest b (default 12)");
    tab->add_option("--out", o.out, "Output CSV path");
    add_common(tab, o);

    auto* und = app.add_subcommand("unduloid", "Sample one unduloid profile");
    und->add_option("--n", o.n, "Dimension n")->required();
    und->add_option("--s", o.s, "Asymmetry s in (0,1) (default 0.1)");
    und->add_option("--b", o.b, "Weight index for the reported eta (default 0)");
    und->add_option("--d", o.d, "Plate distance (default 1)");
    und->add_option("--N", o.N, "Grid nodes (default 256)");
    und->add_option("--out", o.out, "Output CSV path");
    add_common(und, o);

    auto* ver = app.add_subcommand("verify", "Run a named verification suite");
    ver->add_option("--suite", o.suite, "paper-tables, conservation, cross-validation or all");
    ver->add_option("--out", o.out, "Also write the JSON report here");
    add_common(ver, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*sim) return cmd_simulate(o);
        if (*bif) return cmd_bifurcation(o);
        if (*tab) return cmd_stability_table(o);
        if (*und) return cmd_unduloid(o);
        if (*ver) return cmd_verify(o);
    } catch (const ConfigError& e) {
        std::cerr << "curvlab: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "curvlab: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
