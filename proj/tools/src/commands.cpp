#include "commands.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <curvlab/errors.hpp>
#include <curvlab/stability.hpp>
#include <curvlab/unduloid.hpp>

#include "output.hpp"

namespace curvlab::cli {
namespace {

const std::map<std::string, std::map<std::string, std::string>>& presets() {
    static const std::map<std::string, std::map<std::string, std::string>> table = {
        {"cylinder",
         {{"n", "2"}, {"d", "1"}, {"N", "64"}, {"speed", "mean-curvature"}, {"weight", "volume"},
          {"initial", "cylinder"}, {"R", "1"}, {"t_end", "0.5"}, {"rtol", "1e-10"}, {"atol", "1e-10"},
          {"record_every", "0.05"}}},
        {"vpmcf-stable",
         {{"n", "2"}, {"d", "1"}, {"N", "128"}, {"speed", "mean-curvature"}, {"weight", "volume"},
          {"initial", "cylinder"}, {"R_factor", "1.2"}, {"modes", "1:0.05"}, {"t_end", "1"}, {"rtol", "1e-10"},
          {"atol", "1e-10"}, {"record_every", "0.02"}, {"fit_window", "0.2,1"}}},
        // A deep mode-1 neck on a subcritical cylinder pinches toward the axis.
        {"axis-approach",
         {{"n", "2"}, {"d", "1"}, {"N", "64"}, {"speed", "mean-curvature"}, {"weight", "volume"},
          {"initial", "cylinder"}, {"R_factor", "0.5"}, {"modes", "1:0.5"}, {"t_end", "1"}, {"rtol", "1e-6"},
          {"atol", "1e-6"}, {"record_every", "0.01"}}},
    };
    return table;
}

const std::set<std::string> kSimulateKeys = {
    "preset", "n",    "d",     "N",      "speed",        "weight",  "initial",       "R",          "R_factor",
    "s",      "modes", "t_end", "rtol",  "atol",         "mode",    "record_every", "min_rho",    "semi_implicit",
    "diff",   "fit_window", "profiles", "out", "seed"};

WeightModel parse_weight(const std::string& spec, int n) {
    try {
        if (spec == "volume") return WeightModel::volume(n);
        if (spec.rfind("mixed:", 0) == 0) return WeightModel::mixed(n, std::stoi(spec.substr(6)));
        if (spec.rfind("coeffs:", 0) == 0) {
            std::vector<double> c;
            std::istringstream in(spec.substr(7));
            std::string item;
            while (std::getline(in, item, ',')) c.push_back(std::stod(item));
            if (static_cast<int>(c.size()) != n + 1)
                throw ConfigError("weight", "coeffs needs n+1 = " + std::to_string(n + 1) + " values");
            return WeightModel(c);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("weight", e.what());
    }
    throw ConfigError("weight", "expected volume, mixed:b or coeffs:c0,...,cn; got '" + spec + "'");
}

std::vector<std::pair<int, double>> parse_modes(const std::string& spec) {
    std::vector<std::pair<int, double>> modes;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("modes", "expected k:amplitude, got '" + item + "'");
        try {
            modes.emplace_back(std::stoi(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
        } catch (const std::exception&) {
            throw ConfigError("modes", "expected k:amplitude, got '" + item + "'");
        }
        if (modes.back().first < 0) throw ConfigError("modes", "mode index must be non-negative");
    }
    return modes;
}

template <class T>
T positive(const std::string& key, T v) {
    if (!(v > 0)) throw ConfigError(key, "must be positive");
    return v;
}

nlohmann::ordered_json fit_json(const LineFit& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual_rms", f.residual_rms}, {"samples", f.samples}};
}

KeyValueConfig base_config(const Options& o) {
    KeyValueConfig cfg = o.config ? KeyValueConfig::load(*o.config) : KeyValueConfig();
    if (o.preset) cfg.set("preset", *o.preset);
    if (o.n) cfg.set("n", std::to_string(*o.n));
    if (o.N) cfg.set("N", std::to_string(*o.N));
    if (o.d) cfg.set("d", format_number(*o.d));
    if (o.s) cfg.set("s", format_number(*o.s));
    if (o.out) cfg.set("out", *o.out);
    return cfg;
}

}  // namespace

int resolve_threads(std::optional<int> flag) {
    if (flag) {
        if (*flag < 1) throw ConfigError("threads", "must be at least 1");
        return *flag;
    }
    if (const char* env = std::getenv("CURVLAB_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v >= 1) return v;
        } catch (const std::exception&) {
        }
        throw ConfigError("CURVLAB_THREADS", "expected a positive integer, got '" + std::string(env) + "'");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SimulationSetup simulation_setup(KeyValueConfig cfg) {
    if (cfg.has("preset")) {
        const std::string name = cfg.get_string("preset", "");
        const auto it = presets().find(name);
        if (it == presets().end()) throw ConfigError("preset", "unknown preset '" + name + "'");
        for (const auto& [k, v] : it->second) cfg.set_default(k, v);
    }
    cfg.check_known(kSimulateKeys);

    SimulationSetup s;
    FlowConfig& f = s.flow;
    f.n = cfg.get_int("n", 2);
    if (f.n < 2) throw ConfigError("n", "must be at least 2");
    f.d = positive("d", cfg.get_double("d", 1.0));
    f.N = cfg.get_int("N", 128);
    if (f.N < 16) throw ConfigError("N", "must be at least 16");
    try {
        f.speed = make_speed(cfg.get_string("speed", "mean-curvature"), f.n, f.d);
    } catch (const Error& e) {
        throw ConfigError("speed", e.what());
    }
    if (!f.speed->has_pointwise()) throw ConfigError("speed", "tabulated speeds cannot drive a flow");
    f.weight = parse_weight(cfg.get_string("weight", "volume"), f.n);

    const std::string family = cfg.get_string("initial", "cylinder");
    if (family == "cylinder")
        f.initial.family = InitialCondition::Family::Cylinder;
    else if (family == "unduloid")
        f.initial.family = InitialCondition::Family::Unduloid;
    else
        throw ConfigError("initial", "expected cylinder or unduloid, got '" + family + "'");
    if (cfg.has("R") && cfg.has("R_factor")) throw ConfigError("R_factor", "give either R or R_factor, not both");
    if (cfg.has("R_factor")) {
        const double factor = positive("R_factor", cfg.get_double("R_factor", 1.0));
        std::optional<CriticalRadius> crit;
        try {
            crit = r_crit_find(*f.speed, f.n, f.d, {1e-3 / f.d, 1e4 / f.d});
        } catch (const Error& e) {
            throw ConfigError("R_factor", std::string("critical radius lookup failed: ") + e.what());
        }
        if (!crit) throw ConfigError("R_factor", "the speed has no critical radius");
        f.initial.R = factor * crit->R_crit;
    } else {
        f.initial.R = positive("R", cfg.get_double("R", 1.0));
    }
    f.initial.s = cfg.get_double("s", 0.1);
    if (f.initial.family == InitialCondition::Family::Unduloid && !(f.initial.s > 0 && f.initial.s < 1))
        throw ConfigError("s", "must lie in (0, 1)");
    f.initial.modes = parse_modes(cfg.get_string("modes", ""));

    f.t_end = positive("t_end", cfg.get_double("t_end", 1.0));
    f.rtol = cfg.get_double("rtol", 1e-8);
    if (!(f.rtol > 1e-14 && f.rtol < 1e-2)) throw ConfigError("rtol", "must lie in (1e-14, 1e-2)");
    f.atol = cfg.get_double("atol", 1e-8);
    if (!(f.atol > 1e-14 && f.atol < 1e-2)) throw ConfigError("atol", "must lie in (1e-14, 1e-2)");
    const std::string mode = cfg.get_string("mode", "full");
    if (mode == "full")
        f.mode = FlowMode::Full;
    else if (mode == "reduced")
        f.mode = FlowMode::Reduced;
    else
        throw ConfigError("mode", "expected full or reduced, got '" + mode + "'");
    f.record_every = positive("record_every", cfg.get_double("record_every", 0.05));
    f.min_rho = positive("min_rho", cfg.get_double("min_rho", 1e-6));
    f.semi_implicit = cfg.get_bool("semi_implicit", false);
    const std::string diff = cfg.get_string("diff", "spectral");
    if (diff == "spectral")
        f.diff_mode = DiffMode::SpectralCosine;
    else if (diff == "fd4")
        f.diff_mode = DiffMode::FiniteDifference4;
    else
        throw ConfigError("diff", "expected spectral or fd4, got '" + diff + "'");

    if (cfg.has("fit_window")) {
        const auto w = cfg.get_doubles("fit_window", {});
        if (w.size() != 2 || !(w[1] > w[0])) throw ConfigError("fit_window", "expected 't_lo, t_hi' with t_lo < t_hi");
        s.fit_window = std::make_pair(w[0], w[1]);
    }
    s.write_profiles = cfg.get_bool("profiles", false);
    s.out_dir = cfg.get_string("out", ".");
    validate(f);
    return s;
}

int cmd_simulate(const Options& o) {
    KeyValueConfig cfg = base_config(o);
    SimulationSetup setup;
    try {
        setup = simulation_setup(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "curvlab simulate: " << e.what() << '\n';
        return kExitUsage;
    }
    const FlowConfig& f = setup.flow;
    namespace fs = std::filesystem;
    const fs::path dir(setup.out_dir);
    RunManifest manifest;
    manifest.command = "simulate";
    for (const auto& [k, v] : cfg.entries()) manifest.params[k] = v;
    manifest.params["R"] = format_number(f.initial.R);
    manifest.seed = o.seed.value_or(0);

    nlohmann::ordered_json report;
    Trajectory tr;
    int code = kExitOk;
    try {
        tr = integrate(f);
    } catch (const IntegrationError& e) {
        report["termination"] = "integration-error";
        report["message"] = e.what();
        report["t_fail"] = e.time();
        code = kExitIntegration;
    } catch (const Error& e) {
        std::cerr << "curvlab simulate: " << e.what() << '\n';
        return kExitUsage;
    }

    if (!tr.empty()) {
        CsvTable traj({"time", "wvol", "sup_dev", "eta"});
        for (std::size_t i = 0; i < tr.times.size(); ++i)
            traj.add_row({format_number(tr.times[i]), format_number(tr.wvol[i]), format_number(tr.sup_dev[i]),
                          format_number(tr.eta[i])});
        const std::string path = (dir / "trajectory.csv").string();
        atomic_write(path, traj.str());
        manifest.outputs.push_back(path);
        if (setup.write_profiles) {
            CsvTable prof({"snapshot", "time", "z", "rho"});
            for (std::size_t i = 0; i < tr.states.size(); ++i)
                for (int j = 0; j < f.N; ++j)
                    prof.add_row({std::to_string(i), format_number(tr.times[i]), format_number(f.d * j / (f.N - 1)),
                                  format_number(tr.states[i].values[j])});
            const std::string ppath = (dir / "profiles.csv").string();
            atomic_write(ppath, prof.str());
            manifest.outputs.push_back(ppath);
        }
        report["termination"] = to_string(tr.termination);
        report["message"] = tr.message;
        report["t_final"] = tr.times.back();
        report["steps_accepted"] = tr.stats.accepted;
        report["steps_rejected"] = tr.stats.rejected;
        report["rhs_evaluations"] = tr.stats.rhs_evaluations;
        report["wvol_drift"] = conservation_drift(tr);
        report["R"] = f.initial.R;
        const double eta = tr.eta.front();
        const double lambda1 = linear_eigenvalue(1, eta, *f.speed, f.n, f.d);
        report["eta"] = eta;
        report["lambda1_predicted"] = lambda1;
        report["predicted"] = lambda1 < 0 ? "decay" : "growth";
        if (setup.fit_window) {
            try {
                const LineFit fit = decay_rate_fit(tr, setup.fit_window->first, setup.fit_window->second);
                report["decay_fit"] = fit_json(fit);
                report["rate_relative_error"] = std::abs(fit.slope - lambda1) / std::abs(lambda1);
                report["observed"] = fit.slope < 0 ? "decay" : "growth";
                report["verdict_agrees"] = (fit.slope < 0) == (lambda1 < 0);
            } catch (const InsufficientDataError& e) {
                report["decay_fit"] = nullptr;
                report["decay_fit_error"] = e.what();
            }
        }
        if (tr.termination != Termination::Completed) code = kExitIntegration;
    }
    const std::string rpath = (dir / "report.json").string();
    atomic_write(rpath, report.dump(2) + "\n");
    manifest.outputs.push_back(rpath);
    manifest.write((dir / "manifest.json").string());
    std::cout << report.dump(2) << '\n';
    return code;
}

int cmd_bifurcation(const Options& o) {
    const int n = o.n.value_or(2);
    const int b = o.b.value_or(0);
    const int samples = o.samples.value_or(200);
    if (n < 2 || n > kMaxUnduloidDimension) {
        std::cerr << "curvlab bifurcation: --n must lie in [2, " << kMaxUnduloidDimension << "]\n";
        return kExitUsage;
    }
    if (b < 0 || b > n - 1) {
        std::cerr << "curvlab bifurcation: need 0 <= b <= n-1\n";
        return kExitUsage;
    }
    if (samples < 3) {
        std::cerr << "curvlab bifurcation: --samples must be at least 3\n";
        return kExitUsage;
    }
    int threads = 1;
    try {
        threads = resolve_threads(o.threads);
    } catch (const ConfigError& e) {
        std::cerr << "curvlab bifurcation: " << e.what() << '\n';
        return kExitUsage;
    }
    const double d = o.d.value_or(1.0);
    const std::vector<double> grid = default_s_grid(samples);

    struct Row {
        BifurcationSample sample;
        std::string status = "ok";
    };
    std::vector<Row> rows(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < grid.size();) {
            try {
                rows[i].sample = eta_curve({n, d, grid[i]}, b);
            } catch (const std::exception& e) {
                rows[i].sample.s = grid[i];
                rows[i].status = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(threads, static_cast<int>(grid.size())); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    CsvTable csv({"s", "eta", "eta_bar", "rho0", "H", "quadrature_error_estimate", "status"});
    std::vector<double> ok_s, ok_eta;
    int failures = 0;
    for (const Row& r : rows) {
        const bool ok = r.status == "ok";
        const auto num = [&](double v) { return ok ? format_number(v) : std::string("nan"); };
        csv.add_row({format_number(r.sample.s), num(r.sample.eta), num(r.sample.eta_bar), num(r.sample.rho0),
                     num(r.sample.H), num(r.sample.quadrature_error_estimate), r.status});
        if (ok) {
            ok_s.push_back(r.sample.s);
            ok_eta.push_back(r.sample.eta_bar);
        } else {
            ++failures;
        }
    }
    const std::string path = o.out.value_or("bifurcation_n" + std::to_string(n) + "_b" + std::to_string(b) + ".csv");
    atomic_write(path, csv.str());

    RunManifest manifest;
    manifest.command = "bifurcation";
    manifest.params = {{"n", std::to_string(n)},         {"b", std::to_string(b)},
                       {"samples", std::to_string(samples)}, {"d", format_number(d)},
                       {"s_grid", "geometric [0.01, 0.97]"}, {"failed_rows", std::to_string(failures)}};
    if (ok_s.size() >= 3) {
        std::ostringstream tp;
        for (const auto& t : turning_points_from_values(ok_s, ok_eta)) tp << t.kind << '@' << format_number(t.s) << ';';
        manifest.params["turning_points"] = tp.str();
        std::cout << "turning points: " << (tp.str().empty() ? "none" : tp.str()) << '\n';
    }
    manifest.outputs.push_back(path);
    manifest.seed = o.seed.value_or(0);
    manifest.write(path + ".manifest.json");
    if (failures) std::cerr << "curvlab bifurcation: " << failures << " row(s) failed; see the status column\n";
    std::cout << "wrote " << path << " (" << rows.size() << " rows)\n";
    return kExitOk;
}

int cmd_stability_table(const Options& o) {
    const int n_max = o.n.value_or(30);
    const int b_max = o.b.value_or(12);
    std::vector<StabilityTableEntry> table;
    try {
        table = stability_table(n_max, b_max);
    } catch (const Error& e) {
        std::cerr << "curvlab stability-table: " << e.what() << '\n';
        return kExitUsage;
    }
    CsvTable csv({"n", "b", "condition_value_num", "condition_value_den", "stable"});
    for (const auto& e : table)
        csv.add_row({std::to_string(e.n), std::to_string(e.b), std::to_string(e.value.numerator()),
                     std::to_string(e.value.denominator()), e.stable ? "true" : "false"});
    const std::string path = o.out.value_or("stability_table.csv");
    atomic_write(path, csv.str());
    RunManifest manifest;
    manifest.command = "stability-table";
    manifest.params = {{"n_max", std::to_string(n_max)}, {"b_max", std::to_string(b_max)}, {"arithmetic", "exact"}};
    manifest.outputs.push_back(path);
    manifest.seed = o.seed.value_or(0);
    manifest.write(path + ".manifest.json");
    std::cout << "wrote " << path << " (" << table.size() << " rows)\n";
    return kExitOk;
}

int cmd_unduloid(const Options& o) {
    const int n = o.n.value_or(2);
    const double s = o.s.value_or(0.1);
    const double d = o.d.value_or(1.0);
    const int N = o.N.value_or(256);
    const int b = o.b.value_or(0);
    RadialProfile p;
    BifurcationSample bs;
    try {
        if (b < 0 || b > n - 1) throw DomainError("need 0 <= b <= n-1");
        p = unduloid_profile({n, d, s}, N);
        bs = eta_curve({n, d, s}, b);
    } catch (const Error& e) {
        std::cerr << "curvlab unduloid: " << e.what() << '\n';
        return kExitUsage;
    }
    CsvTable csv({"z", "rho"});
    for (int j = 0; j < N; ++j) csv.add_row({format_number(d * j / (N - 1)), format_number(p.values[j])});
    std::ostringstream name;
    name << "unduloid_n" << n << "_s" << format_number(s) << ".csv";
    const std::string path = o.out.value_or(name.str());
    atomic_write(path, csv.str());
    RunManifest manifest;
    manifest.command = "unduloid";
    manifest.params = {{"n", std::to_string(n)},      {"s", format_number(s)},       {"d", format_number(d)},
                       {"N", std::to_string(N)},      {"b", std::to_string(b)},      {"rho0", format_number(bs.rho0)},
                       {"H", format_number(bs.H)},    {"eta", format_number(bs.eta)}, {"eta_bar", format_number(bs.eta_bar)}};
    manifest.outputs.push_back(path);
    manifest.seed = o.seed.value_or(0);
    manifest.write(path + ".manifest.json");
    std::cout << "wrote " << path << " (rho0 = " << format_number(bs.rho0) << ", H = " << format_number(bs.H)
              << ")\n";
    return kExitOk;
}

}  // namespace curvlab::cli
