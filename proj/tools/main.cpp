// delaywave: command-line front end for the delayed-feedback wave experiments.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "config_file.hpp"
#include "delaywave/delaywave.hpp"
#include "delaywave/csv.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

using namespace delaywave;

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Flags {
    std::optional<std::string> config_path;
    std::optional<double> ell, mu, t_final, lambda, damping;
    std::optional<std::string> boundary, solver, initial, window, snapshots, mu_list, out_dir;
    std::optional<int> nodes, trace_n, sample_stride, fault_delay_offset;
    std::optional<double> mu_min, mu_max;
    std::optional<int> steps;
};

void add_run_options(CLI::App* app, Flags& f) {
    app->add_option("--config", f.config_path, "JSON experiment file (flags override it)");
    app->add_option("--ell", f.ell, "String length ell (default 1)");
    app->add_option("--mu", f.mu, "Feedback gain mu (default 0)");
    app->add_option("--boundary", f.boundary, "free | instant | delayed (default delayed)");
    app->add_option("--solver", f.solver, "characteristics | fdtd | both (default characteristics)");
    app->add_option("--initial", f.initial, "sine | quarter-sine | zero | path to x,y0,y1 CSV");
    app->add_option("--t-final", f.t_final, "Final time (default 40 ell)");
    app->add_option("--nodes", f.nodes, "FDTD spatial intervals J (default 1000)");
    app->add_option("--lambda", f.lambda, "Requested Courant number (default 0.9)");
    app->add_option("--trace-n", f.trace_n, "Characteristic trace samples per 2 ell (default 1000)");
    app->add_option("--sample-stride", f.sample_stride, "Record energy every N steps (default 10)");
    app->add_option("--snapshots", f.snapshots, "Snapshot times t1,t2,... (default 5 evenly spaced)");
    app->add_option("--window", f.window, "Rate-fit window t_a:t_b (default 10 ell:t_final)");
    app->add_option("--damping", f.damping, "FDTD delayed-law damping in [0, 1] (default 0.9)");
    app->add_option("--out-dir", f.out_dir, "Output directory (default .)");
    app->add_option("--fault-delay-offset", f.fault_delay_offset)->group("");
}

std::vector<double> parse_list(const std::string& text, const std::string& field) {
    std::vector<double> out;
    if (text.empty()) return out;
    for (auto part : csv::split(text, ',')) {
        const auto v = csv::parse_double(part);
        if (!v) throw ConfigError(field, "cannot parse '" + std::string(part) + "' as a number");
        out.push_back(*v);
    }
    return out;
}

std::pair<double, double> parse_window(const std::string& text) {
    const auto parts = csv::split(text, ':');
    if (parts.size() != 2) throw ConfigError("window", "expected t_a:t_b");
    const auto a = csv::parse_double(parts[0]);
    const auto b = csv::parse_double(parts[1]);
    if (!a || !b) throw ConfigError("window", "expected t_a:t_b with numeric bounds");
    return {*a, *b};
}

// Defaults, then the config file, then flags.
SimConfig resolve(const Flags& f, cli::ToolSettings& tool) {
    SimConfig c;
    if (f.config_path) cli::apply_config_file(*f.config_path, c, tool);
    if (f.ell) c.ell = *f.ell;
    if (f.mu) c.mu = *f.mu;
    if (f.boundary) c.boundary = parse_boundary_kind(*f.boundary);
    if (f.solver) c.solver = parse_solver_kind(*f.solver);
    if (f.initial) c.initial = *f.initial;
    if (f.t_final) c.t_final = *f.t_final;
    if (f.nodes) c.nodes = *f.nodes;
    if (f.lambda) c.lambda = *f.lambda;
    if (f.trace_n) c.trace_n = *f.trace_n;
    if (f.sample_stride) c.sample_stride = *f.sample_stride;
    if (f.snapshots) c.snapshot_times = parse_list(*f.snapshots, "snapshots");
    if (f.window) c.window = parse_window(*f.window);
    if (f.damping) c.damping = *f.damping;
    if (f.fault_delay_offset) c.fault_delay_offset = *f.fault_delay_offset;
    if (f.mu_list) tool.mu_list = parse_list(*f.mu_list, "mu-list");
    if (f.out_dir) tool.out_dir = *f.out_dir;
    if (f.mu_min) tool.mu_min = *f.mu_min;
    if (f.mu_max) tool.mu_max = *f.mu_max;
    if (f.steps) tool.steps = *f.steps;
    return c;
}

fs::path output_dir(const cli::ToolSettings& tool) {
    fs::path dir = tool.out_dir.value_or(".");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

unsigned thread_cap() {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("DELAYWAVE_THREADS");
    if (env == nullptr || *env == '\0') return hw;
    const auto v = csv::parse_double(env);
    if (!v || *v < 1.0 || *v != static_cast<double>(static_cast<long>(*v))) {
        throw ConfigError("DELAYWAVE_THREADS", "expected a positive integer");
    }
    return static_cast<unsigned>(std::min<double>(*v, hw));
}

void write_json(const fs::path& path, const Json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
}

void write_energy(const fs::path& path, const EnergyTrace& trace) {
    csv::Writer w(path.string());
    w.cell("t").cell("E").end_row();
    for (std::size_t i = 0; i < trace.size(); ++i) {
        w.cell(trace.times[i]).cell(trace.energies[i]).end_row();
    }
    w.close();
}

void write_snapshots(const fs::path& path, const std::vector<Snapshot>& snaps) {
    csv::Writer w(path.string());
    w.cell("t").cell("x").cell("y").end_row();
    for (const Snapshot& s : snaps) {
        for (std::size_t i = 0; i < s.x.size(); ++i) w.cell(s.t).cell(s.x[i]).cell(s.y[i]).end_row();
    }
    w.close();
}

// Shortest round-trip form for the human-readable table.
std::string display(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json config_json(const SimConfig& c) {
    Json j;
    j["ell"] = c.ell;
    j["mu"] = c.mu;
    j["boundary"] = to_string(c.boundary);
    j["solver"] = to_string(c.solver);
    j["initial"] = c.initial;
    j["t_final"] = c.resolved_t_final();
    j["nodes"] = c.nodes;
    j["trace_n"] = c.trace_n;
    j["lambda"] = c.lambda;
    j["sample_stride"] = c.sample_stride;
    const auto [ta, tb] = c.resolved_window();
    j["window"] = {ta, tb};
    j["snapshot_times"] = c.resolved_snapshot_times();
    j["damping"] = c.damping;
    if (c.fault_delay_offset != 0) j["fault_delay_offset"] = c.fault_delay_offset;
    return j;
}

// Grid parameters each solver actually uses for this configuration.
Json resolved_json(const SimConfig& c) {
    Json j;
    j["characteristics"] = {{"h", 2.0 * c.ell / c.trace_n}, {"n_per_half", c.trace_n}};
    const auto field = fdtd::init_field(make_initial_data(c), c.ell, c.nodes, c.lambda,
                                        c.boundary_mode(), c.fault_delay_offset, c.damping);
    const long steps = static_cast<long>(std::ceil(c.resolved_t_final() / field.dt() - 1e-9));
    j["fdtd"] = {{"h", field.h()},
                 {"dt", field.dt()},
                 {"delay_steps", field.delay_steps()},
                 {"lambda_actual", field.lambda()},
                 {"steps", steps},
                 {"damping_coefficient", field.damping_coefficient()}};
    return j;
}

Json prediction_json(const SimConfig& c) {
    const auto p = predict(c.boundary_mode(), c.ell);
    return {{"rho", p.rho}, {"omega", optional_number(p.omega)}};
}

Json fit_json(const SimConfig& c, const EnergyTrace& trace) {
    const auto [ta, tb] = c.resolved_window();
    try {
        analysis::DecayFit fit;
        try {
            fit = analysis::fit_decay_rate(trace, ta, tb, analysis::FitMethod::Peaks);
        } catch (const AnalysisError&) {
            fit = analysis::fit_decay_rate(trace, ta, tb, analysis::FitMethod::AllPoints);
        }
        return {{"rate", std::isfinite(fit.rate) ? Json(fit.rate) : Json(nullptr)},
                {"r_squared", fit.r_squared},
                {"method", to_string(fit.method)},
                {"points", fit.points},
                {"extinct", fit.extinct},
                {"classification", to_string(fit.classification)}};
    } catch (const AnalysisError& e) {
        return {{"error", e.what()}};
    }
}

int cmd_simulate(const SimConfig& c, const cli::ToolSettings& tool) {
    validate(c);
    const fs::path dir = output_dir(tool);
    Json meta;
    meta["command"] = "simulate";
    meta["config"] = config_json(c);
    meta["resolved"] = resolved_json(c);
    meta["prediction"] = prediction_json(c);

    std::vector<std::string> written;
    auto emit = [&](const RunResult& r, const std::string& suffix) {
        write_energy(dir / ("energy" + suffix + ".csv"), r.energy);
        write_snapshots(dir / ("snapshots" + suffix + ".csv"), r.snapshots);
        written.push_back("energy" + suffix + ".csv");
        written.push_back("snapshots" + suffix + ".csv");
        meta["fit"][r.energy.solver] = fit_json(c, r.energy);
    };

    if (c.solver == SolverKind::Both) {
        emit(characteristics::run(c), "_characteristics");
        emit(fdtd::run(c), "_fdtd");
        const auto rep = analysis::compare_solvers(c, c.resolved_snapshot_times());
        meta["comparison"] = {{"times", rep.times},
                              {"l2_errors", rep.l2_errors},
                              {"max_l2_error", rep.max_l2_error},
                              {"energy_max_gap", rep.energy_max_gap}};
        std::printf("comparison: max L2 displacement error %s, max relative energy gap %s\n",
                    csv::format(rep.max_l2_error).c_str(), csv::format(rep.energy_max_gap).c_str());
    } else {
        emit(c.solver == SolverKind::Fdtd ? fdtd::run(c) : characteristics::run(c), "");
    }
    write_json(dir / "meta.json", meta);
    written.push_back("meta.json");
    for (const auto& name : written) std::printf("wrote %s\n", (dir / name).string().c_str());
    return 0;
}

int cmd_sweep(const SimConfig& c, const cli::ToolSettings& tool) {
    if (!tool.mu_list || tool.mu_list->empty()) {
        throw ConfigError("mu-list", "at least one mu value is required");
    }
    validate(c);
    const unsigned threads = thread_cap();
    const fs::path dir = output_dir(tool);
    const auto rows = run_sweep(c, *tool.mu_list, threads);

    csv::Writer w((dir / "sweep.csv").string());
    for (const char* h : {"mu", "rho_mu", "predicted_omega", "fitted_rate", "r_squared",
                          "classification", "solver", "error"}) {
        w.cell(h);
    }
    w.end_row();
    std::size_t failed = 0;
    for (const SweepRow& r : rows) {
        w.cell(r.mu);
        if (r.error.empty() || r.fit) {
            w.cell(r.prediction.rho).cell(r.prediction.omega);
        } else {
            w.cell("").cell("");
        }
        if (r.fit) {
            w.cell(r.fit->rate).cell(r.fit->r_squared);
        } else {
            w.cell("").cell("");
        }
        w.cell(r.classification ? analysis::to_string(*r.classification) : "");
        w.cell(r.solver).text(r.error).end_row();
        if (!r.error.empty()) ++failed;
    }
    w.close();

    Json meta;
    meta["command"] = "sweep";
    meta["config"] = config_json(c);
    meta["mu_list"] = *tool.mu_list;
    meta["resolved"] = resolved_json(c);
    write_json(dir / "meta.json", meta);
    std::printf("wrote %s (%zu rows, %zu failed)\n", (dir / "sweep.csv").string().c_str(),
                rows.size(), failed);
    return 0;
}

int cmd_spectrum(const cli::ToolSettings& tool) {
    std::vector<double> mus;
    if (tool.mu_list) {
        mus = *tool.mu_list;
        if (mus.empty()) throw ConfigError("mu-list", "at least one mu value is required");
    } else {
        const double lo = tool.mu_min.value_or(-1.0);
        const double hi = tool.mu_max.value_or(2.0);
        const int steps = tool.steps.value_or(301);
        if (!std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("mu-min", "must be finite");
        if (steps < 1) throw ConfigError("steps", "must be at least 1");
        if (steps == 1) {
            if (lo != hi) throw ConfigError("steps", "a single step needs mu-min == mu-max");
            mus.push_back(lo);
        } else {
            if (!(hi > lo)) throw ConfigError("mu-max", "degenerate range: need mu-max > mu-min");
            // Weighted form keeps grid points such as 0 and 1 exact.
            for (int i = 0; i < steps; ++i) {
                mus.push_back((lo * (steps - 1 - i) + hi * i) / (steps - 1));
            }
        }
    }
    const fs::path dir = output_dir(tool);
    csv::Writer w((dir / "spectrum.csv").string());
    for (const char* h : {"mu", "re1", "im1", "re2", "im2", "rho", "discriminant", "simple", "stable"}) {
        w.cell(h);
    }
    w.end_row();
    for (double mu : mus) {
        const auto r = spectral::analyze(mu);
        w.cell(mu)
            .cell(r.eigenvalues[0].real())
            .cell(r.eigenvalues[0].imag())
            .cell(r.eigenvalues[1].real())
            .cell(r.eigenvalues[1].imag())
            .cell(r.rho)
            .cell(r.discriminant)
            .cell(r.simple ? "true" : "false")
            .cell(r.stable ? "true" : "false")
            .end_row();
    }
    w.close();
    std::printf("wrote %s (%zu rows)\n", (dir / "spectrum.csv").string().c_str(), mus.size());
    return 0;
}

int cmd_verify(const SimConfig& c, const cli::ToolSettings& tool) {
    validate(c);
    const auto results = checks::run_all(c);
    const fs::path dir = output_dir(tool);
    csv::Writer w((dir / "verify.csv").string());
    w.cell("check").cell("value").cell("tolerance").cell("status").end_row();
    bool all = true;
    std::printf("%-28s %-24s %-24s %s\n", "check", "value", "tolerance", "status");
    for (const auto& r : results) {
        const char* status = r.passed ? "PASS" : "FAIL";
        std::printf("%-28s %-24s %-24s %s\n", r.name.c_str(), display(r.value).c_str(),
                    display(r.tolerance).c_str(), status);
        w.text(r.name).cell(r.value).cell(r.tolerance).cell(status).end_row();
        all = all && r.passed;
    }
    w.close();
    std::printf("%s\n", all ? "all checks passed" : "some checks FAILED");
    return all ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wave equation with delayed boundary feedback: simulation, sweeps and spectra"};
    app.require_subcommand(1);

    Flags sim_flags, sweep_flags, spec_flags, verify_flags;
    CLI::App* simulate = app.add_subcommand("simulate", "Run one experiment and write energy/snapshots");
    add_run_options(simulate, sim_flags);

    CLI::App* sweep = app.add_subcommand("sweep", "Run one experiment per mu and fit decay rates");
    add_run_options(sweep, sweep_flags);
    sweep->add_option("--mu-list", sweep_flags.mu_list, "Comma separated mu values");

    CLI::App* spectrum = app.add_subcommand("spectrum", "Eigenvalues of the round-trip matrix over a mu grid");
    spectrum->add_option("--config", spec_flags.config_path, "JSON file (flags override it)");
    spectrum->add_option("--mu-min", spec_flags.mu_min, "Lower end of the mu grid (default -1)");
    spectrum->add_option("--mu-max", spec_flags.mu_max, "Upper end of the mu grid (default 2)");
    spectrum->add_option("--steps", spec_flags.steps, "Number of grid points (default 301)");
    spectrum->add_option("--mu-list", spec_flags.mu_list, "Explicit comma separated mu values");
    spectrum->add_option("--out-dir", spec_flags.out_dir, "Output directory (default .)");

    CLI::App* verify = app.add_subcommand("verify", "Run the solver consistency checks");
    add_run_options(verify, verify_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        cli::ToolSettings tool;
        if (simulate->parsed()) return cmd_simulate(resolve(sim_flags, tool), tool);
        if (sweep->parsed()) return cmd_sweep(resolve(sweep_flags, tool), tool);
        if (spectrum->parsed()) {
            resolve(spec_flags, tool);
            return cmd_spectrum(tool);
        }
        if (verify->parsed()) return cmd_verify(resolve(verify_flags, tool), tool);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitRuntime;
}
