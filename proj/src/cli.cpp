#include "brane/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "brane/charges.hpp"
#include "brane/error.hpp"
#include "brane/harness.hpp"
#include "brane/hyper1d.hpp"
#include "brane/io.hpp"
#include "brane/stress.hpp"

namespace brane {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string snapshot;
    std::string run;
    int levels = 3;
};

json charges_json(const ChargeSet& c) {
    json L = json::array();
    for (int mu = 0; mu < c.rank(); ++mu) {
        json row = json::array();
        for (int nu = 0; nu < c.rank(); ++nu) row.push_back(c.lorentz(mu, nu));
        L.push_back(row);
    }
    return json{{"t", c.t},         {"m", c.m},         {"P", c.P}, {"L", L}, {"moments", c.moments},
                {"compact_support", c.compact_support_ok}};
}

json residuals_json(const ResidualReport& r) {
    json eq5 = json::array();
    for (const Eq5Entry& e : r.eq5) eq5.push_back({{"mu", e.mu}, {"nu", e.nu}, {"value", e.value}});
    return json{{"t", r.t},
                {"eq4_resid", r.eq4},
                {"eq5_resid", eq5},
                {"eq5_resid_max", r.eq5_max()},
                {"identity_resid", r.identity},
                {"harmonic_resid", r.harmonic},
                {"min_gamma", r.min_gamma}};
}

std::string snapshot_name(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%04zu.json", k);
    return buf;
}

std::vector<fs::path> run_snapshots(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ConfigError("run directory '" + dir.string() + "' does not exist");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("snapshot_", 0) == 0 && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

FieldState state_from(const Options& opt) {
    if (!opt.snapshot.empty()) return read_snapshot(opt.snapshot);
    if (!opt.config.empty()) return load_config(opt.config).initial_state();
    throw ConfigError("need --snapshot or --config");
}

int exit_code_for(const Error& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const FormatError*>(&e)) return kExitConfig;
    if (dynamic_cast<const DegenerateEvolution*>(&e)) return kExitDegenerate;
    if (dynamic_cast<const CflViolation*>(&e) || dynamic_cast<const RealizabilityError*>(&e)) return kExitGuard;
    return kExitFailure;
}

void report(std::ostream& err, const std::string& kind, const std::string& message, int code,
            const json& extra = json::object()) {
    json j{{"error", kind}, {"message", message}, {"exit_code", code}};
    j.update(extra);
    err << j.dump() << "\n";
}

int report_failure(std::ostream& err, const RunFailure& f) {
    const int code = f.status == RunStatus::degenerate ? kExitDegenerate : kExitGuard;
    json extra{{"t", f.t}};
    if (f.status == RunStatus::degenerate) extra["gamma"] = f.gamma;
    if (!f.location.empty()) extra["location"] = f.location;
    report(err, f.kind, f.message, code, extra);
    return code;
}

int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err) {
    const ExperimentConfig cfg = load_config(opt.config);
    const fs::path dir = opt.out;
    fs::create_directories(dir);
    write_file_atomic(dir / "config.json", config_to_json(cfg));

    const RunRecord rec = simulate(cfg.initial_state(), cfg.solver);
    for (std::size_t k = 0; k < rec.snapshots.size(); ++k) write_snapshot(rec.snapshots[k], dir / snapshot_name(k));
    if (cfg.solver.diagnostics) write_diagnostics(rec.diagnostics, cfg.m, dir / "diagnostics.csv");

    json summary{{"status", rec.ok() ? "completed" : "failed"},
                 {"dt", rec.dt},
                 {"snapshots", rec.snapshots.size()},
                 {"t_final", rec.snapshots.empty() ? 0.0 : rec.snapshots.back().t}};
    if (rec.failure) {
        summary["failure"] = {{"kind", rec.failure->kind}, {"message", rec.failure->message}, {"t", rec.failure->t},
                              {"location", rec.failure->location}};
    }
    write_file_atomic(dir / "run.json", summary.dump(2) + "\n");
    out << summary.dump() << "\n";
    return rec.failure ? report_failure(err, *rec.failure) : kExitOk;
}

int cmd_charges(const Options& opt, std::ostream& out) {
    const FieldState s = state_from(opt);
    out << charges_json(charges(s, StencilOrder::fourth)).dump() << "\n";
    return kExitOk;
}

int cmd_residuals(const Options& opt, std::ostream& out) {
    if (!opt.run.empty()) {
        const auto files = run_snapshots(opt.run);
        if (files.size() < 3) throw InsufficientSamples("residuals: need at least three snapshots in the run");
        std::vector<FieldState> states;
        for (const auto& f : files) states.push_back(read_snapshot(f));
        std::size_t reported = 0;
        for (std::size_t k = 1; k + 1 < states.size(); ++k) {
            const double h1 = states[k].t - states[k - 1].t, h2 = states[k + 1].t - states[k].t;
            if (std::abs(h1 - h2) > 1e-8 * std::max(h1, h2)) continue;
            out << residuals_json(residual_report(states[k - 1], states[k], states[k + 1], StencilOrder::fourth)).dump()
                << "\n";
            ++reported;
        }
        if (reported == 0) throw InsufficientSamples("residuals: no equally spaced snapshot triple in the run");
        return kExitOk;
    }
    const FieldState s = state_from(opt);
    const GradientField gf = gradients(s, StencilOrder::fourth);
    const StressField sf = stress_tensor(gf);
    out << json{{"t", s.t},
                {"identity_resid", identity_residual(gf, sf)},
                {"harmonic_resid", harmonic_identity_residual(gf, sf, induced_metric(gf))},
                {"mean_curvature_resid", mean_curvature_residual(s, StencilOrder::fourth)},
                {"min_gamma", gf.gamma.min()}}
               .dump()
        << "\n";
    return kExitOk;
}

int cmd_characteristics(const Options& opt, std::ostream& out) {
    const FieldState s = state_from(opt);
    json j{{"t", s.t}, {"m", s.grid.m()}, {"max_speed", max_characteristic_speed(s)}};
    if (s.grid.m() == 1) {
        const CharacteristicData cd = riemann_invariants(to_primitive(s, StencilOrder::fourth));
        double gap = INFINITY;
        for (std::size_t i = 0; i < s.grid.size(); ++i) gap = std::min(gap, cd.lambda_plus[i] - cd.lambda_minus[i]);
        j["lambda_plus"] = {{"min", cd.lambda_plus.min()}, {"max", cd.lambda_plus.max()}};
        j["lambda_minus"] = {{"min", cd.lambda_minus.min()}, {"max", cd.lambda_minus.max()}};
        j["min_gap"] = gap;
        j["r_plus"] = {{"min", cd.r_plus.min()}, {"max", cd.r_plus.max()}};
        j["r_minus"] = {{"min", cd.r_minus.min()}, {"max", cd.r_minus.max()}};
    }
    out << j.dump() << "\n";
    return kExitOk;
}

int cmd_converge(const Options& opt, std::ostream& out) {
    const ExperimentConfig cfg = load_config(opt.config);
    out << convergence_study(cfg, opt.levels).format();
    return kExitOk;
}

int cmd_compare(const Options& opt, std::ostream& out) {
    ExperimentConfig cfg = load_config(opt.config);
    if (cfg.solver.scheme == Scheme::mol4_rk4) cfg.solver.scheme = Scheme::richtmyer;
    const CrossValidationStudy st = cross_validate_study(cfg.grid(), cfg.initial, cfg.solver, opt.levels);
    out << json{{"scheme", to_string(cfg.solver.scheme)}, {"n", st.n}, {"max_diff", st.max_diff}, {"ratio", st.ratio}}
               .dump()
        << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Born-Infeld brane evolution and diagnostics"};
    app.require_subcommand(1, 1);
    Options opt;

    auto* simulate_cmd = app.add_subcommand("simulate", "evolve a configured experiment");
    simulate_cmd->add_option("--config", opt.config, "experiment config JSON")->required();
    simulate_cmd->add_option("--out", opt.out, "output directory")->required();

    auto* charges_cmd = app.add_subcommand("charges", "conserved charges of one state");
    charges_cmd->add_option("--snapshot", opt.snapshot, "snapshot JSON");
    charges_cmd->add_option("--config", opt.config, "use the configured initial data");

    auto* residuals_cmd = app.add_subcommand("residuals", "conservation-law residuals");
    residuals_cmd->add_option("--run", opt.run, "run directory written by simulate");
    residuals_cmd->add_option("--snapshot", opt.snapshot, "single snapshot JSON");
    residuals_cmd->add_option("--config", opt.config, "use the configured initial data");

    auto* chars_cmd = app.add_subcommand("characteristics", "characteristic speeds and Riemann invariants");
    chars_cmd->add_option("--snapshot", opt.snapshot, "snapshot JSON");
    chars_cmd->add_option("--config", opt.config, "use the configured initial data");

    auto* converge_cmd = app.add_subcommand("converge", "grid refinement study");
    converge_cmd->add_option("--config", opt.config, "experiment config JSON")->required();
    converge_cmd->add_option("--levels", opt.levels, "number of grid levels")->check(CLI::Range(2, 12));

    auto* compare_cmd = app.add_subcommand("compare", "second-order vs flux-form solver (m=1)");
    compare_cmd->add_option("--config", opt.config, "experiment config JSON")->required();
    compare_cmd->add_option("--levels", opt.levels, "number of grid levels")->check(CLI::Range(1, 12));

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        report(err, "UsageError", e.what(), kExitConfig);
        return kExitConfig;
    }

    try {
        if (*simulate_cmd) return cmd_simulate(opt, out, err);
        if (*charges_cmd) return cmd_charges(opt, out);
        if (*residuals_cmd) return cmd_residuals(opt, out);
        if (*chars_cmd) return cmd_characteristics(opt, out);
        if (*converge_cmd) return cmd_converge(opt, out);
        if (*compare_cmd) return cmd_compare(opt, out);
    } catch (const DegenerateEvolution& e) {
        json extra{{"t", e.t()}, {"gamma", e.gamma()}};
        if (!e.location().empty()) extra["location"] = e.location();
        report(err, e.kind(), e.what(), kExitDegenerate, extra);
        return kExitDegenerate;
    } catch (const Error& e) {
        const int code = exit_code_for(e);
        report(err, e.kind(), e.what(), code);
        return code;
    } catch (const std::exception& e) {
        report(err, "InternalError", e.what(), kExitFailure);
        return kExitFailure;
    }
    return kExitFailure;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace brane
