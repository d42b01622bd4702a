// halo: command-line front end for the opponent-process model.
//
//   halo simulate   trajectory CSV
//   halo bfra       total utility versus behavioral frequency
//   halo bcra       total utility versus behavior count
//   halo sweep      pairwise value-space map
//   halo regulate   regulator cycles over a candidate file
//
// Exit codes: 0 success, 1 runtime failure (integration, I/O), 2 invalid
// flags or input files.

#include <cmath>
#include <cstdlib>
#include <functional>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "halo/halo.hpp"

namespace fs = std::filesystem;

namespace {

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void add_param_flags(CLI::App* app, halo::ModelParams& p) {
    for (const auto& f : halo::kParamFields) {
        app->add_option("--" + std::string(f.flag), p.*(f.member), std::string(f.name))
            ->capture_default_str()
            ->group("Model parameters");
    }
}

void add_sim_flags(CLI::App* app, halo::SimConfig& c) {
    app->add_option("--t-sim", c.t_sim, "simulation horizon (min)")->capture_default_str()->group("Simulation");
    app->add_option("--dt-out", c.dt_out, "output grid spacing (min)")->capture_default_str()->group("Simulation");
    app->add_option("--abs-tol", c.abs_tol, "integrator absolute tolerance")->capture_default_str()->group("Simulation");
    app->add_option("--rel-tol", c.rel_tol, "integrator relative tolerance")->capture_default_str()->group("Simulation");
}

struct OutputFlags {
    std::string out;
    std::string plot;
    std::string config;
};

void add_output_flags(CLI::App* app, OutputFlags& o, const std::string& default_name) {
    app->add_option("--out", o.out,
                    "output file, '-' for stdout (default: " + default_name + " in $HALO_OUT_DIR or the working directory)")
        ->group("Output");
    app->add_option("--plot", o.plot, "also write an SVG plot to this path")->group("Output");
    app->add_option("--config", o.config, "key=value file of flag defaults; command-line flags win")->group("Output");
}

// Re-run a failed validation per field so the message names the flag.
void check_params(const halo::ModelParams& p) {
    for (const auto& f : halo::kParamFields) {
        halo::ModelParams probe{};
        probe.*(f.member) = p.*(f.member);
        try {
            halo::validate(probe);
        } catch (const halo::InvalidInput& e) {
            throw Usage("--" + std::string(f.flag) + ": " + e.what());
        }
    }
}

void check_config(const halo::SimConfig& c) {
    auto need = [](bool ok, const char* flag, const char* what) {
        if (!ok) throw Usage(std::string(flag) + ": " + what);
    };
    need(std::isfinite(c.t_sim) && c.t_sim > 0.0, "--t-sim", "must be > 0");
    need(std::isfinite(c.dt_out) && c.dt_out > 0.0, "--dt-out", "must be > 0");
    need(c.abs_tol > 0.0 && std::isfinite(c.abs_tol), "--abs-tol", "must be > 0");
    need(c.rel_tol > 0.0 && std::isfinite(c.rel_tol), "--rel-tol", "must be > 0");
    try {
        halo::validate(c);
    } catch (const halo::InvalidInput& e) {
        throw Usage(std::string("--t-sim/--dt-out: ") + e.what());
    }
}

void need_positive(double v, const char* flag) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Usage(std::string(flag) + ": must be finite and > 0");
}

void need_nonnegative(double v, const char* flag) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Usage(std::string(flag) + ": must be finite and >= 0");
}

// Applies key=value lines to options the command line left unset.
void apply_config(CLI::App* app, const std::string& path) {
    if (path.empty()) return;
    std::ifstream is(path);
    if (!is) throw Usage("--config: cannot read " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = line.substr(0, line.find('#'));
        const auto eq = line.find('=');
        std::string key = CLI::detail::trim_copy(line.substr(0, eq));
        if (key.empty()) continue;
        if (eq == std::string::npos) {
            throw Usage(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        std::string value = CLI::detail::trim_copy(line.substr(eq + 1));
        for (auto& ch : key) {
            ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            if (ch == '_') ch = '-';
        }
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        if (key == "config") throw Usage(path + ":" + std::to_string(lineno) + ": nested config");
        CLI::Option* opt = app->get_option_no_throw("--" + key);
        if (!opt) throw Usage(path + ":" + std::to_string(lineno) + ": unknown option '" + key + "'");
        if (opt->count() > 0) continue;
        try {
            opt->add_result(value);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw Usage(path + ":" + std::to_string(lineno) + ": --" + key + ": " + e.what());
        }
    }
}

fs::path default_dir() {
    const char* env = std::getenv("HALO_OUT_DIR");
    return env && *env ? fs::path(env) : fs::current_path();
}

// Opens the data output. An empty flag means <default_name> in the default
// directory; '-' means stdout.
class Output {
public:
    Output(const std::string& flag, const std::string& default_name) {
        if (flag == "-") return;
        path_ = flag.empty() ? default_dir() / default_name : fs::path(flag);
        if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
        file_ = std::make_unique<std::ofstream>(path_, std::ios::binary | std::ios::trunc);
        if (!*file_) throw halo::Error("cannot write " + path_.string());
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    void close() {
        if (!file_) return;
        file_->close();
        if (!*file_) throw halo::Error("write failed for " + path_.string());
        std::cerr << "wrote " << path_.string() << '\n';
    }

private:
    fs::path path_;
    std::unique_ptr<std::ofstream> file_;
};

void write_plot(const std::string& path, const std::function<void(std::ostream&)>& draw) {
    if (path.empty()) return;
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw halo::Error("cannot write " + path);
    draw(os);
    if (!os) throw halo::Error("write failed for " + path);
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string short_num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// ---- simulate -------------------------------------------------------------

struct SimulateCmd {
    halo::ModelParams params;
    halo::SimConfig config;
    halo::DoseSchedule schedule = halo::DoseSchedule::single();
    bool no_doses = false;
    OutputFlags out;

    void attach(CLI::App* app) {
        add_param_flags(app, params);
        add_sim_flags(app, config);
        app->add_option("--potency", schedule.potency, "amount per behavioral dose (D0)")->capture_default_str()->group("Dosing");
        app->add_option("--first-dose", schedule.first_dose_time, "time of the first dose (min)")->capture_default_str()->group("Dosing");
        app->add_option("--ii", schedule.interdose_interval, "interdose interval (min)")->capture_default_str()->group("Dosing");
        app->add_option("--addl", schedule.additional_doses, "additional doses after the first")->capture_default_str()->group("Dosing");
        app->add_flag("--no-doses", no_doses, "simulate with no doses at all")->group("Dosing");
        add_output_flags(app, out, "simulate.csv");
    }

    int run() {
        check_params(params);
        check_config(config);
        need_nonnegative(schedule.potency, "--potency");
        need_nonnegative(schedule.first_dose_time, "--first-dose");
        need_positive(schedule.interdose_interval, "--ii");
        if (schedule.additional_doses < 0) throw Usage("--addl: must be >= 0");
        if (no_doses) schedule.potency = 0.0;

        const halo::Trajectory traj = halo::simulate(params, schedule, config);
        Output o(out.out, "simulate.csv");
        auto& os = o.stream();
        os << "time";
        for (auto name : halo::kCompartmentNames) os << ',' << name;
        os << '\n';
        const auto t = traj.time();
        for (std::size_t i = 0; i < traj.size(); ++i) {
            os << num(t[i]);
            for (std::size_t c = 0; c < halo::kCompartments; ++c) {
                os << ',' << num(traj.series(static_cast<halo::Compartment>(c))[i]);
            }
            os << '\n';
        }
        o.close();

        write_plot(out.plot, [&](std::ostream& ps) {
            const auto split = halo::split_processes(traj);
            halo::svg::line_plot(ps, "Hedonic state", "time (min)", t,
                                 {{"H", traj.series(halo::Compartment::H), "#08306B", false},
                                  {"a-process", split.a, "#238B45", true},
                                  {"b-process", split.b, "#CB181D", true}});
        });
        return 0;
    }
};

// ---- bfra / bcra ----------------------------------------------------------

void print_summary(const halo::HormeticSummary& s, const std::optional<double>& analytic) {
    std::cout << "shape=" << halo::to_string(s.shape) << " apex_x=" << short_num(s.apex_x)
              << " apex_tu=" << short_num(s.apex_tu);
    if (s.noael_x) std::cout << " noael_x=" << short_num(*s.noael_x);
    if (analytic) std::cout << " analytic_noael_x=" << short_num(*analytic);
    std::cout << " mu_initial=" << short_num(s.mu_initial) << '\n';
}

struct BfraCmd {
    halo::ModelParams params;
    halo::SimConfig config;
    halo::BfraOptions opt;
    OutputFlags out;

    void attach(CLI::App* app) {
        add_param_flags(app, params);
        add_sim_flags(app, config);
        app->add_option("--potency", opt.potency, "amount per behavioral dose (D0)")->capture_default_str()->group("Analysis");
        app->add_option("--freq-step", opt.freq_step, "frequency grid step (1/min)")->capture_default_str()->group("Analysis");
        app->add_option("--freq-max", opt.freq_max, "largest frequency on the grid (1/min)")->capture_default_str()->group("Analysis");
        app->add_option("--addl", opt.burst_addl, "additional doses per burst (default fills the horizon)")
            ->capture_default_str()
            ->group("Analysis");
        add_output_flags(app, out, "bfra.csv");
    }

    int run() {
        check_params(params);
        check_config(config);
        need_nonnegative(opt.potency, "--potency");
        need_positive(opt.freq_step, "--freq-step");
        need_positive(opt.freq_max, "--freq-max");
        if (opt.freq_max < opt.freq_step) throw Usage("--freq-max: must be >= --freq-step");
        if (opt.burst_addl < 0) throw Usage("--addl: must be >= 0");

        const halo::ResponseCurve curve = halo::bfra(params, opt, config);
        const halo::HormeticSummary s = halo::summarize(curve);
        if (!curve.h_steady_state) {
            std::cerr << "warning: analytic steady state needs k_apd = k_bpd = 1; omitting tu_analytic\n";
        }

        Output o(out.out, "bfra.csv");
        auto& os = o.stream();
        os << "frequency,tu_simulated" << (curve.h_steady_state ? ",tu_analytic" : "") << '\n';
        std::vector<double> tu_analytic;
        for (std::size_t i = 0; i < curve.x.size(); ++i) {
            os << num(curve.x[i]) << ',' << num(curve.tu_simulated[i]);
            if (curve.h_steady_state) {
                tu_analytic.push_back(curve.t_sim() * (*curve.h_steady_state)[i]);
                os << ',' << num(tu_analytic.back());
            }
            os << '\n';
        }
        o.close();
        print_summary(s, halo::analytic_noael(curve));

        write_plot(out.plot, [&](std::ostream& ps) {
            std::vector<halo::svg::Series> series{{"simulated", curve.tu_simulated, "#08306B", false}};
            if (!tu_analytic.empty()) series.push_back({"analytic steady state", tu_analytic, "#CB181D", true});
            halo::svg::line_plot(ps, "Total utility vs behavioral frequency", "frequency (1/min)", curve.x, series);
        });
        return 0;
    }
};

struct BcraCmd {
    halo::ModelParams params;
    halo::SimConfig config;
    halo::BcraOptions opt;
    OutputFlags out;

    void attach(CLI::App* app) {
        add_param_flags(app, params);
        add_sim_flags(app, config);
        app->add_option("--potency", opt.potency, "amount per behavioral dose (D0)")->capture_default_str()->group("Analysis");
        app->add_option("--ii", opt.interdose_interval, "interdose interval (min)")->capture_default_str()->group("Analysis");
        app->add_option("--count-max", opt.count_max, "largest behavior count")->capture_default_str()->group("Analysis");
        add_output_flags(app, out, "bcra.csv");
    }

    int run() {
        check_params(params);
        check_config(config);
        need_nonnegative(opt.potency, "--potency");
        need_positive(opt.interdose_interval, "--ii");
        if (opt.count_max < 2) throw Usage("--count-max: must be >= 2");

        const halo::ResponseCurve curve = halo::bcra(params, opt, config);
        const halo::HormeticSummary s = halo::summarize(curve);

        Output o(out.out, "bcra.csv");
        auto& os = o.stream();
        os << "count,tu_simulated\n";
        for (std::size_t i = 0; i < curve.x.size(); ++i) os << num(curve.x[i]) << ',' << num(curve.tu_simulated[i]) << '\n';
        o.close();
        print_summary(s, std::nullopt);

        write_plot(out.plot, [&](std::ostream& ps) {
            halo::svg::line_plot(ps, "Total utility vs behavior count", "count", curve.x,
                                 {{"simulated", curve.tu_simulated, "#08306B", false}});
        });
        return 0;
    }
};

// ---- shared analysis flags for sweep and regulate -------------------------

struct AnalysisFlags {
    std::string kind = "bfra";
    halo::AnalysisSettings settings;

    void attach(CLI::App* app) {
        app->add_option("--analysis", kind, "response analysis per behavior")
            ->check(CLI::IsMember({"bfra", "bcra"}))
            ->capture_default_str()
            ->group("Analysis");
        add_sim_flags(app, settings.config);
        app->add_option("--potency", settings.potency, "amount per behavioral dose (D0)")->capture_default_str()->group("Analysis");
        app->add_option("--freq-step", settings.bfra.freq_step, "bfra frequency grid step (1/min)")->capture_default_str()->group("Analysis");
        app->add_option("--freq-max", settings.bfra.freq_max, "bfra largest frequency (1/min)")->capture_default_str()->group("Analysis");
        app->add_option("--addl", settings.bfra.burst_addl, "bfra additional doses per burst")->capture_default_str()->group("Analysis");
        app->add_option("--ii", settings.bcra.interdose_interval, "bcra interdose interval (min)")->capture_default_str()->group("Analysis");
        app->add_option("--count-max", settings.bcra.count_max, "bcra largest behavior count")->capture_default_str()->group("Analysis");
    }

    void check() {
        settings.kind = halo::analysis_kind_from_string(kind);
        check_config(settings.config);
        need_nonnegative(settings.potency, "--potency");
        need_positive(settings.bfra.freq_step, "--freq-step");
        need_positive(settings.bfra.freq_max, "--freq-max");
        if (settings.bfra.freq_max < settings.bfra.freq_step) throw Usage("--freq-max: must be >= --freq-step");
        if (settings.bfra.burst_addl < 0) throw Usage("--addl: must be >= 0");
        need_positive(settings.bcra.interdose_interval, "--ii");
        if (settings.bcra.count_max < 2) throw Usage("--count-max: must be >= 2");
    }
};

// ---- sweep ----------------------------------------------------------------

struct SweepCmd {
    halo::SweepSpec spec;
    AnalysisFlags analysis;
    OutputFlags out;

    void attach(CLI::App* app) {
        spec.param_x = "k_H";
        spec.param_y = "EC50_b";
        spec.x_range = {0.5, 1.5, 20};
        spec.y_range = {4.5, 13.5, 20};
        add_param_flags(app, spec.base);
        analysis.attach(app);
        app->add_option("--x-param", spec.param_x, "parameter on the x axis")->capture_default_str()->group("Sweep");
        app->add_option("--x-min", spec.x_range.min, "first value on the x axis")->capture_default_str()->group("Sweep");
        app->add_option("--x-max", spec.x_range.max, "last value on the x axis")->capture_default_str()->group("Sweep");
        app->add_option("--x-count", spec.x_range.count, "cells on the x axis")->capture_default_str()->group("Sweep");
        app->add_option("--y-param", spec.param_y, "parameter on the y axis")->capture_default_str()->group("Sweep");
        app->add_option("--y-min", spec.y_range.min, "first value on the y axis")->capture_default_str()->group("Sweep");
        app->add_option("--y-max", spec.y_range.max, "last value on the y axis")->capture_default_str()->group("Sweep");
        app->add_option("--y-count", spec.y_range.count, "cells on the y axis")->capture_default_str()->group("Sweep");
        add_output_flags(app, out, "sweep.csv");
    }

    int run() {
        check_params(spec.base);
        analysis.check();
        spec.analysis = analysis.settings;
        try {
            halo::validate(spec);
        } catch (const halo::InvalidInput& e) {
            throw Usage(std::string("sweep: ") + e.what());
        }
        const halo::ValueSpaceMap map = halo::sweep(spec);

        Output o(out.out, "sweep.csv");
        halo::write_csv(o.stream(), map);
        o.close();
        const auto unsafe = halo::flag_unsafe(map);
        std::size_t failed = 0;
        for (const auto& c : map.cells) failed += c.failed() ? 1 : 0;
        std::cout << "cells=" << map.cells.size() << " unsafe=" << unsafe.size() << " failed=" << failed << '\n';
        for (const auto& c : map.cells) {
            if (c.failed()) std::cerr << "cell (" << c.ix << ',' << c.iy << ") failed: " << c.error << '\n';
        }

        write_plot(out.plot, [&](std::ostream& ps) { halo::svg::heatmap(ps, map); });
        return 0;
    }
};

// ---- regulate -------------------------------------------------------------

std::vector<halo::CandidateAction> read_candidate_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Usage("cannot read " + path);
    try {
        return halo::read_candidates(is);
    } catch (const halo::ParseError& e) {
        throw Usage(path + ": " + e.what());
    }
}

std::optional<halo::ModelParams> prompt_params(const halo::EscalationRequest& req) {
    std::cerr << "escalation: no close match for '" << req.candidate << "'";
    if (req.nearest_name) {
        std::cerr << " (nearest '" << *req.nearest_name << "' at " << short_num(*req.nearest_distance)
                  << ", threshold " << short_num(req.threshold) << ")";
    }
    std::cerr << "\nenter parameters as key=value pairs (empty line skips): " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line)) return std::nullopt;
    auto cand = halo::parse_candidate_line(req.candidate + " " + line, 1);
    if (!cand || !cand->explicit_params) return std::nullopt;
    return cand->explicit_params;
}

struct RegulateCmd {
    std::string db_path;
    std::string candidates_path;
    std::string policy_path;
    std::string log_path;
    std::int64_t cycles = 1;
    bool interactive = false;
    halo::RegulatorConfig cfg;
    AnalysisFlags analysis;
    std::string config_path;

    void attach(CLI::App* app) {
        app->add_option("--db", db_path, "behavior database file (created when missing)")->required()->group("Regulator");
        app->add_option("--candidates", candidates_path, "candidate actions, one per line")->required()->group("Regulator");
        app->add_option("--cycles", cycles, "number of cycles to run")->capture_default_str()->group("Regulator");
        app->add_option("--policy", policy_path, "escalation answers, one 'name key=value ...' per line")->group("Regulator");
        app->add_flag("--interactive", interactive, "answer escalations at a prompt")->group("Regulator");
        app->add_option("--log", log_path, "decision log to append to (default: decisions.jsonl in $HALO_OUT_DIR)")
            ->group("Regulator");
        app->add_option("--ood-threshold", cfg.ood_threshold, "distance beyond which a candidate escalates")
            ->capture_default_str()
            ->group("Regulator");
        app->add_option("--uncertainty-factor", cfg.uncertainty_factor, "fraction of the hormetic limit allowed")
            ->capture_default_str()
            ->group("Regulator");
        analysis.attach(app);
        app->add_option("--config", config_path, "key=value file of flag defaults; command-line flags win")->group("Output");
    }

    int run() {
        analysis.check();
        cfg.analysis = analysis.settings;
        if (cycles < 0) throw Usage("--cycles: must be >= 0");
        need_nonnegative(cfg.ood_threshold, "--ood-threshold");
        if (!(cfg.uncertainty_factor > 0.0 && cfg.uncertainty_factor <= 1.0)) {
            throw Usage("--uncertainty-factor: must be in (0, 1]");
        }

        halo::RegulatorState state;
        state.config = cfg;
        if (fs::exists(db_path)) {
            try {
                state.db = halo::load_db(db_path);
            } catch (const halo::ParseError& e) {
                throw Usage(db_path + ": " + e.what());
            }
        }
        const auto candidates = read_candidate_file(candidates_path);

        std::map<std::string, halo::ModelParams> policy;
        if (!policy_path.empty()) {
            for (auto& c : read_candidate_file(policy_path)) {
                if (!c.explicit_params) throw Usage(policy_path + ": entry '" + c.name + "' has no parameters");
                policy[c.name] = *c.explicit_params;
            }
        }
        halo::EscalationHandler escalate = [&](const halo::EscalationRequest& req) -> std::optional<halo::ModelParams> {
            if (auto it = policy.find(req.candidate); it != policy.end()) return it->second;
            if (interactive) return prompt_params(req);
            return std::nullopt;
        };

        const fs::path log_file = log_path.empty() ? default_dir() / "decisions.jsonl" : fs::path(log_path);
        if (log_file.has_parent_path()) fs::create_directories(log_file.parent_path());
        std::ofstream log(log_file, std::ios::binary | std::ios::app);
        if (!log) throw halo::Error("cannot append to " + log_file.string());

        for (std::int64_t i = 0; i < cycles; ++i) {
            const halo::CycleLog entry = halo::run_cycle(state, candidates, escalate);
            halo::append_log(log, entry);
            log.flush();
            std::cout << "cycle " << entry.cycle << ": ";
            if (entry.chosen) {
                std::cout << "chose " << *entry.chosen << ", executed " << entry.doses_executed << " doses";
                if (entry.target_rate) std::cout << " (target " << short_num(*entry.target_rate) << ")";
            } else {
                std::cout << entry.reason;
            }
            for (const auto& d : entry.candidates) {
                if (d.status == "skipped") std::cout << "; skipped " << d.name << " (" << d.reason << ")";
            }
            std::cout << '\n';
        }
        if (!log) throw halo::Error("write failed for " + log_file.string());
        halo::save_db(state.db, db_path);
        std::cerr << "wrote " << db_path << " (" << state.db.size() << " records), log " << log_file.string() << '\n';
        return 0;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Opponent-process hedonic model: simulation, response analysis, value space, regulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "halo 1.0");

    SimulateCmd simulate;
    BfraCmd bfra;
    BcraCmd bcra;
    SweepCmd sweep;
    RegulateCmd regulate;

    auto* s_sim = app.add_subcommand("simulate", "write the compartment trajectory as CSV");
    auto* s_bfra = app.add_subcommand("bfra", "total utility over a behavioral frequency grid");
    auto* s_bcra = app.add_subcommand("bcra", "total utility over behavior counts");
    auto* s_sweep = app.add_subcommand("sweep", "apex TU over a grid of two parameters");
    auto* s_reg = app.add_subcommand("regulate", "run regulator cycles over candidate actions");
    simulate.attach(s_sim);
    bfra.attach(s_bfra);
    bcra.attach(s_bcra);
    sweep.attach(s_sweep);
    regulate.attach(s_reg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*s_sim) {
            apply_config(s_sim, simulate.out.config);
            return simulate.run();
        }
        if (*s_bfra) {
            apply_config(s_bfra, bfra.out.config);
            return bfra.run();
        }
        if (*s_bcra) {
            apply_config(s_bcra, bcra.out.config);
            return bcra.run();
        }
        if (*s_sweep) {
            apply_config(s_sweep, sweep.out.config);
            return sweep.run();
        }
        apply_config(s_reg, regulate.config_path);
        return regulate.run();
    } catch (const Usage& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const halo::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const halo::IntegrationError& e) {
        std::cerr << "integration failed: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
