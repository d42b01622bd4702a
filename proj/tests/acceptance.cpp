// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Supplementary lines are informational and never affect the exit code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "halo/halo.hpp"

using namespace halo;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
    std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

void note(const std::string& line) {
    std::printf("    %s\n", line.c_str());
    std::fflush(stdout);
}

void supplementary(const std::string& title, bool ok, const std::string& detail) {
    std::printf("INFO supplementary %s [%s]: %s\n", title.c_str(), ok ? "holds" : "does not hold", detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string opt(const std::optional<double>& v) { return v ? fmt("%.5g", *v) : "none"; }

bool within(const std::optional<double>& v, double target, double tol) {
    return v && std::abs(*v - target) <= tol;
}

ModelParams with_ec50_b(double v) {
    ModelParams p;
    p.ec50_b = v;
    return p;
}

// Criterion 1 grid: step 0.0002 up to 0.06, about 300 simulations.
const BfraOptions kFineGrid{1.0, 0.0002, 0.06, kFillHorizon};

std::string describe(const HormeticSummary& s) {
    std::ostringstream os;
    os << "shape=" << to_string(s.shape) << " apex_x=" << fmt("%.5g", s.apex_x) << " noael_x=" << opt(s.noael_x);
    return os.str();
}

void criterion_1() {
    const auto t0 = Clock::now();
    const auto curve = bfra(with_ec50_b(9.2), kFineGrid, SimConfig{});
    const auto s = summarize(curve);
    const double secs = seconds_since(t0);
    const bool ok = s.shape == Shape::hormetic && within(s.apex_x, 0.015, 0.002) && within(s.noael_x, 0.025, 0.003) &&
                    secs < 120.0;
    report(1, "frequency response at EC50_b=9.2", ok,
           describe(s) + " (want apex 0.015+-0.002, crossing 0.025+-0.003), " + std::to_string(curve.x.size()) +
               " simulations in " + fmt("%.1f s", secs));

    const auto swapped = summarize(bfra(with_ec50_b(12.4), kFineGrid, SimConfig{}));
    const auto analytic = analytic_noael(bfra(with_ec50_b(12.4), kFineGrid, SimConfig{}));
    supplementary("frequency response at EC50_b=12.4",
                  swapped.shape == Shape::hormetic && within(swapped.apex_x, 0.015, 0.002) &&
                      within(swapped.noael_x, 0.025, 0.003),
                  describe(swapped) + " analytic_noael_x=" + opt(analytic));
}

void criterion_2() {
    const auto t0 = Clock::now();
    const BcraOptions opt_counts{1.0, 50.0, 30};
    const auto s = summarize(bcra(with_ec50_b(12.4), opt_counts, SimConfig{}));
    const double secs = seconds_since(t0);
    const bool ok = s.shape == Shape::hormetic && within(s.apex_x, 5.0, 1.0) && within(s.noael_x, 12.0, 1.0) &&
                    secs < 30.0;
    report(2, "count response at EC50_b=12.4, ii=50", ok,
           describe(s) + " (want apex 5+-1, crossing 12+-1), " + fmt("%.1f s", secs));

    const auto swapped = summarize(bcra(with_ec50_b(9.2), opt_counts, SimConfig{}));
    supplementary("count response at EC50_b=9.2, ii=50",
                  swapped.shape == Shape::hormetic && within(swapped.apex_x, 5.0, 1.0) &&
                      within(swapped.noael_x, 12.0, 1.0),
                  describe(swapped));
}

// Mean of H over the last `span` minutes, trapezoid rule.
double tail_mean(const Trajectory& traj, double span) {
    const auto h = traj.series(Compartment::H);
    const auto& t = traj.time();
    const double start = t.back() - span;
    double area = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i - 1] < start - 1e-9) continue;
        area += 0.5 * (h[i] + h[i - 1]) * (t[i] - t[i - 1]);
    }
    return area / span;
}

void criterion_3() {
    const ModelParams p;
    const SimConfig cfg{20000.0, 1.0, 1e-8, 1e-6};
    const double expected = steady_state_h(p, 0.01);
    const double measured = tail_mean(simulate(p, DoseSchedule::at_frequency(0.01), cfg), 500.0);
    const double rel = std::abs(measured - expected) / std::abs(expected);
    report(3, "steady state at f=0.01", rel <= 0.02 && std::abs(expected + 0.0149) < 5e-7,
           "formula " + fmt("%.6f", expected) + ", simulated tail mean " + fmt("%.6f", measured) + ", relative error " +
               fmt("%.3f", rel) + " (want <= 0.02)");

    // Same dose rate delivered as smaller, more frequent doses.
    const double fast = tail_mean(simulate(p, DoseSchedule::at_frequency(0.1, 0.1), cfg), 500.0);
    const double rel_fast = std::abs(fast - expected) / std::abs(expected);
    supplementary("steady state at f=0.1 with potency 0.1 (same dose rate)", rel_fast <= 0.02,
                  "simulated tail mean " + fmt("%.6f", fast) + ", relative error " + fmt("%.4f", rel_fast));
}

void criterion_4() {
    const auto curve = bfra(with_ec50_b(9.2), kFineGrid, SimConfig{});
    bool ok = curve.h_steady_state.has_value();
    double worst = std::numeric_limits<double>::infinity();
    double worst_x = 0.0;
    if (ok) {
        for (std::size_t i = 0; i < curve.x.size(); ++i) {
            const double gap = curve.tu_simulated[i] - curve.t_sim() * (*curve.h_steady_state)[i];
            if (gap < worst) {
                worst = gap;
                worst_x = curve.x[i];
            }
        }
        ok = worst >= 0.0;
    }
    report(4, "simulated utility above scaled steady state", ok,
           "smallest tu_simulated - t_sim*h_ss = " + fmt("%.4g", worst) + " at f=" + fmt("%.4g", worst_x) + " over " +
               std::to_string(curve.x.size()) + " frequencies");
}

// Composite Simpson on a uniform grid with an even number of intervals.
double simpson(std::span<const double> v, double h, std::size_t n) {
    double s = v[0] + v[n];
    for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * v[i];
    return s * h / 3.0;
}

bool mass_balance(std::mt19937_64& rng, std::string& detail) {
    const SimConfig cfg{1000.0, 0.05, 1e-8, 1e-6};
    std::uniform_real_distribution<double> k(0.002, 0.2), potency(0.1, 5.0), first(0.0, 100.0), ii(2.0, 200.0),
        dur(0.5, 20.0);
    double worst = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
        ModelParams p;
        p.k_apk = k(rng);
        p.k_bpk = k(rng);
        p.infusion_duration = dur(rng);
        const DoseSchedule s{potency(rng), first(rng), ii(rng), 40};
        const auto traj = simulate(p, s, cfg);
        const auto dose = traj.series(Compartment::Dose);
        const auto apk = traj.series(Compartment::APk);
        const auto bpk = traj.series(Compartment::BPk);
        std::vector<double> elim(bpk.size());
        for (std::size_t i = 0; i < bpk.size(); ++i) elim[i] = p.k_bpk * bpk[i];
        for (std::size_t i = 200; i < traj.size(); i += 200) {
            const double given = administered(s, p, traj.time()[i], cfg.t_sim);
            if (given == 0.0) continue;
            const double held = dose[i] + apk[i] + bpk[i] + simpson(elim, cfg.dt_out, i);
            worst = std::max(worst, std::abs(given - held) / given);
        }
    }
    detail = "mass balance worst relative residual " + fmt("%.3g", worst) + " (limit " + fmt("%.0e", 10 * cfg.rel_tol) + ")";
    return worst <= 10.0 * cfg.rel_tol;
}

bool pd_scaling(std::string& detail) {
    ModelParams p;
    p.e0_a = 0.05;
    p.e0_b = 0.02;
    ModelParams q = p;
    const double c = 2.5;
    q.e0_a *= c;
    q.emax_a *= c;
    q.e0_b *= c;
    q.emax_b *= c;
    const SimConfig cfg{2000.0, 1.0, 1e-10, 1e-9};
    const auto s = DoseSchedule::at_frequency(0.015);
    const auto a = simulate(p, s, cfg);
    const auto b = simulate(q, s, cfg);
    double worst = 0.0;
    for (auto comp : {Compartment::APd, Compartment::BPd, Compartment::H}) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double want = c * a.series(comp)[i];
            worst = std::max(worst, std::abs(b.series(comp)[i] - want) / (1.0 + std::abs(want)));
        }
    }
    for (auto comp : {Compartment::Dose, Compartment::APk, Compartment::BPk}) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            worst = std::max(worst, std::abs(b.series(comp)[i] - a.series(comp)[i]) / (1.0 + std::abs(a.series(comp)[i])));
        }
    }
    detail = "PD scaling by 2.5 worst scaled deviation " + fmt("%.3g", worst);
    return worst <= 1e-7;
}

bool saturation(std::mt19937_64& rng, std::string& detail) {
    std::uniform_real_distribution<double> emax(0.1, 5.0), kh(0.2, 3.0), ec50(0.5, 20.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        ModelParams p;
        p.emax_a = emax(rng);
        p.emax_b = emax(rng);
        p.ec50_a = ec50(rng);
        p.ec50_b = ec50(rng);
        p.k_h = kh(rng);
        const double limit = (p.emax_a - p.emax_b) / p.k_h;
        worst = std::max(worst, std::abs(steady_state_h(p, 1e9) - limit));
    }
    detail = "saturation worst |h_ss(1e9) - (Emax_a-Emax_b)/k_H| " + fmt("%.3g", worst);
    return worst <= 1e-6;
}

bool determinism(std::string& detail) {
    const auto p = with_ec50_b(9.2);
    const auto s = DoseSchedule::at_frequency(0.015);
    const bool traj_same = simulate(p, s, SimConfig{}) == simulate(p, s, SimConfig{});
    const BfraOptions grid{1.0, 0.002, 0.04, kFillHorizon};
    const auto c1 = bfra(p, grid, SimConfig{});
    const auto c2 = bfra(p, grid, SimConfig{});
    const bool curve_same = c1.tu_simulated == c2.tu_simulated;
    detail = std::string("reruns bit-identical: trajectory ") + (traj_same ? "yes" : "no") + ", curve " +
             (curve_same ? "yes" : "no");
    return traj_same && curve_same;
}

bool count_one_is_mu(std::string& detail) {
    bool ok = true;
    for (double ec : {9.2, 12.4}) {
        const auto p = with_ec50_b(ec);
        const auto curve = bcra(p, {1.0, 50.0, 3}, SimConfig{});
        ok = ok && curve.tu_simulated[1] == mu_initial(p, 1.0, SimConfig{});
    }
    detail = std::string("count response n=1 equals single-dose utility exactly: ") + (ok ? "yes" : "no");
    return ok;
}

BehaviorRecord random_record(std::mt19937_64& rng, const std::string& name) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto any_double = [&] { return std::ldexp(u(rng) - 0.5, static_cast<int>(u(rng) * 60) - 30); };
    BehaviorRecord r;
    r.name = name;
    for (const auto& f : kParamFields) r.params.*(f.member) = f.is_rate ? 0.001 + u(rng) * 3.0 : std::abs(any_double());
    r.potency = 0.1 + u(rng);
    r.t_sim = 100.0 + std::floor(u(rng) * 5000.0);
    r.analysis_kind = u(rng) < 0.5 ? AnalysisKind::BFRA : AnalysisKind::BCRA;
    r.provenance = u(rng) < 0.5 ? Provenance::human : Provenance::similarity;
    r.summary.shape = static_cast<Shape>(static_cast<int>(u(rng) * 4) % 4);
    r.summary.apex_x = u(rng) / 7.0;
    r.summary.apex_tu = any_double();
    if (u(rng) < 0.7) r.summary.noael_x = u(rng) / 3.0;
    r.summary.mu_initial = any_double();
    r.features = features_of(r.params);
    return r;
}

bool db_round_trip(std::mt19937_64& rng, std::string& detail) {
    int mismatches = 0;
    for (int trial = 0; trial < 50; ++trial) {
        BehaviorDatabase db;
        const int n = trial % 7;
        for (int i = 0; i < n; ++i) db.upsert(random_record(rng, "behavior " + std::to_string(i) + "\t\"x\""));
        std::ostringstream os;
        write_db(os, db);
        std::istringstream is(os.str());
        const auto back = read_db(is);
        std::ostringstream again;
        write_db(again, back);
        if (!(back == db) || again.str() != os.str()) ++mismatches;
    }
    detail = "database round trips: 50 random databases, " + std::to_string(mismatches) + " mismatches";
    return mismatches == 0;
}

// Largest count of doses in any half-open window of the given length.
std::size_t densest_window(const std::vector<double>& times, double window) {
    std::size_t best = 0, lo = 0;
    for (std::size_t hi = 0; hi < times.size(); ++hi) {
        while (times[hi] - times[lo] >= window) ++lo;
        best = std::max(best, hi - lo + 1);
    }
    return best;
}

struct FuzzStats {
    std::size_t cycles = 0, violations = 0, executed = 0, actions = 0, escalations = 0, analyses = 0;
    std::set<std::string> revised;
};

void fuzz(AnalysisKind kind, double uncertainty, std::size_t cycles, std::mt19937_64& rng, FuzzStats& stats) {
    RegulatorState st;
    st.config.uncertainty_factor = uncertainty;
    st.config.analysis.kind = kind;
    st.config.analysis.config = {600.0, 1.0, 1e-7, 1e-5};
    st.config.analysis.bfra = {1.0, 0.005, 0.1, kFillHorizon};
    st.config.analysis.bcra = {1.0, 20.0, 20};

    // Fixed parameters per name so each ceiling stays put once analysed.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::pair<std::string, ModelParams>> pool;
    for (int i = 0; i < 12; ++i) {
        ModelParams p;
        p.ec50_b = 6.0 + 8.0 * u(rng);
        p.emax_b = 1.0 + 3.0 * u(rng);
        p.k_h = 0.5 + u(rng);
        pool.emplace_back("b" + std::to_string(i), p);
    }

    const EscalationHandler handler = [&](const EscalationRequest&) -> std::optional<ModelParams> {
        ++stats.escalations;
        if (u(rng) < 0.5) return std::nullopt;
        return pool[static_cast<std::size_t>(u(rng) * pool.size()) % pool.size()].second;
    };

    std::map<std::string, std::size_t> seen_doses;
    std::map<std::string, HormeticSummary> first_summary;
    for (std::size_t c = 0; c < cycles; ++c) {
        std::vector<CandidateAction> cands;
        const int n = static_cast<int>(u(rng) * 5);
        for (int i = 0; i < n; ++i) {
            const auto& [name, params] = pool[static_cast<std::size_t>(u(rng) * pool.size()) % pool.size()];
            CandidateAction a;
            a.name = name;
            const double r = u(rng);
            if (r < 0.3) {
                a.explicit_params = params;
            } else if (r < 0.6) {
                ModelParams hint = params;
                hint.ec50_b *= 0.9 + 0.2 * u(rng);
                a.hint = hint;
            } else if (r < 0.7) {
                a.name = "stranger" + std::to_string(static_cast<int>(u(rng) * 4));
                ModelParams hint;
                hint.ec50_b = 40.0;
                hint.emax_a = 4.0;
                a.hint = hint;
            }
            cands.push_back(std::move(a));
        }
        const auto log = run_cycle(st, cands, handler);
        ++stats.cycles;
        stats.executed += log.doses_executed;
        stats.actions += log.chosen.has_value();
        for (const auto& d : log.candidates) stats.analyses += d.status == "analyzed" && !d.cached;

        if (log.chosen) {
            const auto* rec = st.db.find(*log.chosen);
            if (rec->summary.shape != Shape::hormetic) ++stats.violations;
        }
        for (const auto& [name, ledger] : st.ledger) {
            const auto* rec = st.db.find(name);
            const double limit = rec->summary.noael_x.value_or(0.0) * uncertainty;
            const double ceiling = kind == AnalysisKind::BFRA ? limit * rec->t_sim : limit;
            auto& seen = seen_doses[name];
            // Every dose, counted with the doses before it in its trailing window.
            for (std::size_t i = seen; i < ledger.dose_times.size(); ++i) {
                const double t = ledger.dose_times[i];
                std::size_t in_window = 0;
                for (std::size_t j = 0; j <= i; ++j) in_window += ledger.dose_times[j] > t - rec->t_sim;
                if (static_cast<double>(in_window) > ceiling + 1e-9) ++stats.violations;
            }
            seen = ledger.dose_times.size();
            if (rec->summary != first_summary.try_emplace(name, rec->summary).first->second) {
                stats.revised.insert(name);
            } else if (static_cast<double>(densest_window(ledger.dose_times, rec->t_sim)) > ceiling + 1e-9) {
                ++stats.violations;
            }
        }
    }
}

bool regulator_fuzz(std::mt19937_64& rng, std::string& detail) {
    FuzzStats stats;
    fuzz(AnalysisKind::BFRA, 1.0, 4000, rng, stats);
    fuzz(AnalysisKind::BFRA, 0.5, 3000, rng, stats);
    fuzz(AnalysisKind::BCRA, 1.0, 3000, rng, stats);
    detail = "regulator fuzz: " + std::to_string(stats.cycles) + " cycles, " + std::to_string(stats.actions) +
             " actions, " + std::to_string(stats.executed) + " doses, " + std::to_string(stats.analyses) +
             " analyses, " + std::to_string(stats.escalations) + " escalations, " +
             std::to_string(stats.revised.size()) + " behaviors with revised limits, " + std::to_string(stats.violations) +
             " ceiling violations";
    return stats.cycles == 10000 && stats.violations == 0 && stats.executed > 0;
}

void criterion_5() {
    std::mt19937_64 rng(20240611);
    const std::vector<std::function<bool(std::string&)>> checks{
        [&](std::string& d) { return mass_balance(rng, d); },
        pd_scaling,
        [&](std::string& d) { return saturation(rng, d); },
        determinism,
        count_one_is_mu,
        [&](std::string& d) { return db_round_trip(rng, d); },
        [&](std::string& d) { return regulator_fuzz(rng, d); },
    };
    std::vector<std::string> details;
    int failed = 0;
    for (const auto& check : checks) {
        std::string d;
        bool ok = false;
        try {
            ok = check(d);
        } catch (const std::exception& e) {
            d += std::string(" threw: ") + e.what();
        }
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + d);
        failed += !ok;
    }
    report(5, "property suites", failed == 0, std::to_string(checks.size() - failed) + "/" +
                                                  std::to_string(checks.size()) + " suites hold");
    for (const auto& d : details) note(d);
}

void criterion_6() {
    SweepSpec s;
    s.param_x = "Emax_b";
    s.param_y = "EC50_b";
    s.x_range = {1.0, 1.0, 2};
    s.y_range = {4.0, 4.0, 2};
    s.analysis.bfra = {1.0, 0.002, 0.2, kFillHorizon};
    const auto map = sweep(s);
    const auto& cell = map.at(0, 0);
    const bool ok = cell.shape == Shape::triphasic && flag_unsafe(map).size() == map.cells.size();
    report(6, "triphasic detection at Emax_b=1, EC50_b=4", ok,
           "shape=" + (cell.shape ? std::string(to_string(*cell.shape)) : std::string("error")) + ", flagged " +
               std::to_string(flag_unsafe(map).size()) + "/" + std::to_string(map.cells.size()) + " cells");
}

void criterion_7() {
    SweepSpec s;
    s.param_x = "k_H";
    s.param_y = "EC50_b";
    s.x_range = {0.5, 1.5, 20};
    s.y_range = {4.5, 13.5, 20};
    const auto t0 = Clock::now();
    const auto map = sweep(s);
    const double secs = seconds_since(t0);

    std::size_t rows_checked = 0, rows_with_limit = 0, failed = 0;
    double worst = 0.0;
    for (std::size_t iy = 0; iy < map.ny; ++iy) {
        ++rows_checked;
        const auto& ref = map.at(0, iy).analytic_noael_x;
        bool row_ok = true;
        for (std::size_t ix = 0; ix < map.nx; ++ix) {
            const auto& v = map.at(ix, iy).analytic_noael_x;
            if (map.at(ix, iy).failed() || v.has_value() != ref.has_value()) {
                row_ok = false;
                continue;
            }
            if (v) worst = std::max(worst, std::abs(*v - *ref) / *ref);
        }
        rows_with_limit += ref.has_value();
        failed += !row_ok;
    }
    const bool ok = secs < 600.0 && failed == 0 && worst <= 1e-9 && rows_with_limit > 0;
    report(7, "20x20 k_H x EC50_b sweep", ok,
           fmt("%.1f s", secs) + ", " + std::to_string(rows_with_limit) + "/" + std::to_string(rows_checked) +
               " EC50_b rows carry an analytic limit, worst relative spread across k_H " + fmt("%.2g", worst) +
               ", " + std::to_string(flag_unsafe(map).size()) + " unsafe cells");
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                      criterion_5, criterion_6, criterion_7};
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), "criterion", false, std::string("threw: ") + e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
