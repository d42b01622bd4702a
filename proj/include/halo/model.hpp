#pragma once

// Six-compartment opponent-process PK/PD model driven by constant-rate
// behavioral dose infusions.
//
//   Dose -> a_pk -> b_pk -> (eliminated)      linear PK chain
//   a_pd <- Hill(a_pk),  b_pd <- Hill(b_pk)   biophase effects
//   H    <- k_apd*a_pd - k_bpd*b_pd           hedonic state

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "halo/dopri5.hpp"
#include "halo/error.hpp"
#include "halo/params.hpp"

namespace halo {

enum class Compartment : std::size_t { Dose = 0, APk, BPk, APd, BPd, H };

inline constexpr std::size_t kCompartments = 6;
inline constexpr std::array<std::string_view, kCompartments> kCompartmentNames{
    "Dose", "apk", "bpk", "apd", "bpd", "H"};

inline Compartment compartment_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kCompartments; ++i) {
        if (kCompartmentNames[i] == name) return static_cast<Compartment>(i);
    }
    throw InvalidInput("unknown series '" + std::string(name) + "'");
}

using StateVec = ode::State<kCompartments>;

// Hill biophase effect E0 + Emax c^g / (EC50^g + c^g). Negative round-off in c
// contributes no effect.
inline double hill(double c, double e0, double emax, double ec50, double gamma) {
    if (!(c > 0.0)) return e0;
    const double cg = std::pow(c, gamma);
    return e0 + emax * cg / (std::pow(ec50, gamma) + cg);
}

namespace detail {

inline void rates(const StateVec& y, const ModelParams& p, double infusion_rate, StateVec& dy) {
    const double dose = y[0], apk = y[1], bpk = y[2], apd = y[3], bpd = y[4], h = y[5];
    dy[0] = infusion_rate - p.k_dose * dose;
    dy[1] = p.k_dose * dose - p.k_apk * apk;
    dy[2] = p.k_apk * apk - p.k_bpk * bpk;
    dy[3] = hill(apk, p.e0_a, p.emax_a, p.ec50_a, p.gamma_a) - p.k_apd * apd;
    dy[4] = hill(bpk, p.e0_b, p.emax_b, p.ec50_b, p.gamma_b) - p.k_bpd * bpd;
    dy[5] = p.k_apd * apd - p.k_bpd * bpd - p.k_h * h;
}

}  // namespace detail

inline StateVec derivatives(const StateVec& state, const ModelParams& params, double infusion_rate) {
    for (double v : state) {
        if (!std::isfinite(v)) throw InvalidInput("state must be finite");
    }
    if (!std::isfinite(infusion_rate) || infusion_rate < 0.0) {
        throw InvalidInput("infusion rate must be finite and >= 0");
    }
    StateVec dy{};
    detail::rates(state, params, infusion_rate, dy);
    return dy;
}

// Time-gridded output of one simulation. Immutable once built.
class Trajectory {
public:
    Trajectory(ModelParams params, double dt_out, std::vector<double> time,
               std::array<std::vector<double>, kCompartments> series)
        : params_(params), dt_out_(dt_out), time_(std::move(time)), series_(std::move(series)) {
        for (const auto& s : series_) {
            if (s.size() != time_.size()) throw InvalidInput("series length mismatch");
        }
    }

    const ModelParams& params() const noexcept { return params_; }
    double dt_out() const noexcept { return dt_out_; }
    std::size_t size() const noexcept { return time_.size(); }
    bool empty() const noexcept { return time_.empty(); }
    std::span<const double> time() const noexcept { return time_; }
    std::span<const double> series(Compartment c) const noexcept {
        return series_[static_cast<std::size_t>(c)];
    }
    std::span<const double> series(std::string_view name) const {
        return series(compartment_from_name(name));
    }

    friend bool operator==(const Trajectory&, const Trajectory&) = default;

private:
    ModelParams params_;
    double dt_out_;
    std::vector<double> time_;
    std::array<std::vector<double>, kCompartments> series_;
};

// Dose start times that fall inside [0, t_sim).
inline std::vector<double> dose_times(const DoseSchedule& s, double t_sim) {
    std::vector<double> out;
    if (s.potency == 0.0) return out;
    for (std::int64_t i = 0; i <= s.additional_doses; ++i) {
        const double t = s.first_dose_time + static_cast<double>(i) * s.interdose_interval;
        if (t >= t_sim) break;
        out.push_back(t);
    }
    return out;
}

// Amount delivered into Dose over [0, t].
inline double administered(const DoseSchedule& s, const ModelParams& p, double t, double t_sim) {
    double total = 0.0;
    for (double start : dose_times(s, t_sim)) {
        if (start >= t) break;
        total += s.potency * std::min(t - start, p.infusion_duration) / p.infusion_duration;
    }
    return total;
}

inline Trajectory simulate(const ModelParams& params, const DoseSchedule& schedule,
                           const SimConfig& config) {
    validate(params);
    validate(schedule);
    validate(config);

    const std::vector<double> starts = dose_times(schedule, config.t_sim);
    const double dur = params.infusion_duration;

    // Breakpoints: every infusion start and end, so the forcing is constant
    // inside each integration segment.
    std::vector<double> breaks{0.0, config.t_sim};
    breaks.reserve(2 * starts.size() + 2);
    for (double s : starts) {
        breaks.push_back(s);
        if (s + dur < config.t_sim) breaks.push_back(s + dur);
    }
    std::sort(breaks.begin(), breaks.end());
    // Merge breakpoints closer than the integrator can resolve; the horizon
    // end always survives.
    constexpr double merge_tol = 1e-9;
    std::vector<double> merged{breaks.front()};
    for (double t : breaks) {
        if (t - merged.back() > merge_tol * std::max(1.0, t)) merged.push_back(t);
    }
    if (merged.back() != config.t_sim) merged.back() = config.t_sim;
    breaks = std::move(merged);

    const std::size_t n = config.grid_size();
    std::vector<double> time(n);
    for (std::size_t j = 0; j < n; ++j) time[j] = static_cast<double>(j) * config.dt_out;
    time.back() = config.t_sim;
    std::array<std::vector<double>, kCompartments> series;
    for (auto& s : series) s.assign(n, 0.0);

    // The PK chain is nonnegative in exact arithmetic. Once a compartment
    // has decayed to zero the error control lets it wander within abs_tol of
    // zero, so PK values are projected back onto [0, inf) when emitted and
    // at every segment boundary.
    auto project = [](StateVec& y) {
        for (auto c : {Compartment::Dose, Compartment::APk, Compartment::BPk}) {
            auto& v = y[static_cast<std::size_t>(c)];
            v = std::max(v, 0.0);
        }
    };
    std::size_t next = 0;
    auto emit = [&](StateVec y) {
        project(y);
        for (std::size_t c = 0; c < kCompartments; ++c) series[c][next] = y[c];
        ++next;
    };

    ode::StepControl ctl;
    ctl.abs_tol = config.abs_tol;
    ctl.rel_tol = config.rel_tol;

    StateVec y{};
    emit(y);
    const double unit_rate = schedule.potency / dur;
    std::size_t active_lo = 0;  // first infusion that may still be running

    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        const double t0 = breaks[b];
        const double t1 = breaks[b + 1];
        const double mid = 0.5 * (t0 + t1);
        while (active_lo < starts.size() && starts[active_lo] + dur <= mid) ++active_lo;
        std::size_t active = 0;
        for (std::size_t i = active_lo; i < starts.size() && starts[i] <= mid; ++i) {
            if (mid < starts[i] + dur) ++active;
        }
        const double rate = unit_rate * static_cast<double>(active);

        auto rhs = [&](double, const StateVec& s, StateVec& dy) { detail::rates(s, params, rate, dy); };
        try {
            y = ode::integrate<kCompartments>(rhs, t0, t1, y, ctl, [&](const ode::DenseStep<kCompartments>& step) {
                const double end = step.t + step.h;
                while (next < n && time[next] <= end) emit(step(time[next]));
            });
        } catch (const IntegrationError& e) {
            throw IntegrationError(std::string("simulation failed: ") + e.what(), e.failing_time());
        }
        project(y);
    }
    while (next < n) emit(y);

    return Trajectory(params, config.dt_out, std::move(time), std::move(series));
}

// Trapezoidal integral of one series over the output grid.
inline double auc(const Trajectory& traj, Compartment which) {
    if (traj.empty()) throw InvalidInput("empty trajectory");
    const auto t = traj.time();
    const auto v = traj.series(which);
    double sum = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) sum += 0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
    return sum;
}

inline double auc(const Trajectory& traj, std::string_view which) {
    return auc(traj, compartment_from_name(which));
}

// Inflow terms of the hedonic compartment: k_apd*a_pd and k_bpd*b_pd.
struct ProcessSplit {
    std::vector<double> a;
    std::vector<double> b;
};

inline ProcessSplit split_processes(const Trajectory& traj) {
    if (traj.empty()) throw InvalidInput("empty trajectory");
    const auto& p = traj.params();
    ProcessSplit out;
    for (double v : traj.series(Compartment::APd)) out.a.push_back(p.k_apd * v);
    for (double v : traj.series(Compartment::BPd)) out.b.push_back(p.k_bpd * v);
    return out;
}

// TU: integral of H over the horizon for a dosing schedule.
inline double total_utility(const ModelParams& params, const DoseSchedule& schedule,
                            const SimConfig& config) {
    return auc(simulate(params, schedule, config), Compartment::H);
}

// MU_initial: TU of a single dose at t = 0.
inline double mu_initial(const ModelParams& params, double potency, const SimConfig& config) {
    return total_utility(params, DoseSchedule::single(potency), config);
}

}  // namespace halo
