#pragma once

// Model constants, dosing schedules and integrator settings.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "halo/error.hpp"

namespace halo {

// The opponent-process signature of one behavior.
struct ModelParams {
    double k_dose = 1.0;    // 1/min, Dose compartment clearance
    double k_apk = 0.02;    // 1/min, a-process PK clearance
    double k_bpk = 0.004;   // 1/min, b-process PK clearance
    double k_apd = 1.0;     // 1/min, a-process PD clearance
    double k_bpd = 1.0;     // 1/min, b-process PD clearance
    double k_h = 1.0;       // 1/min, hedonic compartment clearance
    double e0_a = 0.0;      // hedons/min
    double emax_a = 1.0;    // hedons/min
    double ec50_a = 1.0;
    double gamma_a = 2.0;
    double e0_b = 0.0;      // hedons/min
    double emax_b = 3.0;    // hedons/min
    double ec50_b = 9.0;
    double gamma_b = 2.0;
    double infusion_duration = 1.0;  // min

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Name/offset table over ModelParams, in canonical order. Names are the
// spelling used in files and sweeps; flags are the kebab-case CLI spelling.
struct ParamField {
    std::string_view name;
    std::string_view flag;
    double ModelParams::*member;
    bool is_rate;  // k_* constants, compared on a log scale
};

inline constexpr std::array<ParamField, 15> kParamFields{{
    {"k_Dose", "k-dose", &ModelParams::k_dose, true},
    {"k_apk", "k-apk", &ModelParams::k_apk, true},
    {"k_bpk", "k-bpk", &ModelParams::k_bpk, true},
    {"k_apd", "k-apd", &ModelParams::k_apd, true},
    {"k_bpd", "k-bpd", &ModelParams::k_bpd, true},
    {"k_H", "k-h", &ModelParams::k_h, true},
    {"E0_a", "e0-a", &ModelParams::e0_a, false},
    {"Emax_a", "emax-a", &ModelParams::emax_a, false},
    {"EC50_a", "ec50-a", &ModelParams::ec50_a, false},
    {"gamma_a", "gamma-a", &ModelParams::gamma_a, false},
    {"E0_b", "e0-b", &ModelParams::e0_b, false},
    {"Emax_b", "emax-b", &ModelParams::emax_b, false},
    {"EC50_b", "ec50-b", &ModelParams::ec50_b, false},
    {"gamma_b", "gamma-b", &ModelParams::gamma_b, false},
    {"infuse", "infuse", &ModelParams::infusion_duration, false},
}};

inline constexpr std::size_t kParamCount = kParamFields.size();

// Accepts the canonical name ("EC50_b"), the flag spelling ("ec50-b") or
// either one case-insensitively.
inline const ParamField& param_field(std::string_view name) {
    auto lower = [](std::string_view s) {
        std::string out(s);
        for (auto& c : out) {
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (c == '-') c = '_';
        }
        return out;
    };
    const std::string key = lower(name);
    for (const auto& f : kParamFields) {
        if (lower(f.name) == key || lower(f.flag) == key) return f;
    }
    throw InvalidInput("unknown model parameter '" + std::string(name) + "'");
}

inline double get_param(const ModelParams& p, std::string_view name) {
    return p.*(param_field(name).member);
}

inline void set_param(ModelParams& p, std::string_view name, double value) {
    p.*(param_field(name).member) = value;
}

inline void validate(const ModelParams& p) {
    for (const auto& f : kParamFields) {
        const double v = p.*(f.member);
        if (!std::isfinite(v)) {
            throw InvalidInput(std::string(f.name) + " must be finite");
        }
    }
    for (const auto& f : kParamFields) {
        if (f.is_rate && !(p.*(f.member) > 0.0)) {
            throw InvalidInput(std::string(f.name) + " must be > 0");
        }
    }
    if (!(p.ec50_a > 0.0)) throw InvalidInput("EC50_a must be > 0");
    if (!(p.ec50_b > 0.0)) throw InvalidInput("EC50_b must be > 0");
    if (!(p.gamma_a > 0.0)) throw InvalidInput("gamma_a must be > 0");
    if (!(p.gamma_b > 0.0)) throw InvalidInput("gamma_b must be > 0");
    if (!(p.infusion_duration > 0.0)) throw InvalidInput("infuse must be > 0");
}

// addl value meaning "keep dosing until the horizon".
inline constexpr std::int64_t kFillHorizon = 999999;

struct DoseSchedule {
    double potency = 1.0;             // D_0 per behavioral dose
    double first_dose_time = 0.0;     // min
    double interdose_interval = 1e5;  // min, ii = 1/f
    std::int64_t additional_doses = 0;  // addl, n = addl + 1

    double frequency() const { return 1.0 / interdose_interval; }
    std::int64_t dose_count() const { return additional_doses + 1; }

    static DoseSchedule single(double potency = 1.0, double at = 0.0) {
        return {potency, at, 1e5, 0};
    }
    static DoseSchedule at_frequency(double f, double potency = 1.0,
                                     std::int64_t addl = kFillHorizon) {
        return {potency, 0.0, 1.0 / f, addl};
    }

    friend bool operator==(const DoseSchedule&, const DoseSchedule&) = default;
};

inline void validate(const DoseSchedule& s) {
    if (!std::isfinite(s.potency) || s.potency < 0.0) {
        throw InvalidInput("potency must be finite and >= 0");
    }
    if (!std::isfinite(s.first_dose_time) || s.first_dose_time < 0.0) {
        throw InvalidInput("first dose time must be finite and >= 0");
    }
    if (!std::isfinite(s.interdose_interval) || !(s.interdose_interval > 0.0)) {
        throw InvalidInput("interdose interval (ii) must be finite and > 0");
    }
    if (s.additional_doses < 0) throw InvalidInput("addl must be >= 0");
}

struct SimConfig {
    double t_sim = 4000.0;  // min
    double dt_out = 1.0;    // min
    double abs_tol = 1e-8;
    double rel_tol = 1e-6;

    // Number of output grid points, t_sim / dt_out + 1.
    std::size_t grid_size() const {
        return static_cast<std::size_t>(std::llround(t_sim / dt_out)) + 1;
    }

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

inline void validate(const SimConfig& c) {
    if (!std::isfinite(c.t_sim) || !(c.t_sim > 0.0)) throw InvalidInput("t_sim must be > 0");
    if (!std::isfinite(c.dt_out) || !(c.dt_out > 0.0)) throw InvalidInput("dt_out must be > 0");
    const double steps = c.t_sim / c.dt_out;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
        throw InvalidInput("t_sim must be an integer multiple of dt_out");
    }
    if (!(c.abs_tol > 0.0) || !(c.rel_tol > 0.0)) {
        throw InvalidInput("integrator tolerances must be > 0");
    }
}

}  // namespace halo
