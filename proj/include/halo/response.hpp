#pragma once

// Behavioral frequency / count response analysis (BFRA, BCRA) and the
// hormetic summary of a response curve.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "halo/error.hpp"
#include "halo/model.hpp"
#include "halo/parallel.hpp"
#include "halo/params.hpp"

namespace halo {

enum class AnalysisKind { BFRA, BCRA };

inline std::string_view to_string(AnalysisKind k) { return k == AnalysisKind::BFRA ? "BFRA" : "BCRA"; }

inline AnalysisKind analysis_kind_from_string(std::string_view s) {
    if (s == "BFRA" || s == "bfra") return AnalysisKind::BFRA;
    if (s == "BCRA" || s == "bcra") return AnalysisKind::BCRA;
    throw InvalidInput("unknown analysis kind '" + std::string(s) + "'");
}

enum class Shape { hormetic, non_negative, monotonically_negative, triphasic };

inline std::string_view to_string(Shape s) {
    switch (s) {
        case Shape::hormetic: return "hormetic";
        case Shape::non_negative: return "non_negative";
        case Shape::monotonically_negative: return "monotonically_negative";
        case Shape::triphasic: return "triphasic";
    }
    return "?";
}

inline Shape shape_from_string(std::string_view s) {
    for (Shape v : {Shape::hormetic, Shape::non_negative, Shape::monotonically_negative, Shape::triphasic}) {
        if (to_string(v) == s) return v;
    }
    throw InvalidInput("unknown shape '" + std::string(s) + "'");
}

// Samples of TU against frequency (BFRA) or dose count (BCRA).
struct ResponseCurve {
    AnalysisKind kind = AnalysisKind::BFRA;
    std::vector<double> x;
    std::vector<double> tu_simulated;
    // Raw analytic steady-state H (hedons) per x; BFRA with k_apd = k_bpd = 1 only.
    std::optional<std::vector<double>> h_steady_state;
    ModelParams params;
    double potency = 1.0;
    SimConfig config;

    double t_sim() const { return config.t_sim; }
};

struct HormeticSummary {
    Shape shape = Shape::non_negative;
    double apex_x = 0.0;
    double apex_tu = 0.0;
    std::optional<double> noael_x;
    double mu_initial = 0.0;

    friend bool operator==(const HormeticSummary&, const HormeticSummary&) = default;
};

// Absolute TU below which a sample is treated as zero for sign analysis.
inline constexpr double kSignNoiseFloor = 1e-9;

enum class Process { a, b };

inline double biophase(const ModelParams& p, Process which, double concentration) {
    return which == Process::a ? hill(concentration, p.e0_a, p.emax_a, p.ec50_a, p.gamma_a)
                               : hill(concentration, p.e0_b, p.emax_b, p.ec50_b, p.gamma_b);
}

inline std::vector<double> biophase(const ModelParams& p, Process which, std::span<const double> concentrations) {
    std::vector<double> out;
    out.reserve(concentrations.size());
    for (double c : concentrations) {
        if (!(c >= 0.0)) throw InvalidInput("concentrations must be >= 0");
        out.push_back(biophase(p, which, c));
    }
    return out;
}

inline bool steady_state_supported(const ModelParams& p) { return p.k_apd == 1.0 && p.k_bpd == 1.0; }

// Quasi-steady-state H under indefinite dosing at frequency f: both Hill terms
// evaluated at the mean PK levels D0 f / k_apk and D0 f / k_bpk.
inline double steady_state_h(const ModelParams& p, double frequency, double potency = 1.0) {
    if (!steady_state_supported(p)) {
        throw UnsupportedParameters("analytic steady state requires k_apd = k_bpd = 1");
    }
    if (!std::isfinite(frequency) && frequency > 0.0) {
        return (p.e0_a + p.emax_a - p.e0_b - p.emax_b) / p.k_h;
    }
    if (!(frequency >= 0.0)) throw InvalidInput("frequency must be >= 0");
    const double u = potency * frequency / p.k_apk;
    const double v = potency * frequency / p.k_bpk;
    return (hill(u, p.e0_a, p.emax_a, p.ec50_a, p.gamma_a) - hill(v, p.e0_b, p.emax_b, p.ec50_b, p.gamma_b)) /
           p.k_h;
}

struct BfraOptions {
    double potency = 1.0;
    double freq_step = 0.0002;  // 1/min
    double freq_max = 0.01;     // 1/min
    std::int64_t burst_addl = kFillHorizon;
};

struct BcraOptions {
    double potency = 1.0;
    double interdose_interval = 50.0;  // min
    std::int64_t count_max = 30;
};

namespace detail {

// {0, step, 2 step, ..., max}; max is included when it is a multiple of step.
inline std::vector<double> uniform_grid(double step, double max) {
    const auto k = static_cast<std::int64_t>(std::floor(max / step + 1e-9));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(k) + 1);
    for (std::int64_t i = 0; i <= k; ++i) out.push_back(static_cast<double>(i) * step);
    return out;
}

inline std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace detail

inline ResponseCurve bfra(const ModelParams& params, const BfraOptions& opt, const SimConfig& config) {
    validate(params);
    validate(config);
    if (!(opt.freq_step > 0.0) || !std::isfinite(opt.freq_step)) throw InvalidInput("freq_step must be > 0");
    if (!(opt.freq_max >= opt.freq_step) || !std::isfinite(opt.freq_max)) {
        throw InvalidInput("freq_max must be >= freq_step");
    }
    if (opt.burst_addl < 0) throw InvalidInput("burst addl must be >= 0");
    if (!(opt.potency >= 0.0)) throw InvalidInput("potency must be >= 0");

    ResponseCurve curve;
    curve.kind = AnalysisKind::BFRA;
    curve.x = detail::uniform_grid(opt.freq_step, opt.freq_max);
    curve.params = params;
    curve.potency = opt.potency;
    curve.config = config;

    curve.tu_simulated = parallel_map<double>(curve.x.size(), [&](std::size_t i) {
        if (i == 0) return 0.0;
        const double f = curve.x[i];
        try {
            return total_utility(params, DoseSchedule::at_frequency(f, opt.potency, opt.burst_addl), config);
        } catch (const IntegrationError& e) {
            throw IntegrationError(std::string(e.what()) + " (frequency " + detail::fmt_double(f) + ")",
                                   e.failing_time());
        }
    });

    if (steady_state_supported(params)) {
        std::vector<double> hss;
        hss.reserve(curve.x.size());
        for (double f : curve.x) hss.push_back(steady_state_h(params, f, opt.potency));
        curve.h_steady_state = std::move(hss);
    }
    return curve;
}

inline ResponseCurve bcra(const ModelParams& params, const BcraOptions& opt, const SimConfig& config) {
    validate(params);
    validate(config);
    if (!(opt.interdose_interval > 0.0) || !std::isfinite(opt.interdose_interval)) {
        throw InvalidInput("interdose interval must be > 0");
    }
    if (opt.count_max < 1) throw InvalidInput("count_max must be >= 1");
    if (!(opt.potency >= 0.0)) throw InvalidInput("potency must be >= 0");

    ResponseCurve curve;
    curve.kind = AnalysisKind::BCRA;
    curve.params = params;
    curve.potency = opt.potency;
    curve.config = config;
    for (std::int64_t n = 0; n <= opt.count_max; ++n) curve.x.push_back(static_cast<double>(n));

    curve.tu_simulated = parallel_map<double>(curve.x.size(), [&](std::size_t i) {
        if (i == 0) return 0.0;
        const auto n = static_cast<std::int64_t>(i);
        const DoseSchedule schedule{opt.potency, 0.0, opt.interdose_interval, n - 1};
        try {
            return total_utility(params, schedule, config);
        } catch (const IntegrationError& e) {
            throw IntegrationError(std::string(e.what()) + " (count " + std::to_string(n) + ")",
                                   e.failing_time());
        }
    });
    return curve;
}

namespace detail {

inline int sign_of(double v) { return v > kSignNoiseFloor ? 1 : (v < -kSignNoiseFloor ? -1 : 0); }

// Zero crossing of ys between samples i-1 (positive) and i (non-positive).
inline double crossing(std::span<const double> xs, std::span<const double> ys, std::size_t i) {
    const double y0 = ys[i - 1], y1 = ys[i];
    if (y0 == y1) return xs[i];
    return xs[i - 1] + y0 * (xs[i] - xs[i - 1]) / (y0 - y1);
}

}  // namespace detail

// First +/- zero crossing of ys after index start, linearly interpolated.
inline std::optional<double> first_zero_crossing(std::span<const double> xs, std::span<const double> ys,
                                                 std::size_t start = 0) {
    for (std::size_t i = start + 1; i < ys.size(); ++i) {
        if (ys[i - 1] > 0.0 && ys[i] <= 0.0 && detail::sign_of(ys[i - 1]) > 0) {
            // Skip dips that never leave the noise band.
            std::size_t j = i;
            while (j < ys.size() && detail::sign_of(ys[j]) == 0) ++j;
            if (j < ys.size() && detail::sign_of(ys[j]) > 0) continue;
            return detail::crossing(xs, ys, i);
        }
    }
    return std::nullopt;
}

// Sign changes across samples, ignoring samples inside the noise floor.
inline int count_sign_changes(std::span<const double> ys) {
    int prev = 0, changes = 0;
    for (double y : ys) {
        const int s = detail::sign_of(y);
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++changes;
        prev = s;
    }
    return changes;
}

// Classifies the curve and locates its apex and hormetic limit. mu_initial is
// the single-dose TU for the curve's parameters and horizon, except for
// curves with no model attached (params default, potency 0) where it is 0.
inline HormeticSummary summarize(const ResponseCurve& curve) {
    const auto& xs = curve.x;
    const auto& ys = curve.tu_simulated;
    if (xs.size() < 3 || ys.size() != xs.size()) throw InvalidInput("summarize needs >= 3 samples");

    HormeticSummary out;
    std::size_t imax = 0;
    for (std::size_t i = 1; i < ys.size(); ++i) {
        if (ys[i] > ys[imax]) imax = i;
    }
    out.apex_x = xs[imax];
    out.apex_tu = ys[imax];
    if (imax > 0 && imax + 1 < ys.size()) {
        // Vertex of the parabola through the argmax and its neighbours.
        const double x0 = xs[imax - 1], x1 = xs[imax], x2 = xs[imax + 1];
        const double y0 = ys[imax - 1], y1 = ys[imax], y2 = ys[imax + 1];
        const double d01 = (y1 - y0) / (x1 - x0);
        const double d12 = (y2 - y1) / (x2 - x1);
        const double a = (d12 - d01) / (x2 - x0);
        if (a < 0.0) {
            const double b = d01 - a * (x0 + x1);
            const double xv = std::clamp(-b / (2.0 * a), x0, x2);
            const double yv = y1 + (xv - x1) * (d01 + a * (xv - x0));
            out.apex_x = xv;
            out.apex_tu = std::max(yv, y1);
        }
    }

    std::span<const double> positive_y(ys.begin() + 1, ys.end());
    bool any_pos = false, any_neg = false;
    int first_sign = 0;
    for (double y : positive_y) {
        const int s = detail::sign_of(y);
        if (s > 0) any_pos = true;
        if (s < 0) any_neg = true;
        if (first_sign == 0) first_sign = s;
    }
    const int changes = count_sign_changes(positive_y);

    if (!any_neg) {
        out.shape = Shape::non_negative;
    } else if (!any_pos) {
        out.shape = Shape::monotonically_negative;
        out.apex_x = xs[imax];
        out.apex_tu = ys[imax];
    } else if (changes == 1 && first_sign > 0) {
        out.shape = Shape::hormetic;
    } else {
        out.shape = Shape::triphasic;
    }

    if (out.shape == Shape::hormetic || out.shape == Shape::triphasic) {
        out.noael_x = first_zero_crossing(xs, ys, imax);
        if (out.shape == Shape::triphasic && !out.noael_x) {
            // Global apex sits past the faux limit; report the first limit.
            out.noael_x = first_zero_crossing(xs, ys, 0);
        }
    }

    if (curve.potency > 0.0) {
        out.mu_initial = mu_initial(curve.params, curve.potency, curve.config);
    }
    return out;
}

// Analytic hormetic limit: first +/- zero crossing of the steady-state column.
inline std::optional<double> analytic_noael(const ResponseCurve& curve) {
    if (!curve.h_steady_state) return std::nullopt;
    return first_zero_crossing(curve.x, *curve.h_steady_state, 0);
}

}  // namespace halo
