#pragma once

// Pairwise parameter sweeps of the hormetic apex ("behavioral value space").

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "halo/error.hpp"
#include "halo/params.hpp"
#include "halo/parallel.hpp"
#include "halo/response.hpp"

namespace halo {

struct AxisRange {
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 2;

    double at(std::size_t i) const {
        if (count < 2 || min == max) return min;
        return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
};

// Which response analysis a sweep or the regulator runs for each behavior.
// The options' own potency fields are ignored in favour of `potency`.
struct AnalysisSettings {
    AnalysisKind kind = AnalysisKind::BFRA;
    double potency = 1.0;
    BfraOptions bfra{1.0, 0.001, 0.05, kFillHorizon};
    BcraOptions bcra{};
    SimConfig config{};
};

inline ResponseCurve run_analysis(const ModelParams& params, const AnalysisSettings& s) {
    if (s.kind == AnalysisKind::BFRA) {
        BfraOptions o = s.bfra;
        o.potency = s.potency;
        return bfra(params, o, s.config);
    }
    BcraOptions o = s.bcra;
    o.potency = s.potency;
    return bcra(params, o, s.config);
}

struct SweepSpec {
    std::string param_x;
    std::string param_y;
    AxisRange x_range;
    AxisRange y_range;
    ModelParams base{};
    AnalysisSettings analysis{};
};

struct ValueSpaceCell {
    std::size_t ix = 0, iy = 0;
    double x_value = 0.0, y_value = 0.0;
    double tu_apex_raw = 0.0;
    double tu_apex_norm = 0.0;
    std::optional<Shape> shape;  // empty when the cell's analysis failed
    std::optional<double> noael_x;
    std::optional<double> analytic_noael_x;  // BFRA steady-state column only
    std::string error;

    bool failed() const { return !shape.has_value(); }
};

struct ValueSpaceMap {
    std::string param_x;
    std::string param_y;
    std::size_t nx = 0, ny = 0;
    std::vector<ValueSpaceCell> cells;  // row-major: iy outer, ix inner

    const ValueSpaceCell& at(std::size_t ix, std::size_t iy) const { return cells.at(iy * nx + ix); }
};

inline void validate(const SweepSpec& spec) {
    const auto& fx = param_field(spec.param_x);
    const auto& fy = param_field(spec.param_y);
    if (fx.member == fy.member) throw InvalidInput("param_x and param_y must differ");
    if (spec.x_range.count < 2 || spec.y_range.count < 2) throw InvalidInput("cell counts must be >= 2");
    for (const auto* r : {&spec.x_range, &spec.y_range}) {
        if (!std::isfinite(r->min) || !std::isfinite(r->max) || r->max < r->min) {
            throw InvalidInput("axis range must be finite with min <= max");
        }
    }
    for (double v : {spec.x_range.min, spec.x_range.max}) {
        ModelParams p = spec.base;
        p.*(fx.member) = v;
        validate(p);
    }
    for (double v : {spec.y_range.min, spec.y_range.max}) {
        ModelParams p = spec.base;
        p.*(fy.member) = v;
        validate(p);
    }
}

// Negative apexes clamp to 0 before min-max normalization; a constant map
// normalizes to all zeros.
inline void normalize(ValueSpaceMap& map) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& c : map.cells) {
        if (c.failed()) continue;
        const double v = std::max(c.tu_apex_raw, 0.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (auto& c : map.cells) {
        const double v = std::max(c.tu_apex_raw, 0.0);
        c.tu_apex_norm = (c.failed() || !(hi > lo)) ? 0.0 : (v - lo) / (hi - lo);
    }
}

inline ValueSpaceMap sweep(const SweepSpec& spec) {
    validate(spec);
    const auto& fx = param_field(spec.param_x);
    const auto& fy = param_field(spec.param_y);

    ValueSpaceMap map;
    map.param_x = std::string(fx.name);
    map.param_y = std::string(fy.name);
    map.nx = spec.x_range.count;
    map.ny = spec.y_range.count;

    const std::size_t n = map.nx * map.ny;
    map.cells = parallel_map<ValueSpaceCell>(n, [&](std::size_t k) {
        ValueSpaceCell cell;
        cell.iy = k / map.nx;
        cell.ix = k % map.nx;
        cell.x_value = spec.x_range.at(cell.ix);
        cell.y_value = spec.y_range.at(cell.iy);
        ModelParams p = spec.base;
        p.*(fx.member) = cell.x_value;
        p.*(fy.member) = cell.y_value;
        try {
            const ResponseCurve curve = run_analysis(p, spec.analysis);
            const HormeticSummary s = summarize(curve);
            cell.shape = s.shape;
            cell.tu_apex_raw = s.apex_tu;
            cell.noael_x = s.noael_x;
            cell.analytic_noael_x = analytic_noael(curve);
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
        return cell;
    });
    normalize(map);
    return map;
}

// Cells whose shape the regulator must never act on: everything that is not
// plainly hormetic, including failed cells.
inline std::vector<ValueSpaceCell> flag_unsafe(const ValueSpaceMap& map) {
    std::vector<ValueSpaceCell> out;
    for (const auto& c : map.cells) {
        if (!c.shape || *c.shape != Shape::hormetic) out.push_back(c);
    }
    return out;
}

namespace detail {

inline std::string csv_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline std::string csv_optional(const std::optional<double>& v) { return v ? csv_number(*v) : ""; }

}  // namespace detail

// One row per cell. `unsafe` is 1 for every cell flag_unsafe would return.
inline void write_csv(std::ostream& os, const ValueSpaceMap& map) {
    os << map.param_x << ',' << map.param_y << ",tu_apex_raw,tu_apex_norm,shape,noael,analytic_noael,unsafe\n";
    for (const auto& c : map.cells) {
        const bool unsafe = !c.shape || *c.shape != Shape::hormetic;
        os << detail::csv_number(c.x_value) << ',' << detail::csv_number(c.y_value) << ','
           << detail::csv_number(c.tu_apex_raw) << ',' << detail::csv_number(c.tu_apex_norm) << ','
           << (c.shape ? std::string(to_string(*c.shape)) : std::string("error")) << ','
           << detail::csv_optional(c.noael_x) << ',' << detail::csv_optional(c.analytic_noael_x) << ','
           << (unsafe ? 1 : 0) << '\n';
    }
}

}  // namespace halo
