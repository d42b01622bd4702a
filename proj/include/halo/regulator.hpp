#pragma once

// Behavior regulator: looks up or proposes opponent-process parameters for
// candidate actions, runs hormetic analysis on each, picks the best hormetic
// action and executes it at its apex rate without ever exceeding its
// hormetic limit.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "halo/error.hpp"
#include "halo/params.hpp"
#include "halo/response.hpp"
#include "halo/value_space.hpp"

namespace halo {

enum class Provenance { human, similarity };

inline std::string_view to_string(Provenance p) { return p == Provenance::human ? "human" : "similarity"; }

inline Provenance provenance_from_string(std::string_view s) {
    if (s == "human") return Provenance::human;
    if (s == "similarity") return Provenance::similarity;
    throw InvalidInput("unknown provenance '" + std::string(s) + "'");
}

using FeatureVector = std::array<double, kParamCount>;

// One entry per ModelParams field; rate constants on a log scale.
inline FeatureVector features_of(const ModelParams& p) {
    FeatureVector f{};
    for (std::size_t i = 0; i < kParamCount; ++i) {
        const double v = p.*(kParamFields[i].member);
        f[i] = kParamFields[i].is_rate ? std::log(v) : v;
    }
    return f;
}

struct BehaviorRecord {
    std::string name;
    ModelParams params;
    double potency = 1.0;
    AnalysisKind analysis_kind = AnalysisKind::BFRA;
    HormeticSummary summary;
    double t_sim = 4000.0;
    Provenance provenance = Provenance::human;
    FeatureVector features{};

    friend bool operator==(const BehaviorRecord&, const BehaviorRecord&) = default;
};

// D_op: behavior records keyed by name, kept in insertion order.
class BehaviorDatabase {
public:
    enum class Upsert { added, updated, unchanged };

    const std::vector<BehaviorRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    const BehaviorRecord* find(std::string_view name) const {
        auto it = std::find_if(records_.begin(), records_.end(), [&](const auto& r) { return r.name == name; });
        return it == records_.end() ? nullptr : &*it;
    }

    Upsert upsert(BehaviorRecord rec) {
        for (auto& r : records_) {
            if (r.name != rec.name) continue;
            if (r == rec) return Upsert::unchanged;
            r = std::move(rec);
            return Upsert::updated;
        }
        records_.push_back(std::move(rec));
        return Upsert::added;
    }

    friend bool operator==(const BehaviorDatabase&, const BehaviorDatabase&) = default;

private:
    std::vector<BehaviorRecord> records_;
};

struct Match {
    std::string name;
    ModelParams params;
    double distance = 0.0;
};

// Records ranked by RMS distance over features, each dimension divided by the
// database's observed range. Dimensions with no spread fall back to a scale
// of max(|value|, 1) for linear features and 1 (a factor of e) for log ones.
inline std::vector<Match> query_similar(const BehaviorDatabase& db, const FeatureVector& candidate) {
    std::vector<Match> out;
    if (db.empty()) return out;

    FeatureVector lo, hi;
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (const auto& r : db.records()) {
        for (std::size_t i = 0; i < kParamCount; ++i) {
            lo[i] = std::min(lo[i], r.features[i]);
            hi[i] = std::max(hi[i], r.features[i]);
        }
    }
    FeatureVector scale;
    for (std::size_t i = 0; i < kParamCount; ++i) {
        const double range = hi[i] - lo[i];
        if (range > 0.0) {
            scale[i] = range;
        } else {
            scale[i] = kParamFields[i].is_rate ? 1.0 : std::max(std::abs(lo[i]), 1.0);
        }
    }

    for (const auto& r : db.records()) {
        double sum = 0.0;
        for (std::size_t i = 0; i < kParamCount; ++i) {
            const double d = (candidate[i] - r.features[i]) / scale[i];
            sum += d * d;
        }
        out.push_back({r.name, r.params, std::sqrt(sum / static_cast<double>(kParamCount))});
    }
    std::stable_sort(out.begin(), out.end(), [](const Match& a, const Match& b) {
        return a.distance != b.distance ? a.distance < b.distance : a.name < b.name;
    });
    return out;
}

struct EscalationRequest {
    std::string candidate;
    std::optional<std::string> nearest_name;
    std::optional<double> nearest_distance;
    double threshold = 0.0;
};

using Proposal = std::variant<ModelParams, EscalationRequest>;

// Inverse-distance-weighted mean of up to three nearest records, or an
// escalation when the nearest one is beyond the threshold.
inline Proposal propose_params(std::span<const Match> matches, std::string_view candidate,
                               double ood_threshold) {
    if (matches.empty() || matches.front().distance > ood_threshold) {
        EscalationRequest req;
        req.candidate = std::string(candidate);
        req.threshold = ood_threshold;
        if (!matches.empty()) {
            req.nearest_name = matches.front().name;
            req.nearest_distance = matches.front().distance;
        }
        return req;
    }
    if (matches.front().distance == 0.0) return matches.front().params;

    const std::size_t k = std::min<std::size_t>(3, matches.size());
    double wsum = 0.0;
    std::array<double, 3> w{};
    for (std::size_t i = 0; i < k; ++i) {
        w[i] = 1.0 / matches[i].distance;
        wsum += w[i];
    }
    ModelParams out;
    for (const auto& f : kParamFields) {
        double v = 0.0;
        for (std::size_t i = 0; i < k; ++i) v += w[i] / wsum * (matches[i].params.*(f.member));
        out.*(f.member) = v;
    }
    return out;
}

struct AnalyzedCandidate {
    std::string name;
    HormeticSummary summary;
};

// Hormetic candidates only; highest apex TU, then higher limit, then name.
inline std::optional<std::size_t> select_action(std::span<const AnalyzedCandidate> candidates) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        if (c.summary.shape != Shape::hormetic || !c.summary.noael_x) continue;
        if (!best) {
            best = i;
            continue;
        }
        const auto& b = candidates[*best];
        const double cn = *c.summary.noael_x, bn = *b.summary.noael_x;
        if (c.summary.apex_tu > b.summary.apex_tu ||
            (c.summary.apex_tu == b.summary.apex_tu &&
             (cn > bn || (cn == bn && c.name < b.name)))) {
            best = i;
        }
    }
    return best;
}

struct CandidateAction {
    std::string name;
    std::optional<ModelParams> explicit_params;  // human-supplied
    std::optional<ModelParams> hint;             // descriptor for similarity lookup
    double potency = 1.0;
};

struct ExecutionLedger {
    std::vector<double> dose_times;  // ascending

    // Doses in (t - window, t].
    std::size_t count_in_window(double t, double window) const {
        auto hi = std::upper_bound(dose_times.begin(), dose_times.end(), t);
        auto lo = std::upper_bound(dose_times.begin(), dose_times.end(), t - window);
        return static_cast<std::size_t>(hi - lo);
    }

    // Largest dose count over every half-open window [s, s + window).
    std::size_t max_window_count(double window) const {
        std::size_t best = 0, lo = 0;
        for (std::size_t hi = 0; hi < dose_times.size(); ++hi) {
            while (dose_times[hi] - dose_times[lo] >= window) ++lo;
            best = std::max(best, hi - lo + 1);
        }
        return best;
    }
};

struct RegulatorConfig {
    double ood_threshold = 0.25;
    double uncertainty_factor = 1.0;  // in (0, 1], multiplies the hormetic limit
    AnalysisSettings analysis{};
};

struct RegulatorState {
    BehaviorDatabase db;
    std::map<std::string, ExecutionLedger> ledger;
    RegulatorConfig config;
    double clock = 0.0;  // min
    std::int64_t cycle = 0;
};

using EscalationHandler = std::function<std::optional<ModelParams>(const EscalationRequest&)>;

struct CandidateDecision {
    std::string name;
    std::string source;  // explicit | database | similarity | escalation | none
    std::optional<std::string> nearest_name;
    std::optional<double> nearest_distance;
    std::optional<HormeticSummary> summary;
    bool cached = false;
    std::string status;  // analyzed | skipped
    std::string reason;
};

struct CycleLog {
    std::int64_t cycle = 0;
    double clock_start = 0.0;
    std::vector<CandidateDecision> candidates;
    std::optional<std::string> chosen;
    std::string reason;
    std::size_t doses_executed = 0;
    std::optional<double> target_rate;     // doses/min (BFRA) or doses/window (BCRA)
    std::optional<double> ceiling_count;   // max doses in any t_sim window
    std::size_t db_added = 0, db_updated = 0;
};

// Maximum dose count allowed in any window of length t_sim.
inline double dose_ceiling(const BehaviorRecord& rec, double uncertainty_factor) {
    const double limit = rec.summary.noael_x.value_or(0.0) * uncertainty_factor;
    return rec.analysis_kind == AnalysisKind::BFRA ? limit * rec.t_sim : limit;
}

namespace detail {

inline std::size_t execute(ExecutionLedger& ledger, const BehaviorRecord& rec, const RegulatorConfig& cfg,
                           double clock, CycleLog& log) {
    const double window = rec.t_sim;
    const auto ceiling = static_cast<std::size_t>(std::floor(dose_ceiling(rec, cfg.uncertainty_factor) + 1e-9));
    double interval;
    std::size_t target;
    if (rec.analysis_kind == AnalysisKind::BFRA) {
        interval = 1.0 / rec.summary.apex_x;
        target = std::numeric_limits<std::size_t>::max();
        log.target_rate = rec.summary.apex_x;
    } else {
        interval = cfg.analysis.bcra.interdose_interval;
        target = static_cast<std::size_t>(std::max(0.0, std::round(rec.summary.apex_x)));
        log.target_rate = static_cast<double>(target);
    }
    log.ceiling_count = static_cast<double>(ceiling);

    double t = clock;
    if (!ledger.dose_times.empty()) t = std::max(t, ledger.dose_times.back() + interval);
    std::size_t done = 0;
    while (t < clock + window && done < target) {
        if (ledger.count_in_window(t, window) + 1 > ceiling) break;
        ledger.dose_times.push_back(t);
        ++done;
        t += interval;
    }
    return done;
}

}  // namespace detail

// One pass of the loop: resolve parameters for every candidate, analyze,
// store, select, and execute for one t_sim window. Per-candidate failures are
// logged and skipped. The clock only advances when an action is executed.
inline CycleLog run_cycle(RegulatorState& state, std::span<const CandidateAction> candidates,
                          const EscalationHandler& escalate = {}) {
    const auto& cfg = state.config;
    CycleLog log;
    log.cycle = state.cycle;
    log.clock_start = state.clock;
    const double t_sim = cfg.analysis.config.t_sim;

    std::vector<AnalyzedCandidate> analyzed;
    for (const auto& cand : candidates) {
        CandidateDecision d;
        d.name = cand.name;
        std::optional<ModelParams> params;
        Provenance prov = Provenance::human;
        const BehaviorRecord* stored = state.db.find(cand.name);

        if (cand.explicit_params) {
            params = cand.explicit_params;
            d.source = "explicit";
        } else if (stored) {
            params = stored->params;
            prov = stored->provenance;
            d.source = "database";
            d.nearest_name = stored->name;
            d.nearest_distance = 0.0;
        } else {
            std::vector<Match> matches;
            if (cand.hint) matches = query_similar(state.db, features_of(*cand.hint));
            if (!matches.empty()) {
                d.nearest_name = matches.front().name;
                d.nearest_distance = matches.front().distance;
            }
            Proposal prop = cand.hint ? propose_params(matches, cand.name, cfg.ood_threshold)
                                      : Proposal{EscalationRequest{cand.name, std::nullopt, std::nullopt,
                                                                   cfg.ood_threshold}};
            if (auto* p = std::get_if<ModelParams>(&prop)) {
                params = *p;
                prov = Provenance::similarity;
                d.source = "similarity";
            } else {
                const auto& req = std::get<EscalationRequest>(prop);
                std::optional<ModelParams> answer = escalate ? escalate(req) : std::nullopt;
                if (!answer) {
                    d.source = "none";
                    d.status = "skipped";
                    d.reason = "escalation unanswered";
                    log.candidates.push_back(std::move(d));
                    continue;
                }
                params = answer;
                d.source = "escalation";
            }
        }

        try {
            validate(*params);
            BehaviorRecord rec;
            rec.name = cand.name;
            rec.params = *params;
            rec.potency = cand.potency;
            rec.analysis_kind = cfg.analysis.kind;
            rec.t_sim = t_sim;
            rec.provenance = prov;
            rec.features = features_of(*params);
            if (stored && stored->params == rec.params && stored->potency == rec.potency &&
                stored->analysis_kind == rec.analysis_kind && stored->t_sim == rec.t_sim) {
                rec.summary = stored->summary;
                d.cached = true;
            } else {
                AnalysisSettings settings = cfg.analysis;
                settings.potency = cand.potency;
                rec.summary = summarize(run_analysis(rec.params, settings));
            }
            d.summary = rec.summary;
            d.status = "analyzed";
            switch (state.db.upsert(rec)) {
                case BehaviorDatabase::Upsert::added: ++log.db_added; break;
                case BehaviorDatabase::Upsert::updated: ++log.db_updated; break;
                case BehaviorDatabase::Upsert::unchanged: break;
            }
            analyzed.push_back({cand.name, rec.summary});
        } catch (const std::exception& e) {
            d.status = "skipped";
            d.reason = e.what();
        }
        log.candidates.push_back(std::move(d));
    }

    if (candidates.empty()) {
        log.reason = "no candidates";
    } else if (auto pick = select_action(analyzed)) {
        const std::string& name = analyzed[*pick].name;
        log.chosen = name;
        const BehaviorRecord& rec = *state.db.find(name);
        log.doses_executed = detail::execute(state.ledger[name], rec, cfg, state.clock, log);
        log.reason = "max apex TU among hormetic candidates";
        state.clock += t_sim;
    } else {
        log.reason = "no hormetic candidate";
    }
    ++state.cycle;
    return log;
}

}  // namespace halo
