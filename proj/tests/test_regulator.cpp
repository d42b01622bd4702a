#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "halo/regulator.hpp"

using namespace halo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

BehaviorRecord record(const std::string& name, const ModelParams& p) {
    BehaviorRecord r;
    r.name = name;
    r.params = p;
    r.features = features_of(p);
    return r;
}

ModelParams with_ec50_b(double v) {
    ModelParams p;
    p.ec50_b = v;
    return p;
}

HormeticSummary summary(Shape shape, double apex_x, double apex_tu, std::optional<double> noael) {
    HormeticSummary s;
    s.shape = shape;
    s.apex_x = apex_x;
    s.apex_tu = apex_tu;
    s.noael_x = noael;
    return s;
}

// Independent distance: per-dimension range normalization over the stored
// records, RMS over dimensions.
std::vector<std::pair<std::string, double>> brute_force(const BehaviorDatabase& db, const ModelParams& cand) {
    const auto& recs = db.records();
    std::vector<std::pair<std::string, double>> out;
    for (const auto& r : recs) {
        double sum = 0.0;
        for (const auto& f : kParamFields) {
            auto feature = [&](const ModelParams& p) { return f.is_rate ? std::log(p.*(f.member)) : p.*(f.member); };
            double lo = feature(recs[0].params), hi = lo;
            for (const auto& o : recs) {
                lo = std::min(lo, feature(o.params));
                hi = std::max(hi, feature(o.params));
            }
            const double scale = hi > lo ? hi - lo : (f.is_rate ? 1.0 : std::max(std::abs(lo), 1.0));
            const double d = (feature(cand) - feature(r.params)) / scale;
            sum += d * d;
        }
        out.emplace_back(r.name, std::sqrt(sum / 15.0));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    return out;
}

RegulatorState paperclip_state() {
    RegulatorState st;
    st.config.analysis.bfra = {1.0, 0.001, 0.05, kFillHorizon};
    return st;
}

CandidateAction explicit_candidate(const std::string& name, const ModelParams& p) {
    CandidateAction c;
    c.name = name;
    c.explicit_params = p;
    return c;
}

}  // namespace

TEST_CASE("features put rate constants on a log scale", "[regulator]") {
    const auto f = features_of(ModelParams{});
    CHECK_THAT(f[1], WithinAbs(std::log(0.02), 1e-15));
    CHECK(f[0] == 0.0);
    CHECK(f[12] == 9.0);
}

TEST_CASE("similarity on a hand-sized database", "[regulator]") {
    BehaviorDatabase db;
    CHECK(query_similar(db, features_of(ModelParams{})).empty());
    db.upsert(record("b", with_ec50_b(9.0)));
    db.upsert(record("a", with_ec50_b(12.0)));
    // Only EC50_b varies (range 3); the candidate sits halfway.
    const auto m = query_similar(db, features_of(with_ec50_b(10.5)));
    REQUIRE(m.size() == 2);
    CHECK_THAT(m[0].distance, WithinAbs(0.5 / std::sqrt(15.0), 1e-15));
    CHECK(m[0].distance == m[1].distance);
    CHECK(m[0].name == "a");
    // A dimension with no spread uses its magnitude: k_apk 0.02 vs 0.02*e.
    ModelParams far;
    far.k_apk = 0.02 * std::exp(1.0);
    far.ec50_b = 9.0;
    const auto n = query_similar(db, features_of(far));
    CHECK(n[0].name == "b");
    CHECK_THAT(n[0].distance, WithinAbs(1.0 / std::sqrt(15.0), 1e-12));
}

TEST_CASE("similarity ranking agrees with a brute-force oracle", "[regulator][property]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    BehaviorDatabase db;
    for (int i = 0; i < 9; ++i) {
        ModelParams p;
        for (const auto& f : kParamFields) {
            if (p.*(f.member) != 0.0) p.*(f.member) *= u(rng);
        }
        db.upsert(record("r" + std::to_string(i), p));
    }
    for (int trial = 0; trial < 20; ++trial) {
        ModelParams cand;
        for (const auto& f : kParamFields) {
            if (cand.*(f.member) != 0.0) cand.*(f.member) *= u(rng);
        }
        const auto got = query_similar(db, features_of(cand));
        const auto want = brute_force(db, cand);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].name == want[i].first);
            CHECK_THAT(got[i].distance, WithinRel(want[i].second, 1e-12));
        }
    }
}

TEST_CASE("parameter proposals", "[regulator]") {
    const double thr = 0.25;
    SECTION("nothing to compare against escalates") {
        const auto p = propose_params({}, "x", thr);
        const auto* req = std::get_if<EscalationRequest>(&p);
        REQUIRE(req);
        CHECK(req->candidate == "x");
        CHECK_FALSE(req->nearest_name);
    }
    SECTION("out of distribution escalates with the nearest record") {
        const std::vector<Match> m{{"near", ModelParams{}, 0.3}};
        const auto p = propose_params(m, "x", thr);
        const auto* req = std::get_if<EscalationRequest>(&p);
        REQUIRE(req);
        CHECK(req->nearest_name == "near");
        CHECK(req->nearest_distance == 0.3);
        CHECK(req->threshold == thr);
    }
    SECTION("exact match copies the record") {
        const std::vector<Match> m{{"same", with_ec50_b(11.0), 0.0}, {"other", with_ec50_b(20.0), 0.1}};
        CHECK(std::get<ModelParams>(propose_params(m, "x", thr)) == with_ec50_b(11.0));
    }
    SECTION("inverse-distance weighting over the three nearest") {
        const std::vector<Match> m{{"a", with_ec50_b(10.0), 0.1},
                                   {"b", with_ec50_b(14.0), 0.3},
                                   {"c", with_ec50_b(12.0), 0.2},
                                   {"d", with_ec50_b(100.0), 0.4}};
        const auto p = std::get<ModelParams>(propose_params(m, "x", thr));
        const double w = 10.0 + 1.0 / 0.3 + 5.0;
        CHECK_THAT(p.ec50_b, WithinRel((10.0 * 10.0 + 14.0 / 0.3 + 12.0 * 5.0) / w, 1e-12));
        CHECK_THAT(p.k_apk, WithinRel(0.02, 1e-12));
    }
}

TEST_CASE("action selection", "[regulator]") {
    std::vector<AnalyzedCandidate> c{
        {"flat", summary(Shape::non_negative, 0.01, 900.0, std::nullopt)},
        {"tri", summary(Shape::triphasic, 0.01, 800.0, 0.02)},
        {"b", summary(Shape::hormetic, 0.01, 400.0, 0.02)},
        {"a", summary(Shape::hormetic, 0.01, 400.0, 0.02)},
        {"c", summary(Shape::hormetic, 0.01, 400.0, 0.03)},
        {"low", summary(Shape::hormetic, 0.01, 100.0, 0.05)},
    };
    CHECK(select_action(c) == 4);  // apex tie broken by the larger limit
    c[4].summary.noael_x = 0.02;
    CHECK(select_action(c) == 3);  // full tie broken by name
    c.resize(2);
    CHECK_FALSE(select_action(c));
    CHECK_FALSE(select_action({}));
}

TEST_CASE("execution ledger windows", "[regulator]") {
    ExecutionLedger l{{0.0, 10.0, 20.0, 30.0, 100.0}};
    CHECK(l.count_in_window(30.0, 30.0) == 3);   // (0, 30]
    CHECK(l.count_in_window(30.0, 30.01) == 4);
    CHECK(l.count_in_window(99.0, 50.0) == 0);
    CHECK(l.max_window_count(30.0) == 3);
    CHECK(l.max_window_count(30.01) == 4);
    CHECK(ExecutionLedger{}.max_window_count(10.0) == 0);
}

TEST_CASE("dose ceiling scales with the horizon for frequency analyses", "[regulator]") {
    BehaviorRecord r;
    r.summary = summary(Shape::hormetic, 0.015, 400.0, 0.025);
    r.t_sim = 4000.0;
    CHECK_THAT(dose_ceiling(r, 1.0), WithinRel(100.0, 1e-12));
    CHECK_THAT(dose_ceiling(r, 0.5), WithinRel(50.0, 1e-12));
    r.analysis_kind = AnalysisKind::BCRA;
    r.summary.noael_x = 12.2;
    CHECK_THAT(dose_ceiling(r, 1.0), WithinRel(12.2, 1e-12));
}

TEST_CASE("empty candidate list logs and moves on", "[regulator]") {
    RegulatorState st = paperclip_state();
    const auto log = run_cycle(st, {});
    CHECK(log.reason == "no candidates");
    CHECK_FALSE(log.chosen);
    CHECK(log.doses_executed == 0);
    CHECK(st.clock == 0.0);
    CHECK(st.cycle == 1);
    CHECK(st.db.empty());
}

TEST_CASE("paperclip runs at its apex and never past its limit", "[regulator]") {
    RegulatorState st = paperclip_state();
    const std::vector<CandidateAction> cands{explicit_candidate("paperclip", with_ec50_b(12.4))};
    const auto log = run_cycle(st, cands);
    REQUIRE(log.chosen == "paperclip");
    REQUIRE(log.candidates.size() == 1);
    CHECK(log.candidates[0].source == "explicit");
    const auto& s = *log.candidates[0].summary;
    CHECK(s.shape == Shape::hormetic);
    CHECK_THAT(*log.target_rate, WithinAbs(0.015, 0.002));
    CHECK(*log.target_rate <= *s.noael_x);
    const auto& doses = st.ledger.at("paperclip").dose_times;
    CHECK(log.doses_executed == doses.size());
    CHECK(log.doses_executed > 50);
    CHECK(static_cast<double>(log.doses_executed) <= *log.ceiling_count);
    CHECK_THAT(doses[1] - doses[0], WithinRel(1.0 / s.apex_x, 1e-12));
    CHECK(st.clock == 4000.0);
    CHECK(st.db.size() == 1);
    CHECK(st.db.find("paperclip")->provenance == Provenance::human);

    SECTION("later cycles reuse the stored analysis without duplicating it") {
        const std::vector<CandidateAction> by_name{{"paperclip", std::nullopt, std::nullopt, 1.0}};
        const auto second = run_cycle(st, by_name);
        CHECK(second.candidates[0].source == "database");
        CHECK(second.candidates[0].cached);
        CHECK(second.db_added == 0);
        CHECK(second.db_updated == 0);
        CHECK(st.db.size() == 1);
        const auto& all = st.ledger.at("paperclip").dose_times;
        CHECK(all.front() == 0.0);
        CHECK(all.back() < 8000.0);
        CHECK(static_cast<double>(all.size()) > 1.9 * static_cast<double>(log.doses_executed));
        CHECK(static_cast<double>(st.ledger.at("paperclip").max_window_count(4000.0)) <= *second.ceiling_count);
    }
}

TEST_CASE("out-of-distribution candidates are skipped unless answered", "[regulator]") {
    RegulatorState st = paperclip_state();
    CandidateAction odd;
    odd.name = "odd";
    odd.hint = with_ec50_b(30.0);
    const std::vector<CandidateAction> cands{odd};
    const auto log = run_cycle(st, cands);
    REQUIRE(log.candidates.size() == 1);
    CHECK(log.candidates[0].status == "skipped");
    CHECK(log.candidates[0].reason == "escalation unanswered");
    CHECK_FALSE(log.chosen);
    CHECK(st.db.empty());
    CHECK(st.clock == 0.0);

    int asked = 0;
    const auto answered = run_cycle(st, cands, [&](const EscalationRequest& req) -> std::optional<ModelParams> {
        ++asked;
        CHECK(req.candidate == "odd");
        return with_ec50_b(12.4);
    });
    CHECK(asked == 1);
    CHECK(answered.candidates[0].source == "escalation");
    CHECK(answered.chosen == "odd");
    CHECK(st.db.find("odd")->provenance == Provenance::human);
}

TEST_CASE("close candidates borrow parameters by similarity", "[regulator]") {
    RegulatorState st = paperclip_state();
    st.config.ood_threshold = 0.5;
    const std::vector<CandidateAction> seed{explicit_candidate("paperclip", with_ec50_b(12.4)),
                                            explicit_candidate("stapler", with_ec50_b(10.0))};
    run_cycle(st, seed);
    CandidateAction near;
    near.name = "binder clip";
    near.hint = with_ec50_b(12.0);
    const std::vector<CandidateAction> cands{near};
    const auto log = run_cycle(st, cands);
    REQUIRE(log.candidates[0].status == "analyzed");
    CHECK(log.candidates[0].source == "similarity");
    CHECK(log.candidates[0].nearest_name == "paperclip");
    const auto* rec = st.db.find("binder clip");
    REQUIRE(rec);
    CHECK(rec->provenance == Provenance::similarity);
    CHECK(rec->params.ec50_b > 10.0);
    CHECK(rec->params.ec50_b < 12.4);
}

TEST_CASE("only harmful or unbounded candidates means no action", "[regulator]") {
    RegulatorState st = paperclip_state();
    ModelParams flat;
    flat.emax_b = 0.0;
    ModelParams bad;
    bad.emax_a = 0.0;
    ModelParams invalid;
    invalid.k_h = -1.0;
    const std::vector<CandidateAction> cands{explicit_candidate("flat", flat), explicit_candidate("bad", bad),
                                             explicit_candidate("invalid", invalid)};
    const auto log = run_cycle(st, cands);
    CHECK_FALSE(log.chosen);
    CHECK(log.reason == "no hormetic candidate");
    CHECK(log.candidates[2].status == "skipped");
    CHECK_FALSE(log.candidates[2].reason.empty());
    CHECK(st.db.size() == 2);
    CHECK(st.clock == 0.0);
}

TEST_CASE("uncertainty factor tightens the dose ceiling", "[regulator]") {
    RegulatorState st = paperclip_state();
    st.config.uncertainty_factor = 0.3;
    const std::vector<CandidateAction> cands{explicit_candidate("paperclip", with_ec50_b(12.4))};
    const auto log = run_cycle(st, cands);
    REQUIRE(log.chosen);
    const double ceiling = std::floor(0.3 * *log.candidates[0].summary->noael_x * 4000.0);
    CHECK(*log.ceiling_count == ceiling);
    CHECK(static_cast<double>(log.doses_executed) == ceiling);
    CHECK(static_cast<double>(st.ledger.at("paperclip").max_window_count(4000.0)) <= ceiling);
}
