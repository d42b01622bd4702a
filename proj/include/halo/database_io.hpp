#pragma once

// File formats around the regulator:
//   * D_op database: JSON lines. Line 1 is a header naming the format and
//     schema version; each following line is one behavior record with a
//     fixed field order. Doubles are written in shortest round-trip form.
//   * decision log: one JSON object per cycle, appended.
//   * candidate / escalation-policy files: one behavior per line,
//     "name [key=value ...] [~key=value ...]", '#' starts a comment.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "halo/error.hpp"
#include "halo/params.hpp"
#include "halo/regulator.hpp"

namespace halo {

inline constexpr std::string_view kDbFormat = "halo-dop";
inline constexpr int kDbVersion = 1;

using ojson = nlohmann::ordered_json;

namespace detail {

inline ojson optional_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

inline ojson params_to_json(const ModelParams& p) {
    ojson j = ojson::object();
    for (const auto& f : kParamFields) j[std::string(f.name)] = p.*(f.member);
    return j;
}

inline ojson summary_to_json(const HormeticSummary& s) {
    ojson j = ojson::object();
    j["shape"] = std::string(to_string(s.shape));
    j["apex_x"] = s.apex_x;
    j["apex_tu"] = s.apex_tu;
    j["noael_x"] = optional_json(s.noael_x);
    j["mu_initial"] = s.mu_initial;
    return j;
}

inline double number_at(const ojson& j, const char* key) {
    if (!j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
    const auto& v = j.at(key);
    if (!v.is_number()) throw InvalidInput(std::string("field '") + key + "' is not a number");
    return v.get<double>();
}

inline std::string string_at(const ojson& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw InvalidInput(std::string("missing string field '") + key + "'");
    }
    return j.at(key).get<std::string>();
}

inline ModelParams params_from_json(const ojson& j) {
    if (!j.is_object()) throw InvalidInput("params must be an object");
    ModelParams p;
    for (const auto& f : kParamFields) p.*(f.member) = number_at(j, std::string(f.name).c_str());
    return p;
}

inline HormeticSummary summary_from_json(const ojson& j) {
    if (!j.is_object()) throw InvalidInput("summary must be an object");
    HormeticSummary s;
    s.shape = shape_from_string(string_at(j, "shape"));
    s.apex_x = number_at(j, "apex_x");
    s.apex_tu = number_at(j, "apex_tu");
    if (!j.contains("noael_x")) throw InvalidInput("missing field 'noael_x'");
    if (!j.at("noael_x").is_null()) s.noael_x = number_at(j, "noael_x");
    s.mu_initial = number_at(j, "mu_initial");
    return s;
}

}  // namespace detail

inline ojson record_to_json(const BehaviorRecord& r) {
    ojson j = ojson::object();
    j["name"] = r.name;
    j["provenance"] = std::string(to_string(r.provenance));
    j["analysis"] = std::string(to_string(r.analysis_kind));
    j["potency"] = r.potency;
    j["t_sim"] = r.t_sim;
    j["params"] = detail::params_to_json(r.params);
    j["summary"] = detail::summary_to_json(r.summary);
    j["features"] = r.features;
    return j;
}

inline BehaviorRecord record_from_json(const ojson& j) {
    if (!j.is_object()) throw InvalidInput("record must be an object");
    BehaviorRecord r;
    r.name = detail::string_at(j, "name");
    if (r.name.empty()) throw InvalidInput("record name is empty");
    r.provenance = provenance_from_string(detail::string_at(j, "provenance"));
    r.analysis_kind = analysis_kind_from_string(detail::string_at(j, "analysis"));
    r.potency = detail::number_at(j, "potency");
    r.t_sim = detail::number_at(j, "t_sim");
    if (!j.contains("params")) throw InvalidInput("missing field 'params'");
    r.params = detail::params_from_json(j.at("params"));
    if (!j.contains("summary")) throw InvalidInput("missing field 'summary'");
    r.summary = detail::summary_from_json(j.at("summary"));
    if (!j.contains("features") || !j.at("features").is_array() || j.at("features").size() != kParamCount) {
        throw InvalidInput("features must be an array of " + std::to_string(kParamCount) + " numbers");
    }
    for (std::size_t i = 0; i < kParamCount; ++i) {
        const auto& v = j.at("features")[i];
        if (!v.is_number()) throw InvalidInput("feature " + std::to_string(i) + " is not a number");
        r.features[i] = v.get<double>();
        if (!std::isfinite(r.features[i])) throw InvalidInput("feature " + std::to_string(i) + " is not finite");
    }
    return r;
}

inline void write_db(std::ostream& os, const BehaviorDatabase& db) {
    ojson header = ojson::object();
    header["format"] = std::string(kDbFormat);
    header["version"] = kDbVersion;
    header["records"] = db.size();
    os << header.dump() << '\n';
    for (const auto& r : db.records()) os << record_to_json(r).dump() << '\n';
}

inline BehaviorDatabase read_db(std::istream& is) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(is, line)) throw ParseError("empty database file (missing header)", 1);
    ++lineno;
    ojson header;
    try {
        header = ojson::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed header: ") + e.what(), lineno);
    }
    if (!header.is_object() || !header.contains("format") || header["format"] != std::string(kDbFormat)) {
        throw ParseError("not a halo-dop database", lineno);
    }
    if (!header.contains("version") || !header["version"].is_number_integer()) {
        throw ParseError("header has no integer version", lineno);
    }
    if (header["version"].get<int>() != kDbVersion) {
        throw ParseError("unsupported schema version " + header["version"].dump() + " (expected " +
                             std::to_string(kDbVersion) + ")",
                         lineno);
    }

    BehaviorDatabase db;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        BehaviorRecord rec;
        try {
            rec = record_from_json(ojson::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed record: ") + e.what(), lineno);
        } catch (const InvalidInput& e) {
            throw ParseError(std::string("invalid record: ") + e.what(), lineno);
        }
        if (db.find(rec.name)) throw ParseError("duplicate record '" + rec.name + "'", lineno);
        db.upsert(std::move(rec));
    }
    if (header.contains("records") && header["records"].is_number_unsigned() &&
        header["records"].get<std::size_t>() != db.size()) {
        throw ParseError("header declares " + header["records"].dump() + " records, found " +
                             std::to_string(db.size()),
                         0);
    }
    return db;
}

// Writes to a sibling temp file, then renames over the target.
inline void save_db(const BehaviorDatabase& db, const std::filesystem::path& path) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot write " + tmp.string());
        write_db(os, db);
        os.flush();
        if (!os) throw Error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot replace " + path.string() + ": " + ec.message());
    }
}

inline BehaviorDatabase load_db(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot read " + path.string());
    return read_db(is);
}

inline ojson cycle_to_json(const CycleLog& log) {
    ojson j = ojson::object();
    j["cycle"] = log.cycle;
    j["clock_start"] = log.clock_start;
    ojson cands = ojson::array();
    for (const auto& c : log.candidates) {
        ojson cj = ojson::object();
        cj["name"] = c.name;
        cj["source"] = c.source;
        cj["nearest"] = c.nearest_name ? ojson(*c.nearest_name) : ojson(nullptr);
        cj["distance"] = detail::optional_json(c.nearest_distance);
        cj["status"] = c.status;
        cj["cached"] = c.cached;
        cj["summary"] = c.summary ? detail::summary_to_json(*c.summary) : ojson(nullptr);
        if (!c.reason.empty()) cj["reason"] = c.reason;
        cands.push_back(std::move(cj));
    }
    j["candidates"] = std::move(cands);
    j["chosen"] = log.chosen ? ojson(*log.chosen) : ojson(nullptr);
    j["reason"] = log.reason;
    j["doses_executed"] = log.doses_executed;
    j["target_rate"] = detail::optional_json(log.target_rate);
    j["ceiling_count"] = detail::optional_json(log.ceiling_count);
    j["db_added"] = log.db_added;
    j["db_updated"] = log.db_updated;
    return j;
}

inline void append_log(std::ostream& os, const CycleLog& log) { os << cycle_to_json(log).dump() << '\n'; }

// Parses "name [key=value ...] [~key=value ...] [potency=v]". Plain pairs set
// explicit parameters; '~' pairs describe the action for similarity lookup.
// Both start from the default parameter set.
inline std::optional<CandidateAction> parse_candidate_line(std::string_view raw, std::size_t lineno) {
    std::string line(raw.substr(0, raw.find('#')));
    std::istringstream is(line);
    std::string tok;
    if (!(is >> tok)) return std::nullopt;
    CandidateAction cand;
    cand.name = tok;
    if (cand.name.find('=') != std::string::npos) throw ParseError("candidate line must start with a name", lineno);
    while (is >> tok) {
        const bool hint = tok.front() == '~';
        const std::string body = hint ? tok.substr(1) : tok;
        const auto eq = body.find('=');
        if (eq == std::string::npos || eq == 0) throw ParseError("expected key=value, got '" + tok + "'", lineno);
        const std::string key = body.substr(0, eq);
        double value;
        try {
            std::size_t used = 0;
            value = std::stod(body.substr(eq + 1), &used);
            if (used != body.size() - eq - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError("bad number in '" + tok + "'", lineno);
        }
        if (key == "potency" && !hint) {
            cand.potency = value;
            continue;
        }
        std::optional<ModelParams>& target = hint ? cand.hint : cand.explicit_params;
        if (!target) target = ModelParams{};
        try {
            set_param(*target, key, value);
        } catch (const InvalidInput& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    return cand;
}

inline std::vector<CandidateAction> read_candidates(std::istream& is) {
    std::vector<CandidateAction> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto c = parse_candidate_line(line, lineno)) out.push_back(std::move(*c));
    }
    return out;
}

}  // namespace halo
