/*
 * OPC UA PubSub configuration toolkit: industrial traffic-type catalog.
 *
 * Copyright (c) 2026 the pubsubcfg authors
 *
 * Released under the Apache 2.0 Licence
 */
#include "pubsubcfg/traffic.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <sstream>

#include "json.hpp"

#include "pubsubcfg/errors.hpp"

namespace pubsubcfg {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kTrafficTypeCount = 11;

const std::array<std::string, kTrafficTypeCount>& traffic_names() {
    static const std::array<std::string, kTrafficTypeCount> names = {
        "Control-Iso",   "Control-Sync",     "Control-Async",     "Event",
        "Voice/Video",   "Command-Cycle",    "Command-Acycle",    "Config",
        "Diagnostic-Cycle", "Diagnostic-Acycle", "Best-Effort",
    };
    return names;
}

std::string normalize_name(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char ch : text) {
        if (ch == '_' || ch == ' ') ch = '-';
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    return out;
}

} // namespace

int traffic_id(TrafficType t) { return static_cast<int>(t); }

const std::string& traffic_name(TrafficType t) {
    int id = traffic_id(t);
    if (id < 1 || id > kTrafficTypeCount) throw ParseError("traffic id out of range");
    return traffic_names()[static_cast<std::size_t>(id - 1)];
}

TrafficType traffic_from_string(const std::string& text) {
    // numeric id form
    if (!text.empty() && std::all_of(text.begin(), text.end(),
                                     [](unsigned char c) { return std::isdigit(c); })) {
        int id = std::stoi(text);
        if (id >= 1 && id <= kTrafficTypeCount) return static_cast<TrafficType>(id);
        throw ParseError("unknown traffic id '" + text + "' (expected 1..11)");
    }
    const std::string wanted = normalize_name(text);
    for (int id = 1; id <= kTrafficTypeCount; ++id) {
        std::string name = normalize_name(traffic_names()[static_cast<std::size_t>(id - 1)]);
        if (wanted == name) return static_cast<TrafficType>(id);
        // allow "voice-video" for the merged entry
        std::replace(name.begin(), name.end(), '/', '-');
        if (wanted == name) return static_cast<TrafficType>(id);
    }
    throw ParseError("unknown traffic type '" + text + "'");
}

const char* to_string(Criticality c) {
    switch (c) {
    case Criticality::High: return "High";
    case Criticality::Medium: return "Medium";
    case Criticality::Low: return "Low";
    }
    return "?";
}

const char* to_string(LengthConsistency l) {
    return l == LengthConsistency::Fixed ? "Fixed" : "Variable";
}

const char* to_string(CommLevel l) {
    switch (l) {
    case CommLevel::C2C: return "C2C";
    case CommLevel::C2D: return "C2D";
    case CommLevel::D2Cmp: return "D2Cmp";
    }
    return "?";
}

Criticality criticality_from_string(const std::string& s) {
    if (s == "High") return Criticality::High;
    if (s == "Medium") return Criticality::Medium;
    if (s == "Low") return Criticality::Low;
    throw ParseError("invalid value '" + s + "' for field criticality (expected High|Medium|Low)");
}

LengthConsistency length_consistency_from_string(const std::string& s) {
    if (s == "Fixed") return LengthConsistency::Fixed;
    if (s == "Variable") return LengthConsistency::Variable;
    throw ParseError("invalid value '" + s +
                     "' for field length_consistency (expected Fixed|Variable)");
}

CommLevel comm_level_from_string(const std::string& s) {
    if (s == "C2C") return CommLevel::C2C;
    if (s == "C2D") return CommLevel::C2D;
    if (s == "D2Cmp") return CommLevel::D2Cmp;
    throw ParseError("invalid value '" + s + "' for field comm_levels (expected C2C|C2D|D2Cmp)");
}

std::vector<std::string> comm_level_names(CommLevelSet set) {
    std::vector<std::string> out;
    for (CommLevel l : {CommLevel::C2C, CommLevel::C2D, CommLevel::D2Cmp})
        if (set.contains(l)) out.emplace_back(to_string(l));
    return out;
}

const std::vector<TrafficSpec>& builtin_catalog() {
    static const std::vector<TrafficSpec> catalog = {
        {TrafficType::ControlIso, true, Criticality::High, false, LengthConsistency::Fixed,
         {CommLevel::C2C, CommLevel::C2D}},
        {TrafficType::ControlSync, true, Criticality::High, false, LengthConsistency::Fixed,
         {CommLevel::C2C, CommLevel::C2D}},
        {TrafficType::ControlAsync, true, Criticality::High, true, LengthConsistency::Fixed,
         {CommLevel::C2C, CommLevel::C2D}},
        {TrafficType::Event, false, Criticality::High, true, LengthConsistency::Variable,
         {CommLevel::C2C, CommLevel::C2D, CommLevel::D2Cmp}},
        {TrafficType::VoiceVideo, true, Criticality::Low, true, LengthConsistency::Variable,
         {CommLevel::D2Cmp}},
        {TrafficType::CommandCycle, true, Criticality::Medium, true, LengthConsistency::Variable,
         {CommLevel::C2D, CommLevel::D2Cmp}},
        {TrafficType::CommandAcycle, false, Criticality::Medium, true, LengthConsistency::Variable,
         {CommLevel::C2D, CommLevel::D2Cmp}},
        {TrafficType::Config, false, Criticality::Medium, true, LengthConsistency::Variable,
         {CommLevel::C2C, CommLevel::C2D, CommLevel::D2Cmp}},
        {TrafficType::DiagnosticCycle, true, Criticality::Medium, true,
         LengthConsistency::Variable, {CommLevel::C2C, CommLevel::C2D, CommLevel::D2Cmp}},
        {TrafficType::DiagnosticAcycle, false, Criticality::Medium, true,
         LengthConsistency::Variable, {CommLevel::C2C, CommLevel::C2D, CommLevel::D2Cmp}},
        {TrafficType::BestEffort, false, Criticality::Low, true, LengthConsistency::Variable,
         {CommLevel::D2Cmp}},
    };
    return catalog;
}

const TrafficSpec& builtin_spec(TrafficType t) {
    return builtin_catalog()[static_cast<std::size_t>(traffic_id(t) - 1)];
}

std::vector<TrafficType> classify_flow(const FlowAttributes& attrs,
                                       const std::vector<TrafficSpec>& catalog) {
    std::vector<TrafficType> out;
    for (const TrafficSpec& spec : catalog) {
        if (spec.periodic == attrs.periodic && spec.criticality == attrs.criticality &&
            spec.loss_tolerant == attrs.loss_tolerant &&
            spec.length_consistency == attrs.length_consistency &&
            spec.comm_levels.intersects(attrs.comm_levels)) {
            out.push_back(spec.type);
        }
    }
    std::sort(out.begin(), out.end(),
              [](TrafficType a, TrafficType b) { return traffic_id(a) < traffic_id(b); });
    return out;
}

FlowAttributes spec_as_attributes(const TrafficSpec& spec) {
    return {spec.periodic, spec.criticality, spec.loss_tolerant, spec.length_consistency,
            spec.comm_levels};
}

namespace {

TrafficSpec spec_from_json(const ordered_json& rec, std::size_t index) {
    const std::string where = "traffic_types[" + std::to_string(index) + "]";
    auto require = [&](const char* field) -> const ordered_json& {
        auto it = rec.find(field);
        if (it == rec.end())
            throw ParseError(where + ": missing field " + field);
        return *it;
    };

    static const std::set<std::string> known = {"id",            "name",
                                                "periodic",      "criticality",
                                                "loss_tolerant", "length_consistency",
                                                "comm_levels"};
    for (auto it = rec.begin(); it != rec.end(); ++it)
        if (!known.count(it.key()))
            throw ParseError(where + ": unknown field " + it.key());

    const ordered_json& idj = require("id");
    if (!idj.is_number_integer())
        throw ParseError(where + ": field id must be an integer");
    int id = idj.get<int>();
    if (id < 1 || id > kTrafficTypeCount)
        throw ParseError(where + ": field id out of range (expected 1..11)");

    TrafficSpec spec;
    spec.type = static_cast<TrafficType>(id);

    const ordered_json& namej = require("name");
    if (!namej.is_string()) throw ParseError(where + ": field name must be a string");
    if (namej.get<std::string>() != traffic_name(spec.type))
        throw ParseError(where + ": field name '" + namej.get<std::string>() +
                         "' does not match id " + std::to_string(id) + " ('" +
                         traffic_name(spec.type) + "')");

    const ordered_json& per = require("periodic");
    if (!per.is_boolean()) throw ParseError(where + ": field periodic must be a boolean");
    spec.periodic = per.get<bool>();

    const ordered_json& crit = require("criticality");
    if (!crit.is_string()) throw ParseError(where + ": field criticality must be a string");
    try {
        spec.criticality = criticality_from_string(crit.get<std::string>());
    } catch (const ParseError& e) {
        throw ParseError(where + ": " + e.what());
    }

    const ordered_json& loss = require("loss_tolerant");
    if (!loss.is_boolean()) throw ParseError(where + ": field loss_tolerant must be a boolean");
    spec.loss_tolerant = loss.get<bool>();

    const ordered_json& len = require("length_consistency");
    if (!len.is_string())
        throw ParseError(where + ": field length_consistency must be a string");
    try {
        spec.length_consistency = length_consistency_from_string(len.get<std::string>());
    } catch (const ParseError& e) {
        throw ParseError(where + ": " + e.what());
    }

    const ordered_json& levels = require("comm_levels");
    if (!levels.is_array() || levels.empty())
        throw ParseError(where + ": field comm_levels must be a non-empty array");
    for (const auto& l : levels) {
        if (!l.is_string()) throw ParseError(where + ": field comm_levels must hold strings");
        try {
            spec.comm_levels.insert(comm_level_from_string(l.get<std::string>()));
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    return spec;
}

} // namespace

std::vector<TrafficSpec> parse_traffic_catalog(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("catalog document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("traffic_types") || !doc["traffic_types"].is_array())
        throw ParseError("catalog document must be an object with a traffic_types array");

    std::vector<TrafficSpec> out;
    std::set<int> seen;
    std::size_t index = 0;
    for (const auto& rec : doc["traffic_types"]) {
        if (!rec.is_object())
            throw ParseError("traffic_types[" + std::to_string(index) + "]: must be an object");
        TrafficSpec spec = spec_from_json(rec, index);
        if (!seen.insert(traffic_id(spec.type)).second)
            throw ParseError("duplicate traffic id " + std::to_string(traffic_id(spec.type)) +
                             " at traffic_types[" + std::to_string(index) + "]");
        out.push_back(spec);
        ++index;
    }
    return out;
}

std::string serialize_traffic_catalog(const std::vector<TrafficSpec>& catalog) {
    ordered_json rows = ordered_json::array();
    for (const TrafficSpec& spec : catalog) {
        ordered_json rec;
        rec["id"] = traffic_id(spec.type);
        rec["name"] = traffic_name(spec.type);
        rec["periodic"] = spec.periodic;
        rec["criticality"] = to_string(spec.criticality);
        rec["loss_tolerant"] = spec.loss_tolerant;
        rec["length_consistency"] = to_string(spec.length_consistency);
        rec["comm_levels"] = comm_level_names(spec.comm_levels);
        rows.push_back(std::move(rec));
    }
    ordered_json doc;
    doc["traffic_types"] = std::move(rows);
    return doc.dump(2) + "\n";
}

} // namespace pubsubcfg
