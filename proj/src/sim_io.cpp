/*
 * OPC UA PubSub configuration toolkit: scenario document format.
 *
 * Copyright (c) 2026 the pubsubcfg authors
 *
 * Released under the Apache 2.0 Licence
 */
#include <set>

#include "json.hpp"

#include "pubsubcfg/errors.hpp"
#include "pubsubcfg/sim.hpp"

namespace pubsubcfg {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* change_kind_name(ChangeModel::Kind k) {
    switch (k) {
    case ChangeModel::Kind::Bernoulli: return "Bernoulli";
    case ChangeModel::Kind::EventArrivals: return "EventArrivals";
    case ChangeModel::Kind::Always: return "Always";
    case ChangeModel::Kind::Never: return "Never";
    }
    return "?";
}

ChangeModel change_model_from_json(const ordered_json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ParseError(where + ".change_model: must be an object with a kind string");
    ChangeModel model;
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "Always") {
        model.kind = ChangeModel::Kind::Always;
    } else if (kind == "Never") {
        model.kind = ChangeModel::Kind::Never;
    } else if (kind == "Bernoulli") {
        model.kind = ChangeModel::Kind::Bernoulli;
        if (!j.contains("p_change") || !j["p_change"].is_number())
            throw ParseError(where + ".change_model: Bernoulli needs a numeric p_change");
        model.p_change = j["p_change"].get<double>();
        if (model.p_change < 0.0 || model.p_change > 1.0)
            throw ParseError(where + ".change_model.p_change: must lie in [0, 1]");
    } else if (kind == "EventArrivals") {
        model.kind = ChangeModel::Kind::EventArrivals;
        if (!j.contains("mean_interarrival_us") || !j["mean_interarrival_us"].is_number_integer())
            throw ParseError(where +
                             ".change_model: EventArrivals needs an integer mean_interarrival_us");
        model.mean_interarrival_us = j["mean_interarrival_us"].get<std::int64_t>();
    } else {
        throw ParseError(where + ".change_model.kind: invalid value '" + kind + "'");
    }
    return model;
}

ordered_json change_model_to_json(const ChangeModel& model) {
    ordered_json j;
    j["kind"] = change_kind_name(model.kind);
    if (model.kind == ChangeModel::Kind::Bernoulli) j["p_change"] = model.p_change;
    if (model.kind == ChangeModel::Kind::EventArrivals)
        j["mean_interarrival_us"] = model.mean_interarrival_us;
    return j;
}

DataSetDefinition dataset_from_json(const ordered_json& j, std::size_t index) {
    const std::string where = "datasets[" + std::to_string(index) + "]";
    if (!j.is_object()) throw ParseError(where + ": must be an object");

    static const std::set<std::string> known = {"dataset_id",   "writer_id",
                                                "field_sizes",  "publishing_interval_us",
                                                "change_model", "writer_kind",
                                                "writer_key_frame_count"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw ParseError(where + ": unknown field " + it.key());

    DataSetDefinition def;
    if (!j.contains("dataset_id") || !j["dataset_id"].is_string())
        throw ParseError(where + ": missing string field dataset_id");
    def.dataset_id = j["dataset_id"].get<std::string>();
    if (!j.contains("writer_id") || !j["writer_id"].is_number_integer() ||
        j["writer_id"].get<std::int64_t>() < 1)
        throw ParseError(where + ": field writer_id must be a positive integer");
    def.writer_id = j["writer_id"].get<std::uint32_t>();
    if (!j.contains("field_sizes") || !j["field_sizes"].is_array() || j["field_sizes"].empty())
        throw ParseError(where + ": field field_sizes must be a non-empty array");
    for (const auto& f : j["field_sizes"]) {
        if (!f.is_number_integer() || f.get<std::int64_t>() < 1)
            throw ParseError(where + ": field_sizes entries must be positive integers");
        def.field_sizes.push_back(f.get<std::uint32_t>());
    }
    if (!j.contains("publishing_interval_us") || !j["publishing_interval_us"].is_number_integer())
        throw ParseError(where + ": field publishing_interval_us must be an integer");
    def.publishing_interval = Micros{j["publishing_interval_us"].get<std::int64_t>()};
    if (j.contains("change_model")) def.change_model = change_model_from_json(j["change_model"], where);
    if (j.contains("writer_kind")) {
        if (!j["writer_kind"].is_string()) throw ParseError(where + ": writer_kind must be a string");
        def.writer_kind = dsm_kind_from_string(j["writer_kind"].get<std::string>());
    }
    if (j.contains("writer_key_frame_count")) {
        if (!j["writer_key_frame_count"].is_number_integer() ||
            j["writer_key_frame_count"].get<std::int64_t>() < 1)
            throw ParseError(where + ": writer_key_frame_count must be a positive integer");
        def.writer_key_frame_count = j["writer_key_frame_count"].get<std::uint32_t>();
    }
    return def;
}

ordered_json dataset_to_json(const DataSetDefinition& def) {
    ordered_json j;
    j["dataset_id"] = def.dataset_id;
    j["writer_id"] = def.writer_id;
    j["field_sizes"] = def.field_sizes;
    j["publishing_interval_us"] = def.publishing_interval.count();
    j["change_model"] = change_model_to_json(def.change_model);
    if (def.writer_kind) j["writer_kind"] = to_string(*def.writer_kind);
    if (def.writer_key_frame_count) j["writer_key_frame_count"] = *def.writer_key_frame_count;
    return j;
}

SizeModel size_model_from_json(const ordered_json& j) {
    if (!j.is_object()) throw ParseError("size_model: must be an object");
    SizeModel model;
    auto read = [&](const char* name, std::uint32_t& slot) {
        if (!j.contains(name)) return;
        if (!j[name].is_number_integer() || j[name].get<std::int64_t>() < 0)
            throw ParseError(std::string("size_model.") + name +
                             ": must be a non-negative integer");
        slot = j[name].get<std::uint32_t>();
    };
    static const std::set<std::string> known = {
        "nm_header",      "group_header",       "payload_header_base",
        "payload_header_per_dsm", "dsm_header", "delta_field_index",
        "json_per_field_overhead", "json_field_name_len", "chunk_header",
        "chunk_max_payload"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw ParseError("size_model: unknown field " + it.key());
    read("nm_header", model.nm_header);
    read("group_header", model.group_header);
    read("payload_header_base", model.payload_header_base);
    read("payload_header_per_dsm", model.payload_header_per_dsm);
    read("dsm_header", model.dsm_header);
    read("delta_field_index", model.delta_field_index);
    read("json_per_field_overhead", model.json_per_field_overhead);
    read("json_field_name_len", model.json_field_name_len);
    read("chunk_header", model.chunk_header);
    read("chunk_max_payload", model.chunk_max_payload);
    return model;
}

ordered_json size_model_to_json(const SizeModel& m) {
    ordered_json j;
    j["nm_header"] = m.nm_header;
    j["group_header"] = m.group_header;
    j["payload_header_base"] = m.payload_header_base;
    j["payload_header_per_dsm"] = m.payload_header_per_dsm;
    j["dsm_header"] = m.dsm_header;
    j["delta_field_index"] = m.delta_field_index;
    j["json_per_field_overhead"] = m.json_per_field_overhead;
    j["json_field_name_len"] = m.json_field_name_len;
    j["chunk_header"] = m.chunk_header;
    j["chunk_max_payload"] = m.chunk_max_payload;
    return j;
}

} // namespace

FlowScenario parse_scenario(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("scenario document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("scenario document must be a JSON object");

    static const std::set<std::string> known = {"flow_id",  "publisher", "subscriber",
                                                "traffic",  "config",    "datasets",
                                                "link",     "duration_ticks", "halt_at_tick",
                                                "size_model"};
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (!known.count(it.key())) throw ParseError("unknown field " + it.key());

    FlowScenario s;
    if (doc.contains("flow_id")) s.flow_id = doc["flow_id"].get<std::string>();
    if (doc.contains("publisher")) s.publisher = doc["publisher"].get<std::string>();
    if (doc.contains("subscriber")) s.subscriber = doc["subscriber"].get<std::string>();
    if (!doc.contains("traffic") || !doc["traffic"].is_string())
        throw ParseError("missing string field traffic");
    s.traffic = traffic_from_string(doc["traffic"].get<std::string>());

    if (!doc.contains("config") || !doc["config"].is_object())
        throw ParseError("missing object field config");
    s.config = parse_config(doc["config"].dump());

    if (!doc.contains("datasets") || !doc["datasets"].is_array() || doc["datasets"].empty())
        throw ParseError("field datasets must be a non-empty array");
    std::size_t index = 0;
    for (const auto& d : doc["datasets"]) s.datasets.push_back(dataset_from_json(d, index++));

    if (!doc.contains("link") || !doc["link"].is_object())
        throw ParseError("missing object field link");
    const auto& link = doc["link"];
    static const std::set<std::string> link_known = {"latency_us", "loss_probability", "seed",
                                                     "forced_loss_ticks"};
    for (auto it = link.begin(); it != link.end(); ++it)
        if (!link_known.count(it.key())) throw ParseError("link: unknown field " + it.key());
    if (link.contains("latency_us")) {
        if (!link["latency_us"].is_number_integer())
            throw ParseError("link.latency_us: must be an integer");
        s.link.latency = Micros{link["latency_us"].get<std::int64_t>()};
    }
    if (link.contains("loss_probability")) {
        if (!link["loss_probability"].is_number())
            throw ParseError("link.loss_probability: must be a number");
        s.link.loss_probability = link["loss_probability"].get<double>();
    }
    if (link.contains("seed")) {
        if (!link["seed"].is_number_integer()) throw ParseError("link.seed: must be an integer");
        s.link.seed = link["seed"].get<std::uint64_t>();
    }
    if (link.contains("forced_loss_ticks")) {
        if (!link["forced_loss_ticks"].is_array())
            throw ParseError("link.forced_loss_ticks: must be an array");
        for (const auto& t : link["forced_loss_ticks"]) {
            if (!t.is_number_integer())
                throw ParseError("link.forced_loss_ticks: entries must be integers");
            s.link.forced_loss_ticks.push_back(t.get<std::int64_t>());
        }
    }

    if (!doc.contains("duration_ticks") || !doc["duration_ticks"].is_number_integer())
        throw ParseError("missing integer field duration_ticks");
    s.duration_ticks = doc["duration_ticks"].get<std::int64_t>();

    if (doc.contains("halt_at_tick") && !doc["halt_at_tick"].is_null()) {
        if (!doc["halt_at_tick"].is_number_integer())
            throw ParseError("field halt_at_tick must be an integer");
        s.halt_at_tick = doc["halt_at_tick"].get<std::int64_t>();
    }
    if (doc.contains("size_model")) s.size_model = size_model_from_json(doc["size_model"]);

    validate_scenario(s);
    return s;
}

std::string serialize_scenario(const FlowScenario& s) {
    ordered_json doc;
    doc["flow_id"] = s.flow_id;
    doc["publisher"] = s.publisher;
    doc["subscriber"] = s.subscriber;
    doc["traffic"] = traffic_name(s.traffic);
    doc["config"] = ordered_json::parse(serialize_config(s.config));
    ordered_json datasets = ordered_json::array();
    for (const DataSetDefinition& def : s.datasets) datasets.push_back(dataset_to_json(def));
    doc["datasets"] = std::move(datasets);
    ordered_json link;
    link["latency_us"] = s.link.latency.count();
    link["loss_probability"] = s.link.loss_probability;
    link["seed"] = s.link.seed;
    if (!s.link.forced_loss_ticks.empty()) link["forced_loss_ticks"] = s.link.forced_loss_ticks;
    doc["link"] = std::move(link);
    doc["duration_ticks"] = s.duration_ticks;
    if (s.halt_at_tick) doc["halt_at_tick"] = *s.halt_at_tick;
    if (!(s.size_model == SizeModel{})) doc["size_model"] = size_model_to_json(s.size_model);
    return doc.dump(2) + "\n";
}

} // namespace pubsubcfg
