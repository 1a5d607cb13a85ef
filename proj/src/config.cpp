/*
 * OPC UA PubSub configuration toolkit: publisher configuration model.
 *
 * Copyright (c) 2026 the pubsubcfg authors
 *
 * Released under the Apache 2.0 Licence
 */
#include "pubsubcfg/config.hpp"

#include <set>

#include "json.hpp"

#include "pubsubcfg/errors.hpp"

namespace pubsubcfg {

namespace {
using ordered_json = nlohmann::ordered_json;
}

const char* to_string(Severity s) {
    switch (s) {
    case Severity::Error: return "Error";
    case Severity::Warning: return "Warning";
    case Severity::Info: return "Info";
    }
    return "?";
}

const char* to_string(DsmKind k) {
    switch (k) {
    case DsmKind::KeyFrame: return "KeyFrame";
    case DsmKind::DeltaFrame: return "DeltaFrame";
    case DsmKind::Event: return "Event";
    case DsmKind::KeepAlive: return "KeepAlive";
    case DsmKind::Chunk: return "Chunk";
    }
    return "?";
}

const char* to_string(DatasetOrdering o) {
    switch (o) {
    case DatasetOrdering::Undefined: return "Undefined";
    case DatasetOrdering::AscendingWriterId: return "AscendingWriterID";
    case DatasetOrdering::AscendingWriterIdSingle: return "AscendingWriterIDSingle";
    }
    return "?";
}

const char* to_string(EncodingKind e) { return e == EncodingKind::Uadp ? "UADP" : "JSON"; }

const char* to_string(TransportProfile t) {
    return t == TransportProfile::UdpUadp ? "UdpUadp" : "BrokerJson";
}

DsmKind dsm_kind_from_string(const std::string& s) {
    if (s == "KeyFrame") return DsmKind::KeyFrame;
    if (s == "DeltaFrame") return DsmKind::DeltaFrame;
    if (s == "Event") return DsmKind::Event;
    if (s == "KeepAlive") return DsmKind::KeepAlive;
    if (s == "Chunk") return DsmKind::Chunk;
    throw ParseError("invalid value '" + s + "' for field dsm_type");
}

DatasetOrdering dataset_ordering_from_string(const std::string& s) {
    if (s == "Undefined" || s == "1") return DatasetOrdering::Undefined;
    if (s == "AscendingWriterID" || s == "2") return DatasetOrdering::AscendingWriterId;
    if (s == "AscendingWriterIDSingle" || s == "3") return DatasetOrdering::AscendingWriterIdSingle;
    throw ParseError("invalid value '" + s + "' for field dataset_ordering");
}

EncodingKind encoding_from_string(const std::string& s) {
    if (s == "UADP") return EncodingKind::Uadp;
    if (s == "JSON") return EncodingKind::Json;
    throw ParseError("invalid value '" + s + "' for field encoding (expected UADP|JSON)");
}

TransportProfile transport_from_string(const std::string& s) {
    if (s == "UdpUadp") return TransportProfile::UdpUadp;
    if (s == "BrokerJson") return TransportProfile::BrokerJson;
    throw ParseError("invalid value '" + s + "' for field transport_profile");
}

std::vector<Diagnostic> validate_structural(const PublisherConfig& cfg) {
    std::vector<Diagnostic> out;
    auto flag = [&](const char* id, const char* subject, std::string message) {
        out.push_back({id, Severity::Error, subject, std::move(message)});
    };

    if (cfg.dsm_type == DsmKind::KeepAlive)
        flag("STRUCT_DSM_TYPE_KEEPALIVE", "dsm_type",
             "KeepAlive is an emission kind, not a configurable DSM type; use "
             "keepalive_enabled instead");
    if (cfg.key_frame_count < 1)
        flag("STRUCT_KFC_MIN", "key_frame_count",
             "KeyFrameCount must be at least 1 (1 means a key frame every interval)");
    if (cfg.publishing_interval.count() < 1)
        flag("STRUCT_INTERVAL_MIN", "publishing_interval",
             "PublishingInterval must be a positive duration");
    if (cfg.keepalive_enabled && cfg.keepalive_time < cfg.publishing_interval)
        flag("STRUCT_KEEPALIVE_LT_INTERVAL", "keepalive_time",
             "KeepAliveTime must be equal to or greater than the PublishingInterval");
    if (cfg.enable_delta_frames && !cfg.cyclic_dataset)
        flag("STRUCT_DELTA_REQUIRES_CYCLIC", "enable_delta_frames, cyclic_dataset",
             "delta frames track changes between cyclic snapshots and require a cyclic dataset");
    if (cfg.dsm_type == DsmKind::Event && (cfg.cyclic_dataset || cfg.enable_delta_frames))
        flag("STRUCT_EVENT_FLAGS", "dsm_type, cyclic_dataset, enable_delta_frames",
             "an Event DSM type requires cyclic_dataset=false and enable_delta_frames=false");
    if ((cfg.encoding == EncodingKind::Uadp) != (cfg.transport_profile == TransportProfile::UdpUadp))
        flag("STRUCT_ENCODING_TRANSPORT", "encoding, transport_profile",
             "UADP encoding pairs with the UdpUadp transport profile and JSON with BrokerJson");
    if (cfg.max_network_message_size < 1)
        flag("STRUCT_NM_SIZE_MIN", "max_network_message_size",
             "MaxNetworkMessageSize must be positive");
    if (cfg.max_encapsulated_dsm_count < 1)
        flag("STRUCT_MAX_DSM_COUNT_MIN", "max_encapsulated_dsm_count",
             "MaxEncapsulatedDSMCount must be at least 1");
    return out;
}

Micros effective_key_frame_period(const PublisherConfig& cfg) {
    return Micros{static_cast<std::int64_t>(cfg.key_frame_count) * cfg.publishing_interval.count()};
}

namespace {

std::int64_t require_duration_us(const ordered_json& j, const char* field) {
    if (!j.is_number_integer())
        throw ParseError(std::string("field ") + field + " must be an integer microsecond count");
    return j.get<std::int64_t>();
}

std::uint32_t require_u32(const ordered_json& j, const char* field) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
        throw ParseError(std::string("field ") + field + " must be a non-negative integer");
    return static_cast<std::uint32_t>(j.get<std::int64_t>());
}

bool require_bool(const ordered_json& j, const char* field) {
    if (!j.is_boolean()) throw ParseError(std::string("field ") + field + " must be a boolean");
    return j.get<bool>();
}

std::string require_string(const ordered_json& j, const char* field) {
    if (!j.is_string()) throw ParseError(std::string("field ") + field + " must be a string");
    return j.get<std::string>();
}

} // namespace

PublisherConfig parse_config(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("configuration document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("configuration document must be a JSON object");

    static const std::set<std::string> known = {
        "dsm_type",       "key_frame_count",   "cyclic_dataset",
        "enable_delta_frames", "keepalive_enabled", "keepalive_time_us",
        "publishing_interval_us", "encoding",      "transport_profile",
        "dataset_ordering", "max_network_message_size", "max_encapsulated_dsm_count"};
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (!known.count(it.key())) throw ParseError("unknown field " + it.key());

    PublisherConfig cfg;
    if (doc.contains("dsm_type")) cfg.dsm_type = dsm_kind_from_string(require_string(doc["dsm_type"], "dsm_type"));
    if (doc.contains("key_frame_count"))
        cfg.key_frame_count = require_u32(doc["key_frame_count"], "key_frame_count");
    if (doc.contains("cyclic_dataset"))
        cfg.cyclic_dataset = require_bool(doc["cyclic_dataset"], "cyclic_dataset");
    if (doc.contains("enable_delta_frames"))
        cfg.enable_delta_frames = require_bool(doc["enable_delta_frames"], "enable_delta_frames");
    if (doc.contains("keepalive_enabled"))
        cfg.keepalive_enabled = require_bool(doc["keepalive_enabled"], "keepalive_enabled");
    if (doc.contains("keepalive_time_us"))
        cfg.keepalive_time = Micros{require_duration_us(doc["keepalive_time_us"], "keepalive_time_us")};
    if (doc.contains("publishing_interval_us"))
        cfg.publishing_interval =
            Micros{require_duration_us(doc["publishing_interval_us"], "publishing_interval_us")};
    if (doc.contains("encoding"))
        cfg.encoding = encoding_from_string(require_string(doc["encoding"], "encoding"));
    if (doc.contains("transport_profile"))
        cfg.transport_profile =
            transport_from_string(require_string(doc["transport_profile"], "transport_profile"));
    if (doc.contains("dataset_ordering")) {
        const auto& j = doc["dataset_ordering"];
        if (j.is_number_integer()) {
            cfg.dataset_ordering = dataset_ordering_from_string(std::to_string(j.get<int>()));
        } else {
            cfg.dataset_ordering =
                dataset_ordering_from_string(require_string(j, "dataset_ordering"));
        }
    }
    if (doc.contains("max_network_message_size"))
        cfg.max_network_message_size =
            require_u32(doc["max_network_message_size"], "max_network_message_size");
    if (doc.contains("max_encapsulated_dsm_count"))
        cfg.max_encapsulated_dsm_count =
            require_u32(doc["max_encapsulated_dsm_count"], "max_encapsulated_dsm_count");
    return cfg;
}

std::string serialize_config(const PublisherConfig& cfg) {
    ordered_json doc;
    doc["dsm_type"] = to_string(cfg.dsm_type);
    doc["key_frame_count"] = cfg.key_frame_count;
    doc["cyclic_dataset"] = cfg.cyclic_dataset;
    doc["enable_delta_frames"] = cfg.enable_delta_frames;
    doc["keepalive_enabled"] = cfg.keepalive_enabled;
    doc["keepalive_time_us"] = cfg.keepalive_time.count();
    doc["publishing_interval_us"] = cfg.publishing_interval.count();
    doc["encoding"] = to_string(cfg.encoding);
    doc["transport_profile"] = to_string(cfg.transport_profile);
    doc["dataset_ordering"] = to_string(cfg.dataset_ordering);
    doc["max_network_message_size"] = cfg.max_network_message_size;
    doc["max_encapsulated_dsm_count"] = cfg.max_encapsulated_dsm_count;
    return doc.dump(2) + "\n";
}

} // namespace pubsubcfg
