/*
 * OPC UA PubSub configuration toolkit: publisher configuration model.
 *
 * Copyright (c) 2026 the pubsubcfg authors
 *
 * Released under the Apache 2.0 Licence
 */
#ifndef PUBSUBCFG_CONFIG_HPP
#define PUBSUBCFG_CONFIG_HPP

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace pubsubcfg {

using Micros = std::chrono::microseconds;

/**
 * DataSetMessage kinds. KeepAlive is an emission kind only: it is produced
 * by the keepalive timer, never configured as a DSM type.
 */
enum class DsmKind { KeyFrame, DeltaFrame, Event, KeepAlive, Chunk };

/// NetworkMessage assembly policies. Numeric codes are part of the file
/// format (1 = Undefined, 2 = AscendingWriterId, 3 = AscendingWriterIdSingle).
enum class DatasetOrdering : int {
    Undefined = 1,
    AscendingWriterId = 2,
    AscendingWriterIdSingle = 3,
};

enum class EncodingKind { Uadp, Json };

/// Supported transport profiles: broker-less UDP for UADP, a broker stub for
/// JSON. Broker specifics beyond the size model are out of scope.
enum class TransportProfile { UdpUadp, BrokerJson };

/**
 * Publisher-side configuration of one writer group and its datasets.
 * Durations are integer microseconds. EnableDeltaFrames is modeled
 * separately from dsm_type because the two live in different components
 * (global stack flag vs. message header) and can disagree; the pipeline
 * generates delta frames only when both agree.
 */
struct PublisherConfig {
    DsmKind dsm_type = DsmKind::KeyFrame;
    std::uint32_t key_frame_count = 1;
    bool cyclic_dataset = true;
    bool enable_delta_frames = false;
    bool keepalive_enabled = false;
    Micros keepalive_time{400000};
    Micros publishing_interval{100000};
    EncodingKind encoding = EncodingKind::Uadp;
    TransportProfile transport_profile = TransportProfile::UdpUadp;
    DatasetOrdering dataset_ordering = DatasetOrdering::AscendingWriterId;
    std::uint32_t max_network_message_size = 1400;
    std::uint32_t max_encapsulated_dsm_count = 16;

    bool operator==(const PublisherConfig&) const = default;
};

enum class Severity { Error, Warning, Info };

/// One audit or validation finding, keyed to a registered rule.
struct Diagnostic {
    std::string rule_id;
    Severity severity = Severity::Error;
    std::string subject; ///< parameter name(s) the finding is about
    std::string message; ///< rationale, self-contained
};

const char* to_string(Severity s);
const char* to_string(DsmKind k);
const char* to_string(DatasetOrdering o);
const char* to_string(EncodingKind e);
const char* to_string(TransportProfile t);
DsmKind dsm_kind_from_string(const std::string& s);
DatasetOrdering dataset_ordering_from_string(const std::string& s);
EncodingKind encoding_from_string(const std::string& s);
TransportProfile transport_from_string(const std::string& s);

/**
 * Structural validation, independent of traffic context. Returns one Error
 * diagnostic per violated invariant; an empty list means the configuration
 * is internally consistent. Pure and idempotent.
 *
 * Rules: STRUCT_DSM_TYPE_KEEPALIVE, STRUCT_KFC_MIN, STRUCT_INTERVAL_MIN,
 * STRUCT_KEEPALIVE_LT_INTERVAL, STRUCT_DELTA_REQUIRES_CYCLIC,
 * STRUCT_EVENT_FLAGS, STRUCT_ENCODING_TRANSPORT, STRUCT_NM_SIZE_MIN,
 * STRUCT_MAX_DSM_COUNT_MIN. See docs/rules.md.
 */
std::vector<Diagnostic> validate_structural(const PublisherConfig& cfg);

/// key_frame_count * publishing_interval: the cadence at which key frames
/// recur when delta frames are in use.
Micros effective_key_frame_period(const PublisherConfig& cfg);

/// Parses a configuration document. Field names mirror PublisherConfig
/// one-to-one (durations carry a _us suffix). Unknown keys are rejected.
PublisherConfig parse_config(const std::string& text);

/// Canonical document form; parse(serialize(cfg)) == cfg.
std::string serialize_config(const PublisherConfig& cfg);

} // namespace pubsubcfg

#endif
