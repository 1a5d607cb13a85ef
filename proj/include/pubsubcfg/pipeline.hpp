/*
 * OPC UA PubSub configuration toolkit: publisher-side message generation
 * pipeline (dataset snapshots -> DSMs -> NetworkMessages -> encoded sizes).
 *
 * Copyright (c) 2026 the pubsubcfg authors
 *
 * Released under the Apache 2.0 Licence
 */
#ifndef PUBSUBCFG_PIPELINE_HPP
#define PUBSUBCFG_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pubsubcfg/config.hpp"
#include "pubsubcfg/rng.hpp"

namespace pubsubcfg {

/**
 * Byte costs of the encoding layers. These are parameterized stand-ins, not
 * normative wire layouts: they keep every size claim testable without the
 * external standard. delta_field_index is the per-changed-field index cost
 * that makes delta frames lose to key frames under dense change.
 */
struct SizeModel {
    std::uint32_t nm_header = 16;
    std::uint32_t group_header = 8;
    std::uint32_t payload_header_base = 2;
    std::uint32_t payload_header_per_dsm = 2;
    std::uint32_t dsm_header = 8;
    std::uint32_t delta_field_index = 2;
    std::uint32_t json_per_field_overhead = 8;
    std::uint32_t json_field_name_len = 12;
    std::uint32_t chunk_header = 8;
    std::uint32_t chunk_max_payload = 1024;

    bool operator==(const SizeModel&) const = default;
};

/// How a dataset's source values evolve between publishing ticks.
struct ChangeModel {
    enum class Kind {
        Bernoulli,     ///< each field changes independently with p_change per interval
        EventArrivals, ///< Poisson arrivals with the given mean inter-arrival time
        Always,        ///< every field changes every interval
        Never,         ///< nothing ever changes
    };

    Kind kind = Kind::Always;
    double p_change = 0.0;
    std::int64_t mean_interarrival_us = 0;

    bool operator==(const ChangeModel&) const = default;
};

/**
 * One dataset a publisher offers: its fields, its own publishing interval
 * (a multiple of the writer group's), and a change model. writer_kind and
 * writer_key_frame_count override the group configuration for this writer,
 * which lets scenarios co-publish mixed DSM kinds in one group.
 */
struct DataSetDefinition {
    std::string dataset_id;
    std::uint32_t writer_id = 1;
    std::vector<std::uint32_t> field_sizes;
    Micros publishing_interval{100000};
    ChangeModel change_model;
    std::optional<DsmKind> writer_kind;
    std::optional<std::uint32_t> writer_key_frame_count;

    std::size_t field_count() const { return field_sizes.size(); }
    std::uint64_t total_field_bytes() const {
        std::uint64_t sum = 0;
        for (auto s : field_sizes) sum += s;
        return sum;
    }

    bool operator==(const DataSetDefinition&) const = default;
};

/**
 * One DataSetMessage as produced by a writer. payload_bytes is the
 * size-modeled payload: all fields for a key frame or event, index plus
 * value per changed field for a delta frame, zero for a keepalive.
 * source_times_us carries the source timestamps the frame answers for
 * (sample tick for cyclic data, arrival times for events); the simulator
 * turns them into update-latency samples on delivery.
 */
struct DataSetMessage {
    DsmKind kind = DsmKind::KeyFrame;
    std::uint32_t writer_id = 0;
    std::uint64_t sequence_number = 0;
    std::vector<std::uint32_t> changed_field_indices; ///< delta frames only
    std::uint32_t field_count = 0;                    ///< fields carried
    std::uint64_t payload_bytes = 0;
    std::int64_t created_at_us = 0;
    std::uint32_t chunk_index = 0;
    std::uint32_t chunk_count = 1;
    std::vector<std::int64_t> source_times_us;
};

/// One wire unit: an ordered list of DSMs plus headers.
struct NetworkMessage {
    std::vector<DataSetMessage> dsm_list;
    EncodingKind encoding = EncodingKind::Uadp;
    std::uint64_t wire_bytes = 0;
    std::int64_t emitted_at_tick = 0; ///< writer-group tick index
};

/// Per-writer mutable state owned by the simulation engine.
struct WriterState {
    std::uint32_t writer_id = 0;
    std::uint64_t next_sequence = 1;
    std::int64_t last_emission_us = 0; ///< feeds the keepalive timer
    std::vector<std::int64_t> pending_arrivals_us;
    double next_arrival_us = -1.0; ///< Poisson stream cursor, < 0 = not drawn yet
    std::uint64_t change_seed = 0; ///< per-writer coordinate base for change draws
    SequentialRng arrival_rng{1};
};

/// Prepares writer state for a run; seed is the scenario seed.
WriterState make_writer_state(const DataSetDefinition& def, std::uint64_t seed);

/**
 * Advances one writer by one of its publishing ticks and returns the DSM it
 * emits, if any.
 *
 * Cyclic datasets without delta emit a key frame every tick regardless of
 * change. Delta-capable datasets (dsm_type DeltaFrame and EnableDeltaFrames
 * both set, or a per-writer DeltaFrame override under EnableDeltaFrames)
 * emit a key frame every key_frame_count-th tick and otherwise a delta
 * frame covering the changed fields, or nothing when no field changed.
 * Event-mode writers (cyclic_dataset false or an Event kind) emit an event
 * DSM at the first tick after the change model fired. Chunk writers emit
 * one chunk DSM per tick covering all fields; pass it through chunk_segment.
 *
 * tick_us must be aligned to the dataset's publishing interval for cyclic
 * datasets; a misaligned tick throws PipelineError(MISALIGNED_TICK).
 */
std::optional<DataSetMessage> step_writer(const DataSetDefinition& def, const PublisherConfig& cfg,
                                          const SizeModel& model, WriterState& state,
                                          std::int64_t tick_us);

/**
 * Emits a keepalive iff this writer published nothing within the last
 * keepalive_time. Any emission, including the keepalive itself, resets the
 * timer. Call after step_writer for the same tick.
 */
std::optional<DataSetMessage> emit_keepalive_if_due(const PublisherConfig& cfg, WriterState& state,
                                                    std::int64_t tick_us);

/**
 * Splits a chunk DSM into ceil(payload / chunk_max_payload) segments with
 * consecutive sequence numbers starting at the input's; the caller advances
 * the writer's sequence counter by the number of extra segments. Segment
 * payloads concatenate back to the original payload; the per-segment chunk
 * header is charged by encoded_size, not counted in payload_bytes. A zero
 * payload yields one empty segment (stream heartbeat). Throws ConfigError
 * when chunk_max_payload is 0.
 */
std::vector<DataSetMessage> chunk_segment(const DataSetMessage& dsm, const SizeModel& model);

/**
 * Packs ready DSMs into NetworkMessages under the configured ordering:
 * AscendingWriterIdSingle puts each DSM in its own NM in ascending writer
 * order; AscendingWriterId sorts by writer id and packs greedily under
 * max_network_message_size and max_encapsulated_dsm_count; Undefined packs
 * greedily in readiness order. A single non-chunk DSM that cannot fit an NM
 * alone throws PipelineError(OVERSIZE_DSM).
 */
std::vector<NetworkMessage> assemble(std::vector<DataSetMessage> dsms, const PublisherConfig& cfg,
                                     const SizeModel& model, std::int64_t tick_index);

/**
 * Encoded wire size of one NM.
 *
 * UADP: nm_header + group_header + payload_header_base
 *       + payload_header_per_dsm * n + sum(dsm_header [+ chunk_header]
 *       + payload_bytes).
 * JSON adds (json_field_name_len + json_per_field_overhead) per carried
 * field, so a JSON message is strictly larger than its UADP twin for any
 * frame that carries fields.
 */
std::uint64_t encoded_size(const NetworkMessage& nm, const SizeModel& model);

} // namespace pubsubcfg

#endif
