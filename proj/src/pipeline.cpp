/*
 * OPC UA PubSub configuration toolkit: publisher-side message generation
 * pipeline.
 *
 * Copyright (c) 2026 the pubsubcfg authors
 *
 * Released under the Apache 2.0 Licence
 */
#include "pubsubcfg/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "pubsubcfg/errors.hpp"

namespace pubsubcfg {

namespace {

// Domain separators for the counter-based draws.
constexpr std::uint64_t kArrivalDomain = 0xa7c1;
constexpr std::uint64_t kFieldDomain = 0xf1e1;

DsmKind writer_base_kind(const DataSetDefinition& def, const PublisherConfig& cfg) {
    return def.writer_kind.value_or(cfg.dsm_type);
}

bool writer_event_mode(const DataSetDefinition& def, const PublisherConfig& cfg) {
    return !cfg.cyclic_dataset || writer_base_kind(def, cfg) == DsmKind::Event;
}

bool writer_delta_capable(const DataSetDefinition& def, const PublisherConfig& cfg) {
    // The stack flag and the writer's DSM type must both ask for delta
    // frames; a half-set pair falls back to plain key frames.
    return cfg.cyclic_dataset && cfg.enable_delta_frames &&
           writer_base_kind(def, cfg) == DsmKind::DeltaFrame;
}

/// Appends the change-model arrivals in the window (tick - interval, tick]
/// to the writer's pending list. Windows start at the first tick, so a
/// run's arrivals begin after time zero.
void generate_arrivals(const DataSetDefinition& def, WriterState& state, std::int64_t tick_us,
                       std::int64_t interval_us) {
    if (tick_us <= 0) return;
    const std::int64_t window_start = tick_us - interval_us;
    switch (def.change_model.kind) {
    case ChangeModel::Kind::Always: {
        // periodic source with jitter inside the interval
        double u = hash_unit(state.change_seed, kArrivalDomain, static_cast<std::uint64_t>(tick_us));
        auto offset = static_cast<std::int64_t>(u * static_cast<double>(interval_us));
        state.pending_arrivals_us.push_back(window_start + std::min(offset, interval_us - 1));
        break;
    }
    case ChangeModel::Kind::Bernoulli: {
        if (hash_bernoulli(def.change_model.p_change, state.change_seed, kArrivalDomain,
                           static_cast<std::uint64_t>(tick_us))) {
            double u = hash_unit(state.change_seed, kArrivalDomain + 1,
                                 static_cast<std::uint64_t>(tick_us));
            auto offset = static_cast<std::int64_t>(u * static_cast<double>(interval_us));
            state.pending_arrivals_us.push_back(window_start + std::min(offset, interval_us - 1));
        }
        break;
    }
    case ChangeModel::Kind::EventArrivals: {
        const double mean = static_cast<double>(def.change_model.mean_interarrival_us);
        if (mean <= 0.0) throw ConfigError("EventArrivals change model needs a positive mean");
        if (state.next_arrival_us < 0.0) state.next_arrival_us = state.arrival_rng.exponential(mean);
        while (state.next_arrival_us < static_cast<double>(tick_us)) {
            state.pending_arrivals_us.push_back(static_cast<std::int64_t>(state.next_arrival_us));
            state.next_arrival_us += state.arrival_rng.exponential(mean);
        }
        break;
    }
    case ChangeModel::Kind::Never: break;
    }
}

/// Which fields changed during the interval ending at this tick. The draw
/// happens whether or not the configuration looks at it: the source data
/// evolves independently of the transmission mode, which keeps paired-seed
/// config comparisons paired.
std::vector<std::uint32_t> changed_fields(const DataSetDefinition& def, WriterState& state,
                                          std::int64_t tick_us, std::int64_t tick_index) {
    std::vector<std::uint32_t> changed;
    const auto field_total = static_cast<std::uint32_t>(def.field_count());
    switch (def.change_model.kind) {
    case ChangeModel::Kind::Always:
        changed.resize(field_total);
        for (std::uint32_t f = 0; f < field_total; ++f) changed[f] = f;
        break;
    case ChangeModel::Kind::Never: break;
    case ChangeModel::Kind::Bernoulli:
        for (std::uint32_t f = 0; f < field_total; ++f)
            if (hash_bernoulli(def.change_model.p_change, state.change_seed, kFieldDomain,
                               static_cast<std::uint64_t>(tick_index), f))
                changed.push_back(f);
        break;
    case ChangeModel::Kind::EventArrivals: {
        // a burst update: all fields change when at least one arrival landed
        generate_arrivals(def, state, tick_us, def.publishing_interval.count());
        if (!state.pending_arrivals_us.empty()) {
            state.pending_arrivals_us.clear();
            changed.resize(field_total);
            for (std::uint32_t f = 0; f < field_total; ++f) changed[f] = f;
        }
        break;
    }
    }
    return changed;
}

} // namespace

WriterState make_writer_state(const DataSetDefinition& def, std::uint64_t seed) {
    WriterState state;
    state.writer_id = def.writer_id;
    state.change_seed = splitmix64(seed ^ (0x9e3779b97f4a7c15ull * (def.writer_id + 1)));
    state.arrival_rng = SequentialRng(splitmix64(state.change_seed ^ 0xa5a5a5a5a5a5a5a5ull));
    return state;
}

std::optional<DataSetMessage> step_writer(const DataSetDefinition& def, const PublisherConfig& cfg,
                                          const SizeModel& model, WriterState& state,
                                          std::int64_t tick_us) {
    const std::int64_t interval = def.publishing_interval.count();
    if (interval < 1) throw ConfigError("dataset publishing interval must be positive");
    if (tick_us % interval != 0)
        throw PipelineError("MISALIGNED_TICK",
                            "tick " + std::to_string(tick_us) + " us is not aligned to the " +
                                std::to_string(interval) + " us interval of dataset " +
                                def.dataset_id);

    const std::int64_t tick_index = tick_us / interval;
    DataSetMessage dsm;
    dsm.writer_id = def.writer_id;
    dsm.created_at_us = tick_us;

    if (writer_event_mode(def, cfg)) {
        generate_arrivals(def, state, tick_us, interval);
        if (state.pending_arrivals_us.empty()) return std::nullopt;
        // the payload layout matches a key frame: all fields, no indices
        dsm.kind = DsmKind::Event;
        dsm.field_count = static_cast<std::uint32_t>(def.field_count());
        dsm.payload_bytes = def.total_field_bytes();
        dsm.source_times_us = std::move(state.pending_arrivals_us);
        state.pending_arrivals_us.clear();
        dsm.sequence_number = state.next_sequence++;
        state.last_emission_us = tick_us;
        return dsm;
    }

    if (writer_base_kind(def, cfg) == DsmKind::Chunk) {
        dsm.kind = DsmKind::Chunk;
        dsm.field_count = 0; // opaque stream bytes
        dsm.payload_bytes = def.total_field_bytes();
        dsm.source_times_us = {tick_us};
        dsm.sequence_number = state.next_sequence++;
        state.last_emission_us = tick_us;
        return dsm;
    }

    std::vector<std::uint32_t> changed = changed_fields(def, state, tick_us, tick_index);

    const bool delta_capable = writer_delta_capable(def, cfg);
    const std::uint32_t kfc =
        std::max<std::uint32_t>(1, def.writer_key_frame_count.value_or(cfg.key_frame_count));

    if (!delta_capable || tick_index % kfc == 0) {
        dsm.kind = DsmKind::KeyFrame;
        dsm.field_count = static_cast<std::uint32_t>(def.field_count());
        dsm.payload_bytes = def.total_field_bytes();
        dsm.source_times_us = {tick_us};
        dsm.sequence_number = state.next_sequence++;
        state.last_emission_us = tick_us;
        return dsm;
    }

    if (changed.empty()) return std::nullopt; // delta frames are suppressed without change

    dsm.kind = DsmKind::DeltaFrame;
    dsm.field_count = static_cast<std::uint32_t>(changed.size());
    std::uint64_t payload = 0;
    for (std::uint32_t f : changed) payload += model.delta_field_index + def.field_sizes[f];
    dsm.payload_bytes = payload;
    dsm.changed_field_indices = std::move(changed);
    dsm.source_times_us = {tick_us};
    dsm.sequence_number = state.next_sequence++;
    state.last_emission_us = tick_us;
    return dsm;
}

std::optional<DataSetMessage> emit_keepalive_if_due(const PublisherConfig& cfg, WriterState& state,
                                                    std::int64_t tick_us) {
    if (!cfg.keepalive_enabled) return std::nullopt;
    if (tick_us - state.last_emission_us < cfg.keepalive_time.count()) return std::nullopt;
    DataSetMessage ka;
    ka.kind = DsmKind::KeepAlive;
    ka.writer_id = state.writer_id;
    ka.sequence_number = state.next_sequence++;
    ka.field_count = 0;
    ka.payload_bytes = 0;
    ka.created_at_us = tick_us;
    state.last_emission_us = tick_us;
    return ka;
}

std::vector<DataSetMessage> chunk_segment(const DataSetMessage& dsm, const SizeModel& model) {
    if (dsm.kind != DsmKind::Chunk)
        throw std::invalid_argument("chunk_segment expects a Chunk DSM");
    if (model.chunk_max_payload == 0)
        throw ConfigError("chunk_max_payload must be positive to segment chunk messages");

    const std::uint64_t payload = dsm.payload_bytes;
    const std::uint64_t max = model.chunk_max_payload;
    const std::uint32_t segments =
        payload == 0 ? 1 : static_cast<std::uint32_t>((payload + max - 1) / max);

    std::vector<DataSetMessage> out;
    out.reserve(segments);
    for (std::uint32_t i = 0; i < segments; ++i) {
        DataSetMessage seg = dsm;
        seg.payload_bytes = std::min<std::uint64_t>(max, payload - std::uint64_t{i} * max);
        seg.chunk_index = i;
        seg.chunk_count = segments;
        seg.sequence_number = dsm.sequence_number + i;
        if (i != 0) seg.source_times_us.clear();
        out.push_back(std::move(seg));
    }
    return out;
}

namespace {

std::uint64_t dsm_encoded_cost(const DataSetMessage& dsm, EncodingKind encoding,
                               const SizeModel& model) {
    std::uint64_t cost = model.payload_header_per_dsm + model.dsm_header + dsm.payload_bytes;
    if (dsm.kind == DsmKind::Chunk) cost += model.chunk_header;
    if (encoding == EncodingKind::Json)
        cost += std::uint64_t{dsm.field_count} *
                (model.json_field_name_len + model.json_per_field_overhead);
    return cost;
}

} // namespace

std::uint64_t encoded_size(const NetworkMessage& nm, const SizeModel& model) {
    std::uint64_t size = model.nm_header + model.group_header + model.payload_header_base;
    for (const DataSetMessage& dsm : nm.dsm_list) size += dsm_encoded_cost(dsm, nm.encoding, model);
    return size;
}

std::vector<NetworkMessage> assemble(std::vector<DataSetMessage> dsms, const PublisherConfig& cfg,
                                     const SizeModel& model, std::int64_t tick_index) {
    std::vector<NetworkMessage> out;
    if (dsms.empty()) return out;

    const bool sort_by_writer = cfg.dataset_ordering != DatasetOrdering::Undefined;
    if (sort_by_writer) {
        std::stable_sort(dsms.begin(), dsms.end(),
                         [](const DataSetMessage& a, const DataSetMessage& b) {
                             if (a.writer_id != b.writer_id) return a.writer_id < b.writer_id;
                             return a.sequence_number < b.sequence_number;
                         });
    }

    const std::uint64_t base =
        std::uint64_t{model.nm_header} + model.group_header + model.payload_header_base;

    auto single_size = [&](const DataSetMessage& dsm) {
        return base + dsm_encoded_cost(dsm, cfg.encoding, model);
    };
    auto check_fits_alone = [&](const DataSetMessage& dsm) {
        if (single_size(dsm) > cfg.max_network_message_size) {
            std::string hint = dsm.kind == DsmKind::Chunk
                                   ? "; lower chunk_max_payload so segments fit"
                                   : "";
            throw PipelineError("OVERSIZE_DSM",
                                "DSM of writer " + std::to_string(dsm.writer_id) + " needs " +
                                    std::to_string(single_size(dsm)) + " bytes alone, above the " +
                                    std::to_string(cfg.max_network_message_size) +
                                    " byte MaxNetworkMessageSize" + hint);
        }
    };

    if (cfg.dataset_ordering == DatasetOrdering::AscendingWriterIdSingle) {
        for (DataSetMessage& dsm : dsms) {
            check_fits_alone(dsm);
            NetworkMessage nm;
            nm.encoding = cfg.encoding;
            nm.emitted_at_tick = tick_index;
            nm.dsm_list.push_back(std::move(dsm));
            nm.wire_bytes = encoded_size(nm, model);
            out.push_back(std::move(nm));
        }
        return out;
    }

    // greedy packing under the size and count limits, input order preserved
    NetworkMessage cur;
    cur.encoding = cfg.encoding;
    cur.emitted_at_tick = tick_index;
    std::uint64_t cur_size = base;
    auto flush = [&]() {
        if (cur.dsm_list.empty()) return;
        cur.wire_bytes = encoded_size(cur, model);
        out.push_back(std::move(cur));
        cur = NetworkMessage{};
        cur.encoding = cfg.encoding;
        cur.emitted_at_tick = tick_index;
        cur_size = base;
    };

    for (DataSetMessage& dsm : dsms) {
        check_fits_alone(dsm);
        const std::uint64_t cost = dsm_encoded_cost(dsm, cfg.encoding, model);
        if (!cur.dsm_list.empty() && (cur.dsm_list.size() + 1 > cfg.max_encapsulated_dsm_count ||
                                      cur_size + cost > cfg.max_network_message_size))
            flush();
        cur.dsm_list.push_back(std::move(dsm));
        cur_size += cost;
    }
    flush();
    return out;
}

} // namespace pubsubcfg
