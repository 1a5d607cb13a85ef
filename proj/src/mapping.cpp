/*
 * OPC UA PubSub configuration toolkit: traffic-to-configuration mapping
 * and guideline audit.
 *
 * Copyright (c) 2026 the pubsubcfg authors
 *
 * Released under the Apache 2.0 Licence
 */
#include "pubsubcfg/mapping.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

#include "pubsubcfg/errors.hpp"

namespace pubsubcfg {

namespace {

using O = DatasetOrdering;
using E = EncodingKind;
using T = TrafficType;

} // namespace

const std::vector<GuidelineRow>& guideline_table() {
    static const std::vector<GuidelineRow> rows = {
        // Control-Iso / Control-Sync / Control-Async: cyclic key frames, no
        // keepalive, binary encoding, deterministic ordering.
        {{T::ControlIso, T::ControlSync, T::ControlAsync},
         DsmKind::KeyFrame, KfcRule::ExactlyOne, true, DeltaRule::No, KeepAliveRule::No,
         {E::Uadp}, {O::AscendingWriterId, O::AscendingWriterIdSingle}},
        // Event: aperiodic, keepalive so silence is distinguishable from
        // failure, single-NM ordering for low waiting time.
        {{T::Event},
         DsmKind::Event, KfcRule::ExactlyOne, false, DeltaRule::No, KeepAliveRule::Yes,
         {E::Uadp}, {O::AscendingWriterIdSingle, O::Undefined}},
        // Voice/Video: cyclic chunked stream.
        {{T::VoiceVideo},
         DsmKind::Chunk, KfcRule::ExactlyOne, true, DeltaRule::No, KeepAliveRule::No,
         {E::Uadp}, {O::Undefined}},
        // Command-Cycle: cyclic, delta frames where change is sparse.
        {{T::CommandCycle},
         DsmKind::KeyFrame, KfcRule::OneOrGreater, true, DeltaRule::Dependent,
         KeepAliveRule::Dependent, {E::Uadp, E::Json}, {O::Undefined}},
        // Command-Acycle
        {{T::CommandAcycle},
         DsmKind::Event, KfcRule::ExactlyOne, false, DeltaRule::No, KeepAliveRule::Yes,
         {E::Uadp, E::Json}, {O::Undefined}},
        // Config
        {{T::Config},
         DsmKind::Event, KfcRule::ExactlyOne, false, DeltaRule::No, KeepAliveRule::Yes,
         {E::Uadp, E::Json}, {O::Undefined}},
        // Diagnostic-Cycle
        {{T::DiagnosticCycle},
         DsmKind::KeyFrame, KfcRule::OneOrGreater, true, DeltaRule::Dependent,
         KeepAliveRule::Dependent, {E::Uadp, E::Json}, {O::Undefined}},
        // Diagnostic-Acycle
        {{T::DiagnosticAcycle},
         DsmKind::Event, KfcRule::ExactlyOne, false, DeltaRule::No, KeepAliveRule::Yes,
         {E::Uadp, E::Json}, {O::Undefined}},
        // Best-Effort
        {{T::BestEffort},
         DsmKind::Event, KfcRule::ExactlyOne, false, DeltaRule::No, KeepAliveRule::Yes,
         {E::Uadp, E::Json}, {O::Undefined}},
    };
    return rows;
}

const GuidelineRow& guideline_for(TrafficType t) {
    for (const GuidelineRow& row : guideline_table())
        if (std::find(row.traffic.begin(), row.traffic.end(), t) != row.traffic.end()) return row;
    throw std::invalid_argument("no guideline row for traffic id " + std::to_string(traffic_id(t)));
}

double delta_breakeven_threshold(double mean_field_size_bytes) {
    if (mean_field_size_bytes <= 0.0)
        throw std::invalid_argument("mean field size must be positive");
    return mean_field_size_bytes / (mean_field_size_bytes + 2.0);
}

DependentResolution resolve_dependent(const TrafficSpec& spec, const SynthesisOptions& opts) {
    const GuidelineRow& row = guideline_for(spec.type);
    if (row.delta != DeltaRule::Dependent)
        throw std::invalid_argument("traffic type " + traffic_name(spec.type) +
                                    " has no Dependent cells to resolve");

    bool use_delta = false;
    switch (opts.delta_preference) {
    case DeltaPreference::On: use_delta = true; break;
    case DeltaPreference::Off: use_delta = false; break;
    case DeltaPreference::Auto:
        use_delta =
            opts.expected_change_fraction < delta_breakeven_threshold(opts.mean_field_size_bytes);
        break;
    }

    if (!use_delta) return {false, 1, false};
    if (opts.key_frame_count_if_delta <= 1)
        throw ConfigError("key_frame_count_if_delta must be greater than 1 when delta frames "
                          "are enabled");
    // Keepalive accompanies delta frames so that missed deltas are
    // distinguishable from unchanged data.
    return {true, opts.key_frame_count_if_delta, true};
}

DatasetOrdering choose_ordering(const TrafficSpec& spec, const SynthesisOptions& opts) {
    const GuidelineRow& row = guideline_for(spec.type);
    const auto& options = row.ordering_options;
    if (options.size() == 1) return options.front();

    if (options.front() == O::AscendingWriterId) {
        // "2 or 3": aggregate when the publisher emits several cyclic DSMs
        // on a shared interval, otherwise one fixed-size NM per DSM.
        return opts.publisher_has_multiple_cyclic_dsms ? O::AscendingWriterId
                                                       : O::AscendingWriterIdSingle;
    }
    // "3 or 1": events default to per-DSM NMs to avoid waiting for the next
    // group interval; bulk flows may group instead.
    return opts.bulk_flow ? O::Undefined : O::AscendingWriterIdSingle;
}

PublisherConfig synthesize(const TrafficSpec& spec, const SynthesisOptions& opts) {
    const GuidelineRow& row = guideline_for(spec.type);

    bool use_delta = false;
    std::uint32_t kfc = 1;
    bool keepalive = false;

    if (row.delta == DeltaRule::Dependent) {
        DependentResolution r = resolve_dependent(spec, opts);
        use_delta = r.delta;
        kfc = r.kfc;
        keepalive = r.keepalive;
    } else {
        if (opts.delta_preference == DeltaPreference::On)
            throw SynthesisError("GUIDE_DELTA_FORBIDDEN",
                                 "delta frames are not permitted for " + traffic_name(spec.type) +
                                     ": a lost delta leaves the subscriber without a valid "
                                     "reference, which this traffic type cannot absorb");
        keepalive = (row.keepalive == KeepAliveRule::Yes);
    }

    PublisherConfig cfg;
    cfg.dsm_type = use_delta ? DsmKind::DeltaFrame : row.dsm_type;
    cfg.key_frame_count = kfc;
    cfg.cyclic_dataset = row.cyclic;
    cfg.enable_delta_frames = use_delta;
    cfg.keepalive_enabled = keepalive;
    cfg.publishing_interval = opts.publishing_interval;
    cfg.keepalive_time = opts.keepalive_time.count() > 0
                             ? opts.keepalive_time
                             : Micros{4 * opts.publishing_interval.count()};

    if (row.encoding_options.size() == 1 || opts.endpoint_supports_pubsub) {
        cfg.encoding = row.encoding_options.front();
    } else {
        cfg.encoding = E::Json;
    }
    cfg.transport_profile =
        cfg.encoding == E::Uadp ? TransportProfile::UdpUadp : TransportProfile::BrokerJson;

    cfg.dataset_ordering = choose_ordering(spec, opts);
    cfg.max_network_message_size = opts.max_network_message_size;
    cfg.max_encapsulated_dsm_count = opts.max_encapsulated_dsm_count;

    assert(validate_structural(cfg).empty());
    return cfg;
}

namespace {

const Diagnostic make_rule(const RuleInfo& info, std::string subject, std::string message) {
    return {info.id, info.severity, std::move(subject), std::move(message)};
}

} // namespace

const std::vector<RuleInfo>& rule_registry() {
    static const std::vector<RuleInfo> rules = {
        {"R1", Severity::Error,
         "delta frames enabled for loss-intolerant traffic; one lost frame desynchronizes the "
         "subscriber until the next key frame"},
        {"R2", Severity::Warning,
         "key/delta frames configured for aperiodic traffic; data would be retransmitted "
         "cyclically whether or not anything changed, wasting bandwidth and propagating stale "
         "values"},
        {"R3", Severity::Warning,
         "delta frames under dense change; the per-field index overhead and field comparisons "
         "cost more than the bandwidth they save"},
        {"R4", Severity::Warning,
         "KeyFrameCount above 1 without keepalive; silence is indistinguishable from publisher "
         "failure between key frames"},
        {"R5", Severity::Info,
         "KeyFrameCount above 1 has no effect while delta frames are disabled"},
        {"R6", Severity::Error,
         "cyclic_dataset disabled for periodic traffic; emission becomes change-triggered, "
         "which forfeits deterministic isochronous transmission and adds jitter"},
        {"R7", Severity::Warning,
         "keepalive on a cyclic key-frame dataset adds bandwidth without information: the "
         "moment key frames stop arriving the failure is already evident"},
        {"R8", Severity::Error,
         "JSON encoding for traffic that needs deterministic transmission; binary encoding has "
         "lower overhead and bounded encode/decode cost"},
        {"R9", Severity::Error,
         "Undefined ordering for critical fixed-length traffic; NM sizes become inconsistent, "
         "which breaks deterministic scheduling"},
        {"R10", Severity::Warning,
         "per-DSM NMs for bulk variable traffic with multiple datasets; one NM per dataset per "
         "interval incurs considerable device and network overhead"},
        {"R11", Severity::Warning,
         "event traffic without keepalive; subscribers cannot distinguish an idle publisher "
         "from a failed one"},
    };
    return rules;
}

namespace {

const RuleInfo& rule(const char* id) {
    for (const RuleInfo& r : rule_registry())
        if (std::string(id) == r.id) return r;
    throw std::logic_error("unknown rule id");
}

} // namespace

std::vector<Diagnostic> audit(const PublisherConfig& cfg, const TrafficSpec& spec,
                              const FlowContext& ctx) {
    std::vector<Diagnostic> out;
    auto raise = [&](const char* id, std::string subject) {
        const RuleInfo& info = rule(id);
        out.push_back(make_rule(info, std::move(subject), info.summary));
    };

    // A configuration "asks for" delta frames when either surface says so;
    // the pipeline only generates them when both agree, but a half-set pair
    // is still a configuration smell worth flagging.
    const bool delta_on = cfg.enable_delta_frames || cfg.dsm_type == DsmKind::DeltaFrame;
    const bool frame_kind =
        cfg.dsm_type == DsmKind::KeyFrame || cfg.dsm_type == DsmKind::DeltaFrame;

    if (delta_on && !spec.loss_tolerant) raise("R1", "enable_delta_frames, dsm_type");
    if (frame_kind && !spec.periodic) raise("R2", "dsm_type, cyclic_dataset");
    if (delta_on && ctx.expected_change_fraction &&
        *ctx.expected_change_fraction > delta_breakeven_threshold(ctx.mean_field_size_bytes))
        raise("R3", "enable_delta_frames");
    if (cfg.key_frame_count > 1 && !cfg.keepalive_enabled)
        raise("R4", "key_frame_count, keepalive_enabled");
    if (cfg.key_frame_count > 1 && !delta_on) raise("R5", "key_frame_count");
    if (!cfg.cyclic_dataset && spec.periodic) raise("R6", "cyclic_dataset");
    if (cfg.keepalive_enabled && cfg.cyclic_dataset && cfg.dsm_type == DsmKind::KeyFrame &&
        !delta_on)
        raise("R7", "keepalive_enabled");
    if (cfg.encoding == EncodingKind::Json &&
        (spec.criticality == Criticality::High || !spec.loss_tolerant))
        raise("R8", "encoding");
    if (cfg.dataset_ordering == DatasetOrdering::Undefined &&
        spec.criticality == Criticality::High &&
        spec.length_consistency == LengthConsistency::Fixed)
        raise("R9", "dataset_ordering");
    if (cfg.dataset_ordering == DatasetOrdering::AscendingWriterIdSingle &&
        spec.criticality != Criticality::High &&
        spec.length_consistency == LengthConsistency::Variable && ctx.multiple_dsms)
        raise("R10", "dataset_ordering");
    if (!spec.periodic && !cfg.keepalive_enabled) raise("R11", "keepalive_enabled");

    return out;
}

std::vector<Diagnostic> full_report(const PublisherConfig& cfg, const TrafficSpec& spec,
                                    const FlowContext& ctx) {
    std::vector<Diagnostic> out = validate_structural(cfg);
    std::vector<Diagnostic> guide = audit(cfg, spec, ctx);
    out.insert(out.end(), guide.begin(), guide.end());
    return out;
}

} // namespace pubsubcfg
