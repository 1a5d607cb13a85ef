/*
 * OPC UA PubSub configuration toolkit: traffic-to-configuration mapping
 * and guideline audit.
 *
 * Copyright (c) 2026 the pubsubcfg authors
 *
 * Released under the Apache 2.0 Licence
 */
#ifndef PUBSUBCFG_MAPPING_HPP
#define PUBSUBCFG_MAPPING_HPP

#include <optional>
#include <vector>

#include "pubsubcfg/config.hpp"
#include "pubsubcfg/traffic.hpp"

namespace pubsubcfg {

enum class DeltaPreference { Auto, On, Off };

/**
 * Caller-supplied knobs for synthesis. Fields beyond the mapping decision
 * itself (interval, sizes) exist because a complete PublisherConfig needs
 * values; their defaults are documented, non-normative plumbing.
 */
struct SynthesisOptions {
    DeltaPreference delta_preference = DeltaPreference::Auto;
    /// Does the receiving endpoint speak PubSub/UADP? Enterprise and cloud
    /// endpoints typically do not; they get JSON over a broker.
    bool endpoint_supports_pubsub = true;
    /// Publisher emits several cyclic DSMs on a shared interval.
    bool publisher_has_multiple_cyclic_dsms = false;
    /// Caller marks the flow as bulk (many datasets, no per-event latency
    /// requirement). Affects the event-row ordering choice only.
    bool bulk_flow = false;
    /// Expected per-interval fraction of fields changing; drives the Auto
    /// delta decision.
    double expected_change_fraction = 0.0;
    /// Mean dataset field size in bytes, for the delta breakeven rule.
    double mean_field_size_bytes = 4.0;
    /// KeyFrameCount to use when delta frames are enabled; must be > 1.
    std::uint32_t key_frame_count_if_delta = 8;

    Micros publishing_interval{100000};
    /// 0 selects the default of 4 * publishing_interval.
    Micros keepalive_time{0};
    std::uint32_t max_network_message_size = 1400;
    std::uint32_t max_encapsulated_dsm_count = 16;
};

enum class KfcRule { ExactlyOne, OneOrGreater };
enum class DeltaRule { No, Dependent };
enum class KeepAliveRule { Yes, No, Dependent };

/**
 * One row of the mapping guideline. The table has nine rows covering the
 * eleven traffic types; the three control types share the first row.
 * "Dependent" means: if delta frames are employed the value is yes and
 * KeyFrameCount must exceed 1, otherwise no and KeyFrameCount equals 1.
 */
struct GuidelineRow {
    std::vector<TrafficType> traffic;
    DsmKind dsm_type = DsmKind::KeyFrame; ///< DeltaFrame when delta=Dependent resolves on
    KfcRule kfc_rule = KfcRule::ExactlyOne;
    bool cyclic = true;
    DeltaRule delta = DeltaRule::No;
    KeepAliveRule keepalive = KeepAliveRule::No;
    std::vector<EncodingKind> encoding_options;   ///< preferred first
    std::vector<DatasetOrdering> ordering_options; ///< preferred first
};

/// The nine guideline rows, in traffic-id order.
const std::vector<GuidelineRow>& guideline_table();

/// The guideline row covering one traffic type.
const GuidelineRow& guideline_for(TrafficType t);

/// The change fraction above which delta frames stop paying off for mean
/// field size s: each changed field costs its value plus a 2-byte index, so
/// delta wins iff c * (s + 2) < s, i.e. c < s / (s + 2).
double delta_breakeven_threshold(double mean_field_size_bytes);

struct DependentResolution {
    bool delta = false;
    std::uint32_t kfc = 1;
    bool keepalive = false;
};

/**
 * Resolves the "Dependent" cells for Command-Cycle / Diagnostic-Cycle.
 * On: delta with the caller's KeyFrameCount and keepalive. Off: plain key
 * frames. Auto: delta iff expected_change_fraction is below the breakeven
 * threshold. Throws std::invalid_argument for other traffic types or a
 * key_frame_count_if_delta of 1 when delta resolves on.
 */
DependentResolution resolve_dependent(const TrafficSpec& spec, const SynthesisOptions& opts);

/// Picks a DatasetOrdering from the guideline row's permitted options.
DatasetOrdering choose_ordering(const TrafficSpec& spec, const SynthesisOptions& opts);

/**
 * Synthesizes a publisher configuration for a traffic type. The result
 * always passes structural validation and stays within the guideline row's
 * permitted values. Throws SynthesisError(GUIDE_DELTA_FORBIDDEN) when delta
 * frames are requested for a row that forbids them.
 */
PublisherConfig synthesize(const TrafficSpec& spec, const SynthesisOptions& opts = {});

/// Flow-level facts the audit cannot read off the configuration itself.
struct FlowContext {
    /// Expected per-interval fraction of fields changing; when absent the
    /// churn rule (R3) is not evaluated.
    std::optional<double> expected_change_fraction;
    double mean_field_size_bytes = 4.0;
    /// The publisher co-publishes several DSMs on this connection.
    bool multiple_dsms = false;
};

/**
 * Audits a configuration against the guideline for a traffic type and
 * returns every triggered rule (R1..R11, see docs/rules.md). Structural
 * findings are not repeated here; run validate_structural first. A
 * configuration synthesized for the same spec audits clean.
 */
std::vector<Diagnostic> audit(const PublisherConfig& cfg, const TrafficSpec& spec,
                              const FlowContext& ctx = {});

/// Structural findings followed by guideline findings, in one pass.
std::vector<Diagnostic> full_report(const PublisherConfig& cfg, const TrafficSpec& spec,
                                    const FlowContext& ctx = {});

/// Registry metadata for one audit rule.
struct RuleInfo {
    const char* id;
    Severity severity;
    const char* summary;
};

/// The eleven guideline rules in registry order.
const std::vector<RuleInfo>& rule_registry();

} // namespace pubsubcfg

#endif
