/*
 * OPC UA PubSub configuration toolkit: scenario simulation over a lossy
 * link, metrics, built-in use case and misconfiguration experiments.
 *
 * Copyright (c) 2026 the pubsubcfg authors
 *
 * Released under the Apache 2.0 Licence
 */
#ifndef PUBSUBCFG_SIM_HPP
#define PUBSUBCFG_SIM_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pubsubcfg/mapping.hpp"
#include "pubsubcfg/pipeline.hpp"

namespace pubsubcfg {

/**
 * A single logical link between publisher and observer. Loss is an
 * independent Bernoulli draw per NetworkMessage; the same seed reproduces
 * the same loss pattern, and the draws are position-keyed so two runs of
 * different configurations under one seed see paired losses.
 * forced_loss_ticks drops every NM emitted at the listed group ticks,
 * for deterministic loss-injection experiments.
 */
struct LinkModel {
    Micros latency{0};
    double loss_probability = 0.0;
    std::uint64_t seed = 1;
    std::vector<std::int64_t> forced_loss_ticks;

    bool operator==(const LinkModel&) const = default;
};

/**
 * One flow: a publisher's datasets, a writer-group configuration, the
 * traffic type it is meant to carry, a link, and a duration in group ticks.
 * halt_at_tick scripts a publisher failure: from that tick on, nothing is
 * emitted (keepalives included), which is what failure detection measures.
 */
struct FlowScenario {
    std::string flow_id;
    std::string publisher;
    std::string subscriber;
    TrafficType traffic = TrafficType::ControlIso;
    std::vector<DataSetDefinition> datasets;
    PublisherConfig config;
    LinkModel link;
    std::int64_t duration_ticks = 1;
    std::optional<std::int64_t> halt_at_tick;
    SizeModel size_model;
};

/// How a halted publisher's failure was (or was not) noticed downstream.
enum class DetectionOutcome { NotApplicable, Undetected, Detected };

/**
 * Metrics of one run. bytes_on_wire counts every emitted NM whether or not
 * the link dropped it (loss removes delivery, not emission). desync_ticks
 * counts dataset ticks during which the observer of a delta-capable writer
 * had no valid reference (a lost frame broke the chain and no key frame
 * has been delivered yet); it is zero whenever delta frames are disabled.
 * Latency statistics are over delivered update samples.
 */
struct SimMetrics {
    std::uint64_t bytes_on_wire = 0;
    std::uint64_t payload_bytes = 0;
    std::uint64_t nm_count = 0;
    std::uint64_t dsm_count = 0;
    std::uint64_t keepalive_bytes = 0;
    double mean_update_latency_us = 0.0;
    double p99_update_latency_us = 0.0;
    double latency_stddev_us = 0.0;
    double nm_wire_stddev = 0.0;
    std::int64_t desync_ticks = 0;
    DetectionOutcome detection = DetectionOutcome::NotApplicable;
    std::int64_t failure_detection_us = 0; ///< valid when detection == Detected
};

/// Validates scenario invariants; throws ConfigError on violation.
void validate_scenario(const FlowScenario& s);

/// Runs one scenario deterministically. An optional trace stream receives
/// one delimited record per emitted DSM:
/// tick,writer_id,kind,payload_bytes,wire_bytes,nm_index,delivered.
SimMetrics run_scenario(const FlowScenario& s, std::ostream* trace = nullptr);

/// Paired run of two configurations over the same datasets, link and seed.
struct ComparisonReport {
    SimMetrics a;
    SimMetrics b;
};

ComparisonReport compare(const PublisherConfig& a, const PublisherConfig& b,
                         const FlowScenario& base);

/// Renders a comparison as text with b/a ratios per metric.
std::string comparison_to_text(const ComparisonReport& r);

/**
 * The built-in industrial use case: nine flows between two production
 * lines, an edge server, HMI/monitoring and a cloud historian. Traffic
 * types and publisher/subscriber roles are fixed; intervals, payload sizes,
 * latencies and loss rates are documented plumbing defaults chosen to make
 * every misconfiguration effect visible at desk scale. Per-flow link seeds
 * derive from base_seed.
 */
std::vector<FlowScenario> builtin_usecase(std::uint64_t base_seed = 42);

/// Direction a metric is expected to move in a misconfiguration experiment.
enum class MetricDirection {
    BytesUp,
    NmCountUp,
    DetectionWorse,
    DetectionLost, ///< baseline detects, misconfigured run does not
    LatencyJitterUp,
    WireStddevUp,
};

const char* to_string(MetricDirection d);
const char* to_string(DetectionOutcome o);

/**
 * One paired misconfiguration experiment: a correctly configured baseline
 * scenario, the same scenario with one configuration mistake, the audit
 * rules the mistake must raise, and the metric movement it must cause.
 */
struct MisconfigCase {
    std::string id;          ///< V1..V6b
    int section = 0;         ///< evaluation subsection 1..6
    std::string description;
    FlowScenario baseline;
    FlowScenario misconfigured;
    std::vector<std::string> expected_rules;
    std::vector<MetricDirection> directions;
};

/// The seven paired cases covering all six evaluation subsections
/// (subsection 6 carries two documented assertions).
std::vector<MisconfigCase> misconfiguration_suite(std::uint64_t base_seed = 42);

struct MisconfigResult {
    std::string id;
    bool rules_ok = false;
    bool directions_ok = false;
    std::string detail;
};

/// Runs every case: checks that the audit raises the expected rules and the
/// metric moves in the expected direction.
std::vector<MisconfigResult> run_misconfiguration_suite(std::uint64_t base_seed = 42);

/// Audit context derived from a scenario's datasets (mean field size,
/// change fraction when uniform, co-published DSM count).
FlowContext context_from_scenario(const FlowScenario& s);

/// Metrics table for a set of runs, one row per flow, fixed column order.
std::string metrics_to_csv(const std::vector<std::pair<std::string, SimMetrics>>& rows);

/// Human-readable per-flow summary.
std::string metrics_summary(const std::vector<std::pair<std::string, SimMetrics>>& rows);

/// Parses / serializes the scenario document format (see docs/file_formats.md).
FlowScenario parse_scenario(const std::string& text);
std::string serialize_scenario(const FlowScenario& s);

} // namespace pubsubcfg

#endif
