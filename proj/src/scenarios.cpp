/*
 * OPC UA PubSub configuration toolkit: built-in use case and
 * misconfiguration experiments.
 *
 * Copyright (c) 2026 the pubsubcfg authors
 *
 * Released under the Apache 2.0 Licence
 */
#include <limits>
#include <sstream>

#include "pubsubcfg/errors.hpp"
#include "pubsubcfg/sim.hpp"

namespace pubsubcfg {

namespace {

// Non-normative desk-scale defaults, documented in the README: control loops
// run at 1 ms, command/diagnostic updates at 100 ms, plant fields are 4
// bytes, the camera frame is 1400 bytes, field links lose 1e-3 of messages
// and the cloud uplink 1e-2.
constexpr std::int64_t kControlIntervalUs = 1000;
constexpr std::int64_t kCommandIntervalUs = 100000;
constexpr std::uint32_t kFieldBytes = 4;
constexpr std::uint32_t kCameraFrameBytes = 1400;

LinkModel field_link(std::uint64_t seed) { return {Micros{100}, 1e-3, seed, {}}; }
LinkModel edge_link(std::uint64_t seed) { return {Micros{500}, 1e-3, seed, {}}; }
LinkModel cloud_link(std::uint64_t seed) { return {Micros{10000}, 1e-2, seed, {}}; }

std::uint64_t flow_seed(std::uint64_t base, int flow_number) {
    return splitmix64(base ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(flow_number)));
}

DataSetDefinition fixed_dataset(std::string id, std::uint32_t writer, std::size_t fields,
                                std::int64_t interval_us, ChangeModel model) {
    DataSetDefinition def;
    def.dataset_id = std::move(id);
    def.writer_id = writer;
    def.field_sizes.assign(fields, kFieldBytes);
    def.publishing_interval = Micros{interval_us};
    def.change_model = model;
    return def;
}

ChangeModel always() { return {ChangeModel::Kind::Always, 0.0, 0}; }
ChangeModel bernoulli(double p) { return {ChangeModel::Kind::Bernoulli, p, 0}; }
ChangeModel arrivals(std::int64_t mean_us) {
    return {ChangeModel::Kind::EventArrivals, 0.0, mean_us};
}

} // namespace

std::vector<FlowScenario> builtin_usecase(std::uint64_t base_seed) {
    std::vector<FlowScenario> flows;

    SynthesisOptions control_opts;
    control_opts.publishing_interval = Micros{kControlIntervalUs};

    // Flow 1: controller A synchronizes the belt with the robotic arm.
    {
        FlowScenario s;
        s.flow_id = "flow1";
        s.publisher = "controller-a";
        s.subscriber = "controller-b";
        s.traffic = TrafficType::ControlSync;
        s.datasets = {fixed_dataset("sync_setpoints", 1, 8, kControlIntervalUs, always())};
        s.config = synthesize(builtin_spec(s.traffic), control_opts);
        s.link = field_link(flow_seed(base_seed, 1));
        s.duration_ticks = 2000;
        flows.push_back(std::move(s));
    }

    // Flow 2: belt sensor publishes measured distances.
    {
        FlowScenario s;
        s.flow_id = "flow2";
        s.publisher = "sensor-b";
        s.subscriber = "controller-b";
        s.traffic = TrafficType::ControlAsync;
        s.datasets = {fixed_dataset("belt_distance", 1, 2, kControlIntervalUs, always())};
        s.config = synthesize(builtin_spec(s.traffic), control_opts);
        s.link = field_link(flow_seed(base_seed, 2));
        s.duration_ticks = 2000;
        flows.push_back(std::move(s));
    }

    // Flow 3: controller B forwards state changes to the HMI. Several
    // datasets with differing intervals and sparse change.
    {
        FlowScenario s;
        s.flow_id = "flow3";
        s.publisher = "controller-b";
        s.subscriber = "hmi";
        s.traffic = TrafficType::CommandCycle;
        s.datasets = {
            fixed_dataset("motor_status", 1, 4, kCommandIntervalUs, bernoulli(0.05)),
            fixed_dataset("sensor_snapshot", 2, 6, kCommandIntervalUs, bernoulli(0.05)),
            fixed_dataset("controller_status", 3, 4, 2 * kCommandIntervalUs, bernoulli(0.05)),
        };
        SynthesisOptions opts;
        opts.publishing_interval = Micros{kCommandIntervalUs};
        opts.expected_change_fraction = 0.05;
        s.config = synthesize(builtin_spec(s.traffic), opts); // resolves to delta frames
        s.link = field_link(flow_seed(base_seed, 3));
        s.duration_ticks = 600;
        flows.push_back(std::move(s));
    }

    // Flow 4: devices report threshold-crossing events to the monitor.
    {
        FlowScenario s;
        s.flow_id = "flow4";
        s.publisher = "field-devices";
        s.subscriber = "hmi-monitor";
        s.traffic = TrafficType::Event;
        DataSetDefinition motor = fixed_dataset("motor_events", 1, 0, kCommandIntervalUs,
                                                arrivals(250000));
        motor.field_sizes = {16, 16};
        DataSetDefinition sensor = motor;
        sensor.dataset_id = "sensor_events";
        sensor.writer_id = 2;
        sensor.change_model = arrivals(310000);
        DataSetDefinition ctrl = motor;
        ctrl.dataset_id = "controller_events";
        ctrl.writer_id = 3;
        ctrl.change_model = arrivals(400000);
        s.datasets = {motor, sensor, ctrl};
        SynthesisOptions opts;
        opts.publishing_interval = Micros{kCommandIntervalUs};
        s.config = synthesize(builtin_spec(s.traffic), opts);
        s.link = field_link(flow_seed(base_seed, 4));
        s.duration_ticks = 600;
        flows.push_back(std::move(s));
    }

    // Flow 5: the arm motor's health counters toward the monitor, delta
    // encoded to keep bandwidth off the plant network.
    {
        FlowScenario s;
        s.flow_id = "flow5";
        s.publisher = "arm-motor";
        s.subscriber = "monitor";
        s.traffic = TrafficType::CommandCycle;
        s.datasets = {fixed_dataset("arm_health", 1, 4, kCommandIntervalUs, bernoulli(0.05))};
        SynthesisOptions opts;
        opts.publishing_interval = Micros{kCommandIntervalUs};
        opts.expected_change_fraction = 0.05;
        s.config = synthesize(builtin_spec(s.traffic), opts);
        s.link = field_link(flow_seed(base_seed, 5));
        s.duration_ticks = 600;
        flows.push_back(std::move(s));
    }

    // Flow 6: the camera ships fixed 1400-byte frames to the edge server.
    // The NM budget is raised so the frame still travels as one key frame.
    {
        FlowScenario s;
        s.flow_id = "flow6";
        s.publisher = "camera-a";
        s.subscriber = "edge-server";
        s.traffic = TrafficType::ControlSync;
        DataSetDefinition frame;
        frame.dataset_id = "camera_frame";
        frame.writer_id = 1;
        frame.field_sizes = {kCameraFrameBytes};
        frame.publishing_interval = Micros{kControlIntervalUs};
        frame.change_model = always();
        s.datasets = {frame};
        SynthesisOptions opts = control_opts;
        opts.max_network_message_size = 2048;
        s.config = synthesize(builtin_spec(s.traffic), opts);
        s.link = edge_link(flow_seed(base_seed, 6));
        s.duration_ticks = 2000;
        flows.push_back(std::move(s));
    }

    // Flow 7: isochronous servo state from the arm motor to controller A.
    {
        FlowScenario s;
        s.flow_id = "flow7";
        s.publisher = "arm-motor";
        s.subscriber = "controller-a";
        s.traffic = TrafficType::ControlIso;
        s.datasets = {fixed_dataset("servo_state", 1, 4, kControlIntervalUs, always())};
        s.config = synthesize(builtin_spec(s.traffic), control_opts);
        s.link = field_link(flow_seed(base_seed, 7));
        s.duration_ticks = 2000;
        flows.push_back(std::move(s));
    }

    // Flow 8: refined motion commands from the edge server to controller A.
    {
        FlowScenario s;
        s.flow_id = "flow8";
        s.publisher = "edge-server";
        s.subscriber = "controller-a";
        s.traffic = TrafficType::ControlSync;
        s.datasets = {fixed_dataset("motion_commands", 1, 4, kControlIntervalUs, always())};
        s.config = synthesize(builtin_spec(s.traffic), control_opts);
        s.link = edge_link(flow_seed(base_seed, 8));
        s.duration_ticks = 2000;
        flows.push_back(std::move(s));
    }

    // Flow 9: historian updates to the cloud; the endpoint speaks JSON only.
    {
        FlowScenario s;
        s.flow_id = "flow9";
        s.publisher = "edge-server";
        s.subscriber = "cloud";
        s.traffic = TrafficType::BestEffort;
        DataSetDefinition telemetry;
        telemetry.dataset_id = "historian_batch";
        telemetry.writer_id = 1;
        telemetry.field_sizes = {64, 64};
        telemetry.publishing_interval = Micros{kCommandIntervalUs};
        telemetry.change_model = arrivals(500000);
        s.datasets = {telemetry};
        SynthesisOptions opts;
        opts.publishing_interval = Micros{kCommandIntervalUs};
        opts.endpoint_supports_pubsub = false;
        s.config = synthesize(builtin_spec(s.traffic), opts);
        s.link = cloud_link(flow_seed(base_seed, 9));
        s.duration_ticks = 600;
        flows.push_back(std::move(s));
    }

    return flows;
}

std::vector<MisconfigCase> misconfiguration_suite(std::uint64_t base_seed) {
    std::vector<FlowScenario> flows = builtin_usecase(base_seed);
    auto flow = [&](const char* id) -> const FlowScenario& {
        for (const FlowScenario& s : flows)
            if (s.flow_id == id) return s;
        throw ConfigError(std::string("no built-in flow named ") + id);
    };

    std::vector<MisconfigCase> cases;

    // 1. Event data published as cyclic key frames: retransmission of
    // unchanged data on every interval.
    {
        MisconfigCase c;
        c.id = "V1";
        c.section = 1;
        c.description = "event flow configured as cyclic key frames";
        c.baseline = flow("flow4");
        c.misconfigured = c.baseline;
        c.misconfigured.config.dsm_type = DsmKind::KeyFrame;
        c.misconfigured.config.cyclic_dataset = true;
        c.expected_rules = {"R2"};
        c.directions = {MetricDirection::BytesUp};
        cases.push_back(std::move(c));
    }

    // 2. Delta flow with a huge KeyFrameCount and no keepalive: silence
    // becomes ambiguous and failures surface only at the next key frame.
    {
        MisconfigCase c;
        c.id = "V2";
        c.section = 2;
        c.description = "delta flow with KeyFrameCount=64 and keepalive disabled";
        c.baseline = flow("flow5");
        c.baseline.halt_at_tick = 300;
        c.misconfigured = c.baseline;
        c.misconfigured.config.key_frame_count = 64;
        c.misconfigured.config.keepalive_enabled = false;
        c.expected_rules = {"R4"};
        c.directions = {MetricDirection::DetectionWorse};
        cases.push_back(std::move(c));
    }

    // 3. Periodic flow with cyclic_dataset=false: emission becomes
    // change-triggered and the source jitter reaches the wire.
    {
        MisconfigCase c;
        c.id = "V3";
        c.section = 3;
        c.description = "isochronous flow with cyclic_dataset disabled";
        c.baseline = flow("flow7");
        c.misconfigured = c.baseline;
        c.misconfigured.config.cyclic_dataset = false;
        c.expected_rules = {"R6"};
        c.directions = {MetricDirection::LatencyJitterUp};
        cases.push_back(std::move(c));
    }

    // 4. Event flow without keepalive: a halted publisher is never noticed.
    {
        MisconfigCase c;
        c.id = "V4";
        c.section = 4;
        c.description = "event flow with keepalive disabled";
        c.baseline = flow("flow4");
        c.baseline.halt_at_tick = 300;
        c.misconfigured = c.baseline;
        c.misconfigured.config.keepalive_enabled = false;
        c.expected_rules = {"R11"};
        c.directions = {MetricDirection::DetectionLost};
        cases.push_back(std::move(c));
    }

    // 5. JSON encoding on a deterministic control flow: verbose per-field
    // names inflate every message.
    {
        MisconfigCase c;
        c.id = "V5";
        c.section = 5;
        c.description = "control flow encoded as JSON";
        c.baseline = flow("flow1");
        c.misconfigured = c.baseline;
        c.misconfigured.config.encoding = EncodingKind::Json;
        c.misconfigured.config.transport_profile = TransportProfile::BrokerJson;
        c.expected_rules = {"R8"};
        c.directions = {MetricDirection::BytesUp};
        cases.push_back(std::move(c));
    }

    // 6a. Bulk multi-dataset flow forced to one NM per DSM: per-message
    // headers multiply.
    {
        MisconfigCase c;
        c.id = "V6a";
        c.section = 6;
        c.description = "bulk flow with AscendingWriterIDSingle ordering";
        c.baseline = flow("flow3");
        c.misconfigured = c.baseline;
        c.misconfigured.config.dataset_ordering = DatasetOrdering::AscendingWriterIdSingle;
        c.expected_rules = {"R10"};
        c.directions = {MetricDirection::NmCountUp, MetricDirection::BytesUp};
        cases.push_back(std::move(c));
    }

    // 6b. Critical fixed-size flow under Undefined ordering with a
    // co-published variable dataset: NM sizes stop being constant.
    {
        MisconfigCase c;
        c.id = "V6b";
        c.section = 6;
        c.description = "isochronous flow under Undefined ordering with a co-published "
                        "variable dataset";
        c.baseline = flow("flow7");
        c.misconfigured = c.baseline;
        DataSetDefinition diag;
        diag.dataset_id = "diag_events";
        diag.writer_id = 2;
        diag.field_sizes = {24};
        diag.publishing_interval = Micros{kControlIntervalUs};
        diag.change_model = arrivals(300000);
        diag.writer_kind = DsmKind::Event;
        c.misconfigured.datasets.push_back(std::move(diag));
        c.misconfigured.config.dataset_ordering = DatasetOrdering::Undefined;
        c.expected_rules = {"R9"};
        c.directions = {MetricDirection::WireStddevUp};
        cases.push_back(std::move(c));
    }

    return cases;
}

namespace {

bool direction_holds(MetricDirection d, const SimMetrics& base, const SimMetrics& bad) {
    auto detection_rank = [](const SimMetrics& m) -> double {
        switch (m.detection) {
        case DetectionOutcome::Detected: return static_cast<double>(m.failure_detection_us);
        case DetectionOutcome::Undetected: return std::numeric_limits<double>::infinity();
        case DetectionOutcome::NotApplicable: return -1.0;
        }
        return -1.0;
    };
    switch (d) {
    case MetricDirection::BytesUp: return bad.bytes_on_wire > base.bytes_on_wire;
    case MetricDirection::NmCountUp: return bad.nm_count > base.nm_count;
    case MetricDirection::DetectionWorse:
        return base.detection != DetectionOutcome::NotApplicable &&
               detection_rank(bad) > detection_rank(base);
    case MetricDirection::DetectionLost:
        return base.detection == DetectionOutcome::Detected &&
               bad.detection == DetectionOutcome::Undetected;
    case MetricDirection::LatencyJitterUp: return bad.latency_stddev_us > base.latency_stddev_us;
    case MetricDirection::WireStddevUp: return bad.nm_wire_stddev > base.nm_wire_stddev;
    }
    return false;
}

} // namespace

std::vector<MisconfigResult> run_misconfiguration_suite(std::uint64_t base_seed) {
    std::vector<MisconfigResult> results;
    for (const MisconfigCase& c : misconfiguration_suite(base_seed)) {
        MisconfigResult r;
        r.id = c.id;

        const TrafficSpec& spec = builtin_spec(c.baseline.traffic);
        auto base_findings = audit(c.baseline.config, spec, context_from_scenario(c.baseline));
        auto bad_findings =
            audit(c.misconfigured.config, spec, context_from_scenario(c.misconfigured));

        bool rules_ok = true;
        for (const std::string& rule : c.expected_rules) {
            bool in_bad = false;
            for (const Diagnostic& d : bad_findings) in_bad = in_bad || d.rule_id == rule;
            bool in_base = false;
            for (const Diagnostic& d : base_findings) in_base = in_base || d.rule_id == rule;
            rules_ok = rules_ok && in_bad && !in_base;
        }
        // the baseline configuration must itself be guideline-clean
        for (const Diagnostic& d : base_findings)
            rules_ok = rules_ok && d.severity == Severity::Info;
        r.rules_ok = rules_ok;

        SimMetrics base = run_scenario(c.baseline);
        SimMetrics bad = run_scenario(c.misconfigured);
        bool directions_ok = true;
        std::ostringstream detail;
        detail << c.description << ": ";
        for (MetricDirection d : c.directions) {
            bool ok = direction_holds(d, base, bad);
            directions_ok = directions_ok && ok;
            detail << to_string(d) << (ok ? " [ok] " : " [violated] ");
        }
        r.directions_ok = directions_ok;
        r.detail = detail.str();
        results.push_back(std::move(r));
    }
    return results;
}

} // namespace pubsubcfg
