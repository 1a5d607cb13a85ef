#include <algorithm>
#include <sstream>

#include "doctest.h"

#include "pubsubcfg/errors.hpp"
#include "pubsubcfg/sim.hpp"

using namespace pubsubcfg;

namespace {

FlowScenario key_scenario(std::int64_t ticks = 100, double loss = 0.0, std::uint64_t seed = 1) {
    FlowScenario s;
    s.flow_id = "test";
    s.traffic = TrafficType::ControlIso;
    DataSetDefinition def;
    def.dataset_id = "state";
    def.writer_id = 1;
    def.field_sizes = {4, 4, 4, 4};
    def.publishing_interval = Micros{1000};
    def.change_model = {ChangeModel::Kind::Always, 0.0, 0};
    s.datasets = {def};
    s.config.dsm_type = DsmKind::KeyFrame;
    s.config.publishing_interval = Micros{1000};
    s.config.keepalive_time = Micros{4000};
    s.config.dataset_ordering = DatasetOrdering::AscendingWriterIdSingle;
    s.link = {Micros{100}, loss, seed, {}};
    s.duration_ticks = ticks;
    return s;
}

FlowScenario delta_scenario(std::uint32_t kfc, std::int64_t ticks, double loss,
                            std::uint64_t seed) {
    FlowScenario s = key_scenario(ticks, loss, seed);
    s.traffic = TrafficType::CommandCycle;
    s.config.dsm_type = DsmKind::DeltaFrame;
    s.config.enable_delta_frames = true;
    s.config.key_frame_count = kfc;
    return s;
}

} // namespace

TEST_CASE("lossless periodic baseline") {
    SimMetrics m = run_scenario(key_scenario(200));
    CHECK(m.desync_ticks == 0);
    CHECK(m.nm_count == 200);
    CHECK(m.dsm_count == 200);
    CHECK(m.mean_update_latency_us == doctest::Approx(100.0));
    CHECK(m.p99_update_latency_us == doctest::Approx(100.0));
    CHECK(m.latency_stddev_us == doctest::Approx(0.0));
    CHECK(m.nm_wire_stddev == doctest::Approx(0.0));
    CHECK(m.detection == DetectionOutcome::NotApplicable);
    // 16 payload + 36 header bytes per NM
    CHECK(m.bytes_on_wire == 200 * 52);
    CHECK(m.payload_bytes == 200 * 16);
}

TEST_CASE("runs are deterministic") {
    FlowScenario s = delta_scenario(8, 3000, 0.07, 99);
    s.datasets[0].change_model = {ChangeModel::Kind::Bernoulli, 0.3, 0};

    std::ostringstream trace_a;
    std::ostringstream trace_b;
    SimMetrics a = run_scenario(s, &trace_a);
    SimMetrics b = run_scenario(s, &trace_b);

    CHECK(metrics_to_csv({{"x", a}}) == metrics_to_csv({{"x", b}}));
    CHECK(trace_a.str() == trace_b.str());
    CHECK(!trace_a.str().empty());
}

TEST_CASE("a single lost delta desynchronizes until the next key frame") {
    for (std::int64_t position = 1; position <= 7; ++position) {
        FlowScenario s = delta_scenario(8, 16, 0.0, 1);
        s.link.forced_loss_ticks = {position};
        SimMetrics m = run_scenario(s);
        CHECK_MESSAGE(m.desync_ticks == 8 - position, "loss at position " << position);
    }
}

TEST_CASE("a lost key frame desynchronizes the whole cycle") {
    FlowScenario s = delta_scenario(8, 16, 0.0, 1);
    s.link.forced_loss_ticks = {8};
    SimMetrics m = run_scenario(s);
    CHECK(m.desync_ticks == 8);
}

TEST_CASE("desync is zero whenever delta frames are disabled") {
    FlowScenario s = key_scenario(2000, 0.2, 3);
    CHECK(run_scenario(s).desync_ticks == 0);
}

TEST_CASE("loss monotonicity under a paired seed") {
    std::int64_t previous = -1;
    for (double loss : {0.0, 0.02, 0.1, 0.3}) {
        FlowScenario s = delta_scenario(8, 5000, loss, 77);
        SimMetrics m = run_scenario(s);
        CHECK(m.desync_ticks >= previous);
        previous = m.desync_ticks;
    }
}

TEST_CASE("failure detection") {
    SUBCASE("keepalive bounds detection time") {
        FlowScenario s = key_scenario(200);
        s.traffic = TrafficType::Event;
        s.config.dsm_type = DsmKind::Event;
        s.config.cyclic_dataset = false;
        s.config.keepalive_enabled = true;
        s.config.keepalive_time = Micros{4000};
        s.datasets[0].change_model = {ChangeModel::Kind::EventArrivals, 0.0, 3000};
        s.halt_at_tick = 50;
        SimMetrics m = run_scenario(s);
        REQUIRE(m.detection == DetectionOutcome::Detected);
        CHECK(m.failure_detection_us <= 4000 + 100);
    }
    SUBCASE("event silence without keepalive goes unnoticed") {
        FlowScenario s = key_scenario(200);
        s.traffic = TrafficType::Event;
        s.config.dsm_type = DsmKind::Event;
        s.config.cyclic_dataset = false;
        s.config.keepalive_enabled = false;
        s.datasets[0].change_model = {ChangeModel::Kind::EventArrivals, 0.0, 3000};
        s.halt_at_tick = 50;
        SimMetrics m = run_scenario(s);
        CHECK(m.detection == DetectionOutcome::Undetected);
    }
    SUBCASE("cyclic key frames surface a halt at the next tick") {
        FlowScenario s = key_scenario(200);
        s.halt_at_tick = 50;
        SimMetrics m = run_scenario(s);
        REQUIRE(m.detection == DetectionOutcome::Detected);
        CHECK(m.failure_detection_us == 100); // the very next expected arrival
    }
    SUBCASE("a high key frame count delays detection without keepalive") {
        FlowScenario s = delta_scenario(64, 400, 0.0, 5);
        s.datasets[0].change_model = {ChangeModel::Kind::Bernoulli, 0.02, 0};
        s.halt_at_tick = 100;
        SimMetrics slow = run_scenario(s);
        REQUIRE(slow.detection == DetectionOutcome::Detected);
        // next key tick is 128: 28 intervals after the halt
        CHECK(slow.failure_detection_us == 28 * 1000 + 100);

        s.config.keepalive_enabled = true;
        s.config.keepalive_time = Micros{4000};
        SimMetrics fast = run_scenario(s);
        REQUIRE(fast.detection == DetectionOutcome::Detected);
        CHECK(fast.failure_detection_us <= 4000 + 100);
    }
}

TEST_CASE("comparison over a shared scenario") {
    SUBCASE("identical configurations give identical metrics") {
        FlowScenario base = key_scenario(500, 0.05, 21);
        ComparisonReport r = compare(base.config, base.config, base);
        CHECK(r.a.bytes_on_wire == r.b.bytes_on_wire);
        CHECK(r.a.nm_count == r.b.nm_count);
        CHECK(r.a.desync_ticks == r.b.desync_ticks);
        std::string text = comparison_to_text(r);
        CHECK(text.find("inf") == std::string::npos);
    }
    SUBCASE("sparse change favours delta, dense change favours key frames") {
        FlowScenario base = key_scenario(4000, 0.0, 8);
        base.traffic = TrafficType::CommandCycle;

        PublisherConfig key = base.config;
        PublisherConfig delta = base.config;
        delta.dsm_type = DsmKind::DeltaFrame;
        delta.enable_delta_frames = true;
        delta.key_frame_count = 8;

        base.datasets[0].change_model = {ChangeModel::Kind::Bernoulli, 0.05, 0};
        ComparisonReport sparse = compare(delta, key, base);
        CHECK(sparse.a.bytes_on_wire < sparse.b.bytes_on_wire);

        base.datasets[0].change_model = {ChangeModel::Kind::Always, 0.0, 0};
        ComparisonReport dense = compare(delta, key, base);
        CHECK(dense.a.payload_bytes > dense.b.payload_bytes);
    }
}

TEST_CASE("keepalive traffic is visible and accounted") {
    FlowScenario s = delta_scenario(16, 400, 0.0, 2);
    s.datasets[0].change_model = {ChangeModel::Kind::Never, 0.0, 0};
    s.config.keepalive_enabled = true;
    s.config.keepalive_time = Micros{4000};
    SimMetrics m = run_scenario(s);
    CHECK(m.keepalive_bytes > 0);
    CHECK(m.keepalive_bytes < m.bytes_on_wire);
    // three keepalives between consecutive key frames (16 ticks, window 4)
    CHECK(m.dsm_count == 25 + 75); // 25 key frames + 75 keepalives
}

TEST_CASE("built-in use case") {
    auto flows = builtin_usecase(42);
    REQUIRE(flows.size() == 9);

    CHECK(flows[6].flow_id == "flow7");
    CHECK(flows[6].traffic == TrafficType::ControlIso);
    CHECK(flows[6].publisher == "arm-motor");
    CHECK(flows[6].subscriber == "controller-a");

    CHECK(flows[8].traffic == TrafficType::BestEffort);
    CHECK(flows[8].config.encoding == EncodingKind::Json);
    CHECK(flows[8].config.transport_profile == TransportProfile::BrokerJson);

    for (const FlowScenario& s : flows) {
        CAPTURE(s.flow_id);
        CHECK_NOTHROW(validate_scenario(s));
        // every built-in flow is guideline-clean for its traffic type
        for (const Diagnostic& d :
             audit(s.config, builtin_spec(s.traffic), context_from_scenario(s)))
            CHECK_MESSAGE(d.severity == Severity::Info, s.flow_id << " raised " << d.rule_id);
    }
}

TEST_CASE("misconfiguration suite covers the six analyses and passes") {
    auto cases = misconfiguration_suite(42);
    REQUIRE(cases.size() == 7);
    std::vector<int> sections;
    for (const MisconfigCase& c : cases) sections.push_back(c.section);
    std::sort(sections.begin(), sections.end());
    CHECK(sections == std::vector<int>{1, 2, 3, 4, 5, 6, 6});

    for (const MisconfigResult& r : run_misconfiguration_suite(42)) {
        CAPTURE(r.detail);
        CHECK(r.rules_ok);
        CHECK(r.directions_ok);
    }
}

TEST_CASE("scenario document round trip and validation") {
    FlowScenario s = delta_scenario(8, 100, 0.01, 4);
    s.flow_id = "roundtrip";
    s.publisher = "pub";
    s.subscriber = "sub";
    s.halt_at_tick = 40;
    s.link.forced_loss_ticks = {3, 5};
    s.size_model.chunk_max_payload = 512;

    FlowScenario parsed = parse_scenario(serialize_scenario(s));
    CHECK(parsed.flow_id == s.flow_id);
    CHECK(parsed.traffic == s.traffic);
    CHECK(parsed.config == s.config);
    CHECK(parsed.datasets == s.datasets);
    CHECK(parsed.link == s.link);
    CHECK(parsed.duration_ticks == s.duration_ticks);
    CHECK(parsed.halt_at_tick == s.halt_at_tick);
    CHECK(parsed.size_model == s.size_model);
    // identical runs from the round-tripped document
    CHECK(metrics_to_csv({{"r", run_scenario(parsed)}}) ==
          metrics_to_csv({{"r", run_scenario(s)}}));

    SUBCASE("scenario errors") {
        FlowScenario bad = s;
        bad.datasets[0].publishing_interval = Micros{1500}; // not a multiple of 1000
        CHECK_THROWS_AS(validate_scenario(bad), ConfigError);

        bad = s;
        bad.datasets.push_back(bad.datasets[0]); // duplicate writer id
        CHECK_THROWS_AS(validate_scenario(bad), ConfigError);

        bad = s;
        bad.config.key_frame_count = 0; // structurally invalid config
        CHECK_THROWS_AS(validate_scenario(bad), ConfigError);

        bad = s;
        bad.link.loss_probability = 1.0;
        CHECK_THROWS_AS(validate_scenario(bad), ConfigError);
    }

    SUBCASE("parse errors name the offending field") {
        CHECK_THROWS_WITH_AS(parse_scenario(R"({"traffic": "Event"})"),
                             doctest::Contains("config"), ParseError);
        std::string doc = serialize_scenario(s);
        auto pos = doc.find("\"Always\"");
        REQUIRE(pos != std::string::npos);
        std::string bad = doc;
        bad.replace(pos, 8, "\"Brownian\"");
        CHECK_THROWS_WITH_AS(parse_scenario(bad), doctest::Contains("change_model"), ParseError);
    }
}
