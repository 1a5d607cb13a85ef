#include <algorithm>
#include <array>
#include <random>

#include "doctest.h"

#include "pubsubcfg/config.hpp"
#include "pubsubcfg/errors.hpp"

using namespace pubsubcfg;

namespace {

bool has_rule(const std::vector<Diagnostic>& diags, const std::string& id) {
    return std::any_of(diags.begin(), diags.end(),
                       [&](const Diagnostic& d) { return d.rule_id == id; });
}

PublisherConfig valid_config() {
    PublisherConfig cfg;
    cfg.dsm_type = DsmKind::KeyFrame;
    cfg.key_frame_count = 1;
    cfg.cyclic_dataset = true;
    cfg.keepalive_enabled = false;
    cfg.publishing_interval = Micros{10000};
    cfg.keepalive_time = Micros{40000};
    return cfg;
}

} // namespace

TEST_CASE("structural validation flags each violated invariant") {
    SUBCASE("valid configuration is clean") { CHECK(validate_structural(valid_config()).empty()); }

    SUBCASE("keepalive shorter than the interval") {
        PublisherConfig cfg = valid_config();
        cfg.keepalive_enabled = true;
        cfg.keepalive_time = Micros{5000};
        cfg.publishing_interval = Micros{10000};
        auto diags = validate_structural(cfg);
        REQUIRE(diags.size() == 1);
        CHECK(diags[0].rule_id == "STRUCT_KEEPALIVE_LT_INTERVAL");
        CHECK(diags[0].severity == Severity::Error);
    }

    SUBCASE("zero key frame count") {
        PublisherConfig cfg = valid_config();
        cfg.key_frame_count = 0;
        auto diags = validate_structural(cfg);
        REQUIRE(diags.size() == 1);
        CHECK(diags[0].rule_id == "STRUCT_KFC_MIN");
    }

    SUBCASE("keepalive disabled ignores the keepalive bound") {
        PublisherConfig cfg = valid_config();
        cfg.keepalive_enabled = false;
        cfg.keepalive_time = Micros{1};
        CHECK(validate_structural(cfg).empty());
    }

    SUBCASE("delta frames need a cyclic dataset") {
        PublisherConfig cfg = valid_config();
        cfg.dsm_type = DsmKind::DeltaFrame;
        cfg.enable_delta_frames = true;
        cfg.cyclic_dataset = false;
        CHECK(has_rule(validate_structural(cfg), "STRUCT_DELTA_REQUIRES_CYCLIC"));
    }

    SUBCASE("event type forbids cyclic and delta flags") {
        PublisherConfig cfg = valid_config();
        cfg.dsm_type = DsmKind::Event;
        cfg.cyclic_dataset = true;
        auto diags = validate_structural(cfg);
        REQUIRE(diags.size() == 1);
        CHECK(diags[0].rule_id == "STRUCT_EVENT_FLAGS");
    }

    SUBCASE("encoding and transport must pair") {
        PublisherConfig cfg = valid_config();
        cfg.encoding = EncodingKind::Json;
        cfg.transport_profile = TransportProfile::UdpUadp;
        CHECK(has_rule(validate_structural(cfg), "STRUCT_ENCODING_TRANSPORT"));
        cfg.transport_profile = TransportProfile::BrokerJson;
        CHECK(validate_structural(cfg).empty());
    }

    SUBCASE("keepalive is not a configurable DSM type") {
        PublisherConfig cfg = valid_config();
        cfg.dsm_type = DsmKind::KeepAlive;
        CHECK(has_rule(validate_structural(cfg), "STRUCT_DSM_TYPE_KEEPALIVE"));
    }

    SUBCASE("validation is idempotent") {
        PublisherConfig cfg = valid_config();
        cfg.key_frame_count = 0;
        cfg.keepalive_enabled = true;
        cfg.keepalive_time = Micros{1};
        auto first = validate_structural(cfg);
        auto second = validate_structural(cfg);
        REQUIRE(first.size() == second.size());
        for (std::size_t i = 0; i < first.size(); ++i) CHECK(first[i].rule_id == second[i].rule_id);
    }
}

TEST_CASE("effective key frame period is the product rule") {
    PublisherConfig cfg = valid_config();
    cfg.key_frame_count = 1;
    cfg.publishing_interval = Micros{10000};
    CHECK(effective_key_frame_period(cfg) == Micros{10000});

    cfg.key_frame_count = 8;
    CHECK(effective_key_frame_period(cfg) == Micros{80000});

    cfg.key_frame_count = 3;
    cfg.publishing_interval = Micros{500};
    CHECK(effective_key_frame_period(cfg) == Micros{1500});
}

TEST_CASE("effective period never undercuts the interval for valid configs") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        PublisherConfig cfg = valid_config();
        cfg.key_frame_count = 1 + static_cast<std::uint32_t>(rng() % 64);
        cfg.publishing_interval = Micros{1 + static_cast<std::int64_t>(rng() % 1000000)};
        cfg.keepalive_time = cfg.publishing_interval * 4;
        REQUIRE(validate_structural(cfg).empty());
        CHECK(effective_key_frame_period(cfg) >= cfg.publishing_interval);
    }
}

TEST_CASE("configuration document round trip") {
    std::mt19937_64 rng(11);
    auto coin = [&] { return rng() % 2 == 0; };
    for (int i = 0; i < 100; ++i) {
        PublisherConfig cfg;
        cfg.dsm_type = std::array{DsmKind::KeyFrame, DsmKind::DeltaFrame, DsmKind::Event,
                                  DsmKind::Chunk}[rng() % 4];
        cfg.key_frame_count = static_cast<std::uint32_t>(rng() % 100);
        cfg.cyclic_dataset = coin();
        cfg.enable_delta_frames = coin();
        cfg.keepalive_enabled = coin();
        cfg.keepalive_time = Micros{static_cast<std::int64_t>(rng() % 1000000)};
        cfg.publishing_interval = Micros{static_cast<std::int64_t>(rng() % 1000000)};
        cfg.encoding = coin() ? EncodingKind::Uadp : EncodingKind::Json;
        cfg.transport_profile = coin() ? TransportProfile::UdpUadp : TransportProfile::BrokerJson;
        cfg.dataset_ordering =
            std::array{DatasetOrdering::Undefined, DatasetOrdering::AscendingWriterId,
                       DatasetOrdering::AscendingWriterIdSingle}[rng() % 3];
        cfg.max_network_message_size = static_cast<std::uint32_t>(rng() % 10000);
        cfg.max_encapsulated_dsm_count = static_cast<std::uint32_t>(rng() % 100);

        // the document format round-trips any configuration, valid or not
        CHECK(parse_config(serialize_config(cfg)) == cfg);
    }
}

TEST_CASE("configuration parse errors") {
    PublisherConfig cfg = valid_config();
    std::string good = serialize_config(cfg);

    SUBCASE("unknown field") {
        std::string bad = good;
        bad.insert(bad.find("\"dsm_type\""), "\"dsm_tipe\": \"KeyFrame\", ");
        CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("dsm_tipe"), ParseError);
    }
    SUBCASE("bad enum value") {
        std::string bad = good;
        auto pos = bad.find("\"KeyFrame\"");
        bad.replace(pos, 10, "\"Keyframe\"");
        CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("dsm_type"), ParseError);
    }
    SUBCASE("ordering accepts numeric codes") {
        std::string doc = R"({"dataset_ordering": 3})";
        CHECK(parse_config(doc).dataset_ordering == DatasetOrdering::AscendingWriterIdSingle);
        doc = R"({"dataset_ordering": "AscendingWriterID"})";
        CHECK(parse_config(doc).dataset_ordering == DatasetOrdering::AscendingWriterId);
    }
    SUBCASE("malformed json") { CHECK_THROWS_AS(parse_config("{"), ParseError); }
}
