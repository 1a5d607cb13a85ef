#include <algorithm>
#include <array>
#include <random>

#include "doctest.h"

#include "pubsubcfg/errors.hpp"
#include "pubsubcfg/pipeline.hpp"

using namespace pubsubcfg;

namespace {

DataSetDefinition make_dataset(std::uint32_t writer, std::vector<std::uint32_t> sizes,
                               std::int64_t interval_us, ChangeModel model) {
    DataSetDefinition def;
    def.dataset_id = "ds" + std::to_string(writer);
    def.writer_id = writer;
    def.field_sizes = std::move(sizes);
    def.publishing_interval = Micros{interval_us};
    def.change_model = model;
    return def;
}

PublisherConfig key_config(std::int64_t interval_us = 1000) {
    PublisherConfig cfg;
    cfg.dsm_type = DsmKind::KeyFrame;
    cfg.publishing_interval = Micros{interval_us};
    cfg.keepalive_time = Micros{4 * interval_us};
    return cfg;
}

PublisherConfig delta_config(std::uint32_t kfc, std::int64_t interval_us = 1000) {
    PublisherConfig cfg = key_config(interval_us);
    cfg.dsm_type = DsmKind::DeltaFrame;
    cfg.enable_delta_frames = true;
    cfg.key_frame_count = kfc;
    return cfg;
}

DataSetMessage plain_dsm(std::uint32_t writer, std::uint64_t payload, std::uint64_t seq = 1) {
    DataSetMessage dsm;
    dsm.kind = DsmKind::KeyFrame;
    dsm.writer_id = writer;
    dsm.sequence_number = seq;
    dsm.field_count = 1;
    dsm.payload_bytes = payload;
    return dsm;
}

} // namespace

TEST_CASE("cyclic key-frame writer emits every interval regardless of change") {
    auto def = make_dataset(1, {4, 4, 4, 4}, 1000, {ChangeModel::Kind::Never, 0.0, 0});
    PublisherConfig cfg = key_config();
    SizeModel model;
    WriterState state = make_writer_state(def, 1);

    for (std::int64_t tick = 0; tick < 5; ++tick) {
        auto dsm = step_writer(def, cfg, model, state, tick * 1000);
        REQUIRE(dsm.has_value());
        CHECK(dsm->kind == DsmKind::KeyFrame);
        CHECK(dsm->field_count == 4);
        CHECK(dsm->payload_bytes == 16);
        CHECK(dsm->sequence_number == static_cast<std::uint64_t>(tick) + 1);
    }
}

TEST_CASE("misaligned cyclic tick is a contract violation") {
    auto def = make_dataset(1, {4}, 1000, {ChangeModel::Kind::Always, 0.0, 0});
    PublisherConfig cfg = key_config();
    SizeModel model;
    WriterState state = make_writer_state(def, 1);
    try {
        step_writer(def, cfg, model, state, 1500);
        FAIL("expected a pipeline error");
    } catch (const PipelineError& e) {
        CHECK(e.code() == "MISALIGNED_TICK");
    }
}

TEST_CASE("delta writer: cadence, suppression and payload arithmetic") {
    SizeModel model;
    PublisherConfig cfg = delta_config(8);

    SUBCASE("no change means no delta frame") {
        auto def = make_dataset(1, {4, 4}, 1000, {ChangeModel::Kind::Never, 0.0, 0});
        WriterState state = make_writer_state(def, 1);
        auto key = step_writer(def, cfg, model, state, 0);
        REQUIRE(key.has_value());
        CHECK(key->kind == DsmKind::KeyFrame);
        for (std::int64_t tick = 1; tick < 8; ++tick)
            CHECK_FALSE(step_writer(def, cfg, model, state, tick * 1000).has_value());
        auto next_key = step_writer(def, cfg, model, state, 8000);
        REQUIRE(next_key.has_value());
        CHECK(next_key->kind == DsmKind::KeyFrame);
    }

    SUBCASE("two changed four-byte fields cost twelve payload bytes") {
        auto def = make_dataset(1, {4, 4}, 1000, {ChangeModel::Kind::Always, 0.0, 0});
        WriterState state = make_writer_state(def, 1);
        step_writer(def, cfg, model, state, 0); // key frame
        auto delta = step_writer(def, cfg, model, state, 1000);
        REQUIRE(delta.has_value());
        CHECK(delta->kind == DsmKind::DeltaFrame);
        CHECK(delta->changed_field_indices == std::vector<std::uint32_t>{0, 1});
        CHECK(delta->payload_bytes == 2 * (2 + 4));
    }

    SUBCASE("key frame cadence counts interval ticks, not transmissions") {
        auto def = make_dataset(1, {4}, 1000, {ChangeModel::Kind::Never, 0.0, 0});
        WriterState state = make_writer_state(def, 1);
        int key_frames = 0;
        for (std::int64_t tick = 0; tick <= 24; ++tick) {
            auto dsm = step_writer(def, cfg, model, state, tick * 1000);
            if (dsm && dsm->kind == DsmKind::KeyFrame) ++key_frames;
        }
        CHECK(key_frames == 4); // ticks 0, 8, 16, 24 despite zero deltas
    }

    SUBCASE("half-set delta flags fall back to key frames") {
        PublisherConfig half = delta_config(8);
        half.enable_delta_frames = false;
        auto def = make_dataset(1, {4}, 1000, {ChangeModel::Kind::Always, 0.0, 0});
        WriterState state = make_writer_state(def, 1);
        for (std::int64_t tick = 0; tick < 4; ++tick) {
            auto dsm = step_writer(def, half, model, state, tick * 1000);
            REQUIRE(dsm.has_value());
            CHECK(dsm->kind == DsmKind::KeyFrame);
        }
    }
}

TEST_CASE("sequence numbers are strictly monotone without gaps") {
    SizeModel model;
    PublisherConfig cfg = delta_config(4);
    cfg.keepalive_enabled = true;
    auto def = make_dataset(1, {4, 4}, 1000, {ChangeModel::Kind::Bernoulli, 0.3, 0});
    WriterState state = make_writer_state(def, 99);

    std::uint64_t expected = 1;
    for (std::int64_t tick = 0; tick < 200; ++tick) {
        auto dsm = step_writer(def, cfg, model, state, tick * 1000);
        if (dsm) CHECK(dsm->sequence_number == expected++);
        auto ka = emit_keepalive_if_due(cfg, state, tick * 1000);
        if (ka) CHECK(ka->sequence_number == expected++);
    }
}

TEST_CASE("keepalive timer") {
    PublisherConfig cfg = key_config(1000);
    cfg.keepalive_enabled = true;
    cfg.keepalive_time = Micros{4000};
    WriterState state;
    state.writer_id = 1;

    SUBCASE("due exactly one keepalive_time after the last emission") {
        state.last_emission_us = 0;
        CHECK_FALSE(emit_keepalive_if_due(cfg, state, 3000).has_value());
        auto ka = emit_keepalive_if_due(cfg, state, 4000);
        REQUIRE(ka.has_value());
        CHECK(ka->kind == DsmKind::KeepAlive);
        CHECK(ka->payload_bytes == 0);
    }
    SUBCASE("an emission this interval suppresses it") {
        state.last_emission_us = 4000;
        CHECK_FALSE(emit_keepalive_if_due(cfg, state, 4000).has_value());
    }
    SUBCASE("a silent publisher emits one keepalive per keepalive_time") {
        // replay tick by tick over three keepalive windows
        state.last_emission_us = 0;
        int count = 0;
        for (std::int64_t tick = 1; tick * 1000 <= 12000; ++tick)
            if (emit_keepalive_if_due(cfg, state, tick * 1000)) ++count;
        CHECK(count == 3);
    }
    SUBCASE("disabled keepalive never fires") {
        cfg.keepalive_enabled = false;
        state.last_emission_us = 0;
        CHECK_FALSE(emit_keepalive_if_due(cfg, state, 1000000).has_value());
    }
}

TEST_CASE("assembly policies") {
    SizeModel model;

    SUBCASE("single ordering: one NM per DSM in ascending writer order") {
        PublisherConfig cfg = key_config();
        cfg.dataset_ordering = DatasetOrdering::AscendingWriterIdSingle;
        std::vector<DataSetMessage> dsms = {plain_dsm(3, 10), plain_dsm(1, 10), plain_dsm(2, 10)};
        auto nms = assemble(std::move(dsms), cfg, model, 0);
        REQUIRE(nms.size() == 3);
        CHECK(nms[0].dsm_list[0].writer_id == 1);
        CHECK(nms[1].dsm_list[0].writer_id == 2);
        CHECK(nms[2].dsm_list[0].writer_id == 3);
        for (const NetworkMessage& nm : nms) CHECK(nm.dsm_list.size() == 1);
    }

    SUBCASE("ascending writer id packs as many as possible") {
        PublisherConfig cfg = key_config();
        cfg.dataset_ordering = DatasetOrdering::AscendingWriterId;
        cfg.max_network_message_size = 1400;
        std::vector<DataSetMessage> dsms = {plain_dsm(2, 20), plain_dsm(3, 20), plain_dsm(1, 20)};
        auto nms = assemble(std::move(dsms), cfg, model, 0);
        REQUIRE(nms.size() == 1);
        REQUIRE(nms[0].dsm_list.size() == 3);
        CHECK(nms[0].dsm_list[0].writer_id == 1);
        CHECK(nms[0].dsm_list[1].writer_id == 2);
        CHECK(nms[0].dsm_list[2].writer_id == 3);
    }

    SUBCASE("size limit splits greedily") {
        PublisherConfig cfg = key_config();
        cfg.dataset_ordering = DatasetOrdering::AscendingWriterId;
        // base 26 + per DSM (2 + 8 + 500) = 536; two fit in 1110, three do not
        cfg.max_network_message_size = 26 + 2 * 510 + 50;
        std::vector<DataSetMessage> dsms = {plain_dsm(1, 500), plain_dsm(2, 500),
                                            plain_dsm(3, 500)};
        auto nms = assemble(std::move(dsms), cfg, model, 0);
        REQUIRE(nms.size() == 2);
        CHECK(nms[0].dsm_list.size() == 2);
        CHECK(nms[1].dsm_list.size() == 1);
        CHECK(nms[1].dsm_list[0].writer_id == 3);
    }

    SUBCASE("dsm count limit") {
        PublisherConfig cfg = key_config();
        cfg.dataset_ordering = DatasetOrdering::AscendingWriterId;
        cfg.max_encapsulated_dsm_count = 2;
        std::vector<DataSetMessage> dsms = {plain_dsm(1, 4), plain_dsm(2, 4), plain_dsm(3, 4),
                                            plain_dsm(4, 4), plain_dsm(5, 4)};
        auto nms = assemble(std::move(dsms), cfg, model, 0);
        REQUIRE(nms.size() == 3);
        CHECK(nms[0].dsm_list.size() == 2);
        CHECK(nms[1].dsm_list.size() == 2);
        CHECK(nms[2].dsm_list.size() == 1);
    }

    SUBCASE("undefined ordering keeps readiness order") {
        PublisherConfig cfg = key_config();
        cfg.dataset_ordering = DatasetOrdering::Undefined;
        std::vector<DataSetMessage> dsms = {plain_dsm(3, 10), plain_dsm(1, 10), plain_dsm(2, 10)};
        auto nms = assemble(std::move(dsms), cfg, model, 0);
        REQUIRE(nms.size() == 1);
        CHECK(nms[0].dsm_list[0].writer_id == 3);
        CHECK(nms[0].dsm_list[1].writer_id == 1);
        CHECK(nms[0].dsm_list[2].writer_id == 2);
    }

    SUBCASE("an unsplittable oversized DSM is an error") {
        PublisherConfig cfg = key_config();
        cfg.max_network_message_size = 100;
        for (DatasetOrdering ordering :
             {DatasetOrdering::Undefined, DatasetOrdering::AscendingWriterId,
              DatasetOrdering::AscendingWriterIdSingle}) {
            cfg.dataset_ordering = ordering;
            std::vector<DataSetMessage> dsms = {plain_dsm(1, 500)};
            try {
                assemble(std::move(dsms), cfg, model, 0);
                FAIL("expected OVERSIZE_DSM");
            } catch (const PipelineError& e) {
                CHECK(e.code() == "OVERSIZE_DSM");
            }
        }
    }

    SUBCASE("payload bytes are conserved by assembly") {
        std::mt19937_64 rng(5);
        for (int iter = 0; iter < 50; ++iter) {
            PublisherConfig cfg = key_config();
            cfg.dataset_ordering =
                std::array{DatasetOrdering::Undefined, DatasetOrdering::AscendingWriterId,
                           DatasetOrdering::AscendingWriterIdSingle}[rng() % 3];
            std::vector<DataSetMessage> dsms;
            std::uint64_t total = 0;
            const int n = 1 + static_cast<int>(rng() % 20);
            for (int i = 0; i < n; ++i) {
                std::uint64_t payload = rng() % 600;
                total += payload;
                dsms.push_back(plain_dsm(static_cast<std::uint32_t>(i + 1), payload));
            }
            auto nms = assemble(std::move(dsms), cfg, model, 0);
            std::uint64_t packed = 0;
            for (const NetworkMessage& nm : nms)
                for (const DataSetMessage& dsm : nm.dsm_list) packed += dsm.payload_bytes;
            CHECK(packed == total);
        }
    }
}

TEST_CASE("encoded sizes") {
    SizeModel model;

    SUBCASE("keepalive-only NM") {
        NetworkMessage nm;
        DataSetMessage ka;
        ka.kind = DsmKind::KeepAlive;
        ka.field_count = 0;
        ka.payload_bytes = 0;
        nm.dsm_list.push_back(ka);
        CHECK(encoded_size(nm, model) == 16 + 8 + 2 + 2 + 8);
    }

    SUBCASE("empty NM is just the header stack") {
        NetworkMessage nm;
        CHECK(encoded_size(nm, model) == 16 + 8 + 2);
    }

    SUBCASE("JSON strictly exceeds UADP for the same frames") {
        std::mt19937_64 rng(17);
        for (int iter = 0; iter < 50; ++iter) {
            NetworkMessage nm;
            const int n = 1 + static_cast<int>(rng() % 5);
            for (int i = 0; i < n; ++i) {
                DataSetMessage dsm = plain_dsm(static_cast<std::uint32_t>(i + 1), 4 + rng() % 200);
                dsm.field_count = 1 + static_cast<std::uint32_t>(rng() % 16);
                nm.dsm_list.push_back(dsm);
            }
            nm.encoding = EncodingKind::Uadp;
            std::uint64_t uadp = encoded_size(nm, model);
            nm.encoding = EncodingKind::Json;
            std::uint64_t json = encoded_size(nm, model);
            CHECK(json > uadp);
        }
    }
}

TEST_CASE("chunk segmentation") {
    SizeModel model;
    model.chunk_max_payload = 40;

    DataSetMessage chunk;
    chunk.kind = DsmKind::Chunk;
    chunk.writer_id = 1;
    chunk.sequence_number = 10;
    chunk.payload_bytes = 100;
    chunk.source_times_us = {0};

    SUBCASE("ceiling division with a remainder tail") {
        auto segments = chunk_segment(chunk, model);
        REQUIRE(segments.size() == 3);
        CHECK(segments[0].payload_bytes == 40);
        CHECK(segments[1].payload_bytes == 40);
        CHECK(segments[2].payload_bytes == 20);
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < segments.size(); ++i) {
            total += segments[i].payload_bytes;
            CHECK(segments[i].chunk_index == i);
            CHECK(segments[i].chunk_count == 3);
            CHECK(segments[i].sequence_number == 10 + i);
        }
        CHECK(total == chunk.payload_bytes);
    }

    SUBCASE("payload at or below the limit stays in one piece") {
        chunk.payload_bytes = 40;
        CHECK(chunk_segment(chunk, model).size() == 1);
    }

    SUBCASE("a zero payload is one empty heartbeat segment") {
        chunk.payload_bytes = 0;
        auto segments = chunk_segment(chunk, model);
        REQUIRE(segments.size() == 1);
        CHECK(segments[0].payload_bytes == 0);
    }

    SUBCASE("a zero chunk limit is a configuration error") {
        model.chunk_max_payload = 0;
        CHECK_THROWS_AS(chunk_segment(chunk, model), ConfigError);
    }

    SUBCASE("only chunk DSMs segment") {
        DataSetMessage key = plain_dsm(1, 100);
        CHECK_THROWS_AS(chunk_segment(key, model), std::invalid_argument);
    }

    SUBCASE("chunk header is charged per segment on the wire") {
        auto segments = chunk_segment(chunk, model);
        NetworkMessage nm;
        nm.dsm_list.push_back(segments[0]);
        CHECK(encoded_size(nm, SizeModel{}) == 16 + 8 + 2 + 2 + 8 + 8 + 40);
    }
}

TEST_CASE("event-mode writer emits at the boundary after the change fires") {
    SizeModel model;
    PublisherConfig cfg;
    cfg.dsm_type = DsmKind::Event;
    cfg.cyclic_dataset = false;
    cfg.publishing_interval = Micros{1000};

    auto def = make_dataset(1, {8, 8}, 1000, {ChangeModel::Kind::EventArrivals, 0.0, 2500});
    WriterState state = make_writer_state(def, 42);

    int emitted = 0;
    for (std::int64_t tick = 0; tick < 100; ++tick) {
        auto dsm = step_writer(def, cfg, model, state, tick * 1000);
        if (!dsm) continue;
        ++emitted;
        CHECK(dsm->kind == DsmKind::Event);
        CHECK(dsm->payload_bytes == 16); // full field set, like a key frame
        REQUIRE(!dsm->source_times_us.empty());
        for (std::int64_t src : dsm->source_times_us) {
            CHECK(src < tick * 1000);         // fired before this boundary
            CHECK(src >= (tick - 1) * 1000);  // not earlier than the window
        }
    }
    // ~100ms of Poisson arrivals at one per 2.5ms, folded into interval ticks
    CHECK(emitted > 10);
    CHECK(emitted < 60);
}
