/*
 * OPC UA PubSub configuration toolkit: scenario simulation engine and
 * metrics.
 *
 * Copyright (c) 2026 the pubsubcfg authors
 *
 * Released under the Apache 2.0 Licence
 */
#include "pubsubcfg/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "pubsubcfg/errors.hpp"

namespace pubsubcfg {

const char* to_string(DetectionOutcome o) {
    switch (o) {
    case DetectionOutcome::NotApplicable: return "-";
    case DetectionOutcome::Undetected: return "undetected";
    case DetectionOutcome::Detected: return "detected";
    }
    return "?";
}

const char* to_string(MetricDirection d) {
    switch (d) {
    case MetricDirection::BytesUp: return "bytes_on_wire up";
    case MetricDirection::NmCountUp: return "nm_count up";
    case MetricDirection::DetectionWorse: return "failure detection slower";
    case MetricDirection::DetectionLost: return "failure detection lost";
    case MetricDirection::LatencyJitterUp: return "update-latency jitter up";
    case MetricDirection::WireStddevUp: return "NM wire-size variance up";
    }
    return "?";
}

void validate_scenario(const FlowScenario& s) {
    if (s.duration_ticks < 1) throw ConfigError("scenario duration must be at least one tick");
    if (s.datasets.empty()) throw ConfigError("scenario needs at least one dataset");
    if (s.link.loss_probability < 0.0 || s.link.loss_probability >= 1.0)
        throw ConfigError("loss_probability must lie in [0, 1)");
    if (s.link.latency.count() < 0) throw ConfigError("link latency must be non-negative");

    auto structural = validate_structural(s.config);
    if (!structural.empty()) {
        std::string ids;
        for (const Diagnostic& d : structural) ids += (ids.empty() ? "" : ", ") + d.rule_id;
        throw ConfigError("scenario configuration is structurally invalid: " + ids);
    }

    const std::int64_t group = s.config.publishing_interval.count();
    std::set<std::uint32_t> writers;
    for (const DataSetDefinition& def : s.datasets) {
        if (def.field_sizes.empty())
            throw ConfigError("dataset " + def.dataset_id + " has no fields");
        for (auto f : def.field_sizes)
            if (f == 0) throw ConfigError("dataset " + def.dataset_id + " has a zero-size field");
        if (!writers.insert(def.writer_id).second)
            throw ConfigError("duplicate writer_id " + std::to_string(def.writer_id));
        const std::int64_t iv = def.publishing_interval.count();
        if (iv < group || iv % group != 0)
            throw ConfigError("dataset " + def.dataset_id +
                              " interval must be a multiple of the group publishing interval");
        if (def.writer_key_frame_count && *def.writer_key_frame_count < 1)
            throw ConfigError("dataset " + def.dataset_id + " writer_key_frame_count must be >= 1");
    }
}

namespace {

constexpr std::uint64_t kLossDomain = 0x10c5;

struct ObserverWriter {
    bool delta_capable = false;
    bool chain_valid = false; ///< true once a key frame has been delivered
    std::int64_t last_delivery_us = -1;
};

struct LatencyStats {
    double mean = 0.0;
    double p99 = 0.0;
    double stddev = 0.0;
};

LatencyStats latency_stats(std::vector<double>& samples) {
    LatencyStats out;
    if (samples.empty()) return out;
    double sum = 0.0;
    for (double v : samples) sum += v;
    out.mean = sum / static_cast<double>(samples.size());
    double var = 0.0;
    for (double v : samples) var += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(var / static_cast<double>(samples.size()));
    std::sort(samples.begin(), samples.end());
    auto rank = static_cast<std::size_t>(
        std::ceil(0.99 * static_cast<double>(samples.size())));
    out.p99 = samples[std::min(samples.size() - 1, rank == 0 ? 0 : rank - 1)];
    return out;
}

double stddev_u64(const std::vector<std::uint64_t>& values) {
    if (values.empty()) return 0.0;
    double mean = 0.0;
    for (auto v : values) mean += static_cast<double>(v);
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (auto v : values) {
        double d = static_cast<double>(v) - mean;
        var += d * d;
    }
    return std::sqrt(var / static_cast<double>(values.size()));
}

std::int64_t ceil_multiple(std::int64_t value, std::int64_t step) {
    return ((value + step - 1) / step) * step;
}

} // namespace

SimMetrics run_scenario(const FlowScenario& s, std::ostream* trace) {
    validate_scenario(s);

    const std::int64_t group = s.config.publishing_interval.count();
    const std::int64_t latency = s.link.latency.count();
    const std::uint64_t loss_seed = splitmix64(s.link.seed ^ 0xc001d00dull);
    const std::set<std::int64_t> forced(s.link.forced_loss_ticks.begin(),
                                        s.link.forced_loss_ticks.end());

    std::vector<WriterState> states;
    std::vector<ObserverWriter> observers;
    std::map<std::uint32_t, std::size_t> writer_index;
    states.reserve(s.datasets.size());
    for (std::size_t i = 0; i < s.datasets.size(); ++i) {
        const DataSetDefinition& def = s.datasets[i];
        states.push_back(make_writer_state(def, s.link.seed));
        ObserverWriter ob;
        ob.delta_capable = s.config.cyclic_dataset && s.config.enable_delta_frames &&
                           def.writer_kind.value_or(s.config.dsm_type) == DsmKind::DeltaFrame;
        observers.push_back(ob);
        writer_index[def.writer_id] = i;
    }

    SimMetrics m;
    std::vector<double> latencies;
    std::vector<std::uint64_t> wire_sizes;

    if (trace) *trace << "tick,writer_id,kind,payload_bytes,wire_bytes,nm_index,delivered\n";

    for (std::int64_t k = 0; k < s.duration_ticks; ++k) {
        const std::int64_t t = k * group;
        const bool halted = s.halt_at_tick && k >= *s.halt_at_tick;

        std::vector<DataSetMessage> ready;
        if (!halted) {
            for (std::size_t i = 0; i < s.datasets.size(); ++i) {
                const DataSetDefinition& def = s.datasets[i];
                if (t % def.publishing_interval.count() != 0) continue;
                auto dsm = step_writer(def, s.config, s.size_model, states[i], t);
                if (!dsm) continue;
                if (dsm->kind == DsmKind::Chunk) {
                    auto segments = chunk_segment(*dsm, s.size_model);
                    states[i].next_sequence += segments.size() - 1;
                    for (auto& seg : segments) ready.push_back(std::move(seg));
                } else {
                    ready.push_back(std::move(*dsm));
                }
            }
            for (std::size_t i = 0; i < s.datasets.size(); ++i) {
                auto ka = emit_keepalive_if_due(s.config, states[i], t);
                if (ka) ready.push_back(std::move(*ka));
            }
        }

        if (!ready.empty()) {
            auto nms = assemble(std::move(ready), s.config, s.size_model, k);
            for (std::size_t idx = 0; idx < nms.size(); ++idx) {
                const NetworkMessage& nm = nms[idx];
                ++m.nm_count;
                m.dsm_count += nm.dsm_list.size();
                m.bytes_on_wire += nm.wire_bytes;
                wire_sizes.push_back(nm.wire_bytes);

                bool all_keepalive = true;
                for (const DataSetMessage& dsm : nm.dsm_list) {
                    m.payload_bytes += dsm.payload_bytes;
                    if (dsm.kind != DsmKind::KeepAlive) all_keepalive = false;
                }
                if (all_keepalive) m.keepalive_bytes += nm.wire_bytes;

                const bool lost = forced.count(k) != 0 ||
                                  hash_bernoulli(s.link.loss_probability, loss_seed, kLossDomain,
                                                 static_cast<std::uint64_t>(k), idx);
                for (const DataSetMessage& dsm : nm.dsm_list) {
                    ObserverWriter& ob = observers[writer_index.at(dsm.writer_id)];
                    if (lost) {
                        // any lost frame opens a sequence gap; delta frames
                        // cannot be applied until the next delivered key frame
                        if (ob.delta_capable) ob.chain_valid = false;
                    } else {
                        const std::int64_t arrive = t + latency;
                        ob.last_delivery_us = arrive;
                        if (ob.delta_capable && dsm.kind == DsmKind::KeyFrame)
                            ob.chain_valid = true;
                        for (std::int64_t src : dsm.source_times_us)
                            latencies.push_back(static_cast<double>(arrive - src));
                    }
                    if (trace) {
                        *trace << k << ',' << dsm.writer_id << ',' << to_string(dsm.kind) << ','
                               << dsm.payload_bytes << ',' << nm.wire_bytes << ',' << idx << ','
                               << (lost ? 0 : 1) << '\n';
                    }
                }
            }
        }

        // a dataset tick spent without a valid reference counts as desync
        for (std::size_t i = 0; i < s.datasets.size(); ++i) {
            if (!observers[i].delta_capable) continue;
            if (t % s.datasets[i].publishing_interval.count() != 0) continue;
            if (!observers[i].chain_valid) ++m.desync_ticks;
        }
    }

    LatencyStats stats = latency_stats(latencies);
    m.mean_update_latency_us = stats.mean;
    m.p99_update_latency_us = stats.p99;
    m.latency_stddev_us = stats.stddev;
    m.nm_wire_stddev = stddev_u64(wire_sizes);

    if (s.halt_at_tick && *s.halt_at_tick < s.duration_ticks) {
        const std::int64_t halt_us = *s.halt_at_tick * group;
        std::optional<std::int64_t> detection;
        auto offer = [&](std::int64_t candidate) {
            candidate = std::max<std::int64_t>(candidate, 0);
            if (!detection || candidate < *detection) detection = candidate;
        };

        if (s.config.keepalive_enabled) {
            // the observer expects some frame within keepalive_time of the
            // last arrival
            for (const ObserverWriter& ob : observers) {
                const std::int64_t anchor = ob.last_delivery_us >= 0 ? ob.last_delivery_us : latency;
                offer(anchor + s.config.keepalive_time.count() - halt_us);
            }
        }
        if (s.config.cyclic_dataset) {
            // cyclic writers have a guaranteed schedule: every tick for key
            // frames, every key-frame cadence for delta writers
            for (std::size_t i = 0; i < s.datasets.size(); ++i) {
                const DataSetDefinition& def = s.datasets[i];
                if (def.writer_kind.value_or(s.config.dsm_type) == DsmKind::Event) continue;
                std::int64_t period = def.publishing_interval.count();
                if (observers[i].delta_capable) {
                    const std::uint32_t kfc = std::max<std::uint32_t>(
                        1, def.writer_key_frame_count.value_or(s.config.key_frame_count));
                    period *= kfc;
                }
                offer(ceil_multiple(halt_us, period) + latency - halt_us);
            }
        }

        if (detection) {
            m.detection = DetectionOutcome::Detected;
            m.failure_detection_us = *detection;
        } else {
            m.detection = DetectionOutcome::Undetected;
        }
    }

    return m;
}

ComparisonReport compare(const PublisherConfig& a, const PublisherConfig& b,
                         const FlowScenario& base) {
    FlowScenario run_a = base;
    run_a.config = a;
    FlowScenario run_b = base;
    run_b.config = b;
    return {run_scenario(run_a), run_scenario(run_b)};
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string ratio_text(double a, double b) {
    if (a == 0.0) return b == 0.0 ? "1.000" : "inf";
    return format_double(b / a);
}

std::string detection_text(const SimMetrics& m) {
    switch (m.detection) {
    case DetectionOutcome::NotApplicable: return "-";
    case DetectionOutcome::Undetected: return "undetected";
    case DetectionOutcome::Detected: return std::to_string(m.failure_detection_us);
    }
    return "?";
}

} // namespace

std::string comparison_to_text(const ComparisonReport& r) {
    std::ostringstream os;
    os << "metric,a,b,ratio_b_over_a\n";
    auto row = [&](const char* name, double a, double b) {
        os << name << ',' << format_double(a) << ',' << format_double(b) << ','
           << ratio_text(a, b) << '\n';
    };
    row("bytes_on_wire", double(r.a.bytes_on_wire), double(r.b.bytes_on_wire));
    row("payload_bytes", double(r.a.payload_bytes), double(r.b.payload_bytes));
    row("nm_count", double(r.a.nm_count), double(r.b.nm_count));
    row("dsm_count", double(r.a.dsm_count), double(r.b.dsm_count));
    row("keepalive_bytes", double(r.a.keepalive_bytes), double(r.b.keepalive_bytes));
    row("mean_update_latency_us", r.a.mean_update_latency_us, r.b.mean_update_latency_us);
    row("p99_update_latency_us", r.a.p99_update_latency_us, r.b.p99_update_latency_us);
    row("latency_stddev_us", r.a.latency_stddev_us, r.b.latency_stddev_us);
    row("nm_wire_stddev", r.a.nm_wire_stddev, r.b.nm_wire_stddev);
    row("desync_ticks", double(r.a.desync_ticks), double(r.b.desync_ticks));
    os << "failure_detection_us," << detection_text(r.a) << ',' << detection_text(r.b) << ",-\n";
    return os.str();
}

FlowContext context_from_scenario(const FlowScenario& s) {
    FlowContext ctx;
    ctx.multiple_dsms = s.datasets.size() > 1;

    std::uint64_t total_bytes = 0;
    std::uint64_t total_fields = 0;
    bool uniform = true;
    std::optional<double> fraction;
    for (const DataSetDefinition& def : s.datasets) {
        total_bytes += def.total_field_bytes();
        total_fields += def.field_count();
        double f;
        switch (def.change_model.kind) {
        case ChangeModel::Kind::Always: f = 1.0; break;
        case ChangeModel::Kind::Never: f = 0.0; break;
        case ChangeModel::Kind::Bernoulli: f = def.change_model.p_change; break;
        default: uniform = false; f = 0.0; break;
        }
        if (!fraction)
            fraction = f;
        else if (*fraction != f)
            uniform = false;
    }
    if (uniform && fraction) ctx.expected_change_fraction = *fraction;
    if (total_fields > 0)
        ctx.mean_field_size_bytes =
            static_cast<double>(total_bytes) / static_cast<double>(total_fields);
    return ctx;
}

std::string metrics_to_csv(const std::vector<std::pair<std::string, SimMetrics>>& rows) {
    std::ostringstream os;
    os << "flow_id,bytes_on_wire,payload_bytes,nm_count,dsm_count,keepalive_bytes,"
          "mean_update_latency_us,p99_update_latency_us,latency_stddev_us,nm_wire_stddev,"
          "desync_ticks,failure_detection_us\n";
    for (const auto& [id, m] : rows) {
        os << id << ',' << m.bytes_on_wire << ',' << m.payload_bytes << ',' << m.nm_count << ','
           << m.dsm_count << ',' << m.keepalive_bytes << ',' << format_double(m.mean_update_latency_us)
           << ',' << format_double(m.p99_update_latency_us) << ','
           << format_double(m.latency_stddev_us) << ',' << format_double(m.nm_wire_stddev) << ','
           << m.desync_ticks << ',' << detection_text(m) << '\n';
    }
    return os.str();
}

std::string metrics_summary(const std::vector<std::pair<std::string, SimMetrics>>& rows) {
    std::ostringstream os;
    for (const auto& [id, m] : rows) {
        os << id << ": " << m.nm_count << " NMs, " << m.bytes_on_wire << " bytes on wire ("
           << m.keepalive_bytes << " keepalive), mean latency "
           << format_double(m.mean_update_latency_us) << " us, desync " << m.desync_ticks
           << " ticks";
        if (m.detection != DetectionOutcome::NotApplicable)
            os << ", failure detection " << detection_text(m)
               << (m.detection == DetectionOutcome::Detected ? " us" : "");
        os << '\n';
    }
    return os.str();
}

} // namespace pubsubcfg
