/*
 * OPC UA PubSub configuration toolkit: industrial traffic-type catalog.
 *
 * Copyright (c) 2026 the pubsubcfg authors
 *
 * Released under the Apache 2.0 Licence
 */
#ifndef PUBSUBCFG_TRAFFIC_HPP
#define PUBSUBCFG_TRAFFIC_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace pubsubcfg {

/**
 * The eleven industrial automation traffic types the toolkit knows about.
 * Numeric values are the catalog row ids and are part of the file format.
 * Voice and Video share one entry; traffic originating from network devices
 * (rather than a publisher) has no entry.
 */
enum class TrafficType : int {
    ControlIso = 1,
    ControlSync = 2,
    ControlAsync = 3,
    Event = 4,
    VoiceVideo = 5,
    CommandCycle = 6,
    CommandAcycle = 7,
    Config = 8,
    DiagnosticCycle = 9,
    DiagnosticAcycle = 10,
    BestEffort = 11,
};

enum class Criticality { High, Medium, Low };

enum class LengthConsistency { Fixed, Variable };

/// Communication levels a flow can use: controller-to-controller,
/// controller-to-device, device-to-compute (edge/cloud).
enum class CommLevel : unsigned { C2C = 1u << 0, C2D = 1u << 1, D2Cmp = 1u << 2 };

/// Small value-type set of communication levels.
struct CommLevelSet {
    unsigned bits = 0;

    constexpr CommLevelSet() = default;
    constexpr CommLevelSet(std::initializer_list<CommLevel> levels) {
        for (CommLevel l : levels) bits |= static_cast<unsigned>(l);
    }

    constexpr bool contains(CommLevel l) const { return (bits & static_cast<unsigned>(l)) != 0; }
    constexpr bool intersects(CommLevelSet other) const { return (bits & other.bits) != 0; }
    constexpr bool empty() const { return bits == 0; }
    constexpr bool operator==(const CommLevelSet&) const = default;

    void insert(CommLevel l) { bits |= static_cast<unsigned>(l); }
};

/**
 * One catalog row: the communication characteristics of a traffic type.
 * The eleven built-in rows are the golden copy shipped in
 * data/traffic_catalog.json; user catalogs may override the attribute
 * columns but not the id/name pairing.
 */
struct TrafficSpec {
    TrafficType type = TrafficType::ControlIso;
    bool periodic = true;
    Criticality criticality = Criticality::High;
    bool loss_tolerant = false;
    LengthConsistency length_consistency = LengthConsistency::Fixed;
    CommLevelSet comm_levels;

    bool operator==(const TrafficSpec&) const = default;
};

/// Observable properties of an application flow, used to look up matching
/// traffic types. comm_levels states the level(s) the flow itself uses.
struct FlowAttributes {
    bool periodic = true;
    Criticality criticality = Criticality::High;
    bool loss_tolerant = false;
    LengthConsistency length_consistency = LengthConsistency::Fixed;
    CommLevelSet comm_levels;
};

int traffic_id(TrafficType t);
const std::string& traffic_name(TrafficType t);

/// Resolves "Control-Iso" (exact catalog name, case-insensitive, '-' and '_'
/// interchangeable) or a numeric id string. Throws ParseError otherwise.
TrafficType traffic_from_string(const std::string& text);

const char* to_string(Criticality c);
const char* to_string(LengthConsistency l);
const char* to_string(CommLevel l);
Criticality criticality_from_string(const std::string& s);
LengthConsistency length_consistency_from_string(const std::string& s);
CommLevel comm_level_from_string(const std::string& s);

/// Names of the set members in fixed order (C2C, C2D, D2Cmp).
std::vector<std::string> comm_level_names(CommLevelSet set);

/// The built-in catalog: exactly eleven specs in id order.
const std::vector<TrafficSpec>& builtin_catalog();

/// The built-in spec for one traffic type.
const TrafficSpec& builtin_spec(TrafficType t);

/**
 * All traffic types whose periodic/criticality/loss/length attributes equal
 * the flow's and whose communication levels intersect the flow's. May be
 * empty (no match) or contain several ids: the catalog cannot distinguish
 * Control-Iso from Control-Sync by these attributes alone.
 */
std::vector<TrafficType> classify_flow(const FlowAttributes& attrs,
                                       const std::vector<TrafficSpec>& catalog = builtin_catalog());

/// View of a catalog row as classification attributes.
FlowAttributes spec_as_attributes(const TrafficSpec& spec);

/// Parses a catalog document. Enum fields are validated; a repeated id is a
/// conflict. Throws ParseError with the field name and record index.
std::vector<TrafficSpec> parse_traffic_catalog(const std::string& text);

/// Serializes a catalog to the canonical document form; serializing the
/// built-in catalog reproduces data/traffic_catalog.json byte for byte.
std::string serialize_traffic_catalog(const std::vector<TrafficSpec>& catalog);

} // namespace pubsubcfg

#endif
