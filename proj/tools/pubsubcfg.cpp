/*
 * OPC UA PubSub configuration toolkit: command-line interface.
 *
 * Copyright (c) 2026 the pubsubcfg authors
 *
 * Released under the Apache 2.0 Licence
 */
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "pubsubcfg/errors.hpp"
#include "pubsubcfg/sim.hpp"

namespace {

using namespace pubsubcfg;

constexpr int kExitOk = 0;
constexpr int kExitGuideline = 1;
constexpr int kExitStructural = 2;
constexpr int kExitInternal = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file " + path);
    out << content;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

int cmd_catalog(const std::string& format, const std::string& level) {
    std::vector<TrafficSpec> rows = builtin_catalog();
    if (!level.empty()) {
        CommLevel wanted = comm_level_from_string(level);
        std::vector<TrafficSpec> filtered;
        for (const TrafficSpec& spec : rows)
            if (spec.comm_levels.contains(wanted)) filtered.push_back(spec);
        rows = std::move(filtered);
    }

    if (format == "machine") {
        std::cout << serialize_traffic_catalog(rows);
        return kExitOk;
    }

    std::printf("%3s  %-18s %-9s %-12s %-14s %-9s %s\n", "id", "name", "periodic", "criticality",
                "loss_tolerant", "length", "comm_levels");
    for (const TrafficSpec& spec : rows) {
        std::string levels;
        for (const std::string& name : comm_level_names(spec.comm_levels))
            levels += (levels.empty() ? "" : ",") + name;
        std::printf("%3d  %-18s %-9s %-12s %-14s %-9s %s\n", traffic_id(spec.type),
                    traffic_name(spec.type).c_str(), yes_no(spec.periodic).c_str(),
                    to_string(spec.criticality), yes_no(spec.loss_tolerant).c_str(),
                    to_string(spec.length_consistency), levels.c_str());
    }
    return kExitOk;
}

void print_diagnostics(const std::vector<Diagnostic>& diags, const std::string& format) {
    for (const Diagnostic& d : diags) {
        if (format == "machine")
            std::cout << to_string(d.severity) << ',' << d.rule_id << ',' << d.subject << ",\""
                      << d.message << "\"\n";
        else
            std::cout << to_string(d.severity) << ' ' << d.rule_id << " [" << d.subject
                      << "]: " << d.message << '\n';
    }
}

int exit_code_for(const std::vector<Diagnostic>& structural,
                  const std::vector<Diagnostic>& guideline, bool strict) {
    if (!structural.empty()) return kExitStructural;
    bool errors = false;
    bool warnings = false;
    for (const Diagnostic& d : guideline) {
        errors = errors || d.severity == Severity::Error;
        warnings = warnings || d.severity == Severity::Warning;
    }
    if (errors) return kExitGuideline;
    if (strict && warnings) return kExitGuideline;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"OPC UA PubSub publisher configuration toolkit: synthesize configurations "
                 "from traffic types, audit configurations against the mapping guideline, and "
                 "simulate the consequences over lossy links"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand name

    std::string format = "text";
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"text", "machine"}))
        ->capture_default_str();
    std::uint64_t seed = 42;
    CLI::Option* seed_opt = app.add_option("--seed", seed, "Base seed for simulations");
    bool strict = false;
    app.add_flag("--strict", strict, "Treat guideline warnings as failures");

    // catalog
    CLI::App* catalog = app.add_subcommand("catalog", "Show the built-in traffic-type catalog");
    std::string level;
    catalog->add_option("--level", level, "Filter by communication level (C2C|C2D|D2Cmp)");

    // synthesize
    CLI::App* synth = app.add_subcommand("synthesize",
                                         "Derive a publisher configuration for a traffic type");
    std::string traffic_arg;
    synth->add_option("--traffic", traffic_arg, "Traffic type id or name")->required();
    std::string delta_arg = "auto";
    synth->add_option("--delta", delta_arg, "Delta-frame preference")
        ->check(CLI::IsMember({"auto", "on", "off"}))
        ->capture_default_str();
    SynthesisOptions opts;
    std::int64_t interval_us = opts.publishing_interval.count();
    std::int64_t keepalive_us = 0;
    synth->add_option("--kfc", opts.key_frame_count_if_delta,
                      "KeyFrameCount when delta frames are enabled");
    synth->add_option("--interval", interval_us, "PublishingInterval in microseconds");
    synth->add_option("--keepalive-time", keepalive_us,
                      "KeepAliveTime in microseconds (default 4x interval)");
    synth->add_option("--change-fraction", opts.expected_change_fraction,
                      "Expected per-interval fraction of fields changing");
    synth->add_option("--field-size", opts.mean_field_size_bytes, "Mean field size in bytes");
    bool multi_dsm = false;
    synth->add_flag("--multi-dsm", multi_dsm, "Publisher emits several cyclic DSMs");
    bool bulk = false;
    synth->add_flag("--bulk", bulk, "Flow is bulk (grouping beats per-event latency)");
    bool no_pubsub_endpoint = false;
    synth->add_flag("--no-pubsub-endpoint", no_pubsub_endpoint,
                    "Receiving endpoint does not support PubSub/UADP");
    synth->add_option("--max-nm-size", opts.max_network_message_size,
                      "MaxNetworkMessageSize in bytes");
    synth->add_option("--max-dsm-count", opts.max_encapsulated_dsm_count,
                      "MaxEncapsulatedDSMCount");
    std::string synth_out;
    synth->add_option("-o,--out", synth_out, "Write the configuration document here");

    // validate
    CLI::App* validate = app.add_subcommand("validate",
                                            "Audit a configuration document for a traffic type");
    std::string config_path;
    validate->add_option("config", config_path, "Configuration document")->required();
    std::string validate_traffic;
    validate->add_option("--traffic", validate_traffic, "Traffic type id or name")->required();
    double change_fraction = -1.0;
    validate->add_option("--change-fraction", change_fraction,
                         "Expected per-interval fraction of fields changing");
    double field_size = 4.0;
    validate->add_option("--field-size", field_size, "Mean field size in bytes");
    bool validate_multi = false;
    validate->add_flag("--multi-dsm", validate_multi, "Publisher co-publishes several DSMs");

    // simulate
    CLI::App* simulate = app.add_subcommand("simulate", "Run scenarios and export metrics");
    std::string scenario_path;
    simulate->add_option("scenario", scenario_path, "Scenario document");
    std::string builtin;
    simulate->add_option("--builtin", builtin, "Built-in suite")
        ->check(CLI::IsMember({"usecase", "misconfig-suite"}));
    std::string metrics_out;
    simulate->add_option("--out", metrics_out, "Write the metrics table here");
    std::string trace_out;
    simulate->add_option("--trace", trace_out, "Write the per-DSM trace here");
    unsigned jobs = 1;
    simulate->add_option("--jobs", jobs, "Run independent scenarios in parallel");

    // compare
    CLI::App* cmp = app.add_subcommand("compare",
                                       "Run two configurations over the same scenario");
    std::string cmp_a;
    std::string cmp_b;
    cmp->add_option("config_a", cmp_a, "First configuration document")->required();
    cmp->add_option("config_b", cmp_b, "Second configuration document")->required();
    std::string cmp_scenario;
    cmp->add_option("--scenario", cmp_scenario, "Scenario document supplying datasets and link");
    int cmp_flow = 0;
    cmp->add_option("--builtin-flow", cmp_flow, "Use built-in use-case flow N (1..9) as base");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitStructural;
    }

    try {
        if (catalog->parsed()) return cmd_catalog(format, level);

        if (synth->parsed()) {
            if (delta_arg == "on") opts.delta_preference = DeltaPreference::On;
            if (delta_arg == "off") opts.delta_preference = DeltaPreference::Off;
            opts.publishing_interval = Micros{interval_us};
            opts.keepalive_time = Micros{keepalive_us};
            opts.publisher_has_multiple_cyclic_dsms = multi_dsm;
            opts.bulk_flow = bulk;
            opts.endpoint_supports_pubsub = !no_pubsub_endpoint;

            TrafficType traffic = traffic_from_string(traffic_arg);
            PublisherConfig cfg;
            try {
                cfg = synthesize(builtin_spec(traffic), opts);
            } catch (const SynthesisError& e) {
                std::cerr << "error: " << e.what() << '\n';
                return kExitGuideline;
            }
            std::string doc = serialize_config(cfg);
            if (synth_out.empty())
                std::cout << doc;
            else
                write_file(synth_out, doc);
            return kExitOk;
        }

        if (validate->parsed()) {
            TrafficType traffic = traffic_from_string(validate_traffic);
            PublisherConfig cfg = parse_config(read_file(config_path));
            FlowContext ctx;
            if (change_fraction >= 0.0) ctx.expected_change_fraction = change_fraction;
            ctx.mean_field_size_bytes = field_size;
            ctx.multiple_dsms = validate_multi;

            auto structural = validate_structural(cfg);
            auto guideline = audit(cfg, builtin_spec(traffic), ctx);
            print_diagnostics(structural, format);
            print_diagnostics(guideline, format);
            if (structural.empty() && guideline.empty() && format == "text")
                std::cout << "clean: configuration matches the guideline for "
                          << traffic_name(traffic) << '\n';
            return exit_code_for(structural, guideline, strict);
        }

        if (simulate->parsed()) {
            if (builtin.empty() == scenario_path.empty()) {
                std::cerr << "error: pass exactly one of a scenario file or --builtin\n";
                return kExitStructural;
            }

            if (builtin == "misconfig-suite") {
                auto results = run_misconfiguration_suite(seed);
                bool all_ok = true;
                for (const MisconfigResult& r : results) {
                    bool ok = r.rules_ok && r.directions_ok;
                    all_ok = all_ok && ok;
                    std::cout << (ok ? "[PASS] " : "[FAIL] ") << r.id
                              << (r.rules_ok ? "" : " (expected rules not raised)") << ' '
                              << r.detail << '\n';
                }
                return all_ok ? kExitOk : kExitGuideline;
            }

            std::vector<FlowScenario> scenarios;
            if (builtin == "usecase") {
                scenarios = builtin_usecase(seed);
            } else {
                FlowScenario s = parse_scenario(read_file(scenario_path));
                if (seed_opt->count() > 0) s.link.seed = seed;
                scenarios.push_back(std::move(s));
            }

            std::vector<std::pair<std::string, SimMetrics>> rows(scenarios.size());
            std::ostringstream trace;
            if (!trace_out.empty() && scenarios.size() > 1) {
                std::cerr << "error: --trace needs a single scenario\n";
                return kExitStructural;
            }

            const unsigned workers = std::max(1u, std::min<unsigned>(jobs, scenarios.size()));
            if (workers == 1) {
                for (std::size_t i = 0; i < scenarios.size(); ++i)
                    rows[i] = {scenarios[i].flow_id,
                               run_scenario(scenarios[i], trace_out.empty() ? nullptr : &trace)};
            } else {
                std::vector<std::thread> pool;
                std::atomic<std::size_t> next{0};
                for (unsigned w = 0; w < workers; ++w)
                    pool.emplace_back([&] {
                        for (std::size_t i = next.fetch_add(1); i < scenarios.size();
                             i = next.fetch_add(1))
                            rows[i] = {scenarios[i].flow_id, run_scenario(scenarios[i])};
                    });
                for (auto& th : pool) th.join();
            }

            std::string csv = metrics_to_csv(rows);
            if (!metrics_out.empty()) write_file(metrics_out, csv);
            if (!trace_out.empty()) write_file(trace_out, trace.str());
            if (format == "machine")
                std::cout << csv;
            else
                std::cout << metrics_summary(rows);
            return kExitOk;
        }

        if (cmp->parsed()) {
            if (cmp_scenario.empty() == (cmp_flow == 0)) {
                std::cerr << "error: pass exactly one of --scenario or --builtin-flow\n";
                return kExitStructural;
            }
            FlowScenario base;
            if (!cmp_scenario.empty()) {
                base = parse_scenario(read_file(cmp_scenario));
            } else {
                auto flows = builtin_usecase(seed);
                if (cmp_flow < 1 || cmp_flow > static_cast<int>(flows.size())) {
                    std::cerr << "error: --builtin-flow expects 1.." << flows.size() << '\n';
                    return kExitStructural;
                }
                base = flows[static_cast<std::size_t>(cmp_flow - 1)];
            }
            if (seed_opt->count() > 0) base.link.seed = seed;
            PublisherConfig a = parse_config(read_file(cmp_a));
            PublisherConfig b = parse_config(read_file(cmp_b));
            std::cout << comparison_to_text(compare(a, b, base));
            return kExitOk;
        }

        std::cerr << "error: no subcommand\n";
        return kExitStructural;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitStructural;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitStructural;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}
