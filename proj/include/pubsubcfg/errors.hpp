/*
 * OPC UA PubSub configuration toolkit: error types.
 *
 * Copyright (c) 2026 the pubsubcfg authors
 *
 * Released under the Apache 2.0 Licence
 */
#ifndef PUBSUBCFG_ERRORS_HPP
#define PUBSUBCFG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pubsubcfg {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A document failed to parse or violated its schema. The message names the
/// offending field (and record index where applicable).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

/// Invalid configuration values or scenario setup detected outside the
/// diagnostic path (e.g. a zero chunk payload limit).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Pipeline contract violation (misaligned tick, oversized DSM).
class PipelineError : public Error {
public:
    explicit PipelineError(const std::string& code, const std::string& what)
        : Error(code + ": " + what), code_(code) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

/// Synthesis refused the requested options for this traffic type.
/// code() carries the rule identifier (e.g. GUIDE_DELTA_FORBIDDEN).
class SynthesisError : public Error {
public:
    SynthesisError(const std::string& code, const std::string& what)
        : Error(code + ": " + what), code_(code) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

} // namespace pubsubcfg

#endif
