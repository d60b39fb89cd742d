#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sheafsmith {

// Global knobs. Every report header records these verbatim.
struct Config {
    int stage_cap = 64;          // small object argument stage bound
    std::int64_t size_guard = 1000000;  // max total elements in any intermediate carrier
    int trunc_n = 3;             // simplicial truncation level
    int enum_bound = 4;          // default carrier bound for model enumeration
    std::uint64_t seed = 1;      // deterministic RNG seed for generated corpora

    void validate() const {
        if (stage_cap < 1 || size_guard < 1 || trunc_n < 0 || enum_bound < 0)
            throw std::invalid_argument("config values must be positive");
    }
};

// Thrown when an operation would exceed the configured size guardrail.
struct SizeGuardError : std::runtime_error {
    explicit SizeGuardError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed textual input; carries a 1-based line number when known.
struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& what)
        : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + what : what),
          line(line_) {}
};

// Contract violations between modules (mismatched bases, unknown ids, ...).
struct InvariantError : std::runtime_error {
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

inline void guard_size(std::int64_t n, const Config& cfg, const std::string& where) {
    if (n > cfg.size_guard)
        throw SizeGuardError(where + ": intermediate size " + std::to_string(n) +
                             " exceeds guardrail " + std::to_string(cfg.size_guard));
}

}  // namespace sheafsmith
