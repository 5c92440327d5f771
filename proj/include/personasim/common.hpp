#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace personasim {

using json = nlohmann::json;

// Simulation timestamps are plain UTC seconds. Runs start from a fixed
// default epoch so trajectories are reproducible byte for byte.
using SimTime = std::int64_t;

constexpr SimTime kDefaultSimStart = 1736154000;  // 2025-01-06T09:00:00Z

std::string format_sim_time(SimTime t);
SimTime parse_sim_time(const std::string& iso);

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Domain invariant violated (bad persona document, bad plan, ...).
struct ValidationError : Error {
  using Error::Error;
};

// Network / backend-process failure; retried before it surfaces.
struct TransportError : Error {
  using Error::Error;
};

// Structured output did not validate; keeps the raw reply for diagnosis.
struct SchemaError : Error {
  SchemaError(const std::string& what, std::string raw)
      : Error(what), raw_text(std::move(raw)) {}
  std::string raw_text;
};

// A scripted transcript ran out of (matching) entries.
struct TranscriptExhausted : Error {
  using Error::Error;
};

// A persisted simulation trace failed its hash-chain check.
struct CorruptTraceError : Error {
  using Error::Error;
};

// Canonical serialization: sorted keys, no insignificant whitespace.
// nlohmann::json already stores object keys sorted; dump() emits them
// without padding, so canonical form is stable across field order.
std::string canonical_dump(const json& j);

std::string sha256_hex(const std::string& data);

inline std::string canonical_digest(const json& j) {
  return sha256_hex(canonical_dump(j));
}

// Fills {{name}} placeholders. Unbound placeholders throw ValidationError
// when `require_all_bound` is set, otherwise they are left in place.
std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& vars,
                            bool require_all_bound = true);

// Lowercased a-z0-9 tokens; everything else is a separator.
std::vector<std::string> tokenize(const std::string& text);

std::string to_upper(std::string s);
std::string to_lower(std::string s);
bool contains_ci(const std::string& haystack, const std::string& needle);

// Strips path separators and shell-unfriendly characters from a file stem.
std::string sanitize_filename(const std::string& name);

// Writes via a sibling temp file + rename so readers never see partials.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace personasim
