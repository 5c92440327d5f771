#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "personasim/common.hpp"

namespace personasim {

enum class Role { system, user, assistant };

std::string role_name(Role r);
Role role_from_name(const std::string& name);

struct ChatMessage {
  Role role = Role::user;
  std::string content;
};

/// One chat-completion call. `tag` labels the purpose ("agent-action",
/// "proposition", "factory-plan", ...) and never affects the cache key.
struct CompletionRequest {
  std::vector<ChatMessage> messages;
  double temperature = 1.0;
  int max_output_tokens = 1024;
  std::optional<json> response_schema;
  std::string tag;
};

struct CompletionResult {
  std::string text;
  std::optional<json> parsed;
  std::string backend_id;
  bool from_cache = false;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  virtual std::string complete_text(const CompletionRequest& req) = 0;
};

/// Deterministic replay backend. Entries are consumed front to back; an
/// entry with a tag only matches requests carrying that tag, an untagged
/// entry matches anything. Running out of matching entries means the test
/// script and the simulation disagree, which is an error worth surfacing.
class ScriptedBackend : public Backend {
 public:
  struct Entry {
    std::string tag;  // empty = matches any request
    std::string text;
  };

  explicit ScriptedBackend(std::vector<Entry> entries);

  // File format: JSON array of strings, or of {tag?, text | json} objects.
  static std::shared_ptr<ScriptedBackend> from_file(const std::string& path);
  static std::shared_ptr<ScriptedBackend> from_json(const json& entries);

  std::string id() const override { return "scripted"; }
  std::string complete_text(const CompletionRequest& req) override;

  size_t remaining() const;

 private:
  std::vector<Entry> entries_;
  std::vector<bool> used_;
  mutable std::mutex mu_;
};

struct RetryPolicy {
  int max_attempts = 3;
  int initial_backoff_ms = 1000;
  double multiplier = 2.0;
};

/// OpenAI-compatible chat-completions client. Credentials are looked up
/// from the named environment variable at call time and are never stored
/// on the object, serialized, or logged.
struct HttpBackendConfig {
  std::string base_url;  // e.g. "http://127.0.0.1:8089/v1"
  std::string model;
  std::string credentials_env = "OPENAI_API_KEY";
  int timeout_seconds = 60;
  RetryPolicy retry;
};

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  std::string id() const override { return "http:" + config_.model; }
  std::string complete_text(const CompletionRequest& req) override;

 private:
  HttpBackendConfig config_;
};

/// Append-only content-addressed call cache, one JSON record per line.
class CallCache {
 public:
  explicit CallCache(std::string path);
  std::optional<std::string> lookup(const std::string& key) const;
  void store(const std::string& key, const std::string& text);
  size_t size() const;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::map<std::string, std::string> entries_;
  mutable std::mutex mu_;
};

/// Hook for the program-constrained simulation cache: given the canonical
/// event and a closure that executes the call live, either replays the
/// recorded output or runs live and records it.
class CompletionInterceptor {
 public:
  struct Result {
    json output;
    bool replayed = false;
  };
  virtual ~CompletionInterceptor() = default;
  virtual Result intercept(const json& event,
                           const std::function<json()>& live) = 0;
};

struct GatewayStats {
  long backend_calls = 0;    // live backend invocations
  long cache_hits = 0;       // served from the call cache
  long session_replays = 0;  // served from a simulation trace
};

class Gateway {
 public:
  explicit Gateway(std::shared_ptr<Backend> backend);

  void set_call_cache(std::shared_ptr<CallCache> cache) { cache_ = std::move(cache); }
  void set_interceptor(std::shared_ptr<CompletionInterceptor> hook) {
    interceptor_ = std::move(hook);
  }

  CompletionResult complete(const CompletionRequest& req);

  /// Digest over canonicalized messages + temperature + schema. Tag,
  /// token limits and credentials do not participate.
  static std::string cache_key(const CompletionRequest& req);
  static json canonical_request(const CompletionRequest& req);

  Backend& backend() { return *backend_; }
  GatewayStats stats() const;
  void reset_stats();

 private:
  std::shared_ptr<Backend> backend_;
  std::shared_ptr<CallCache> cache_;
  std::shared_ptr<CompletionInterceptor> interceptor_;
  GatewayStats stats_;
  mutable std::mutex mu_;
};

void validate_request(const CompletionRequest& req);

/// Minimal JSON-schema subset: type, required, properties,
/// additionalProperties:false, items, enum, minimum, maximum, minItems.
/// Returns an error description, or nullopt when the value conforms.
std::optional<std::string> schema_validate(const json& value, const json& schema);

/// Pulls the first JSON document out of an LLM reply: the whole text, a
/// fenced ```json block, or the first balanced {...} / [...] span.
json extract_json_block(const std::string& text);

}  // namespace personasim
