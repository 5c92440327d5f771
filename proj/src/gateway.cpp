#include "personasim/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace personasim {

std::string role_name(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

Role role_from_name(const std::string& name) {
  if (name == "system") return Role::system;
  if (name == "user") return Role::user;
  if (name == "assistant") return Role::assistant;
  throw ValidationError("unknown chat role: " + name);
}

void validate_request(const CompletionRequest& req) {
  if (req.messages.empty()) throw ValidationError("request has no messages");
  if (req.messages.front().role != Role::system) {
    throw ValidationError("first message must have role system");
  }
  if (req.temperature < 0) throw ValidationError("temperature must be >= 0");
  if (req.max_output_tokens < 1) {
    throw ValidationError("max_output_tokens must be positive");
  }
  for (const auto& m : req.messages) {
    if (m.content.empty() && m.role != Role::assistant) {
      throw ValidationError("empty content only allowed on assistant placeholders");
    }
  }
}

// ---------------------------------------------------------------------------
// ScriptedBackend

ScriptedBackend::ScriptedBackend(std::vector<Entry> entries)
    : entries_(std::move(entries)), used_(entries_.size(), false) {}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_json(const json& entries) {
  if (!entries.is_array()) {
    throw ValidationError("scripted transcript must be a JSON array");
  }
  std::vector<Entry> parsed;
  parsed.reserve(entries.size());
  for (const auto& e : entries) {
    Entry entry;
    if (e.is_string()) {
      entry.text = e.get<std::string>();
    } else if (e.is_object()) {
      entry.tag = e.value("tag", "");
      if (e.contains("json")) {
        entry.text = e.at("json").dump();
      } else if (e.contains("text")) {
        entry.text = e.at("text").get<std::string>();
      } else {
        throw ValidationError("transcript entry needs 'text' or 'json'");
      }
    } else {
      throw ValidationError("transcript entry must be string or object");
    }
    parsed.push_back(std::move(entry));
  }
  return std::make_shared<ScriptedBackend>(std::move(parsed));
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::string& path) {
  return from_json(json::parse(read_file(path)));
}

std::string ScriptedBackend::complete_text(const CompletionRequest& req) {
  std::lock_guard<std::mutex> lock(mu_);
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (used_[i]) continue;
    if (entries_[i].tag.empty() || entries_[i].tag == req.tag) {
      used_[i] = true;
      return entries_[i].text;
    }
  }
  size_t consumed = 0;
  for (bool u : used_) consumed += u ? 1 : 0;
  std::ostringstream msg;
  msg << "scripted transcript exhausted for tag '" << req.tag << "' after "
      << consumed << " of " << entries_.size()
      << " entries; the script and the simulation disagree";
  throw TranscriptExhausted(msg.str());
}

size_t ScriptedBackend::remaining() const {
  std::lock_guard<std::mutex> lock(mu_);
  size_t n = 0;
  for (bool u : used_) n += u ? 0 : 1;
  return n;
}

// ---------------------------------------------------------------------------
// HttpBackend

namespace {

struct ParsedUrl {
  std::string scheme_host_port;  // what httplib::Client wants
  std::string path_prefix;       // e.g. "/v1"
};

ParsedUrl parse_base_url(const std::string& base_url) {
  auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError("base_url must include scheme: " + base_url);
  }
  auto path_start = base_url.find('/', scheme_end + 3);
  ParsedUrl out;
  if (path_start == std::string::npos) {
    out.scheme_host_port = base_url;
  } else {
    out.scheme_host_port = base_url.substr(0, path_start);
    out.path_prefix = base_url.substr(path_start);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') {
      out.path_prefix.pop_back();
    }
  }
  return out;
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw ValidationError("http backend needs base_url");
}

std::string HttpBackend::complete_text(const CompletionRequest& req) {
  ParsedUrl url = parse_base_url(config_.base_url);

  json body;
  body["model"] = config_.model;
  body["temperature"] = req.temperature;
  body["max_tokens"] = req.max_output_tokens;
  json msgs = json::array();
  for (const auto& m : req.messages) {
    msgs.push_back({{"role", role_name(m.role)}, {"content", m.content}});
  }
  body["messages"] = std::move(msgs);
  if (req.response_schema) {
    body["response_format"] = {{"type", "json_object"}};
  }
  const std::string payload = body.dump();

  std::string last_error;
  int backoff_ms = config_.retry.initial_backoff_ms;
  for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms = static_cast<int>(backoff_ms * config_.retry.multiplier);
    }
    httplib::Client client(url.scheme_host_port);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    httplib::Headers headers;
    if (const char* key = std::getenv(config_.credentials_env.c_str());
        key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto res = client.Post(url.path_prefix + "/chat/completions", headers,
                           payload, "application/json");
    if (!res) {
      last_error = "transport: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "http status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError("chat completion failed with status " +
                           std::to_string(res->status) + ": " +
                           res->body.substr(0, 300));
    }
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") ||
        reply["choices"].empty()) {
      throw TransportError("malformed chat completion response: " +
                           res->body.substr(0, 300));
    }
    return reply["choices"][0]["message"].value("content", "");
  }
  throw TransportError("chat completion failed after " +
                       std::to_string(config_.retry.max_attempts) +
                       " attempts; last error: " + last_error);
}

// ---------------------------------------------------------------------------
// CallCache

CallCache::CallCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) {
      // a torn trailing line from an interrupted append is tolerated
      std::string rest;
      if (std::getline(in, rest)) {
        throw Error("corrupt call cache line " + std::to_string(lineno) +
                    " in " + path_);
      }
      break;
    }
    entries_[rec.at("key").get<std::string>()] =
        rec.at("result_text").get<std::string>();
  }
}

std::optional<std::string> CallCache::lookup(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void CallCache::store(const std::string& key, const std::string& text) {
  std::lock_guard<std::mutex> lock(mu_);
  if (entries_.count(key)) return;
  entries_[key] = text;
  json rec = {
      {"key", key},
      {"request_digest_inputs_omitted", true},
      {"result_text", text},
      {"created_at",
       format_sim_time(static_cast<SimTime>(std::time(nullptr)))},
  };
  std::ofstream out(path_, std::ios::app);
  if (!out) throw Error("cannot append to call cache: " + path_);
  out << rec.dump() << "\n";
}

size_t CallCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

// ---------------------------------------------------------------------------
// Schema subset validation

namespace {

bool type_matches(const json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "integer") return value.is_number_integer();
  if (type == "number") return value.is_number();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  return true;
}

std::optional<std::string> validate_at(const json& value, const json& schema,
                                       const std::string& where) {
  if (!schema.is_object()) return std::nullopt;
  if (schema.contains("type")) {
    const std::string type = schema.at("type").get<std::string>();
    if (!type_matches(value, type)) {
      return where + ": expected " + type + ", got " + std::string(value.type_name());
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& candidate : schema.at("enum")) {
      if (candidate == value) { ok = true; break; }
    }
    if (!ok) return where + ": value not in enum";
  }
  if (value.is_number()) {
    if (schema.contains("minimum") &&
        value.get<double>() < schema.at("minimum").get<double>()) {
      return where + ": below minimum";
    }
    if (schema.contains("maximum") &&
        value.get<double>() > schema.at("maximum").get<double>()) {
      return where + ": above maximum";
    }
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto& name : schema.at("required")) {
        if (!value.contains(name.get<std::string>())) {
          return where + ": missing required field '" + name.get<std::string>() + "'";
        }
      }
    }
    const json props = schema.value("properties", json::object());
    if (schema.value("additionalProperties", json(true)) == json(false)) {
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!props.contains(it.key())) {
          return where + ": unexpected field '" + it.key() + "'";
        }
      }
    }
    for (auto it = props.begin(); it != props.end(); ++it) {
      if (value.contains(it.key())) {
        auto err = validate_at(value.at(it.key()), it.value(), where + "." + it.key());
        if (err) return err;
      }
    }
  }
  if (value.is_array()) {
    if (schema.contains("minItems") &&
        value.size() < schema.at("minItems").get<size_t>()) {
      return where + ": fewer than minItems elements";
    }
    if (schema.contains("items")) {
      for (size_t i = 0; i < value.size(); ++i) {
        auto err = validate_at(value[i], schema.at("items"),
                               where + "[" + std::to_string(i) + "]");
        if (err) return err;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> schema_validate(const json& value, const json& schema) {
  return validate_at(value, schema, "$");
}

json extract_json_block(const std::string& text) {
  {
    json whole = json::parse(text, nullptr, false);
    if (!whole.is_discarded()) return whole;
  }
  auto fence = text.find("```");
  if (fence != std::string::npos) {
    auto start = text.find('\n', fence);
    auto end = text.find("```", fence + 3);
    if (start != std::string::npos && end != std::string::npos && end > start) {
      json fenced = json::parse(text.substr(start + 1, end - start - 1), nullptr, false);
      if (!fenced.is_discarded()) return fenced;
    }
  }
  for (char open : {'{', '['}) {
    const char close = (open == '{') ? '}' : ']';
    auto begin = text.find(open);
    if (begin == std::string::npos) continue;
    int depth = 0;
    bool in_string = false;
    for (size_t i = begin; i < text.size(); ++i) {
      char c = text[i];
      if (in_string) {
        if (c == '\\') { ++i; continue; }
        if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == open) ++depth;
      else if (c == close && --depth == 0) {
        json span = json::parse(text.substr(begin, i - begin + 1), nullptr, false);
        if (!span.is_discarded()) return span;
        break;
      }
    }
  }
  throw SchemaError("reply contains no parseable JSON document", text);
}

// ---------------------------------------------------------------------------
// Gateway

Gateway::Gateway(std::shared_ptr<Backend> backend) : backend_(std::move(backend)) {
  if (!backend_) throw ValidationError("gateway needs a backend");
}

json Gateway::canonical_request(const CompletionRequest& req) {
  json msgs = json::array();
  for (const auto& m : req.messages) {
    msgs.push_back({{"role", role_name(m.role)}, {"content", m.content}});
  }
  json canon = {{"messages", std::move(msgs)}, {"temperature", req.temperature}};
  canon["schema"] = req.response_schema ? *req.response_schema : json();
  return canon;
}

std::string Gateway::cache_key(const CompletionRequest& req) {
  return canonical_digest(canonical_request(req));
}

CompletionResult Gateway::complete(const CompletionRequest& req) {
  validate_request(req);

  auto live = [&]() -> json {
    if (cache_) {
      const std::string key = cache_key(req);
      if (auto hit = cache_->lookup(key)) {
        {
          std::lock_guard<std::mutex> lock(mu_);
          ++stats_.cache_hits;
        }
        return {{"text", *hit}, {"from_cache", true}};
      }
      const std::string text = backend_->complete_text(req);
      {
        std::lock_guard<std::mutex> lock(mu_);
        ++stats_.backend_calls;
      }
      cache_->store(key, text);
      return {{"text", text}, {"from_cache", false}};
    }
    const std::string text = backend_->complete_text(req);
    {
      std::lock_guard<std::mutex> lock(mu_);
      ++stats_.backend_calls;
    }
    return {{"text", text}, {"from_cache", false}};
  };

  json out;
  bool replayed = false;
  if (interceptor_) {
    json event = {{"kind", "gateway"}, {"request", canonical_request(req)}};
    auto res = interceptor_->intercept(event, live);
    out = std::move(res.output);
    replayed = res.replayed;
    if (replayed) {
      std::lock_guard<std::mutex> lock(mu_);
      ++stats_.session_replays;
    }
  } else {
    out = live();
  }

  CompletionResult result;
  result.text = out.at("text").get<std::string>();
  result.from_cache = replayed || out.value("from_cache", false);
  result.backend_id = backend_->id();
  if (req.response_schema) {
    json parsed = extract_json_block(result.text);
    if (auto err = schema_validate(parsed, *req.response_schema)) {
      throw SchemaError("structured output failed validation: " + *err,
                        result.text);
    }
    result.parsed = std::move(parsed);
  }
  return result;
}

GatewayStats Gateway::stats() const {
  std::lock_guard<std::mutex> lock(mu_);
  return stats_;
}

void Gateway::reset_stats() {
  std::lock_guard<std::mutex> lock(mu_);
  stats_ = GatewayStats{};
}

}  // namespace personasim
