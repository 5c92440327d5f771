#include "personasim/trajectory.hpp"

#include <sstream>

namespace personasim {

void Stimulus::validate() const {
  if (content.empty()) throw ValidationError("stimulus content must be non-empty");
  if (kind.empty() || kind != to_upper(kind)) {
    throw ValidationError("stimulus kind must be an uppercase token: " + kind);
  }
}

json Stimulus::to_json() const {
  return {{"kind", kind},
          {"content", content},
          {"source", source},
          {"sim_time", format_sim_time(sim_time)}};
}

Stimulus Stimulus::from_json(const json& j) {
  Stimulus s;
  s.kind = j.at("kind").get<std::string>();
  s.content = j.at("content").get<std::string>();
  s.source = j.value("source", "");
  if (j.contains("sim_time")) s.sim_time = parse_sim_time(j["sim_time"]);
  return s;
}

void Action::validate() const {
  if (kind.empty() || kind != to_upper(kind)) {
    throw ValidationError("action kind must be an uppercase token: " + kind);
  }
  if (is_done() && (!content.empty() || !target.empty())) {
    throw ValidationError("DONE carries no content and no target");
  }
  if (kind == action_kind::kTalk && content.empty()) {
    throw ValidationError("TALK needs non-empty content");
  }
}

json Action::to_json() const {
  return {{"kind", kind}, {"content", content}, {"target", target}};
}

Action Action::from_json(const json& j) {
  Action a;
  // "type" is the wire key the LLM replies with; "kind" the stored one
  if (j.contains("kind")) a.kind = j.at("kind").get<std::string>();
  else a.kind = j.at("type").get<std::string>();
  a.kind = to_upper(a.kind);
  if (j.contains("content") && !j["content"].is_null()) {
    a.content = j["content"].is_string() ? j["content"].get<std::string>()
                                         : j["content"].dump();
  }
  if (j.contains("target") && j["target"].is_string()) {
    a.target = j["target"].get<std::string>();
  }
  return a;
}

json TrajectoryEvent::to_json() const {
  return {{"seq", seq},
          {"sim_time", format_sim_time(sim_time)},
          {"kind", kind},
          {"payload", payload}};
}

TrajectoryEvent TrajectoryEvent::from_json(const json& j) {
  TrajectoryEvent e;
  e.seq = j.at("seq").get<long>();
  e.sim_time = parse_sim_time(j.at("sim_time").get<std::string>());
  e.kind = j.at("kind").get<std::string>();
  e.payload = j.value("payload", json::object());
  return e;
}

const TrajectoryEvent& Trajectory::append(SimTime time, const std::string& kind,
                                          json payload) {
  TrajectoryEvent e;
  e.seq = next_seq_++;
  e.sim_time = time;
  e.kind = kind;
  e.payload = std::move(payload);
  events_.push_back(std::move(e));
  return events_.back();
}

long Trajectory::count_kind(const std::string& kind) const {
  long n = 0;
  for (const auto& e : events_) n += (e.kind == kind) ? 1 : 0;
  return n;
}

std::vector<TrajectoryEvent> Trajectory::select_window(size_t first_n,
                                                       size_t last_n) const {
  if (first_n + last_n >= events_.size()) return events_;
  std::vector<TrajectoryEvent> out;
  out.reserve(first_n + last_n);
  out.insert(out.end(), events_.begin(),
             events_.begin() + static_cast<long>(first_n));
  out.insert(out.end(), events_.end() - static_cast<long>(last_n), events_.end());
  return out;
}

std::string Trajectory::to_jsonl() const {
  std::ostringstream out;
  for (const auto& e : events_) out << e.to_json().dump() << "\n";
  return out.str();
}

Trajectory Trajectory::from_jsonl(const std::string& content) {
  Trajectory t;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TrajectoryEvent e = TrajectoryEvent::from_json(json::parse(line));
    t.next_seq_ = std::max(t.next_seq_, e.seq + 1);
    t.events_.push_back(std::move(e));
  }
  return t;
}

std::string render_event(const TrajectoryEvent& event) {
  std::ostringstream out;
  out << "[" << format_sim_time(event.sim_time) << "] ";
  const json& p = event.payload;
  if (event.kind == "stimulus") {
    out << p.value("source", "?") << " -> " << p.value("kind", "?") << ": "
        << p.value("content", "");
  } else if (event.kind == "action") {
    out << p.value("by", "agent") << " acts " << p.value("kind", "?");
    if (!p.value("target", "").empty()) out << " (to " << p["target"].get<std::string>() << ")";
    const std::string content = p.value("content", "");
    if (!content.empty()) out << ": " << content;
  } else if (event.kind == "correction") {
    out << "correction: candidate " << p.value("candidate", json::object()).value("kind", "?")
        << " discarded (score " << p.value("verdict", json::object()).value("score", -1)
        << "): " << p.value("verdict", json::object()).value("justification", "");
  } else {
    out << event.kind << ": " << p.dump();
  }
  return out.str();
}

std::string render_events(const std::vector<TrajectoryEvent>& events) {
  std::ostringstream out;
  for (const auto& e : events) out << render_event(e) << "\n";
  return out.str();
}

}  // namespace personasim
