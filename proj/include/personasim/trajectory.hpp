#pragma once

#include <string>
#include <vector>

#include "personasim/common.hpp"

namespace personasim {

// Built-in action kinds. Mental faculties register additional ones.
namespace action_kind {
inline constexpr const char* kThink = "THINK";
inline constexpr const char* kTalk = "TALK";
inline constexpr const char* kDone = "DONE";
inline constexpr const char* kReachOut = "REACH_OUT";
}  // namespace action_kind

namespace stimulus_kind {
inline constexpr const char* kThought = "THOUGHT";
inline constexpr const char* kConversation = "CONVERSATION";
inline constexpr const char* kSocial = "SOCIAL";
}  // namespace stimulus_kind

/// Inbound event of an agent. `source` is an agent name, "experimenter",
/// or an environment name.
struct Stimulus {
  std::string kind;  // uppercase token: THOUGHT, CONVERSATION, SOCIAL, ...
  std::string content;
  std::string source;
  SimTime sim_time = kDefaultSimStart;

  void validate() const;
  json to_json() const;
  static Stimulus from_json(const json& j);
};

/// Outbound event of an agent. DONE carries no content and no target.
struct Action {
  std::string kind;
  std::string content;
  std::string target;

  bool is_done() const { return kind == action_kind::kDone; }
  void validate() const;
  json to_json() const;
  static Action from_json(const json& j);
};

/// One entry of an agent or environment event log. `kind` is one of:
/// stimulus, action, correction, delivery, blocked, broadcast,
/// intervention, story, artifact, step, error.
struct TrajectoryEvent {
  long seq = 0;
  SimTime sim_time = kDefaultSimStart;
  std::string kind;
  json payload;

  json to_json() const;
  static TrajectoryEvent from_json(const json& j);
};

/// Ordered, timestamped, append-only record of everything that happened to
/// an agent or environment. The substrate for propositions, reducers,
/// metrics, and caching.
class Trajectory {
 public:
  const TrajectoryEvent& append(SimTime time, const std::string& kind, json payload);

  const std::vector<TrajectoryEvent>& events() const { return events_; }
  size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  long count_kind(const std::string& kind) const;

  /// The first_n oldest plus last_n newest events, without duplication
  /// when the windows overlap.
  std::vector<TrajectoryEvent> select_window(size_t first_n, size_t last_n) const;

  std::string to_jsonl() const;
  static Trajectory from_jsonl(const std::string& content);

 private:
  std::vector<TrajectoryEvent> events_;
  long next_seq_ = 0;
};

/// Human-readable one-line rendering used in judge and extraction prompts.
std::string render_event(const TrajectoryEvent& event);
std::string render_events(const std::vector<TrajectoryEvent>& events);

}  // namespace personasim
