#pragma once

#include <string>
#include <variant>
#include <vector>

#include "personasim/trajectory.hpp"

namespace personasim {

/// Time-ordered record of everything the agent experienced or did.
/// Append-only during a run; records before the consolidation watermark
/// are represented in prompts by a stored summary instead of verbatim.
class EpisodicMemory {
 public:
  struct Record {
    long seq = 0;
    SimTime sim_time = kDefaultSimStart;
    enum class Direction { stimulus, action } direction = Direction::stimulus;
    json payload;
  };

  const Record& append_stimulus(const Stimulus& s);
  const Record& append_action(const Action& a, SimTime time);

  const std::vector<Record>& records() const { return records_; }
  size_t size() const { return records_.size(); }

  long watermark() const { return watermark_; }
  const std::string& summary() const { return summary_; }
  void consolidate(long new_watermark, std::string summary);

  /// Records at or past the watermark, capped to the most recent `n`.
  std::vector<Record> recent(size_t n) const;

 private:
  std::vector<Record> records_;
  long next_seq_ = 0;
  long watermark_ = 0;  // records with seq < watermark_ are summarized
  std::string summary_;
};

std::string render_record(const EpisodicMemory::Record& r);

/// Timeless indexed knowledge with lexical (BM25-weighted token overlap)
/// retrieval. Deterministic: ties break by insertion order, repeated
/// ingestion of the same chunk stores one entry.
class SemanticMemory {
 public:
  struct Entry {
    std::string text;
    std::string source;
  };

  void ingest(const std::string& text, const std::string& source);
  const std::vector<Entry>& entries() const { return entries_; }

  std::vector<Entry> retrieve(const std::string& query, size_t k) const;

 private:
  std::vector<Entry> entries_;
};

}  // namespace personasim
