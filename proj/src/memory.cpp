#include "personasim/memory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace personasim {

const EpisodicMemory::Record& EpisodicMemory::append_stimulus(const Stimulus& s) {
  Record r;
  r.seq = next_seq_++;
  r.sim_time = s.sim_time;
  r.direction = Record::Direction::stimulus;
  r.payload = s.to_json();
  records_.push_back(std::move(r));
  return records_.back();
}

const EpisodicMemory::Record& EpisodicMemory::append_action(const Action& a,
                                                            SimTime time) {
  Record r;
  r.seq = next_seq_++;
  r.sim_time = time;
  r.direction = Record::Direction::action;
  r.payload = a.to_json();
  records_.push_back(std::move(r));
  return records_.back();
}

void EpisodicMemory::consolidate(long new_watermark, std::string summary) {
  if (new_watermark < watermark_) {
    throw ValidationError("consolidation watermark cannot move backwards");
  }
  watermark_ = new_watermark;
  summary_ = std::move(summary);
}

std::vector<EpisodicMemory::Record> EpisodicMemory::recent(size_t n) const {
  std::vector<Record> out;
  for (const auto& r : records_) {
    if (r.seq >= watermark_) out.push_back(r);
  }
  if (out.size() > n) out.erase(out.begin(), out.end() - static_cast<long>(n));
  return out;
}

std::string render_record(const EpisodicMemory::Record& r) {
  std::ostringstream out;
  out << "[" << format_sim_time(r.sim_time) << "] ";
  if (r.direction == EpisodicMemory::Record::Direction::stimulus) {
    out << "from " << r.payload.value("source", "?") << " ("
        << r.payload.value("kind", "?") << "): " << r.payload.value("content", "");
  } else {
    out << "you acted " << r.payload.value("kind", "?");
    const std::string target = r.payload.value("target", "");
    if (!target.empty()) out << " (to " << target << ")";
    const std::string content = r.payload.value("content", "");
    if (!content.empty()) out << ": " << content;
  }
  return out.str();
}

void SemanticMemory::ingest(const std::string& text, const std::string& source) {
  if (text.empty()) return;
  for (const auto& e : entries_) {
    if (e.text == text) return;
  }
  entries_.push_back(Entry{text, source});
}

std::vector<SemanticMemory::Entry> SemanticMemory::retrieve(const std::string& query,
                                                            size_t k) const {
  if (entries_.empty() || k == 0) return {};
  const std::vector<std::string> query_tokens = tokenize(query);
  if (query_tokens.empty()) return {};

  // document frequency per term
  std::map<std::string, int> df;
  std::vector<std::map<std::string, int>> term_counts(entries_.size());
  double avg_len = 0;
  std::vector<size_t> doc_len(entries_.size(), 0);
  for (size_t i = 0; i < entries_.size(); ++i) {
    auto tokens = tokenize(entries_[i].text);
    doc_len[i] = tokens.size();
    avg_len += static_cast<double>(tokens.size());
    for (const auto& t : tokens) ++term_counts[i][t];
    std::set<std::string> unique(tokens.begin(), tokens.end());
    for (const auto& t : unique) ++df[t];
  }
  avg_len /= static_cast<double>(entries_.size());
  if (avg_len <= 0) avg_len = 1;

  const double k1 = 1.2, b = 0.75;
  const double n_docs = static_cast<double>(entries_.size());
  std::vector<std::pair<double, size_t>> scored;
  for (size_t i = 0; i < entries_.size(); ++i) {
    double score = 0;
    for (const auto& q : query_tokens) {
      auto tf_it = term_counts[i].find(q);
      if (tf_it == term_counts[i].end()) continue;
      const double tf = tf_it->second;
      const double idf =
          std::log(1.0 + (n_docs - df[q] + 0.5) / (df[q] + 0.5));
      const double denom =
          tf + k1 * (1 - b + b * static_cast<double>(doc_len[i]) / avg_len);
      score += idf * tf * (k1 + 1) / denom;
    }
    if (score > 0) scored.emplace_back(score, i);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<Entry> out;
  for (size_t i = 0; i < scored.size() && i < k; ++i) {
    out.push_back(entries_[scored[i].second]);
  }
  return out;
}

}  // namespace personasim
