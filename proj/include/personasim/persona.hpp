#pragma once

#include <optional>
#include <string>
#include <vector>

#include "personasim/common.hpp"

namespace personasim {

/// The long, structured specification a simulated person is anchored in.
/// Backed by the raw JSON document so that arbitrary open-ended sections
/// (preferences, beliefs, behaviors, skills, relationships, ...) survive a
/// load -> save -> load round trip untouched.
class PersonaDocument {
 public:
  PersonaDocument() : doc_(json::object()) {}
  explicit PersonaDocument(json doc);

  static PersonaDocument parse(const std::string& content);

  const json& raw() const { return doc_; }
  json& raw() { return doc_; }
  std::string dump(int indent = 2) const { return doc_.dump(indent); }

  std::string name() const { return doc_.value("name", ""); }
  void set_name(const std::string& name) { doc_["name"] = name; }
  std::optional<int> age() const;
  std::string text_field(const std::string& key) const { return doc_.value(key, ""); }

  /// Throws ValidationError on a missing name or a big_five block that is
  /// not exactly the five canonical traits.
  void validate() const;

  bool operator==(const PersonaDocument& other) const { return doc_ == other.doc_; }

 private:
  json doc_;
};

/// Partial persona merged into agents. Merge policy per field: scalars are
/// overridden by the fragment, lists append with duplicates dropped,
/// sub-documents merge recursively.
class PersonaFragment {
 public:
  PersonaFragment() : doc_(json::object()) {}
  explicit PersonaFragment(json doc);
  static PersonaFragment parse(const std::string& content);

  const json& raw() const { return doc_; }

 private:
  json doc_;
};

PersonaDocument merge_fragment(const PersonaDocument& base,
                               const PersonaFragment& fragment);

extern const std::vector<std::string> kBigFiveTraits;

}  // namespace personasim
