#include "personasim/persona.hpp"

#include <algorithm>

namespace personasim {

const std::vector<std::string> kBigFiveTraits = {
    "openness", "conscientiousness", "extraversion", "agreeableness",
    "neuroticism"};

PersonaDocument::PersonaDocument(json doc) : doc_(std::move(doc)) {
  if (!doc_.is_object()) {
    throw ValidationError("persona document must be a JSON object");
  }
}

PersonaDocument PersonaDocument::parse(const std::string& content) {
  json doc = json::parse(content, nullptr, false);
  if (doc.is_discarded()) {
    throw ValidationError("persona document is not valid JSON");
  }
  PersonaDocument persona(std::move(doc));
  persona.validate();
  return persona;
}

std::optional<int> PersonaDocument::age() const {
  if (doc_.contains("age") && doc_["age"].is_number_integer()) {
    return doc_["age"].get<int>();
  }
  return std::nullopt;
}

void PersonaDocument::validate() const {
  if (name().empty()) throw ValidationError("persona needs a non-empty name");
  if (doc_.contains("personality") && doc_["personality"].is_object() &&
      doc_["personality"].contains("big_five")) {
    const json& five = doc_["personality"]["big_five"];
    if (!five.is_object() || five.size() != kBigFiveTraits.size()) {
      throw ValidationError("big_five must contain exactly the five canonical traits");
    }
    for (const auto& trait : kBigFiveTraits) {
      if (!five.contains(trait)) {
        throw ValidationError("big_five missing trait: " + trait);
      }
    }
  }
}

PersonaFragment::PersonaFragment(json doc) : doc_(std::move(doc)) {
  if (!doc_.is_object()) {
    throw ValidationError("persona fragment must be a JSON object");
  }
}

PersonaFragment PersonaFragment::parse(const std::string& content) {
  json doc = json::parse(content, nullptr, false);
  if (doc.is_discarded()) {
    throw ValidationError("persona fragment is not valid JSON");
  }
  return PersonaFragment(std::move(doc));
}

namespace {

void merge_into(json& base, const json& fragment) {
  for (auto it = fragment.begin(); it != fragment.end(); ++it) {
    const std::string& key = it.key();
    const json& value = it.value();
    if (base.contains(key) && base[key].is_object() && value.is_object()) {
      merge_into(base[key], value);
    } else if (base.contains(key) && base[key].is_array() && value.is_array()) {
      for (const auto& element : value) {
        auto& arr = base[key];
        if (std::find(arr.begin(), arr.end(), element) == arr.end()) {
          arr.push_back(element);
        }
      }
    } else {
      base[key] = value;
    }
  }
}

}  // namespace

PersonaDocument merge_fragment(const PersonaDocument& base,
                               const PersonaFragment& fragment) {
  json merged = base.raw();
  merge_into(merged, fragment.raw());
  PersonaDocument out(std::move(merged));
  out.validate();
  return out;
}

}  // namespace personasim
