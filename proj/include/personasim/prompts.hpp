#pragma once

#include <string>
#include <vector>

namespace personasim::prompts {

/// Built-in template text for `name`; throws if unknown.
const std::string& builtin(const std::string& name);

/// Template text honoring overrides: a file `<dir>/<name>.txt` under the
/// directory set via set_assets_dir() or $PERSONASIM_PROMPTS_DIR wins over
/// the built-in.
std::string load(const std::string& name);

void set_assets_dir(const std::string& dir);

std::vector<std::string> names();

/// Writes every built-in template to `<dir>/<name>.txt` for editing.
void dump_all(const std::string& dir);

}  // namespace personasim::prompts
