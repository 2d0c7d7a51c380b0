#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "common.hpp"

namespace fpsynth {

// Line-based run configuration: `section.key = value`, `#` starts a comment,
// later duplicates override earlier ones. Only registered keys are accepted;
// every key has a default so an empty file is a valid config.
class RunConfig {
 public:
  RunConfig() = default;

  static RunConfig load(const std::filesystem::path& path);
  static RunConfig parse(const std::string& text);

  // Throws UnknownKey for unregistered keys, ParseError for type mismatches.
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key) const;
  int64_t get_int(const std::string& key) const;
  uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  bool is_known(const std::string& key) const;

  // Master seed override (`--seed`): rewires every *.seed key plus run.seed.
  void set_seed(uint64_t seed);

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace fpsynth
