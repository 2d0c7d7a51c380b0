#include "config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fpsynth {

namespace {

enum class KeyType { Int, U64, Real, Bool, Str };

struct KeySpec {
  const char* key;
  KeyType type;
  const char* def;
};

// The full key registry. Unknown keys are rejected at parse time.
constexpr std::array<KeySpec, 33> kKeys{{
    {"run.seed", KeyType::U64, "42"},

    {"corpus.n_ids", KeyType::Int, "50"},
    {"corpus.n_impr", KeyType::Int, "4"},
    {"corpus.side", KeyType::Int, "64"},
    {"corpus.seed", KeyType::U64, "42"},

    {"preprocess.variant", KeyType::Str, "fp"},
    {"preprocess.crop_mean_threshold", KeyType::Real, "0.75"},
    {"preprocess.ink_threshold", KeyType::Real, "0.5"},
    {"preprocess.min_quality", KeyType::Real, "40"},
    {"preprocess.output_side", KeyType::Int, "64"},

    {"diffusion.T", KeyType::Int, "1000"},
    {"diffusion.beta_start", KeyType::Real, "1e-4"},
    {"diffusion.beta_end", KeyType::Real, "0.02"},
    {"diffusion.branch_d", KeyType::Int, "400"},
    {"diffusion.branch_k", KeyType::Int, "4"},

    {"model.init_features", KeyType::Int, "32"},
    {"model.depth", KeyType::Int, "2"},
    {"model.time_embed_dim", KeyType::Int, "128"},

    {"train.batch_size", KeyType::Int, "16"},
    {"train.steps", KeyType::Int, "500"},
    {"train.learning_rate", KeyType::Real, "1e-4"},
    {"train.seed", KeyType::U64, "42"},
    {"train.checkpoint_every", KeyType::Int, "100"},

    {"matcher.d_max", KeyType::Real, "75"},
    {"matcher.dist_tol", KeyType::Real, "6"},
    {"matcher.angle_tol_deg", KeyType::Real, "11.25"},
    {"matcher.threshold", KeyType::Int, "40"},

    {"evaluate.w_coherence", KeyType::Real, "0.4"},
    {"evaluate.w_band", KeyType::Real, "0.3"},
    {"evaluate.w_contrast", KeyType::Real, "0.2"},
    {"evaluate.w_minutiae", KeyType::Real, "0.1"},
    {"evaluate.omit_zero", KeyType::Bool, "true"},
    {"evaluate.quality_smoothing", KeyType::Bool, "true"},
}};

const KeySpec* find_key(const std::string& key) {
  for (const auto& k : kKeys)
    if (key == k.key) return &k;
  return nullptr;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_i64(const std::string& v, int64_t& out) {
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  return ec == std::errc() && p == v.data() + v.size();
}

bool parse_u64(const std::string& v, uint64_t& out) {
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  return ec == std::errc() && p == v.data() + v.size();
}

bool parse_real(const std::string& v, double& out) {
  try {
    size_t pos = 0;
    out = std::stod(v, &pos);
    return pos == v.size() && std::isfinite(out);
  } catch (...) {
    return false;
  }
}

void check_type(const KeySpec& spec, const std::string& value, const std::string& where) {
  bool ok = true;
  switch (spec.type) {
    case KeyType::Int: {
      int64_t x;
      ok = parse_i64(value, x);
      break;
    }
    case KeyType::U64: {
      uint64_t x;
      ok = parse_u64(value, x);
      break;
    }
    case KeyType::Real: {
      double x;
      ok = parse_real(value, x);
      break;
    }
    case KeyType::Bool:
      ok = value == "true" || value == "false" || value == "0" || value == "1";
      break;
    case KeyType::Str:
      break;
  }
  if (!ok)
    fail(Errc::ParseError,
         "bad value '" + value + "' for key '" + spec.key + "'" + where);
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoFailure, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(Errc::ParseError, "expected 'section.key = value' at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key.find('.') == std::string::npos)
      fail(Errc::ParseError, "bad key '" + key + "' at line " + std::to_string(lineno));

    const KeySpec* spec = find_key(key);
    if (!spec) fail(Errc::UnknownKey, "'" + key + "' at line " + std::to_string(lineno));
    check_type(*spec, value, " at line " + std::to_string(lineno));
    cfg.values_[key] = value;  // later duplicates override
  }
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const KeySpec* spec = find_key(key);
  if (!spec) fail(Errc::UnknownKey, "'" + key + "'");
  check_type(*spec, value, "");
  values_[key] = value;
}

bool RunConfig::is_known(const std::string& key) const { return find_key(key) != nullptr; }

std::string RunConfig::get_string(const std::string& key) const {
  if (auto it = values_.find(key); it != values_.end()) return it->second;
  const KeySpec* spec = find_key(key);
  if (!spec) fail(Errc::UnknownKey, "'" + key + "'");
  return spec->def;
}

int64_t RunConfig::get_int(const std::string& key) const {
  int64_t x = 0;
  if (!parse_i64(get_string(key), x)) fail(Errc::ParseError, "key '" + key + "' is not an integer");
  return x;
}

uint64_t RunConfig::get_u64(const std::string& key) const {
  uint64_t x = 0;
  if (!parse_u64(get_string(key), x)) fail(Errc::ParseError, "key '" + key + "' is not a u64");
  return x;
}

double RunConfig::get_double(const std::string& key) const {
  double x = 0;
  if (!parse_real(get_string(key), x)) fail(Errc::ParseError, "key '" + key + "' is not a real");
  return x;
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string v = get_string(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(Errc::ParseError, "key '" + key + "' is not a bool");
}

void RunConfig::set_seed(uint64_t seed) {
  const std::string s = std::to_string(seed);
  values_["run.seed"] = s;
  values_["corpus.seed"] = s;
  values_["train.seed"] = s;
}

}  // namespace fpsynth
