#include "caper/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "caper/error.hpp"

namespace caper {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("invalid value '" + value + "' for " + key);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("invalid boolean '" + value + "' for " + key);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

}  // namespace

Settings parse_settings(std::istream& in, const std::string& source) {
  Settings settings;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key=value");
    const auto key = trim(std::string_view(text).substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
    settings[key] = trim(std::string_view(text).substr(eq + 1));
  }
  return settings;
}

Settings load_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  return parse_settings(in, path);
}

const std::vector<std::string_view>& settings_keys() {
  static const std::vector<std::string_view> keys{
      "input", "weighted", "noise", "trials", "seed", "arms", "scoring", "output", "levels", "dump_dir",
      "refine.iterations", "refine.epsilon", "refine.topk", "refine.mode",
      "base.kind", "base.hops", "base.bins", "base.discount", "base.gamma", "base.topk", "base.command", "base.workdir",
  };
  return keys;
}

void apply_settings(const Settings& settings, ExperimentConfig& cfg) {
  auto& caper = cfg.caper;
  for (const auto& [key, value] : settings) {
    if (key == "input") {
      cfg.input = value;
    } else if (key == "weighted") {
      cfg.weighted = parse_bool(key, value);
    } else if (key == "noise") {
      cfg.noise_levels.clear();
      for (const auto& item : split_list(value)) cfg.noise_levels.push_back(parse_number<double>(key, item));
    } else if (key == "trials") {
      cfg.trials = parse_number<std::size_t>(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "arms") {
      cfg.arms.clear();
      for (const auto& item : split_list(value)) {
        const auto arm = parse_arm(item);
        if (!arm) throw ConfigError("unknown arm '" + item + "' (base-only, caper, caper-hard-start)");
        cfg.arms.push_back(*arm);
      }
    } else if (key == "scoring") {
      if (value == "argmax")
        cfg.scoring = MatchingMode::RowArgmax;
      else if (value == "bijective")
        cfg.scoring = MatchingMode::Bijective;
      else
        throw ConfigError("scoring must be argmax or bijective");
    } else if (key == "output") {
      cfg.output = value;
    } else if (key == "levels") {
      caper.levels = parse_number<std::size_t>(key, value);
    } else if (key == "dump_dir") {
      caper.dump_dir = value;
    } else if (key == "refine.iterations") {
      caper.refine.iterations = parse_number<std::size_t>(key, value);
    } else if (key == "refine.epsilon") {
      if (value == "auto")
        caper.refine.epsilon.reset();
      else
        caper.refine.epsilon = parse_number<double>(key, value);
    } else if (key == "refine.topk") {
      if (value == "auto")
        caper.refine.topk.reset();
      else
        caper.refine.topk = parse_number<std::size_t>(key, value);
    } else if (key == "refine.mode") {
      if (value == "soft")
        caper.refine.mode = RefineConfig::Mode::Soft;
      else if (value == "hard-start-soft")
        caper.refine.mode = RefineConfig::Mode::HardStartSoft;
      else
        throw ConfigError("refine.mode must be soft or hard-start-soft");
    } else if (key == "base.kind") {
      if (value == "builtin")
        caper.base.kind = BaseAlignerSpec::Kind::Builtin;
      else if (value == "external")
        caper.base.kind = BaseAlignerSpec::Kind::External;
      else
        throw ConfigError("base.kind must be builtin or external");
    } else if (key == "base.hops") {
      caper.base.builtin.hops = parse_number<std::size_t>(key, value);
    } else if (key == "base.bins") {
      caper.base.builtin.bins = value == "auto" ? 0 : parse_number<std::size_t>(key, value);
    } else if (key == "base.discount") {
      caper.base.builtin.discount = parse_number<double>(key, value);
    } else if (key == "base.gamma") {
      caper.base.builtin.gamma = parse_number<double>(key, value);
    } else if (key == "base.topk") {
      caper.base.builtin.topk = value == "auto" ? 0 : parse_number<std::size_t>(key, value);
    } else if (key == "base.command") {
      caper.base.external.command = value;
    } else if (key == "base.workdir") {
      caper.base.external.workdir = value;
    } else {
      throw ConfigError("unknown setting '" + key + "'");
    }
  }
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace caper
