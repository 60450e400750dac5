#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>

#include "praa/error.hpp"

namespace praa::cli {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("config: bad value '" + text + "' for key '" + key + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config: bad boolean '" + text + "' for key '" + key + "'");
}

}  // namespace

CrossRealSets parse_cross_sets(const std::string& text) {
  if (text == "anchored") return CrossRealSets::kAnchored;
  if (text == "symmetric") return CrossRealSets::kSymmetric;
  throw ConfigError("cross-real-sets must be 'anchored' or 'symmetric'");
}

PipelineConfig RunConfig::pipeline() const {
  PipelineConfig p;
  p.swarm = swarm;
  p.folds = folds;
  p.inner_folds = inner_folds;
  p.adt_iterations = adt_iterations;
  p.seed = seed;
  p.nested = nested;
  p.cross_sets = cross_sets;
  p.threads = threads;
  p.positive_label = positive_label;
  return p;
}

void RunConfig::validate() const {
  swarm.validate();
  if (folds < 2) throw ConfigError("folds must be >= 2");
  if (inner_folds < 2) throw ConfigError("inner folds must be >= 2");
  if (adt_iterations < 1) throw ConfigError("adt iterations must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

void apply_config(std::istream& in, const std::filesystem::path& base_dir,
                  RunConfig& config) {
  auto path = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_absolute() ? p : base_dir / p;
  };
  const std::map<std::string, std::function<void(const std::string&, const std::string&)>>
      setters = {
          {"data", [&](auto&, auto& v) { config.data = path(v); }},
          {"schema", [&](auto&, auto& v) { config.schema = path(v); }},
          {"output", [&](auto&, auto& v) { config.output = path(v); }},
          {"header", [&](auto& k, auto& v) { config.header = parse_bool(k, v); }},
          {"seed", [&](auto& k, auto& v) { config.seed = parse_number<std::uint64_t>(k, v); }},
          {"folds", [&](auto& k, auto& v) { config.folds = parse_number<std::size_t>(k, v); }},
          {"inner_folds",
           [&](auto& k, auto& v) { config.inner_folds = parse_number<std::size_t>(k, v); }},
          {"adt_iterations",
           [&](auto& k, auto& v) { config.adt_iterations = parse_number<std::size_t>(k, v); }},
          {"threads", [&](auto& k, auto& v) { config.threads = parse_number<std::size_t>(k, v); }},
          {"nested", [&](auto& k, auto& v) { config.nested = parse_bool(k, v); }},
          {"cross_real_sets", [&](auto&, auto& v) { config.cross_sets = parse_cross_sets(v); }},
          {"positive_label", [&](auto&, auto& v) { config.positive_label = v; }},
          {"particles",
           [&](auto& k, auto& v) { config.swarm.particles = parse_number<std::size_t>(k, v); }},
          {"iterations",
           [&](auto& k, auto& v) { config.swarm.iterations = parse_number<std::size_t>(k, v); }},
          {"c1", [&](auto& k, auto& v) { config.swarm.c1 = parse_number<double>(k, v); }},
          {"c2", [&](auto& k, auto& v) { config.swarm.c2 = parse_number<double>(k, v); }},
          {"vmax", [&](auto& k, auto& v) { config.swarm.vmax = parse_number<double>(k, v); }},
      };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const auto key = trim(text.substr(0, eq));
    const auto value = trim(text.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
    it->second(key, value);
  }
}

void load_config(const std::filesystem::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  apply_config(in, path.parent_path(), config);
}

}  // namespace praa::cli
