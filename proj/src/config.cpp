#include "qrasp/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace qrasp {

ConfigError::ConfigError(int line, const std::string& what)
    : InputError(line > 0 ? fmt::format("line {}: {}", line, what) : what), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

struct Value {
  std::string text;
  bool quoted = false;
  int line = 0;
  std::string key;

  [[noreturn]] void fail(const std::string& expected) const {
    throw ConfigError(line, fmt::format("key '{}' expects {}, got '{}'", key, expected, text));
  }
  template <class T>
  T number() const {
    if (quoted) fail("a number");
    T v{};
    const char* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end) fail("a number");
    return v;
  }
  bool boolean() const {
    if (!quoted && text == "true") return true;
    if (!quoted && text == "false") return false;
    fail("true or false");
  }
};

using Setter = std::function<void(SimConfig&, const Value&)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"mesh",
       {{"width", [](SimConfig& c, const Value& v) { c.mesh.width = v.number<int>(); }},
        {"height", [](SimConfig& c, const Value& v) { c.mesh.height = v.number<int>(); }}}},
      {"router",
       {{"vcs_per_port", [](SimConfig& c, const Value& v) { c.router.vcs_per_port = v.number<int>(); }},
        {"buffer_depth", [](SimConfig& c, const Value& v) { c.router.buffer_depth = v.number<int>(); }},
        {"learning_queue_capacity",
         [](SimConfig& c, const Value& v) { c.router.learning_queue_capacity = v.number<int>(); }}}},
      {"policy",
       {{"name",
         [](SimConfig& c, const Value& v) {
           try {
             c.policy.kind = parse_policy(v.text);
           } catch (const InputError& e) {
             throw ConfigError(v.line, e.what());
           }
         }},
        {"alpha", [](SimConfig& c, const Value& v) { c.policy.alpha = v.number<double>(); }},
        {"gamma", [](SimConfig& c, const Value& v) { c.policy.gamma = v.number<double>(); }},
        {"mu", [](SimConfig& c, const Value& v) { c.policy.mu = v.number<double>(); }},
        {"shared_path", [](SimConfig& c, const Value& v) { c.policy.shared_path = v.boolean(); }},
        {"count_arriving_vc",
         [](SimConfig& c, const Value& v) { c.policy.count_arriving_vc = v.boolean(); }},
        {"exploration", [](SimConfig& c, const Value& v) { c.policy.exploration = v.number<double>(); }},
        {"crq_half_life",
         [](SimConfig& c, const Value& v) { c.policy.crq_half_life = v.number<double>(); }},
        {"crq_floor", [](SimConfig& c, const Value& v) { c.policy.crq_floor = v.number<double>(); }}}},
      {"traffic",
       {{"schedule",
         [](SimConfig& c, const Value& v) {
           try {
             c.traffic.phases = parse_schedule(v.text);
           } catch (const ConfigError&) {
             throw;
           } catch (const InputError& e) {
             throw ConfigError(v.line, e.what());
           }
         }},
        {"injection_rate",
         [](SimConfig& c, const Value& v) { c.traffic.injection_rate = v.number<double>(); }},
        {"packet_len", [](SimConfig& c, const Value& v) { c.traffic.packet_len = v.number<int>(); }}}},
      {"run",
       {{"warmup_cycles", [](SimConfig& c, const Value& v) { c.warmup_cycles = v.number<Cycle>(); }},
        {"measure_cycles", [](SimConfig& c, const Value& v) { c.measure_cycles = v.number<Cycle>(); }},
        {"drain_timeout", [](SimConfig& c, const Value& v) { c.drain_timeout = v.number<Cycle>(); }},
        {"seed", [](SimConfig& c, const Value& v) { c.seed = v.number<std::uint64_t>(); }},
        {"window_cycles", [](SimConfig& c, const Value& v) { c.window_cycles = v.number<Cycle>(); }}}},
  };
  return table;
}

}  // namespace

std::vector<TrafficPhase> parse_schedule(std::string_view text) {
  std::vector<TrafficPhase> phases;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos)
      throw InputError(fmt::format("schedule entry '{}' is not pattern:cycles", item));
    TrafficPhase ph;
    ph.pattern = parse_pattern(trim(item.substr(0, colon)));
    const std::string_view num = trim(item.substr(colon + 1));
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), ph.duration);
    if (ec != std::errc() || p != num.data() + num.size() || ph.duration <= 0)
      throw InputError(fmt::format("schedule entry '{}' needs a positive cycle count", item));
    phases.push_back(ph);
  }
  if (phases.empty()) throw InputError("schedule is empty");
  return phases;
}

SimConfig parse_config(std::string_view text) {
  SimConfig cfg;
  std::string section;
  std::set<std::string> seen;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!setters().contains(section))
        throw ConfigError(line_no, fmt::format("unknown section [{}]", section));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(line_no, fmt::format("expected key = value, got '{}'", line));
    Value v;
    v.line = line_no;
    v.key = std::string(trim(line.substr(0, eq)));
    std::string_view val = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError(line_no, fmt::format("key '{}' appears before any section", v.key));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"') {
      v.quoted = true;
      val = val.substr(1, val.size() - 2);
    } else if (!val.empty() && val.front() == '"') {
      throw ConfigError(line_no, fmt::format("unterminated string for key '{}'", v.key));
    }
    v.text = std::string(val);
    const auto& keys = setters().at(section);
    const auto it = keys.find(v.key);
    if (it == keys.end())
      throw ConfigError(line_no, fmt::format("unknown key '{}' in [{}]", v.key, section));
    if (!seen.insert(section + "." + v.key).second)
      throw ConfigError(line_no, fmt::format("duplicate key '{}' in [{}]", v.key, section));
    it->second(cfg, v);
  }
  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const InputError& e) {
    throw ConfigError(0, e.what());
  }
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, fmt::format("cannot read config file '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const SimConfig& c) {
  std::string schedule;
  for (const auto& ph : c.traffic.phases) {
    if (!schedule.empty()) schedule += ',';
    schedule += fmt::format("{}:{}", to_string(ph.pattern), ph.duration);
  }
  auto b = [](bool v) { return v ? "true" : "false"; };
  std::string out;
  out += fmt::format("[mesh]\nwidth = {}\nheight = {}\n", c.mesh.width, c.mesh.height);
  out += fmt::format("[router]\nvcs_per_port = {}\nbuffer_depth = {}\nlearning_queue_capacity = {}\n",
                     c.router.vcs_per_port, c.router.buffer_depth, c.router.learning_queue_capacity);
  out += fmt::format("[policy]\nname = \"{}\"\n", to_string(c.policy.kind));
  if (c.policy.alpha) out += fmt::format("alpha = {}\n", *c.policy.alpha);
  if (c.policy.gamma) out += fmt::format("gamma = {}\n", *c.policy.gamma);
  out += fmt::format(
      "mu = {}\nshared_path = {}\ncount_arriving_vc = {}\nexploration = {}\ncrq_half_life = {}\n"
      "crq_floor = {}\n",
      c.policy.mu, b(c.policy.shared_path), b(c.policy.count_arriving_vc), c.policy.exploration,
      c.policy.crq_half_life, c.policy.crq_floor);
  out += fmt::format("[traffic]\nschedule = \"{}\"\ninjection_rate = {}\npacket_len = {}\n", schedule,
                     c.traffic.injection_rate, c.traffic.packet_len);
  out += fmt::format(
      "[run]\nwarmup_cycles = {}\nmeasure_cycles = {}\ndrain_timeout = {}\nseed = {}\n"
      "window_cycles = {}\n",
      c.warmup_cycles, c.measure_cycles, c.drain_timeout, c.seed, c.window_cycles);
  return out;
}

}  // namespace qrasp
