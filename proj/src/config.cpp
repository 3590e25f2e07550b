#include "curvelab/config.hpp"

#include "curvelab/io.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <limits>
#include <set>

namespace curvelab {

namespace {

const std::string kDefaults = R"(# Built-in defaults. Every key a run may set appears here.

[run]
seed = 0
# --workers and CURVELAB_WORKERS take precedence
workers = 1

[field]
a = 1.0
f_uni = 1.0
delta_f = 0.0
# obstacle centres per unit area
intensity = 0.0
# cone | plateau | table
shape = "cone"
peak = 1.0
# samples file for shape = "table"
table = ""
# bound overrides; 0 keeps the intrinsic C_1A, C_1F
c1a = 0.0
c1f = 0.0
# deterministic obstacle ring added to every realization (0 = none)
ring_radius = 0.0
ring_spacing = 0.5
ring_center = [0.0, 0.0]
# gen-field window [-half, half]^2
half = 30.0
dx = 0.25

[levelset]
cfl = 0.5
reinit_every = 10
# narrow-band half-width in cells, 0 = full grid
band = 12
record_dt = 0.25
# negative = 1e-6 / dx
eps_grad = -1.0

[arrival]
# cap T = dist / v_min + c_s h; v_min = 1/2 of the obstacle-free speed 1
v_min = 0.5
c_s = 2.0
h = 1.0
x0 = [20.0, 0.0]
source_radius = 5.0
half = 30.0
dx = 0.25
seeds = 10
# > 0 switches to the untruncated point arrival censored at t_max
t_max = 0.0

[evolve]
# disk | halfplane | pbm
shape = "disk"
radius = 10.0
center = [0.0, 0.0]
input = ""
half = 30.0
dx = 0.25
horizon = 10.0

[homog]
theta = 0.5
beta = 2.0
c_beta = 4.0
scales = [50.0, 100.0, 200.0]
seeds = 100
delta_f = 0.0
shift_by_scale = false
# 0 = max(r / 512, 1/4)
dx = 0.0
eta = 0.5
R_eps = 60.0
R_inner = 20.0
c_tau = 1.0
v_hom = 1.0
ball_seeds = 10

[mcharness]
seeds = 200
dists = [50.0, 100.0, 200.0, 400.0]
h_exponent = 0.5
# > 0 overrides h = dist^h_exponent
h_fixed = 0.0
dx = 0.5
min_uncensored = 30

[mcharness.box]
r = 200.0
w = 40.0
seeds = 100
t_max = 600.0
dx = 0.5
collar = 2.0
stabilize_time = 10.0
# pinned after 5 h / v_min without area change
h = 1.0

[concentration]
paths = 100000
N = 64
T = 8
kmax = 3
depth = 8
min_block = 30
delta = 0.5
# tail constant; 1 dominates the reflected-walk tails (calibrated C ~ 0.97)
tail_C = 1.0
)";

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty() || k.front() == '.' || k.back() == '.' || k.find("..") != std::string::npos) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
  return true;
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    if (line[k] == '\\' && quoted) {
      ++k;
      continue;
    }
    if (line[k] == '"') quoted = !quoted;
    if (line[k] == '#' && !quoted) return line.substr(0, k);
  }
  return line;
}

bool parse_number(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  if (b != e && *b == '+') ++b;
  const auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e && std::isfinite(out);
}

ConfigValue parse_value(const std::string& raw, const std::string& where) {
  const std::string v = trim(raw);
  if (v.empty()) throw ConfigError(where + ": missing value");
  if (v.front() == '"') {
    std::string out;
    std::size_t k = 1;
    for (; k < v.size() && v[k] != '"'; ++k) {
      if (v[k] == '\\' && k + 1 < v.size()) {
        const char c = v[++k];
        out += c == 'n' ? '\n' : c == 't' ? '\t' : c;
      } else {
        out += v[k];
      }
    }
    if (k != v.size() - 1) throw ConfigError(where + ": malformed string " + v);
    return out;
  }
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.front() == '[') {
    if (v.back() != ']') throw ConfigError(where + ": unterminated array");
    std::vector<double> out;
    const std::string body = trim(v.substr(1, v.size() - 2));
    std::size_t start = 0;
    while (!body.empty() && start <= body.size()) {
      const auto comma = body.find(',', start);
      const std::string item = trim(body.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (item.empty()) {
        if (comma == std::string::npos) break;  // trailing comma
        throw ConfigError(where + ": empty array element");
      }
      double d;
      if (!parse_number(item, d)) throw ConfigError(where + ": arrays hold numbers only, got " + item);
      out.push_back(d);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  }
  double d;
  if (!parse_number(v, d)) throw ConfigError(where + ": cannot parse value " + v);
  return d;
}

const char* type_name(const ConfigValue& v) {
  switch (v.index()) {
    case 0: return "number";
    case 1: return "boolean";
    case 2: return "string";
    default: return "array";
  }
}

std::string value_text(const ConfigValue& v) {
  if (const double* d = std::get_if<double>(&v)) return io::fmt(*d);
  if (const bool* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (const std::string* s = std::get_if<std::string>(&v)) {
    std::string out = "\"";
    for (char c : *s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + '"';
  }
  std::string out = "[";
  const auto& l = std::get<std::vector<double>>(v);
  for (std::size_t k = 0; k < l.size(); ++k) out += (k ? ", " : "") + io::fmt(l[k]);
  return out + "]";
}

}  // namespace

std::vector<std::pair<std::string, ConfigValue>> parse_config_text(const std::string& text,
                                                                   const std::string& origin) {
  std::vector<std::pair<std::string, ConfigValue>> out;
  std::set<std::string> seen;
  std::string section;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string line = trim(strip_comment(text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos)));
    ++line_no;
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_key(section)) throw ConfigError(where + ": invalid section name '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    if (!seen.insert(full).second) throw ConfigError(where + ": duplicate key " + full);
    out.emplace_back(full, parse_value(line.substr(eq + 1), where));
  }
  return out;
}

Config::Config() {
  for (auto& [k, v] : parse_config_text(kDefaults, "defaults")) values_[k] = std::move(v);
}

const std::string& Config::defaults_text() { return kDefaults; }

void Config::set_value(const std::string& key, ConfigValue v) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key: " + key);
  if (it->second.index() != v.index())
    throw ConfigError("config key " + key + " expects a " + type_name(it->second) + ", got a " +
                      type_name(v));
  it->second = std::move(v);
}

void Config::merge_text(const std::string& text, const std::string& origin) {
  for (auto& [k, v] : parse_config_text(text, origin)) {
    try {
      set_value(k, std::move(v));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ": " + e.what());
    }
  }
}

void Config::merge_file(const std::string& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.contains("config") || !j["config"].is_string())
      throw ConfigError(path + ": not a run manifest with a config entry");
    text = j["config"].get<std::string>();
  }
  merge_text(text, path);
}

void Config::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override needs key=value: " + assignment);
  const std::string key = trim(assignment.substr(0, eq));
  const std::string raw = trim(assignment.substr(eq + 1));
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key: " + key);
  if (std::holds_alternative<std::string>(it->second) && (raw.empty() || raw.front() != '"'))
    set_value(key, raw);
  else
    set_value(key, parse_value(raw, "override " + key));
}

const ConfigValue& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key: " + key);
  return it->second;
}

double Config::num(const std::string& key) const {
  const double* d = std::get_if<double>(&get(key));
  if (!d) throw ConfigError("config key " + key + " is not a number");
  return *d;
}

int Config::integer(const std::string& key) const {
  const double d = num(key);
  if (d != std::floor(d) || std::abs(d) > std::numeric_limits<int>::max())
    throw ConfigError("config key " + key + " must be an integer");
  return static_cast<int>(d);
}

std::uint64_t Config::u64(const std::string& key) const {
  const double d = num(key);
  if (d != std::floor(d) || d < 0.0 || d >= 9007199254740992.0)
    throw ConfigError("config key " + key + " must be a nonnegative integer below 2^53");
  return static_cast<std::uint64_t>(d);
}

bool Config::flag(const std::string& key) const {
  const bool* b = std::get_if<bool>(&get(key));
  if (!b) throw ConfigError("config key " + key + " is not a boolean");
  return *b;
}

const std::string& Config::str(const std::string& key) const {
  const std::string* s = std::get_if<std::string>(&get(key));
  if (!s) throw ConfigError("config key " + key + " is not a string");
  return *s;
}

const std::vector<double>& Config::list(const std::string& key) const {
  const auto* l = std::get_if<std::vector<double>>(&get(key));
  if (!l) throw ConfigError("config key " + key + " is not an array");
  return *l;
}

std::string Config::to_text() const {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> by_section;
  for (const auto& [k, v] : values_) {
    const auto dot = k.rfind('.');
    by_section[k.substr(0, dot)].emplace_back(k.substr(dot + 1), value_text(v));
  }
  std::string out;
  for (const auto& [section, entries] : by_section) {
    out += (out.empty() ? "[" : "\n[") + section + "]\n";
    for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
  }
  return out;
}

}  // namespace curvelab
