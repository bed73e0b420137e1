#include "aqite/config.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "aqite/errors.hpp"

namespace aqite {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
          c == '+')) {
      return false;
    }
  }
  return true;
}

// Strips a trailing comment that is not inside a JSON string.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (c == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

class Reader {
 public:
  explicit Reader(const Config& c) : c_(c) {}

  bool has(const std::string& key) {
    used_.insert(key);
    return c_.has(key);
  }
  double number(const std::string& key) {
    const json& v = c_.at(key);
    if (!v.is_number()) fail(key, "a number");
    return v.get<double>();
  }
  long integer(const std::string& key) {
    const json& v = c_.at(key);
    if (v.is_number_float() && v.get<double>() == std::floor(v.get<double>())) {
      return static_cast<long>(v.get<double>());
    }
    if (!v.is_number_integer()) fail(key, "an integer");
    return v.get<long>();
  }
  std::string text(const std::string& key) {
    const json& v = c_.at(key);
    if (!v.is_string()) fail(key, "a string");
    return v.get<std::string>();
  }
  bool boolean(const std::string& key) {
    const json& v = c_.at(key);
    if (!v.is_boolean()) fail(key, "true or false");
    return v.get<bool>();
  }
  const json& raw(const std::string& key) { return c_.at(key); }

  void reject_unknown() const {
    for (const auto& [k, v] : c_.values()) {
      if (k.rfind("sweep.", 0) == 0) continue;
      if (used_.count(k) == 0) {
        throw ConfigError(c_.origin() + ": unknown key '" + k + "'");
      }
    }
  }

  [[noreturn]] void fail(const std::string& key, const char* what) const {
    throw ConfigError(c_.origin() + ": '" + key + "' must be " + what +
                      ", got " + c_.at(key).dump());
  }

 private:
  const Config& c_;
  std::set<std::string> used_;
};

int parse_width(const json& v, const std::string& key) {
  if (v.is_null() || (v.is_string() && v.get<std::string>() == "unbounded")) {
    return kUnboundedWidth;
  }
  if (v.is_number_integer() && v.get<long>() >= 1) {
    return static_cast<int>(v.get<long>());
  }
  throw ConfigError("'" + key + "': width must be a positive odd integer or "
                    "\"unbounded\", got " + v.dump());
}

WidthSchedule parse_schedule(const json& v) {
  if (v.is_string() || v.is_null() || v.is_number()) {
    return WidthSchedule::constant(parse_width(v, "truncation.schedule"));
  }
  if (!v.is_array() || v.empty()) {
    throw ConfigError("truncation.schedule must be a list of [tau, w] pairs");
  }
  std::vector<WidthSegment> segs;
  for (const auto& item : v) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number()) {
      throw ConfigError("truncation.schedule entries must be [tau, w], got " +
                        item.dump());
    }
    segs.push_back({item[0].get<double>(),
                    parse_width(item[1], "truncation.schedule")});
  }
  return WidthSchedule(std::move(segs));
}

json width_json(int w) {
  return w == kUnboundedWidth ? json("unbounded") : json(w);
}

}  // namespace

Config Config::parse(std::string_view text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where + ": bad key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": missing value for " + key);
    if (c.has(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    json v = json::parse(value, nullptr, false);
    if (v.is_discarded()) v = value;
    c.values_[key] = std::move(v);
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path.string());
}

const json& Config::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(origin_ + ": missing key " + key);
  return it->second;
}

void Config::set(const std::string& key, json value) {
  if (!valid_key(key)) throw ConfigError("bad key '" + key + "'");
  values_[key] = std::move(value);
}

ExperimentSpec experiment_from_config(const Config& config) {
  ExperimentSpec s;
  Reader r(config);
  if (r.has("model.L")) s.model.length = static_cast<int>(r.integer("model.L"));
  if (r.has("model.lambda_z")) s.model.lambda_z = r.number("model.lambda_z");
  if (r.has("model.boundary") && r.text("model.boundary") != "open") {
    throw ConfigError("model.boundary: only 'open' is supported");
  }
  if (r.has("generator.variant")) {
    s.variant.kind = parse_generator_kind(r.text("generator.variant"));
  }
  if (r.has("generator.u1")) s.variant.u1 = r.number("generator.u1");
  if (r.has("generator.u2")) s.variant.u2 = r.number("generator.u2");
  if (r.has("generator.retention")) {
    s.retention = parse_retention(r.text("generator.retention"));
  }
  if (r.has("integrator.epsilon")) s.epsilon = r.number("integrator.epsilon");
  if (r.has("integrator.tau_max")) s.tau_max = r.number("integrator.tau_max");
  const bool has_schedule = r.has("truncation.schedule");
  const bool has_w = r.has("truncation.w");
  if (has_schedule && has_w) {
    throw ConfigError("set either truncation.schedule or truncation.w");
  }
  if (has_schedule) s.schedule = parse_schedule(r.raw("truncation.schedule"));
  if (has_w) {
    s.schedule =
        WidthSchedule::constant(parse_width(r.raw("truncation.w"), "truncation.w"));
  }
  if (r.has("sampling.stride")) {
    s.sampling_stride = static_cast<int>(r.integer("sampling.stride"));
  }
  if (r.has("tolerances.prune")) s.tolerances.prune = r.number("tolerances.prune");
  if (r.has("tolerances.commute")) {
    s.tolerances.commute = r.number("tolerances.commute");
  }
  if (r.has("tolerances.hermiticity_warn")) {
    s.tolerances.hermiticity_warn = r.number("tolerances.hermiticity_warn");
  }
  if (r.has("tolerances.hermiticity_fail")) {
    s.tolerances.hermiticity_fail = r.number("tolerances.hermiticity_fail");
  }
  if (r.has("limits.max_terms")) {
    const long cap = r.integer("limits.max_terms");
    if (cap < 0) throw ConfigError("limits.max_terms must be >= 0");
    s.max_terms = static_cast<std::uint64_t>(cap);
  }
  if (r.has("dense.cap")) s.dense_cap = static_cast<int>(r.integer("dense.cap"));
  if (r.has("output.dir")) s.output_dir = r.text("output.dir");
  if (r.has("output.snapshots")) s.dump_snapshots = r.boolean("output.snapshots");
  r.reject_unknown();
  s.validate();
  return s;
}

json to_json(const ExperimentSpec& s) {
  json sched = json::array();
  for (const auto& seg : s.schedule.segments()) {
    sched.push_back({seg.tau_start, width_json(seg.width)});
  }
  return json{
      {"model.L", s.model.length},
      {"model.lambda_z", s.model.lambda_z},
      {"model.boundary", "open"},
      {"generator.variant", to_string(s.variant.kind)},
      {"generator.u1", s.variant.u1},
      {"generator.u2", s.variant.u2},
      {"generator.retention", to_string(s.retention)},
      {"integrator.epsilon", s.epsilon},
      {"integrator.tau_max", s.tau_max},
      {"truncation.schedule", sched},
      {"sampling.stride", s.sampling_stride},
      {"tolerances.prune", s.tolerances.prune},
      {"tolerances.commute", s.tolerances.commute},
      {"tolerances.hermiticity_warn", s.tolerances.hermiticity_warn},
      {"tolerances.hermiticity_fail", s.tolerances.hermiticity_fail},
      {"limits.max_terms", s.max_terms},
      {"dense.cap", s.dense_cap},
      {"output.dir", s.output_dir},
      {"output.snapshots", s.dump_snapshots},
  };
}

std::string to_config_text(const ExperimentSpec& spec) {
  std::string out;
  const json j = to_json(spec);
  for (const auto& [k, v] : j.items()) {
    out += k + " = " + v.dump() + "\n";
  }
  return out;
}

std::vector<SweepPoint> SweepSpec::expand() const {
  std::size_t total = 1;
  for (const auto& a : axes) {
    if (a.values.empty()) throw ConfigError("sweep axis with no values");
    total *= a.values.size();
    if (total > max_points) {
      throw ConfigError("sweep has more than " + std::to_string(max_points) +
                        " points (sweep.max_points)");
    }
  }
  std::vector<SweepPoint> points;
  points.reserve(total);
  std::vector<std::size_t> digit(axes.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    Config c = base;
    SweepPoint p;
    p.index = n;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& axis = axes[a];
      const json& v = axis.values[digit[a]];
      if (axis.keys.size() == 1) {
        c.set(axis.keys[0], v);
        p.overrides[axis.keys[0]] = v;
      } else {
        if (!v.is_array() || v.size() != axis.keys.size()) {
          throw ConfigError("zipped sweep value " + v.dump() + " needs " +
                            std::to_string(axis.keys.size()) + " entries");
        }
        for (std::size_t k = 0; k < axis.keys.size(); ++k) {
          c.set(axis.keys[k], v[k]);
          p.overrides[axis.keys[k]] = v[k];
        }
      }
    }
    p.spec = experiment_from_config(c);
    points.push_back(std::move(p));
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++digit[a] < axes[a].values.size()) break;
      digit[a] = 0;
    }
  }
  return points;
}

SweepSpec sweep_from_config(const Config& config) {
  SweepSpec s;
  for (const auto& [k, v] : config.values()) {
    if (k.rfind("sweep.", 0) != 0) {
      s.base.set(k, v);
      continue;
    }
    const std::string rest = k.substr(6);
    if (rest == "max_points") {
      if (!v.is_number_integer() || v.get<long>() < 1) {
        throw ConfigError("sweep.max_points must be a positive integer");
      }
      s.max_points = v.get<std::size_t>();
      continue;
    }
    if (!v.is_array()) {
      throw ConfigError("'" + k + "' must be a list of values");
    }
    SweepAxis axis;
    std::size_t start = 0;
    while (true) {
      const auto plus = rest.find('+', start);
      axis.keys.push_back(rest.substr(start, plus - start));
      if (plus == std::string::npos) break;
      start = plus + 1;
    }
    axis.values.assign(v.begin(), v.end());
    s.axes.push_back(std::move(axis));
  }
  // Validate the base and every point up front.
  s.expand();
  return s;
}

}  // namespace aqite
