#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "aqite/experiment.hpp"
#include "json.hpp"

namespace aqite {

/// Flat `key = value` configuration. Values are JSON literals; anything that
/// does not parse as JSON is taken as a bare string. `#` starts a comment.
class Config {
 public:
  Config() = default;
  static Config parse(std::string_view text,
                      const std::string& origin = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const nlohmann::json& at(const std::string& key) const;
  void set(const std::string& key, nlohmann::json value);
  const std::map<std::string, nlohmann::json>& values() const {
    return values_;
  }
  std::string origin() const { return origin_; }

 private:
  std::string origin_ = "<config>";
  std::map<std::string, nlohmann::json> values_;
};

/// Builds and validates a spec from the `model.`, `generator.`,
/// `integrator.`, `truncation.`, `sampling.`, `tolerances.`, `limits.`,
/// `dense.` and `output.` keys. Unknown keys are rejected; `sweep.` keys are
/// ignored here.
ExperimentSpec experiment_from_config(const Config& config);

/// Canonical config text for a spec (round-trips through
/// experiment_from_config).
std::string to_config_text(const ExperimentSpec& spec);
nlohmann::json to_json(const ExperimentSpec& spec);

/// One sweep axis. A key of the form `a+b` zips several parameters; each
/// value is then an array with one entry per parameter.
struct SweepAxis {
  std::vector<std::string> keys;
  std::vector<nlohmann::json> values;
};

struct SweepPoint {
  std::size_t index = 0;
  std::map<std::string, nlohmann::json> overrides;
  ExperimentSpec spec;
};

struct SweepSpec {
  Config base;
  std::vector<SweepAxis> axes;  // ordered by key
  std::size_t max_points = 256;

  /// Cartesian product of the axes, last axis fastest. Throws ConfigError
  /// when the product exceeds max_points or a point is invalid.
  std::vector<SweepPoint> expand() const;
};

/// `sweep.<key> = [v1, v2, ...]` entries become axes; `sweep.max_points`
/// sets the cap.
SweepSpec sweep_from_config(const Config& config);

}  // namespace aqite
