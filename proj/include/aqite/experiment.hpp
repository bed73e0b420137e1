#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aqite/model.hpp"

namespace aqite {

enum class GeneratorKind { kNaive, kPerTerm, kGauged };

std::string to_string(GeneratorKind kind);
/// Accepts "naive", "per_term", "gauged"; throws ConfigError otherwise.
GeneratorKind parse_generator_kind(const std::string& name);

struct GeneratorVariant {
  GeneratorKind kind = GeneratorKind::kNaive;
  double u1 = 0.0;
  double u2 = 0.0;

  static GeneratorVariant naive() { return {GeneratorKind::kNaive, 0.0, 0.0}; }
  static GeneratorVariant per_term() {
    return {GeneratorKind::kPerTerm, 0.0, 0.0};
  }
  static GeneratorVariant gauged(double u1, double u2) {
    return {GeneratorKind::kGauged, u1, u2};
  }
  /// Throws ConfigError on non-finite gauge constants or nonzero constants
  /// for an ungauged kind.
  void validate() const;
};

/// Width value meaning "no truncation".
inline constexpr int kUnboundedWidth = 0;

struct WidthSegment {
  double tau_start = 0.0;
  int width = kUnboundedWidth;
};

/// Piecewise-constant block width in imaginary time.
class WidthSchedule {
 public:
  WidthSchedule() : segments_{{0.0, kUnboundedWidth}} {}
  explicit WidthSchedule(std::vector<WidthSegment> segments);

  static WidthSchedule unbounded() { return {}; }
  static WidthSchedule constant(int width) {
    return WidthSchedule({{0.0, width}});
  }

  const std::vector<WidthSegment>& segments() const { return segments_; }
  /// Width active for a step starting at `tau`. A segment becomes active
  /// once tau >= tau_start - 1e-9 so grid times hit transitions exactly.
  int width_at(double tau) const;
  bool bounded() const;
  /// Checks widths against the chain length; throws ConfigError.
  void validate(int length) const;

 private:
  std::vector<WidthSegment> segments_;
};

/// Which interactions a term sees inside its neighborhood block.
enum class Retention { kContainment, kOverlap };

std::string to_string(Retention r);
Retention parse_retention(const std::string& name);

struct Tolerances {
  double prune = 1e-12;
  double commute = 1e-12;
  double hermiticity_warn = 1e-10;  // relative to max |coefficient|
  double hermiticity_fail = 1e-6;
};

struct ExperimentSpec {
  ModelSpec model;
  GeneratorVariant variant;
  double epsilon = 0.05;
  double tau_max = 3.0;
  int sampling_stride = 1;
  WidthSchedule schedule;
  Retention retention = Retention::kContainment;
  Tolerances tolerances;
  /// Hard cap on nonzero strings per term; 0 leaves only the algebraic
  /// bound 4^min(w, L).
  std::uint64_t max_terms = 0;
  int dense_cap = 12;
  bool dump_snapshots = false;
  std::string output_dir = "out";

  /// Number of integration steps, round(tau_max / epsilon).
  long n_steps() const;
  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

}  // namespace aqite
