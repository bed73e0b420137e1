#include "aqite/experiment.hpp"

#include <cmath>

#include "aqite/errors.hpp"

namespace aqite {

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kNaive:
      return "naive";
    case GeneratorKind::kPerTerm:
      return "per_term";
    case GeneratorKind::kGauged:
      return "gauged";
  }
  return "unknown";
}

GeneratorKind parse_generator_kind(const std::string& name) {
  if (name == "naive") return GeneratorKind::kNaive;
  if (name == "per_term") return GeneratorKind::kPerTerm;
  if (name == "gauged") return GeneratorKind::kGauged;
  throw ConfigError("unknown generator variant '" + name +
                    "' (expected naive, per_term or gauged)");
}

void GeneratorVariant::validate() const {
  if (!std::isfinite(u1) || !std::isfinite(u2)) {
    throw ConfigError("gauge constants must be finite");
  }
  if (kind != GeneratorKind::kGauged && (u1 != 0.0 || u2 != 0.0)) {
    throw ConfigError("gauge constants u1, u2 are only allowed for 'gauged'");
  }
}

WidthSchedule::WidthSchedule(std::vector<WidthSegment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw ConfigError("width schedule is empty");
  if (segments_.front().tau_start != 0.0) {
    throw ConfigError("width schedule must start at tau = 0");
  }
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!std::isfinite(s.tau_start)) {
      throw ConfigError("width schedule time is not finite");
    }
    if (s.width != kUnboundedWidth && (s.width < 1 || s.width % 2 == 0)) {
      throw ConfigError("block width must be odd and positive, got " +
                        std::to_string(s.width));
    }
    if (i > 0) {
      const auto& prev = segments_[i - 1];
      if (!(s.tau_start > prev.tau_start)) {
        throw ConfigError("width schedule times must increase strictly");
      }
      // Transitions only enlarge blocks; shrinking would need a projection.
      if (prev.width == kUnboundedWidth ||
          (s.width != kUnboundedWidth && s.width < prev.width)) {
        throw ConfigError("width schedule must be non-decreasing");
      }
    }
  }
}

int WidthSchedule::width_at(double tau) const {
  int w = segments_.front().width;
  for (const auto& s : segments_) {
    if (tau >= s.tau_start - 1e-9) w = s.width;
  }
  return w;
}

bool WidthSchedule::bounded() const {
  for (const auto& s : segments_) {
    if (s.width != kUnboundedWidth) return true;
  }
  return false;
}

void WidthSchedule::validate(int length) const {
  for (const auto& s : segments_) {
    if (s.width != kUnboundedWidth && s.width > length) {
      throw ConfigError("block width " + std::to_string(s.width) +
                        " exceeds chain length " + std::to_string(length));
    }
  }
}

std::string to_string(Retention r) {
  return r == Retention::kContainment ? "containment" : "overlap";
}

Retention parse_retention(const std::string& name) {
  if (name == "containment") return Retention::kContainment;
  if (name == "overlap") return Retention::kOverlap;
  throw ConfigError("unknown retention rule '" + name +
                    "' (expected containment or overlap)");
}

long ExperimentSpec::n_steps() const {
  return std::lround(tau_max / epsilon);
}

void ExperimentSpec::validate() const {
  if (model.length < 2 || model.length > kMaxQubits) {
    throw ConfigError("model.L must be in [2, 64], got " +
                      std::to_string(model.length));
  }
  if (!std::isfinite(model.lambda_z)) {
    throw ConfigError("model.lambda_z must be finite");
  }
  variant.validate();
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("integrator.epsilon must be positive");
  }
  if (!(tau_max >= epsilon) || !std::isfinite(tau_max)) {
    throw ConfigError("integrator.tau_max must be at least epsilon");
  }
  if (sampling_stride < 1) throw ConfigError("sampling.stride must be >= 1");
  schedule.validate(model.length);
  if (variant.kind == GeneratorKind::kNaive && schedule.bounded()) {
    throw ConfigError("the naive generator has no blocks; use an unbounded "
                      "truncation schedule");
  }
  if (!(tolerances.prune >= 0.0) || !(tolerances.commute >= 0.0) ||
      !(tolerances.hermiticity_warn >= 0.0) ||
      !(tolerances.hermiticity_fail >= tolerances.hermiticity_warn)) {
    throw ConfigError("tolerances must be non-negative with warn <= fail");
  }
  if (dense_cap < 1 || dense_cap > 16) {
    throw ConfigError("dense.cap must be in [1, 16]");
  }
  if (model.length > dense_cap) {
    throw ResourceError("model.L = " + std::to_string(model.length) +
                        " exceeds the dense cap " + std::to_string(dense_cap));
  }
  if (output_dir.empty()) throw ConfigError("output.dir is empty");
}

}  // namespace aqite
