#include "aqite/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "aqite/errors.hpp"

namespace aqite {

using nlohmann::json;
namespace fs = std::filesystem;

RunResult run_experiment(const ExperimentSpec& spec,
                         const RecordObserver& observer) {
  spec.validate();
  const ReferenceStates refs(spec.model);
  const bool bounded = spec.schedule.bounded();
  RunResult out;
  long frozen = 0, half = 0, full = 0;
  double herm = 0.0;
  evolve(spec, [&](const Propagator& p) {
    const BlockOperator total = p.total();
    out.extras.max_parity_violation =
        std::max(out.extras.max_parity_violation, total.max_parity_violation());
    const int width = p.max_support_width();
    if (bounded && p.active_width() != kUnboundedWidth &&
        width > p.active_width()) {
      out.extras.locality_ok = false;
      out.extras.max_locality_excess = std::max(
          out.extras.max_locality_excess, width - p.active_width());
    }
    TrajectoryRecord r = snapshot_record(total, p.tau(), refs, width);
    out.records.push_back(r);
    frozen = p.frozen_substeps();
    half = p.half_substeps();
    full = p.full_substeps();
    herm = p.max_hermiticity_residual();
    if (observer) observer(p, r);
  });
  out.extras.frozen_substeps = frozen;
  out.extras.half_substeps = half;
  out.extras.full_substeps = full;
  out.extras.max_hermiticity_residual = herm;
  if (out.records.size() >= 3) out.summary = detect_tau_c(out.records);
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ResourceError("cannot write " + path.string());
  f << text;
  if (!f) throw ResourceError("write failed for " + path.string());
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw SchemaError(where + ": not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

std::string records_csv(std::span<const TrajectoryRecord> records) {
  std::string out = std::string(kRecordColumns) + "\n";
  for (const auto& r : records) {
    out += fmt(r.tau) + "," + fmt(r.i_tau) + "," + fmt(r.i_inf) + "," +
           fmt(r.gap) + "," + fmt(r.gap_sector) + "," + fmt(r.norm) + "," +
           fmt(r.e0_residual) + "," + std::to_string(r.term_count) + "," +
           std::to_string(r.max_support_width) + "\n";
  }
  return out;
}

std::vector<TrajectoryRecord> parse_records_csv(const std::string& text,
                                                const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(origin + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const auto& name : split(kRecordColumns, ',')) {
    if (col.count(name) == 0) {
      throw SchemaError(origin + ": missing column '" + name + "'");
    }
  }
  std::vector<TrajectoryRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (cells.size() != header.size()) {
      throw SchemaError(where + ": expected " + std::to_string(header.size()) +
                        " fields");
    }
    auto get = [&](const char* name) {
      return parse_double(cells[col.at(name)], where);
    };
    TrajectoryRecord r;
    r.tau = get("tau");
    r.i_tau = get("i_tau");
    r.i_inf = get("i_inf");
    r.gap = get("gap");
    r.gap_sector = get("gap_sector");
    r.norm = get("norm");
    r.e0_residual = get("e0_residual");
    r.term_count = static_cast<long>(get("term_count"));
    r.max_support_width = static_cast<int>(get("max_support_width"));
    out.push_back(r);
  }
  if (out.empty()) throw SchemaError(origin + ": no records");
  return out;
}

std::vector<TrajectoryRecord> read_records_csv(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SchemaError("cannot read records file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_records_csv(ss.str(), path.string());
}

json summary_json(const ExperimentSpec& spec, const RunResult& result) {
  const auto& s = result.summary;
  const auto& x = result.extras;
  json j;
  j["spec"] = to_json(spec);
  j["n_records"] = result.records.size();
  j["final_tau"] = result.records.empty() ? 0.0 : result.records.back().tau;
  j["tau_c"] = s.tau_c;
  j["min_i_inf"] = s.min_i_inf;
  j["tau_max_i_tau"] = s.tau_max_i_tau;
  j["max_i_tau"] = s.max_i_tau;
  j["adiabatic_cost"] = finite_or_null(s.adiabatic_cost);
  j["cost_infinite"] = s.cost_infinite;
  j["no_turnover"] = s.no_turnover;
  j["ordering_ok"] = s.ordering_ok;
  j["max_parity_violation"] = x.max_parity_violation;
  j["max_hermiticity_residual"] = x.max_hermiticity_residual;
  j["locality_ok"] = x.locality_ok;
  j["max_locality_excess"] = x.max_locality_excess;
  j["substeps"] = {{"frozen", x.frozen_substeps},
                   {"half", x.half_substeps},
                   {"full", x.full_substeps}};
  return j;
}

fs::path resolve_output_dir(const std::string& dir) {
  const fs::path p(dir);
  const char* root = std::getenv("AQITE_OUTPUT_ROOT");
  if (root != nullptr && *root != '\0' && p.is_relative()) {
    return fs::path(root) / p;
  }
  return p;
}

json error_json(const std::exception& e) {
  const auto* ae = dynamic_cast<const Error*>(&e);
  return {{"status", "error"},
          {"error", ae != nullptr ? ae->kind() : "internal_error"},
          {"message", e.what()},
          {"exit_code", exit_code_for(e)}};
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return kExitConfig;
  if (dynamic_cast<const SchemaError*>(&e) != nullptr) return kExitConfig;
  if (dynamic_cast<const IntegrationDiverged*>(&e) != nullptr) {
    return kExitDiverged;
  }
  if (dynamic_cast<const ResourceError*>(&e) != nullptr) return kExitResource;
  return kExitFailure;
}

RunResult run_to_directory(const ExperimentSpec& spec, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ResourceError("cannot create " + dir.string() + ": " + ec.message());
  fs::remove(dir / "error.json", ec);
  write_file(dir / "config.txt", to_config_text(spec));

  json meta;
  meta["started_at"] = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  auto finish = [&](const char* status) {
    meta["finished_at"] = utc_now();
    meta["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    meta["status"] = status;
    write_file(dir / "metadata.json", meta.dump(2) + "\n");
  };

  RecordObserver dump;
  if (spec.dump_snapshots) {
    fs::create_directories(dir / "snapshots", ec);
    if (ec) throw ResourceError("cannot create snapshots directory");
    dump = [&](const Propagator& p, const TrajectoryRecord&) {
      char name[40];
      std::snprintf(name, sizeof name, "step_%06ld.txt", p.step_index());
      write_file(dir / "snapshots" / name, to_text(p.total().to_pauli_sum()));
    };
  }
  try {
    RunResult result = run_experiment(spec, dump);
    write_file(dir / "records.csv", records_csv(result.records));
    write_file(dir / "summary.json", summary_json(spec, result).dump(2) + "\n");
    finish("ok");
    return result;
  } catch (const std::exception& e) {
    write_file(dir / "error.json", error_json(e).dump(2) + "\n");
    finish("error");
    throw;
  }
}

SweepOutcome run_sweep(const SweepSpec& sweep, int jobs, const fs::path& root) {
  if (jobs < 1) throw ConfigError("--jobs must be at least 1");
  std::vector<SweepPoint> points = sweep.expand();
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw ResourceError("cannot create " + root.string());

  std::vector<json> entries(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      char name[32];
      std::snprintf(name, sizeof name, "point_%04zu", points[i].index);
      json entry = {{"index", points[i].index},
                    {"overrides", points[i].overrides},
                    {"dir", name}};
      ExperimentSpec spec = points[i].spec;
      spec.output_dir = (root / name).string();
      try {
        const RunResult r = run_to_directory(spec, root / name);
        entry["status"] = "ok";
        entry["records"] = std::string(name) + "/records.csv";
        entry["summary"] = std::string(name) + "/summary.json";
        entry["tau_c"] = r.summary.tau_c;
        entry["min_i_inf"] = r.summary.min_i_inf;
      } catch (const std::exception& e) {
        entry["status"] = "error";
        entry["error"] = error_json(e);
      }
      entries[i] = std::move(entry);
    }
  };
  const int n_threads =
      static_cast<int>(std::min<std::size_t>(jobs, std::max<std::size_t>(points.size(), 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SweepOutcome out;
  std::size_t failed = 0;
  for (const auto& e : entries) failed += e["status"] != "ok";
  out.all_ok = failed == 0;
  std::vector<json> axes;
  for (const auto& a : sweep.axes) {
    axes.push_back({{"keys", a.keys}, {"values", a.values}});
  }
  out.index = {{"n_points", points.size()},
               {"n_failed", failed},
               {"axes", axes},
               {"points", entries}};
  write_file(root / "index.json", out.index.dump(2) + "\n");
  return out;
}

}  // namespace aqite
