#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "aqite/config.hpp"
#include "aqite/errors.hpp"
#include "aqite/plot.hpp"
#include "aqite/runner.hpp"

using namespace aqite;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("aqite_test_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" + AQITE_BINARY + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

constexpr const char* kSmall =
    "model.L = 4\n"
    "generator.variant = per_term\n"
    "integrator.epsilon = 0.1\n"
    "integrator.tau_max = 0.5\n";

}  // namespace

TEST(Config, ParsesValuesAndComments) {
  const Config c = Config::parse(
      "# header\n"
      "model.L = 6   # trailing\n"
      "generator.variant = per_term\n"
      "output.dir = \"a # not a comment\"\n"
      "truncation.schedule = [[0, 3], [0.5, \"unbounded\"]]\n");
  EXPECT_EQ(c.at("model.L"), 6);
  EXPECT_EQ(c.at("generator.variant"), "per_term");
  EXPECT_EQ(c.at("output.dir"), "a # not a comment");
  EXPECT_TRUE(c.at("truncation.schedule").is_array());
  EXPECT_THROW(Config::parse("model.L = 4\nmodel.L = 5\n"), ConfigError);
  EXPECT_THROW(Config::parse("no equals sign\n"), ConfigError);
  EXPECT_THROW(Config::parse(" = 3\n"), ConfigError);
}

TEST(Config, BuildsAndValidatesSpecs) {
  const ExperimentSpec s = experiment_from_config(Config::parse(
      "model.L = 6\ngenerator.variant = gauged\ngenerator.u1 = 2\ngenerator.u2 = 0.5\n"
      "truncation.w = 5\nintegrator.epsilon = 0.025\n"));
  EXPECT_EQ(s.model.length, 6);
  EXPECT_EQ(s.variant.kind, GeneratorKind::kGauged);
  EXPECT_EQ(s.schedule.width_at(1.0), 5);
  EXPECT_EQ(s.epsilon, 0.025);

  EXPECT_THROW(experiment_from_config(Config::parse("model.L = 6\nmodel.colour = 2\n")),
               ConfigError);
  EXPECT_THROW(experiment_from_config(Config::parse("generator.variant = bogus\n")),
               ConfigError);
  EXPECT_THROW(experiment_from_config(Config::parse("model.L = \"six\"\n")), ConfigError);
  EXPECT_THROW(experiment_from_config(Config::parse(
                   "generator.variant = per_term\ntruncation.w = 3\n"
                   "truncation.schedule = [[0, 3]]\n")),
               ConfigError);
  EXPECT_THROW(experiment_from_config(Config::parse("model.L = 20\n")), ResourceError);
}

TEST(Config, RoundTrip) {
  ExperimentSpec s;
  s.model.length = 6;
  s.model.lambda_z = 1.5;
  s.variant = GeneratorVariant::gauged(0.5, 2.0);
  s.schedule = WidthSchedule({{0.0, 3}, {0.6, 5}, {1.2, kUnboundedWidth}});
  s.epsilon = 0.04;
  s.tau_max = 1.2;
  s.sampling_stride = 3;
  const ExperimentSpec back = experiment_from_config(Config::parse(to_config_text(s)));
  EXPECT_EQ(to_json(back), to_json(s));
}

TEST(Sweep, ExpandsCartesianLastAxisFastest) {
  const SweepSpec sw = sweep_from_config(Config::parse(
      "generator.variant = per_term\ntruncation.w = 3\n"
      "sweep.model.L = [4, 6]\nsweep.integrator.epsilon = [0.1, 0.05, 0.025]\n"));
  const auto pts = sw.expand();
  // Axes are ordered by key: epsilon outer, L fastest.
  ASSERT_EQ(pts.size(), 6u);
  EXPECT_EQ(pts[0].spec.model.length, 4);
  EXPECT_EQ(pts[1].spec.model.length, 6);
  EXPECT_EQ(pts[1].spec.epsilon, 0.1);
  EXPECT_EQ(pts[2].spec.epsilon, 0.05);
  EXPECT_EQ(pts[5].spec.epsilon, 0.025);
  EXPECT_EQ(pts[4].index, 4u);
}

TEST(Sweep, ZippedAxesAndLimits) {
  const SweepSpec sw = sweep_from_config(Config::parse(
      "model.L = 4\n"
      "sweep.generator.variant+generator.u1+generator.u2 = "
      "[[\"per_term\", 0, 0], [\"gauged\", 2, 0.5]]\n"));
  const auto pts = sw.expand();
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[1].spec.variant.kind, GeneratorKind::kGauged);
  EXPECT_EQ(pts[1].spec.variant.u1, 2.0);

  EXPECT_EQ(sweep_from_config(Config::parse("model.L = 4\n")).expand().size(), 1u);
  EXPECT_THROW(sweep_from_config(Config::parse(
                   "sweep.max_points = 2\nsweep.integrator.epsilon = [0.1, 0.05, 0.025]\n")),
               ConfigError);
  EXPECT_THROW(sweep_from_config(Config::parse("sweep.model.L = 4\n")), ConfigError);
  EXPECT_THROW(sweep_from_config(Config::parse("sweep.model.L = [4, 40]\n")), Error);
}

TEST(RecordsCsv, RoundTripAndSchema) {
  std::vector<TrajectoryRecord> rs(3);
  for (int k = 0; k < 3; ++k) {
    rs[k].tau = 0.1 * k;
    rs[k].i_inf = 1.0 / 3.0 + k;
    rs[k].gap = 1e-17 * (k + 1);
    rs[k].term_count = 100 + k;
    rs[k].max_support_width = k;
  }
  const std::string csv = records_csv(rs);
  const auto back = parse_records_csv(csv, "mem");
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(records_csv(back), csv);
  EXPECT_EQ(back[2].i_inf, rs[2].i_inf);

  EXPECT_THROW(parse_records_csv("", "mem"), SchemaError);
  EXPECT_THROW(parse_records_csv(std::string(kRecordColumns) + "\n", "mem"), SchemaError);
  EXPECT_THROW(parse_records_csv("tau,i_inf\n0,1\n", "mem"), SchemaError);
  EXPECT_THROW(parse_records_csv(std::string(kRecordColumns) + "\n0,1,x\n", "mem"),
               SchemaError);
}

TEST(Runner, SummaryAndExtras) {
  ExperimentSpec s = experiment_from_config(Config::parse(kSmall));
  int calls = 0;
  const RunResult r = run_experiment(s, [&](const Propagator&, const TrajectoryRecord&) {
    ++calls;
  });
  EXPECT_EQ(calls, 6);
  ASSERT_EQ(r.records.size(), 6u);
  EXPECT_EQ(r.records.front().tau, 0.0);
  EXPECT_TRUE(r.extras.locality_ok);
  EXPECT_LT(r.extras.max_parity_violation, 1e-12);
  const auto j = summary_json(s, r);
  EXPECT_EQ(j.dump(), summary_json(s, r).dump());
  EXPECT_TRUE(j.contains("tau_c"));
}

TEST(Runner, ErrorPayload) {
  const ConfigError e("bad key");
  const auto j = error_json(e);
  EXPECT_EQ(j.at("exit_code"), 2);
  EXPECT_EQ(exit_code_for(IntegrationDiverged("x")), 3);
  EXPECT_EQ(exit_code_for(ResourceError("x")), 4);
  EXPECT_EQ(exit_code_for(SchemaError("x")), 2);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), 1);
}

TEST(Cli, RunWritesArtifacts) {
  TempDir tmp;
  write(tmp.path() / "a.conf", kSmall);
  ASSERT_EQ(run_cli("run " + (tmp.path() / "a.conf").string() + " -o " +
                    (tmp.path() / "out").string()),
            0);
  for (const char* f : {"records.csv", "summary.json", "metadata.json", "config.txt"}) {
    EXPECT_TRUE(fs::exists(tmp.path() / "out" / f)) << f;
  }
  EXPECT_EQ(read_records_csv(tmp.path() / "out" / "records.csv").size(), 6u);

  // Same config, second directory: identical records.
  ASSERT_EQ(run_cli("run " + (tmp.path() / "a.conf").string() + " -o " +
                    (tmp.path() / "again").string()),
            0);
  EXPECT_EQ(slurp(tmp.path() / "out" / "records.csv"),
            slurp(tmp.path() / "again" / "records.csv"));
  EXPECT_EQ(slurp(tmp.path() / "out" / "summary.json"),
            slurp(tmp.path() / "again" / "summary.json"));
}

TEST(Cli, ExitCodes) {
  TempDir tmp;
  write(tmp.path() / "bad.conf", "model.L = 4\nmodel.nope = 1\n");
  EXPECT_EQ(run_cli("run " + (tmp.path() / "bad.conf").string() + " -o " +
                    (tmp.path() / "bad").string()),
            2);
  EXPECT_EQ(run_cli("run " + (tmp.path() / "missing.conf").string()), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);

  write(tmp.path() / "cap.conf", std::string(kSmall) + "limits.max_terms = 10\n");
  EXPECT_EQ(run_cli("run " + (tmp.path() / "cap.conf").string() + " -o " +
                    (tmp.path() / "cap").string()),
            4);
  EXPECT_TRUE(fs::exists(tmp.path() / "cap" / "error.json"));

  write(tmp.path() / "blowup.conf",
        "model.L = 4\nmodel.lambda_z = 1e200\ngenerator.variant = naive\n"
        "integrator.epsilon = 0.1\nintegrator.tau_max = 1\n");
  EXPECT_EQ(run_cli("run " + (tmp.path() / "blowup.conf").string() + " -o " +
                    (tmp.path() / "blowup").string()),
            3);
}

TEST(Cli, OutputRootOverride) {
  TempDir tmp;
  write(tmp.path() / "a.conf", std::string(kSmall) + "output.dir = rel/run\n");
  ASSERT_EQ(run_cli("run " + (tmp.path() / "a.conf").string(),
                    "AQITE_OUTPUT_ROOT=" + tmp.path().string()),
            0);
  EXPECT_TRUE(fs::exists(tmp.path() / "rel" / "run" / "records.csv"));
}

TEST(Cli, SweepIsIndependentOfJobs) {
  TempDir tmp;
  write(tmp.path() / "s.sweep",
        "model.L = 4\ngenerator.variant = per_term\nintegrator.tau_max = 0.5\n"
        "sweep.integrator.epsilon = [0.1, 0.05]\nsweep.truncation.w = [1, 3]\n");
  const std::string f = (tmp.path() / "s.sweep").string();
  ASSERT_EQ(run_cli("sweep " + f + " -j 1 -o " + (tmp.path() / "j1").string()), 0);
  ASSERT_EQ(run_cli("sweep " + f + " -j 4 -o " + (tmp.path() / "j4").string()), 0);
  for (int i = 0; i < 4; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "point_%04d", i);
    EXPECT_EQ(slurp(tmp.path() / "j1" / name / "records.csv"),
              slurp(tmp.path() / "j4" / name / "records.csv"))
        << name;
  }
  const auto index = nlohmann::json::parse(slurp(tmp.path() / "j1" / "index.json"));
  EXPECT_EQ(index.at("n_points"), 4);
  EXPECT_EQ(index.at("n_failed"), 0);

  ASSERT_EQ(run_cli("plot " + (tmp.path() / "j1" / "index.json").string() + " -f 3 -o " +
                    (tmp.path() / "fig").string()),
            0);
  const std::string svg = slurp(tmp.path() / "fig" / "figure3.svg");
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Plot, RejectsEmptyInput) {
  EXPECT_THROW(render_figure(1, {}), SchemaError);
  TempDir tmp;
  write(tmp.path() / "empty.csv", std::string(kRecordColumns) + "\n");
  EXPECT_EQ(run_cli("plot " + (tmp.path() / "empty.csv").string() + " -f 1 -o " +
                    tmp.path().string()),
            2);
}

TEST(Plot, FigureFourMarkers) {
  std::vector<TrajectoryRecord> rs(4);
  for (int k = 0; k < 4; ++k) {
    rs[k].tau = 0.5 * k;
    rs[k].i_inf = std::exp(-k);
  }
  const std::vector<PlotSeries> series = {{"w=3", rs}};
  const std::vector<double> markers = {0.6};
  const std::string svg = render_figure(4, series, markers);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  EXPECT_THROW(render_figure(6, series), Error);
}

TEST(Configs, ShippedFilesParse) {
  const fs::path dir = fs::path(AQITE_SOURCE_DIR) / "configs";
  int n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    const Config c = Config::load(e.path());
    if (e.path().extension() == ".sweep") {
      EXPECT_NO_THROW(sweep_from_config(c).expand()) << e.path();
    } else {
      EXPECT_NO_THROW(experiment_from_config(c)) << e.path();
    }
    ++n;
  }
  EXPECT_GE(n, 6);
}
