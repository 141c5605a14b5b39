#include <doctest.h>

#include <filesystem>
#include <json.hpp>
#include <set>
#include <sstream>

#include "covidprep/ingest.hpp"
#include "covidprep/pipeline.hpp"

using namespace covidprep;
using namespace covidprep::pipeline;
namespace fs = std::filesystem;

namespace {

const std::string kFixture = COVIDPREP_TEST_DATA "/owid_india_fixture.csv";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("covidprep_test_pipeline_" + name);
  fs::remove_all(p);
  return p;
}

PipelineConfig fixture_config(const fs::path& out) {
  PipelineConfig c;
  c.input = kFixture;
  c.out = out.string();
  return c;
}

// Both pipelines are slow enough that the fixture runs are shared.
struct FixtureRuns {
  PipelineConfig config;
  PipelineRun standard;
  PipelineRun custom;
};

const FixtureRuns& fixture_runs() {
  static const FixtureRuns runs = [] {
    FixtureRuns r;
    r.config = fixture_config(scratch("fixture"));
    r.standard = run_standard(r.config);
    r.custom = run_custom(r.config);
    return r;
  }();
  return runs;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  } catch (const StageError& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("config parsing") {
  const PipelineConfig c = config_from_json(R"({"location": "LKA", "seed": 7, "split": [0.6, 0.2, 0.2],
      "models": ["OLS", "KNN"], "grids": {"KNN": [{"k": 3}, {"k": 9}]}, "custom_replacement": "interpolation",
      "start_date": "2021-01-01"})");
  CHECK(c.location == "LKA");
  CHECK(c.seed == 7);
  CHECK(c.split.train == 0.6);
  CHECK(c.models.size() == 2);
  CHECK(c.grids.at(model::ModelKind::KNN).size() == 2);
  CHECK(c.custom_replacement == outlier::Replacement::Interpolation);
  CHECK(c.start_date == parse_date("2021-01-01"));
  CHECK(c.target == "new_deaths");
  CHECK(c.vif_th == 10.0);
  c.validate();

  PipelineConfig base;
  base.target = "new_cases";
  CHECK(config_from_json("{}", base).target == "new_cases");

  CHECK(code_of([] { config_from_json(R"({"thresh": 1})"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { config_from_json("[1]"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { config_from_json("{"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { config_from_json(R"({"seed": "x"})"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { config_from_json(R"({"start_date": "2021-13-01"})"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { config_from_json(R"({"split": [0.5, 0.5]})"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { config_from_json(R"({"custom_replacement": "drop"})"); }) == ErrorCode::InvalidConfig);

  auto invalid = [](auto mutate) {
    PipelineConfig c;
    mutate(c);
    return code_of([&] { c.validate(); });
  };
  CHECK(invalid([](PipelineConfig& c) { c.pipeline = "fast"; }) == ErrorCode::InvalidConfig);
  CHECK(invalid([](PipelineConfig& c) { c.z_th = 0; }) == ErrorCode::InvalidConfig);
  CHECK(invalid([](PipelineConfig& c) { c.split = {0.5, 0.5, 0.5}; }) == ErrorCode::InvalidConfig);
  CHECK(invalid([](PipelineConfig& c) { c.end_date = parse_date("2019-01-01"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("candidate features drop the target and its per-capita copies") {
  const SeriesFrame frame = load_frame(fixture_config(scratch("unused")));
  PipelineConfig c;
  const auto graph = derive::build_default_graph();
  const auto names = candidate_features(frame, c, graph);
  const std::set<std::string> set(names.begin(), names.end());
  CHECK_FALSE(set.count("new_deaths"));
  CHECK_FALSE(set.count("new_deaths_per_million"));
  CHECK(set.count("new_deaths_smoothed"));
  CHECK(names.size() == frame.column_names().size() - 2);
  c.drop_target_rescalings = false;
  CHECK(candidate_features(frame, c, graph).size() == frame.column_names().size() - 1);
}

TEST_CASE("standard preprocessing leaves no gaps") {
  PipelineConfig c = fixture_config(scratch("unused"));
  const SeriesFrame raw = load_frame(c);
  std::vector<outlier::OutlierReport> reports;
  const SeriesFrame p = preprocess_standard(raw, c, &reports);
  CHECK(reports.size() == raw.column_names().size());
  for (const auto& name : p.column_names()) {
    const Series& s = p.at(name);
    CHECK_MESSAGE(std::none_of(s.begin(), s.end(), is_missing), name);
  }
}

TEST_CASE("custom preprocessing keeps derived columns consistent") {
  PipelineConfig c = fixture_config(scratch("unused"));
  const SeriesFrame raw = load_frame(c);
  const SeriesFrame p = preprocess_custom(raw, c, derive::build_default_graph());
  const Series total = derive::compute_total_from_new(p.at("new_deaths"));
  const Series& got = p.at("total_deaths");
  REQUIRE(got.size() == total.size());
  for (std::size_t i = 0; i < got.size(); ++i) REQUIRE(got[i] == total[i]);
  for (const auto& name : p.column_names()) {
    const Series& s = p.at(name);
    CHECK_MESSAGE(std::none_of(s.begin(), s.end(), is_missing), name);
  }
}

TEST_CASE("fixture runs") {
  const FixtureRuns& runs = fixture_runs();
  for (const PipelineRun* run : {&runs.standard, &runs.custom}) {
    const auto& results = run->result.report.results;
    CHECK(results.size() == 9);
    std::set<model::ModelKind> kinds;
    for (const auto& r : results) kinds.insert(r.kind);
    CHECK(kinds.size() == 9);
    const fs::path dir = run->directory;
    for (const char* file : {"report.csv", "report.json", "selection_trace.json", "processed.csv"})
      CHECK_MESSAGE(fs::exists(dir / file), file);
    CHECK(fs::exists(dir / "outliers"));
    const std::string csv = read_file((dir / "report.csv").string());
    CHECK(csv.find(run->pipeline + ",SVR,not implemented") != std::string::npos);
    CHECK(run->result.selection.trace.iterations.back().max_vif <= runs.config.vif_th);
  }
  const auto& std_results = runs.standard.result.report.results;
  const auto tree = std::find_if(std_results.begin(), std_results.end(),
                                 [](const eval::ModelResult& r) { return r.kind == model::ModelKind::DecisionTree; });
  REQUIRE(tree != std_results.end());
  CHECK(std::isfinite(tree->test.rmse));
  CHECK(fs::exists(fs::path(runs.custom.directory) / "graph.json"));

  const auto trace = nlohmann::json::parse(read_file((fs::path(runs.custom.directory) / "selection_trace.json").string()));
  CHECK(trace["scope"] == "train-only");
}

TEST_CASE("comparison") {
  const FixtureRuns& runs = fixture_runs();
  const Comparison c = compare(runs.config);
  CHECK(c.csv.rfind("Pipeline,Model,Test RMSE,Test R²,RMSE Variance\n", 0) == 0);
  CHECK(c.markdown.find("## Best model per pipeline") != std::string::npos);
  CHECK(c.markdown.find("## Selected features") != std::string::npos);
  CHECK(fs::exists(fs::path(runs.config.out) / "compare.md"));

  const std::string report = read_file((fs::path(runs.custom.directory) / "report.json").string());
  const std::string trace = read_file((fs::path(runs.custom.directory) / "selection_trace.json").string());
  const Comparison same = compare_documents(report, trace, report, trace);
  std::size_t rows = 0;
  std::istringstream md(same.markdown);
  for (std::string line; std::getline(md, line);) {
    if (line.rfind("| ", 0) != 0 || line.find("Test RMSE") != std::string::npos) continue;
    if (line.find("Regressor") == std::string::npos && line.find("Regression") == std::string::npos &&
        line.find("Ridge") == std::string::npos && line.find("Lasso") == std::string::npos &&
        line.find("ElasticNet") == std::string::npos)
      continue;
    if (line.find("custom | ") == 2) continue;  // feature table rows
    ++rows;
    CHECK_MESSAGE(line.find("| 1.000 | ") != std::string::npos, line);
  }
  CHECK(rows == 9);

  PipelineConfig missing;
  missing.out = scratch("missing").string();
  CHECK(code_of([&] { compare(missing); }) == ErrorCode::MissingRun);
  CHECK(code_of([&] { compare_documents("{", trace, report, trace); }) == ErrorCode::MissingRun);
}

TEST_CASE("stage-tagged failures") {
  PipelineConfig c = fixture_config(scratch("empty"));
  c.start_date = parse_date("2030-01-01");
  c.end_date = parse_date("2030-02-01");
  try {
    run_standard(c);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "ingest");
    CHECK(e.code() == ErrorCode::EmptyRange);
  }

  c = fixture_config(scratch("target"));
  c.target = "no_such_column";
  try {
    run_custom(c);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "ingest");
    CHECK(e.code() == ErrorCode::MissingInput);
  }
}
