#include "covidprep/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <json.hpp>
#include <set>
#include <sstream>

#include "covidprep/impute.hpp"
#include "covidprep/ingest.hpp"

namespace covidprep::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::json;

void PipelineConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); };
  if (pipeline != "standard" && pipeline != "custom" && pipeline != "both") {
    fail("pipeline must be standard, custom or both");
  }
  if (!(corr_th > 0.0) || !(vif_th > 0.0) || !(z_th > 0.0)) fail("thresholds must be positive");
  if (window < 3) fail("window must be at least 3");
  if (start_date > end_date) fail("start_date is after end_date");
  if (target.empty()) fail("target must be set");
  if (models.empty()) fail("at least one model kind is required");
  if (cv_folds < 2) fail("cv_folds must be at least 2");
  split.validate();
}

namespace {

outlier::Replacement replacement_from(const std::string& s) {
  if (s == "Interpolation" || s == "interpolation") return outlier::Replacement::Interpolation;
  if (s == "Winsorize" || s == "winsorize") return outlier::Replacement::Winsorize;
  throw Error(ErrorCode::InvalidConfig, "unknown replacement '" + s + "'");
}

}  // namespace

PipelineConfig config_from_json(std::string_view text, PipelineConfig c) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "input") c.input = v.get<std::string>();
      else if (key == "location") c.location = v.get<std::string>();
      else if (key == "start_date") c.start_date = parse_date(v.get<std::string>());
      else if (key == "end_date") c.end_date = parse_date(v.get<std::string>());
      else if (key == "pipeline") c.pipeline = v.get<std::string>();
      else if (key == "target") c.target = v.get<std::string>();
      else if (key == "corr_th") c.corr_th = v.get<double>();
      else if (key == "vif_th") c.vif_th = v.get<double>();
      else if (key == "z_th") c.z_th = v.get<double>();
      else if (key == "window") c.window = v.get<std::size_t>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "drop_target_rescalings") c.drop_target_rescalings = v.get<bool>();
      else if (key == "graph") c.graph = v.get<std::string>();
      else if (key == "series_columns") c.series_columns = v.get<std::vector<std::string>>();
      else if (key == "pfi_repeats") c.pfi_repeats = v.get<std::size_t>();
      else if (key == "cv_folds") c.cv_folds = v.get<std::size_t>();
      else if (key == "standard_replacement") c.standard_replacement = replacement_from(v.get<std::string>());
      else if (key == "custom_replacement") c.custom_replacement = replacement_from(v.get<std::string>());
      else if (key == "split") {
        const auto s = v.get<std::vector<double>>();
        if (s.size() != 3) throw Error(ErrorCode::InvalidConfig, "split needs three fractions");
        c.split = {s[0], s[1], s[2]};
      } else if (key == "models") {
        c.models.clear();
        for (const auto& name : v) c.models.push_back(model::model_kind_from_string(name.get<std::string>()));
      } else if (key == "grids") {
        for (const auto& [kind_name, points] : v.items()) {
          const model::ModelKind kind = model::model_kind_from_string(kind_name);
          std::vector<model::ModelSpec> grid;
          for (const auto& point : points) {
            model::ModelSpec spec{kind, {}, {}, 0};
            for (const auto& [pname, pv] : point.items()) {
              if (pname == "hidden") spec.hidden = pv.get<std::vector<int>>();
              else spec.params[pname] = pv.get<double>();
            }
            grid.push_back(model::normalized(spec));
          }
          if (grid.empty()) throw Error(ErrorCode::InvalidConfig, "empty grid for " + kind_name);
          c.grids[kind] = std::move(grid);
        }
      } else {
        throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad config value: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedDate) throw Error(ErrorCode::InvalidConfig, e.what());
    throw;
  }
  return c;
}

// ---------------------------------------------------------------------------

namespace {

template <typename F>
auto stage(const std::string& name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e.code(), e.what());
  }
}

void write_artifact(const fs::path& path, std::string_view contents) {
  fs::create_directories(path.parent_path());
  write_file_atomic(path.string(), contents);
}

std::uint64_t stage_seed(const PipelineConfig& config, std::string_view label) {
  return Rng(config.seed).fork(label).seed();
}

void process_outliers(Series& values, const std::string& name, outlier::Method method,
                      outlier::Replacement replacement, const PipelineConfig& config,
                      std::vector<outlier::OutlierReport>* reports) {
  const std::size_t window = method == outlier::Method::Local ? config.window : 0;
  auto flagged = method == outlier::Method::Local ? outlier::rolling_zscore_outliers(values, window, config.z_th)
                                                  : outlier::global_zscore_outliers(values, config.z_th);
  if (!flagged.empty()) {
    values = replacement == outlier::Replacement::Interpolation
                 ? outlier::replace_by_interpolation(std::move(values), flagged)
                 : outlier::winsorize_local(std::move(values), flagged, config.window, config.z_th);
  }
  if (reports) reports->push_back({name, std::move(flagged), method, replacement, window, config.z_th});
}

}  // namespace

SeriesFrame load_frame(const PipelineConfig& config) {
  const auto parsed = ingest::parse_owid_csv(config.input);
  return ingest::filter_location(parsed, config.location, config.start_date, config.end_date);
}

derive::DependencyGraph load_graph(const PipelineConfig& config) {
  if (config.graph.empty()) return derive::build_default_graph();
  return derive::graph_from_json(read_file(config.graph));
}

SeriesFrame preprocess_standard(const SeriesFrame& raw, const PipelineConfig& config,
                                std::vector<outlier::OutlierReport>* reports) {
  SeriesFrame out = raw;
  for (const auto& name : raw.column_names()) {
    Series values = impute::fill_missing(raw.at(name), impute::TailFill::Linear, false);
    process_outliers(values, name, outlier::Method::Global, config.standard_replacement, config, reports);
    out.set(name, std::move(values));
  }
  return out;
}

SeriesFrame preprocess_custom(const SeriesFrame& raw, const PipelineConfig& config,
                              const derive::DependencyGraph& graph, std::vector<outlier::OutlierReport>* reports) {
  SeriesFrame out = raw;
  const auto groups = ingest::group_columns(raw);
  for (const auto& name : raw.column_names()) {
    const ingest::ColumnGroup group = groups.at(name);
    if (group == ingest::ColumnGroup::Remaining) continue;
    Series values = raw.at(name);
    if (group == ingest::ColumnGroup::NewColumns) values = impute::weekly_pattern_impute(std::move(values));
    values = impute::fill_missing(std::move(values), impute::TailFill::None);
    process_outliers(values, name, outlier::Method::Local, config.custom_replacement, config, reports);
    out.set(name, std::move(values));
  }
  out = derive::run_computation_processing(out, graph);
  for (const auto& name : out.column_names()) {
    Series& values = out.at(name);
    if (std::any_of(values.begin(), values.end(), is_missing)) {
      values = impute::fill_missing(std::move(values), impute::TailFill::None);
    }
  }
  return out;
}

std::vector<std::string> candidate_features(const SeriesFrame& frame, const PipelineConfig& config,
                                            const derive::DependencyGraph& graph) {
  std::set<std::string> excluded{config.target};
  if (config.drop_target_rescalings) {
    for (const auto& spec : graph.specs)
      if (spec.kind == derive::FormulaKind::PerCapita && spec.inputs.front() == config.target) excluded.insert(spec.target);
  }
  std::vector<std::string> out;
  for (const auto& name : frame.column_names())
    if (!excluded.count(name)) out.push_back(name);
  return out;
}

namespace {

select::SelectionOptions selection_options(const PipelineConfig& config, std::string scope) {
  select::SelectionOptions o;
  o.vif_th = config.vif_th;
  o.corr_th = config.corr_th;
  o.seed = stage_seed(config, "select");
  o.pfi_repeats = config.pfi_repeats;
  o.scope = std::move(scope);
  return o;
}

eval::EvalConfig eval_config(const PipelineConfig& config) {
  eval::EvalConfig e;
  e.split = config.split;
  e.seed = stage_seed(config, "model");
  e.cv_folds = config.cv_folds;
  e.kinds = config.models;
  e.grids = config.grids;
  return e;
}

}  // namespace

Evaluated select_then_split(const SeriesFrame& processed, const std::vector<std::string>& candidates,
                            const PipelineConfig& config) {
  Evaluated out;
  out.selection = stage("select", [&] {
    const auto fm = select::make_feature_matrix(processed, candidates, config.target, 0, processed.rows());
    return select::iterative_feature_selection(fm, config.target, selection_options(config, "full-data"));
  });
  out.report = stage("evaluate", [&] {
    return eval::evaluate_pipeline(processed, out.selection.features, config.target, eval_config(config), "standard");
  });
  return out;
}

Evaluated split_then_select(const SeriesFrame& processed, const std::vector<std::string>& candidates,
                            const PipelineConfig& config) {
  Evaluated out;
  const eval::SplitRanges split = stage("split", [&] { return eval::split_chronological(processed.rows(), config.split); });
  out.selection = stage("select", [&] {
    const auto fm =
        select::make_feature_matrix(processed, candidates, config.target, split.train.begin, split.train.end);
    return select::iterative_feature_selection(fm, config.target, selection_options(config, "train-only"));
  });
  out.report = stage("evaluate", [&] {
    return eval::evaluate_pipeline(processed, out.selection.features, config.target, eval_config(config), "custom");
  });
  return out;
}

namespace {

void write_preprocessing_artifacts(const fs::path& dir, const PipelineRun& run, const PipelineConfig& config) {
  write_artifact(dir / "processed.csv", ingest::write_csv(run.processed));
  for (const auto& report : run.outliers) write_artifact(dir / "outliers" / (report.column + ".json"), outlier::to_json(report));
  std::vector<std::string> series = config.series_columns;
  if (std::find(series.begin(), series.end(), config.target) == series.end()) series.push_back(config.target);
  for (const auto& name : series) {
    if (!run.raw.has(name) || !run.processed.has(name)) continue;
    write_artifact(dir / "series" / (name + ".csv"),
                   eval::series_csv(run.processed.dates(), run.raw.at(name), run.processed.at(name)));
  }
}

template <typename Preprocess, typename Evaluate>
PipelineRun run_pipeline(const PipelineConfig& config, const std::string& name, Preprocess preprocess,
                         Evaluate evaluate, const derive::DependencyGraph& graph) {
  stage("config", [&] { config.validate(); });
  PipelineRun run;
  run.pipeline = name;
  const fs::path dir = fs::path(config.out) / name;
  run.directory = dir.string();
  run.raw = stage("ingest", [&] { return load_frame(config); });
  stage("ingest", [&] {
    if (!run.raw.has(config.target)) throw Error(ErrorCode::MissingInput, "target column " + config.target);
  });
  run.processed = stage("preprocess", [&] { return preprocess(run.raw, run.outliers); });
  stage("write", [&] { write_preprocessing_artifacts(dir, run, config); });

  const auto candidates = candidate_features(run.processed, config, graph);
  run.result = evaluate(run.processed, candidates);
  stage("write", [&] {
    write_artifact(dir / "selection_trace.json", select::to_json(run.result.selection.trace));
    write_artifact(dir / "report.csv", eval::report_csv(run.result.report));
    write_artifact(dir / "report.json", eval::report_json(run.result.report));
  });
  return run;
}

}  // namespace

PipelineRun run_standard(const PipelineConfig& config) {
  const auto graph = stage("config", [&] { return load_graph(config); });
  return run_pipeline(
      config, "standard",
      [&](const SeriesFrame& raw, std::vector<outlier::OutlierReport>& reports) {
        return preprocess_standard(raw, config, &reports);
      },
      [&](const SeriesFrame& processed, const std::vector<std::string>& candidates) {
        return select_then_split(processed, candidates, config);
      },
      graph);
}

PipelineRun run_custom(const PipelineConfig& config) {
  const auto graph = stage("config", [&] {
    auto g = load_graph(config);
    derive::validate(g);
    return g;
  });
  // The graph is written before processing starts so a derivation failure
  // still leaves it inspectable.
  stage("write", [&] { write_artifact(fs::path(config.out) / "custom" / "graph.json", derive::to_json(graph)); });
  return run_pipeline(
      config, "custom",
      [&](const SeriesFrame& raw, std::vector<outlier::OutlierReport>& reports) {
        return preprocess_custom(raw, config, graph, &reports);
      },
      [&](const SeriesFrame& processed, const std::vector<std::string>& candidates) {
        return split_then_select(processed, candidates, config);
      },
      graph);
}

// ---------------------------------------------------------------------------

namespace {

std::string fixed3(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

double ratio(double num, double den) {
  if (num == den) return 1.0;
  if (den == 0.0) return kInf;
  return num / den;
}

struct ModelRow {
  std::string model;
  double test_rmse = 0.0;
  json test_r2;
  double rmse_variance = 0.0;
};

std::vector<ModelRow> model_rows(const json& report) {
  std::vector<ModelRow> rows;
  for (const auto& m : report.at("models")) {
    if (!m.contains("test")) continue;
    rows.push_back({m.at("model").get<std::string>(), m.at("test").at("rmse").get<double>(), m.at("test").at("r2"),
                    m.at("rmse_variance").get<double>()});
  }
  return rows;
}

std::string csv_rows(const std::string& pipeline, const std::vector<ModelRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += pipeline + "," + r.model + "," + fixed3(r.test_rmse) + "," +
           (r.test_r2.is_null() ? std::string("ZeroVariance") : fixed3(r.test_r2.get<double>())) + "," +
           fixed3(r.rmse_variance) + "\n";
  }
  out += pipeline + ",SVR,not implemented,not implemented,not implemented\n";
  return out;
}

const ModelRow* best_of(const std::vector<ModelRow>& rows) {
  const ModelRow* best = nullptr;
  for (const auto& r : rows)
    if (!best || r.test_rmse < best->test_rmse) best = &r;
  return best;
}

std::string feature_table(const std::string& pipeline, const json& trace) {
  const auto& last = trace.at("iterations").back().at("records");
  std::vector<const json*> records;
  for (const auto& r : last) records.push_back(&r);
  std::stable_sort(records.begin(), records.end(), [](const json* a, const json* b) {
    return a->at("combined").get<double>() > b->at("combined").get<double>();
  });
  std::string out;
  for (const json* r : records) {
    const json& v = r->at("vif");
    out += "| " + pipeline + " | " + r->at("feature").get<std::string>() + " | " +
           fixed3(r->at("combined").get<double>()) + " | " + (v.is_string() ? v.get<std::string>() : fixed3(v.get<double>())) +
           " |\n";
  }
  return out;
}

}  // namespace

Comparison compare_documents(const std::string& left_report, const std::string& left_trace,
                             const std::string& right_report, const std::string& right_trace) {
  try {
    const json lr = json::parse(left_report);
    const json rr = json::parse(right_report);
    const json lt = json::parse(left_trace);
    const json rt = json::parse(right_trace);
    const std::string ln = lr.at("pipeline").get<std::string>();
    const std::string rn = rr.at("pipeline").get<std::string>();
    const auto lrows = model_rows(lr);
    const auto rrows = model_rows(rr);

    Comparison c;
    c.csv = "Pipeline,Model,Test RMSE,Test R²,RMSE Variance\n" + csv_rows(ln, lrows) + csv_rows(rn, rrows);

    std::ostringstream md;
    md << "# Pipeline comparison: " << ln << " vs " << rn << "\n\n";
    md << "Ratios are " << rn << " / " << ln << "; below 1 means " << rn << " is lower.\n\n";
    md << "| Model | " << ln << " Test RMSE | " << rn << " Test RMSE | RMSE ratio | " << ln << " RMSE Variance | " << rn
       << " RMSE Variance | Variance ratio |\n";
    md << "|---|---|---|---|---|---|---|\n";
    for (const auto& l : lrows) {
      auto it = std::find_if(rrows.begin(), rrows.end(), [&](const ModelRow& r) { return r.model == l.model; });
      if (it == rrows.end()) continue;
      md << "| " << l.model << " | " << fixed3(l.test_rmse) << " | " << fixed3(it->test_rmse) << " | "
         << fixed3(ratio(it->test_rmse, l.test_rmse)) << " | " << fixed3(l.rmse_variance) << " | "
         << fixed3(it->rmse_variance) << " | " << fixed3(ratio(it->rmse_variance, l.rmse_variance)) << " |\n";
    }
    md << "\n## Best model per pipeline\n\n";
    for (const auto& [name, rows] : {std::pair{ln, &lrows}, std::pair{rn, &rrows}}) {
      if (const ModelRow* b = best_of(*rows)) {
        md << "- " << name << ": " << b->model << " (test RMSE " << fixed3(b->test_rmse) << ", RMSE variance "
           << fixed3(b->rmse_variance) << ")\n";
      }
    }
    md << "\n## Selected features\n\n";
    md << "| Pipeline | Features | Combined Importance | VIF |\n|---|---|---|---|\n";
    md << feature_table(ln, lt) << feature_table(rn, rt);
    c.markdown = md.str();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MissingRun, std::string("run artifacts are unreadable: ") + e.what());
  }
}

Comparison compare(const PipelineConfig& config) {
  const fs::path out(config.out);
  auto load = [&](const char* pipeline, const char* file) {
    const fs::path p = out / pipeline / file;
    if (!fs::exists(p)) throw Error(ErrorCode::MissingRun, "missing " + p.string());
    return read_file(p.string());
  };
  Comparison c = compare_documents(load("standard", "report.json"), load("standard", "selection_trace.json"),
                                   load("custom", "report.json"), load("custom", "selection_trace.json"));
  write_artifact(out / "compare.csv", c.csv);
  write_artifact(out / "compare.md", c.markdown);
  return c;
}

}  // namespace covidprep::pipeline
