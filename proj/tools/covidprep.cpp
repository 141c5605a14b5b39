#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "covidprep/kernels.hpp"
#include "covidprep/pipeline.hpp"

using namespace covidprep;

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> input;
  std::optional<std::string> location;
  std::optional<std::string> pipeline;
  std::optional<std::string> target;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

pipeline::PipelineConfig resolve(const Flags& f) {
  pipeline::PipelineConfig c;
  if (!f.config.empty()) c = pipeline::config_from_json(read_file(f.config), c);
  if (f.input) c.input = *f.input;
  if (f.location) c.location = *f.location;
  if (f.pipeline) c.pipeline = *f.pipeline;
  if (f.target) c.target = *f.target;
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.out = *f.out;
  if (c.input.empty()) throw Error(ErrorCode::InvalidConfig, "no input file (--input or config \"input\")");
  return c;
}

void add_common(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "flat JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", f.out, "output directory");
}

void summarize(const pipeline::PipelineRun& run) {
  const auto& results = run.result.report.results;
  std::cout << run.pipeline << ": " << run.result.selection.features.size() << " features selected, "
            << results.size() << " models evaluated -> " << run.directory << "\n";
  if (!results.empty()) {
    std::cout << "  best: " << model::display_name(results.front().kind) << " (test RMSE "
              << results.front().test.rmse << ")\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"COVID-19 time-series preprocessing pipelines and model comparison"};
  app.require_subcommand(1);
  Flags flags;

  CLI::App* run = app.add_subcommand("run", "run the standard and/or custom pipeline");
  add_common(*run, flags);
  run->add_option("--input", flags.input, "OWID-schema CSV file");
  run->add_option("--location", flags.location, "iso_code to analyse");
  run->add_option("--pipeline", flags.pipeline, "standard, custom or both")
      ->check(CLI::IsMember({"standard", "custom", "both"}));
  run->add_option("--target", flags.target, "target column");
  run->add_option("--seed", flags.seed, "random seed");

  CLI::App* cmp = app.add_subcommand("compare", "compare finished standard and custom runs");
  add_common(*cmp, flags);

  app.add_subcommand("isa", "print the SIMD kernel variant in use");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("isa")) {
      std::cout << kernels::isa_name(kernels::active_isa()) << "\n";
      return 0;
    }
    if (app.got_subcommand(cmp)) {
      pipeline::PipelineConfig c;
      if (!flags.config.empty()) c = pipeline::config_from_json(read_file(flags.config), c);
      if (flags.out) c.out = *flags.out;
      pipeline::compare(c);
      std::cout << "wrote " << c.out << "/compare.csv and " << c.out << "/compare.md\n";
      return 0;
    }
    const pipeline::PipelineConfig c = resolve(flags);
    c.validate();
    if (c.pipeline == "standard" || c.pipeline == "both") summarize(pipeline::run_standard(c));
    if (c.pipeline == "custom" || c.pipeline == "both") summarize(pipeline::run_custom(c));
    if (c.pipeline == "both") {
      pipeline::compare(c);
      std::cout << "comparison: " << c.out << "/compare.md\n";
    }
    return 0;
  } catch (const pipeline::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
