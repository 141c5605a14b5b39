#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "covidprep/frame.hpp"

namespace covidprep::derive {

enum class FormulaKind { NewFromTotal, TotalFromNew, Smoothed7, PerCapita, PositiveRate, TestsPerCase };

std::string_view to_string(FormulaKind k) noexcept;
FormulaKind formula_kind_from_string(std::string_view s);

struct DependencySpec {
  std::string target;
  FormulaKind kind = FormulaKind::TotalFromNew;
  std::vector<std::string> inputs;
  int order = 1;
  /// PerCapita only: 100, 1000 or 1000000.
  double scale = 0.0;

  friend bool operator==(const DependencySpec&, const DependencySpec&) = default;
};

struct DependencyGraph {
  std::vector<DependencySpec> specs;

  friend bool operator==(const DependencyGraph&, const DependencyGraph&) = default;
};

// Formulas. Inputs are expected missing-free unless noted; a missing input
// propagates as NaN.

/// out[0] = total[0]; out[t] = total[t] - total[t-1].
Series compute_new_from_total(const Series& total);
/// Running sum.
Series compute_total_from_new(const Series& new_values);
/// Seven-day trailing mean of daily case/test ratios, skipping days with no
/// tests; missing when no day in the window qualifies.
Series compute_positive_rate(const Series& new_cases, const Series& new_tests);
/// 1/rate where rate > 0, else missing. Accepts missing input.
Series compute_tests_per_case(const Series& positive_rate);
/// Trailing seven-day mean; the first six days average what is available.
Series compute_smoothed7(const Series& raw);
/// raw * scale / population. Throws NonpositivePopulation.
Series compute_per_capita(const Series& raw, double population, double scale);

/// The shipped dependency table for the OWID schema.
DependencyGraph build_default_graph();

/// Checks unique targets, arity, scales, acyclicity (CyclicGraph) and that
/// each derived input has a lower order than its consumer (InvalidGraph).
void validate(const DependencyGraph& graph);

/// Specs in execution order: ascending order, ties in list order.
std::vector<DependencySpec> execution_order(const DependencyGraph& graph);

/// Overwrites every target in execution order. Throws MissingInput when an
/// input column is absent or, for formulas that need it, not missing-free.
SeriesFrame run_computation_processing(const SeriesFrame& frame, const DependencyGraph& graph);

/// Evaluates one spec against the frame as it currently stands.
Series evaluate_spec(const SeriesFrame& frame, const DependencySpec& spec);

/// Frame columns that the graph neither computes nor reads.
std::vector<std::string> untouched_columns(const SeriesFrame& frame, const DependencyGraph& graph);

/// [{target, kind, scale?, inputs, order}]
std::string to_json(const DependencyGraph& graph);
DependencyGraph graph_from_json(std::string_view text);

}  // namespace covidprep::derive
