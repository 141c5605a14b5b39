#include "covidprep/derive.hpp"

#include <algorithm>
#include <functional>
#include <json.hpp>
#include <map>
#include <set>

namespace covidprep::derive {

std::string_view to_string(FormulaKind k) noexcept {
  switch (k) {
    case FormulaKind::NewFromTotal: return "NewFromTotal";
    case FormulaKind::TotalFromNew: return "TotalFromNew";
    case FormulaKind::Smoothed7: return "Smoothed7";
    case FormulaKind::PerCapita: return "PerCapita";
    case FormulaKind::PositiveRate: return "PositiveRate";
    case FormulaKind::TestsPerCase: return "TestsPerCase";
  }
  return "";
}

FormulaKind formula_kind_from_string(std::string_view s) {
  for (auto k : {FormulaKind::NewFromTotal, FormulaKind::TotalFromNew, FormulaKind::Smoothed7, FormulaKind::PerCapita,
                 FormulaKind::PositiveRate, FormulaKind::TestsPerCase}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::InvalidGraph, "unknown formula kind '" + std::string(s) + "'");
}

Series compute_new_from_total(const Series& total) {
  Series out(total.size());
  for (std::size_t t = 0; t < total.size(); ++t) out[t] = t == 0 ? total[0] : total[t] - total[t - 1];
  return out;
}

Series compute_total_from_new(const Series& new_values) {
  Series out(new_values.size());
  double running = 0.0;
  for (std::size_t t = 0; t < new_values.size(); ++t) {
    running += new_values[t];
    out[t] = running;
  }
  return out;
}

Series compute_positive_rate(const Series& new_cases, const Series& new_tests) {
  if (new_cases.size() != new_tests.size()) throw Error(ErrorCode::LengthMismatch, "positive_rate inputs");
  Series out(new_cases.size(), kMissing);
  for (std::size_t t = 0; t < new_cases.size(); ++t) {
    double total = 0.0;
    int terms = 0;
    for (std::size_t i = 0; i < 7 && i <= t; ++i) {
      const double tests = new_tests[t - i];
      if (!(tests > 0.0)) continue;
      total += new_cases[t - i] / tests;
      ++terms;
    }
    if (terms > 0) out[t] = total / terms;
  }
  return out;
}

Series compute_tests_per_case(const Series& positive_rate) {
  Series out(positive_rate.size(), kMissing);
  for (std::size_t t = 0; t < positive_rate.size(); ++t)
    if (positive_rate[t] > 0.0) out[t] = 1.0 / positive_rate[t];
  return out;
}

Series compute_smoothed7(const Series& raw) {
  Series out(raw.size());
  for (std::size_t t = 0; t < raw.size(); ++t) {
    const std::size_t lo = t >= 6 ? t - 6 : 0;
    double s = 0.0;
    for (std::size_t k = lo; k <= t; ++k) s += raw[k];
    out[t] = s / static_cast<double>(t - lo + 1);
  }
  return out;
}

Series compute_per_capita(const Series& raw, double population, double scale) {
  if (!(population > 0.0)) throw Error(ErrorCode::NonpositivePopulation, "population must be positive");
  Series out(raw.size());
  for (std::size_t t = 0; t < raw.size(); ++t) out[t] = raw[t] * scale / population;
  return out;
}

DependencyGraph build_default_graph() {
  DependencyGraph g;
  auto add = [&](std::string target, FormulaKind kind, std::vector<std::string> inputs, int order, double scale = 0.0) {
    g.specs.push_back(DependencySpec{std::move(target), kind, std::move(inputs), order, scale});
  };
  using K = FormulaKind;
  constexpr double kMillion = 1e6, kThousand = 1e3, kHundred = 1e2;

  add("new_people_vaccinated", K::NewFromTotal, {"people_vaccinated"}, 1);

  for (const char* base : {"cases", "deaths", "tests", "vaccinations"})
    add(std::string("total_") + base, K::TotalFromNew, {std::string("new_") + base}, 2);
  for (const char* raw : {"new_cases", "new_deaths", "new_tests", "new_vaccinations", "new_people_vaccinated"})
    add(std::string(raw) + "_smoothed", K::Smoothed7, {raw}, 2);
  add("new_cases_per_million", K::PerCapita, {"new_cases"}, 2, kMillion);
  add("new_deaths_per_million", K::PerCapita, {"new_deaths"}, 2, kMillion);

  add("total_cases_per_million", K::PerCapita, {"total_cases"}, 3, kMillion);
  add("total_deaths_per_million", K::PerCapita, {"total_deaths"}, 3, kMillion);
  add("new_cases_smoothed_per_million", K::PerCapita, {"new_cases_smoothed"}, 3, kMillion);
  add("new_deaths_smoothed_per_million", K::PerCapita, {"new_deaths_smoothed"}, 3, kMillion);
  add("new_vaccinations_smoothed_per_million", K::PerCapita, {"new_vaccinations_smoothed"}, 3, kMillion);
  add("total_tests_per_thousand", K::PerCapita, {"total_tests"}, 3, kThousand);
  add("new_tests_per_thousand", K::PerCapita, {"new_tests"}, 3, kThousand);
  add("new_tests_smoothed_per_thousand", K::PerCapita, {"new_tests_smoothed"}, 3, kThousand);
  add("total_vaccinations_per_hundred", K::PerCapita, {"total_vaccinations"}, 3, kHundred);
  add("people_vaccinated_per_hundred", K::PerCapita, {"people_vaccinated"}, 3, kHundred);
  add("people_fully_vaccinated_per_hundred", K::PerCapita, {"people_fully_vaccinated"}, 3, kHundred);
  add("total_boosters_per_hundred", K::PerCapita, {"total_boosters"}, 3, kHundred);
  add("new_people_vaccinated_smoothed_per_hundred", K::PerCapita, {"new_people_vaccinated_smoothed"}, 3, kHundred);
  add("positive_rate", K::PositiveRate, {"new_cases", "new_tests"}, 3);

  add("tests_per_case", K::TestsPerCase, {"positive_rate"}, 4);
  return g;
}

namespace {

std::size_t arity(FormulaKind k) { return k == FormulaKind::PositiveRate ? 2 : 1; }

bool needs_complete_inputs(FormulaKind k) {
  return k == FormulaKind::NewFromTotal || k == FormulaKind::TotalFromNew || k == FormulaKind::Smoothed7 ||
         k == FormulaKind::PositiveRate;
}

}  // namespace

void validate(const DependencyGraph& graph) {
  std::map<std::string, const DependencySpec*> by_target;
  for (const auto& s : graph.specs) {
    if (!by_target.emplace(s.target, &s).second) throw Error(ErrorCode::InvalidGraph, "duplicate target " + s.target);
    if (s.inputs.size() != arity(s.kind)) throw Error(ErrorCode::InvalidGraph, "wrong input count for " + s.target);
    if (s.kind == FormulaKind::PerCapita && s.scale != 1e2 && s.scale != 1e3 && s.scale != 1e6) {
      throw Error(ErrorCode::InvalidGraph, "bad per-capita scale for " + s.target);
    }
    if (s.order < 1) throw Error(ErrorCode::InvalidGraph, "order must be positive for " + s.target);
  }

  // 0 = unvisited, 1 = on stack, 2 = done
  std::map<std::string, int> state;
  std::function<void(const std::string&)> visit = [&](const std::string& node) {
    auto it = by_target.find(node);
    if (it == by_target.end()) return;
    int& st = state[node];
    if (st == 2) return;
    if (st == 1) throw Error(ErrorCode::CyclicGraph, "cycle through " + node);
    st = 1;
    for (const auto& in : it->second->inputs) visit(in);
    state[node] = 2;
  };
  for (const auto& s : graph.specs) visit(s.target);

  for (const auto& s : graph.specs) {
    for (const auto& in : s.inputs) {
      auto it = by_target.find(in);
      if (it != by_target.end() && it->second->order >= s.order) {
        throw Error(ErrorCode::InvalidGraph, s.target + " must be ordered after " + in);
      }
    }
  }
}

std::vector<DependencySpec> execution_order(const DependencyGraph& graph) {
  std::vector<DependencySpec> specs = graph.specs;
  std::stable_sort(specs.begin(), specs.end(),
                   [](const DependencySpec& a, const DependencySpec& b) { return a.order < b.order; });
  return specs;
}

Series evaluate_spec(const SeriesFrame& frame, const DependencySpec& spec) {
  std::vector<const Series*> inputs;
  for (const auto& name : spec.inputs) {
    if (!frame.has(name)) throw Error(ErrorCode::MissingInput, spec.target + " needs column " + name);
    const Series& s = frame.at(name);
    if (needs_complete_inputs(spec.kind) && std::any_of(s.begin(), s.end(), is_missing)) {
      throw Error(ErrorCode::MissingInput, spec.target + " needs missing-free " + name);
    }
    inputs.push_back(&s);
  }
  switch (spec.kind) {
    case FormulaKind::NewFromTotal: return compute_new_from_total(*inputs[0]);
    case FormulaKind::TotalFromNew: return compute_total_from_new(*inputs[0]);
    case FormulaKind::Smoothed7: return compute_smoothed7(*inputs[0]);
    case FormulaKind::PerCapita:
      return compute_per_capita(*inputs[0], frame.meta().population.value_or(0.0), spec.scale);
    case FormulaKind::PositiveRate: return compute_positive_rate(*inputs[0], *inputs[1]);
    case FormulaKind::TestsPerCase: return compute_tests_per_case(*inputs[0]);
  }
  return {};
}

SeriesFrame run_computation_processing(const SeriesFrame& frame, const DependencyGraph& graph) {
  validate(graph);
  SeriesFrame out = frame;
  for (const auto& spec : execution_order(graph)) out.set(spec.target, evaluate_spec(out, spec));
  return out;
}

std::vector<std::string> untouched_columns(const SeriesFrame& frame, const DependencyGraph& graph) {
  std::set<std::string> touched;
  for (const auto& s : graph.specs) {
    touched.insert(s.target);
    touched.insert(s.inputs.begin(), s.inputs.end());
  }
  std::vector<std::string> out;
  for (const auto& c : frame.columns())
    if (!touched.count(c.name)) out.push_back(c.name);
  return out;
}

std::string to_json(const DependencyGraph& graph) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& s : graph.specs) {
    nlohmann::ordered_json j;
    j["target"] = s.target;
    j["kind"] = to_string(s.kind);
    if (s.kind == FormulaKind::PerCapita) j["scale"] = s.scale;
    j["inputs"] = s.inputs;
    j["order"] = s.order;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

DependencyGraph graph_from_json(std::string_view text) {
  DependencyGraph g;
  try {
    auto arr = nlohmann::json::parse(text);
    for (const auto& j : arr) {
      DependencySpec s;
      s.target = j.at("target").get<std::string>();
      s.kind = formula_kind_from_string(j.at("kind").get<std::string>());
      s.inputs = j.at("inputs").get<std::vector<std::string>>();
      s.order = j.at("order").get<int>();
      if (j.contains("scale")) s.scale = j.at("scale").get<double>();
      g.specs.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidGraph, e.what());
  }
  return g;
}

}  // namespace covidprep::derive
