#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <shiftreg/baseline.hpp>
#include <shiftreg/csv.hpp>
#include <shiftreg/problems.hpp>
#include <shiftreg/shift.hpp>
#include <shiftreg/unbounded.hpp>

namespace shiftreg {

  enum class SweepMethod { shift, unbounded };

  /**
   * @brief One experiment: a problem, a noise grid, both schedules and a seed.
   *
   * JSON layout:
   *
   *     {
   *       "problem": {"kind": "hilbert", "dim": 10, "width": 3, "null_dim": 2,
   *                   "seed": 0, "exact_solution": "smooth_sine"},
   *       "method": "shift",
   *       "deltas": [1e-2, 1e-4, 1e-6],
   *       "shift_schedule": {"C": 1, "p": 0.5},
   *       "iteration_schedule": {"C": 1, "q": 0.5},
   *       "seed": 42,
   *       "outputs": {"report": "report.csv"}
   *     }
   *
   * `exact_solution` may also be an array of numbers. `method` defaults to
   * "shift" for symmetric kinds and "unbounded" for first_derivative_rect.
   */
  struct ExperimentConfig {
    ProblemSpec problem;
    SweepMethod method = SweepMethod::shift;
    std::vector<double> deltas;
    ShiftSchedule<double> shift_schedule;
    IterationSchedule<double> iteration_schedule;
    std::uint64_t seed = 0;
    std::optional<std::string> report_path;
  };

  namespace detail {

    inline void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& allowed, const char* where) {
      for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
          throw invalid_input(std::string("config: unknown key '") + item.key() + "' in " + where);
        }
      }
    }

    inline const nlohmann::json& require_object(const nlohmann::json& j, const char* where) {
      if (!j.is_object()) { throw invalid_input(std::string("config: ") + where + " must be an object"); }
      return j;
    }

    template <typename T>
    T get_number(const nlohmann::json& obj, const char* key, T fallback, const char* where) {
      if (!obj.contains(key)) { return fallback; }
      const auto& v = obj.at(key);
      if (!v.is_number()) { throw invalid_input(std::string("config: ") + where + "." + key + " must be a number"); }
      return v.get<T>();
    }

    inline ProblemSpec parse_problem(const nlohmann::json& j) {
      require_object(j, "problem");
      reject_unknown_keys(j, {"kind", "dim", "dim2", "width", "null_dim", "seed", "exact_solution"}, "problem");
      ProblemSpec spec;
      if (!j.contains("kind") || !j.at("kind").is_string()) {
        throw invalid_input("config: problem.kind must be a string");
      }
      spec.kind = parse_problem_kind(j.at("kind").get<std::string>());
      spec.dim = get_number<Index>(j, "dim", spec.dim, "problem");
      if (j.contains("dim2")) { spec.dim2 = get_number<Index>(j, "dim2", 0, "problem"); }
      spec.width = get_number<double>(j, "width", spec.width, "problem");
      spec.null_dim = get_number<Index>(j, "null_dim", spec.null_dim, "problem");
      spec.seed = get_number<std::uint64_t>(j, "seed", spec.seed, "problem");
      if (j.contains("exact_solution")) {
        const auto& s = j.at("exact_solution");
        if (s.is_string()) {
          spec.exact_solution = parse_exact_solution(s.get<std::string>());
        } else if (s.is_array()) {
          spec.exact_solution = ExactSolution::custom;
          spec.custom_solution.resize(static_cast<Index>(s.size()));
          for (std::size_t i = 0; i < s.size(); ++i) {
            if (!s[i].is_number()) { throw invalid_input("config: problem.exact_solution entries must be numbers"); }
            spec.custom_solution[static_cast<Index>(i)] = s[i].get<double>();
          }
        } else {
          throw invalid_input("config: problem.exact_solution must be a string or an array");
        }
      }
      return spec;
    }

  } // namespace detail

  inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
    detail::require_object(j, "top level");
    detail::reject_unknown_keys(
      j, {"problem", "method", "deltas", "shift_schedule", "iteration_schedule", "seed", "outputs"}, "top level");
    if (!j.contains("problem")) { throw invalid_input("config: missing 'problem'"); }

    ExperimentConfig cfg;
    cfg.problem = detail::parse_problem(j.at("problem"));
    cfg.method = cfg.problem.symmetric() ? SweepMethod::shift : SweepMethod::unbounded;
    if (j.contains("method")) {
      const auto& m = j.at("method");
      if (m == "shift") {
        cfg.method = SweepMethod::shift;
      } else if (m == "unbounded") {
        cfg.method = SweepMethod::unbounded;
      } else {
        throw invalid_input("config: method must be \"shift\" or \"unbounded\"");
      }
    }
    if (cfg.method == SweepMethod::shift && !cfg.problem.symmetric()) {
      throw invalid_input("config: the shift method needs a symmetric problem kind");
    }

    if (!j.contains("deltas") || !j.at("deltas").is_array() || j.at("deltas").empty()) {
      throw invalid_input("config: 'deltas' must be a non-empty array");
    }
    for (const auto& d : j.at("deltas")) {
      if (!d.is_number() || !(d.get<double>() > 0.0)) { throw invalid_input("config: deltas must be positive numbers"); }
      const double value = d.get<double>();
      if (!cfg.deltas.empty() && !(value < cfg.deltas.back())) {
        throw invalid_input("config: deltas must be strictly decreasing");
      }
      cfg.deltas.push_back(value);
    }

    if (j.contains("shift_schedule")) {
      const auto& s = detail::require_object(j.at("shift_schedule"), "shift_schedule");
      detail::reject_unknown_keys(s, {"C", "p"}, "shift_schedule");
      cfg.shift_schedule = ShiftSchedule<double>(detail::get_number<double>(s, "C", 1.0, "shift_schedule"),
                                                 detail::get_number<double>(s, "p", 0.5, "shift_schedule"));
    }
    if (j.contains("iteration_schedule")) {
      const auto& s = detail::require_object(j.at("iteration_schedule"), "iteration_schedule");
      detail::reject_unknown_keys(s, {"C", "q"}, "iteration_schedule");
      cfg.iteration_schedule =
        IterationSchedule<double>(detail::get_number<double>(s, "C", 1.0, "iteration_schedule"),
                                  detail::get_number<double>(s, "q", 0.5, "iteration_schedule"));
    }
    cfg.seed = detail::get_number<std::uint64_t>(j, "seed", 0, "top level");
    if (j.contains("outputs")) {
      const auto& o = detail::require_object(j.at("outputs"), "outputs");
      detail::reject_unknown_keys(o, {"report"}, "outputs");
      if (o.contains("report")) {
        if (!o.at("report").is_string()) { throw invalid_input("config: outputs.report must be a string"); }
        cfg.report_path = o.at("report").get<std::string>();
      }
    }
    return cfg;
  }

  /// Reads and validates a JSON config; syntax errors carry line and column.
  inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) { throw invalid_input("cannot open config '" + path + "'"); }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw invalid_input(path + ": " + e.what());
    }
    try {
      return parse_experiment_config(j);
    } catch (const nlohmann::json::exception& e) {
      throw invalid_input(path + ": " + e.what());
    }
  }

  /// Reads the optional thread cap from SHIFTREG_THREADS; unset or invalid means 1.
  inline unsigned thread_cap_from_env() {
    const char* raw = std::getenv("SHIFTREG_THREADS");
    if (!raw) { return 1; }
    char* end = nullptr;
    const long v = std::strtol(raw, &end, 10);
    return (end != raw && *end == '\0' && v >= 1) ? static_cast<unsigned>(v) : 1u;
  }

  /// Result of a sweep: the CSV text and whether any bound was violated.
  struct SweepOutput {
    std::string csv;
    bool bound_violated = false;
  };

  inline SweepOutput run_sweep(const ExperimentConfig& cfg, SweepOptions options = {}) {
    const Problem problem = generate_problem(cfg.problem);
    if (cfg.method == SweepMethod::shift) {
      const auto report = convergence_sweep(problem.symmetric_operator(), problem.f, cfg.deltas, cfg.shift_schedule,
                                            cfg.seed, std::optional<Vector<double>>{problem.y_exact}, options);
      return {format_report(report), report.has_violation()};
    }
    // the evaluator recovers A y_exact from noisy samples of y_exact
    const auto ops = build_operators(problem.general_operator());
    const auto rows = evaluation_sweep(ops, problem.y_exact, cfg.deltas, cfg.iteration_schedule, cfg.seed, options);
    bool violated = false;
    const double scale = 1.0 + problem.f.norm();
    for (const auto& r : rows) {
      if (r.error_vs_Af && r.bound_eq9 && *r.error_vs_Af > *r.bound_eq9 + 1e-8 * scale) { violated = true; }
    }
    return {format_report(rows), violated};
  }

  inline std::string run_compare(const ExperimentConfig& cfg, SweepOptions options = {}) {
    const Problem problem = generate_problem(cfg.problem);
    const auto rows = compare_methods(problem.symmetric_operator(), problem.f, cfg.deltas, cfg.shift_schedule, cfg.seed,
                                      std::optional<Vector<double>>{problem.y_exact}, options);
    return format_report(rows);
  }

} // namespace shiftreg
