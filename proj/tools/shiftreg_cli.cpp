// Command-line front end: direct solves, sweeps, benchmarks, problem
// generation and the invariant self-check.
//
// Exit codes: 0 success, 1 bound/invariant violation or I/O failure,
// 2 bad input or configuration.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <shiftreg/shiftreg.hpp>

namespace {

  using namespace shiftreg;

  constexpr int exit_ok = 0;
  constexpr int exit_violation = 1;
  constexpr int exit_bad_input = 2;

  void write_output(const std::optional<std::string>& path, const std::string& content) {
    if (path) {
      csv::write_file(*path, content);
    } else {
      std::cout << content;
    }
  }

  std::pair<double, double> parse_pair(const std::string& text, const char* flag) {
    const auto fields = csv::split(text);
    if (fields.size() != 2) { throw invalid_input(std::string(flag) + " expects two comma-separated numbers"); }
    return {csv::parse_real(fields[0], flag, 1), csv::parse_real(fields[1], flag, 1)};
  }

  std::vector<Index> parse_dims(const std::string& text) {
    std::vector<Index> dims;
    for (const auto& field : csv::split(text)) {
      const double v = csv::parse_real(field, "--dims", 1);
      if (!(v >= 1.0) || v != std::floor(v) || v > double(max_dense_dim)) {
        throw invalid_input("--dims entries must be integers in [1, 2000]");
      }
      dims.push_back(static_cast<Index>(v));
    }
    return dims;
  }

  struct SolveArgs {
    std::string matrix;
    std::string rhs;
    double parameter = 0.0;
    std::optional<std::string> out;
  };

  struct EvalArgs {
    std::string matrix;
    std::string rhs;
    double delta = 0.0;
    std::optional<Index> n;
    std::optional<std::string> schedule;
    std::optional<std::string> exact;
    std::optional<std::string> out;
  };

  struct ConfigArgs {
    std::string config;
    std::optional<std::string> out;
  };

  struct BenchArgs {
    std::string dims = "64,128,256,512";
    std::string kind = "hilbert";
    double a = 1e-3;
    int repeats = 3;
    std::optional<std::string> out;
  };

  struct GenerateArgs {
    std::string kind;
    Index dim = 0;
    double width = 3.0;
    Index null_dim = 2;
    std::uint64_t seed = 0;
    std::string solution = "smooth_sine";
    std::optional<std::string> out;
    std::optional<std::string> rhs_out;
    std::optional<std::string> solution_out;
  };

  int cmd_solve_shift(const SolveArgs& args) {
    const SymmetricOperator<double> op(csv::read_matrix_file(args.matrix));
    const auto f = csv::read_vector_file(args.rhs);
    write_output(args.out, csv::format_complex_vector(solve_shift(op, f, args.parameter)));
    return exit_ok;
  }

  int cmd_solve_tikhonov(const SolveArgs& args) {
    const GeneralOperator<double> op(csv::read_matrix_file(args.matrix));
    const auto f = csv::read_vector_file(args.rhs);
    write_output(args.out, csv::format_matrix(solve_tikhonov(op, f, args.parameter)));
    return exit_ok;
  }

  int cmd_eval_unbounded(const EvalArgs& args) {
    const GeneralOperator<double> op(csv::read_matrix_file(args.matrix));
    const auto f = csv::read_vector_file(args.rhs);
    IterationSchedule<double> schedule;
    if (args.schedule) {
      const auto [c, q] = parse_pair(*args.schedule, "--schedule");
      schedule = IterationSchedule<double>(c, q);
    }
    EvalOptions<double> options;
    options.n = args.n;
    if (args.exact) { options.exact_Af = csv::read_vector_file(*args.exact); }
    const auto report = evaluate_unbounded(op, f, args.delta, schedule, options);
    write_output(args.out, csv::format_matrix(report.v_delta));
    std::cerr << "n_used=" << report.n_used << " lemma1_norm=" << csv::format_real(report.lemma1_norm);
    if (report.error_vs_Af) {
      std::cerr << " error=" << csv::format_real(*report.error_vs_Af)
                << " bound_eq9=" << csv::format_real(*report.bound_eq9);
    }
    std::cerr << '\n';
    return exit_ok;
  }

  std::string resolve_out(const ConfigArgs& args, const ExperimentConfig& cfg) {
    if (args.out) { return *args.out; }
    if (cfg.report_path) { return *cfg.report_path; }
    throw invalid_input("no output path: pass --out or set outputs.report in the config");
  }

  int cmd_sweep(const ConfigArgs& args) {
    const auto cfg = load_experiment_config(args.config);
    const auto out = run_sweep(cfg, {thread_cap_from_env()});
    csv::write_file(resolve_out(args, cfg), out.csv);
    if (out.bound_violated) {
      std::cerr << "error: measured error exceeded the bound in at least one row\n";
      return exit_violation;
    }
    return exit_ok;
  }

  int cmd_compare(const ConfigArgs& args) {
    const auto cfg = load_experiment_config(args.config);
    csv::write_file(resolve_out(args, cfg), run_compare(cfg, {thread_cap_from_env()}));
    return exit_ok;
  }

  int cmd_bench(const BenchArgs& args) {
    std::vector<FlopReport<double>> rows;
    const auto kind = parse_problem_kind(args.kind);
    for (const Index dim : parse_dims(args.dims)) {
      const auto problem = generate_problem({.kind = kind, .dim = dim});
      auto pair = benchmark_methods(problem.symmetric_operator(), problem.f, args.a, args.repeats);
      rows.insert(rows.end(), pair.begin(), pair.end());
    }
    write_output(args.out, format_report(rows));
    return exit_ok;
  }

  int cmd_generate(const GenerateArgs& args) {
    ProblemSpec spec;
    spec.kind = parse_problem_kind(args.kind);
    spec.dim = args.dim;
    spec.width = args.width;
    spec.null_dim = args.null_dim;
    spec.seed = args.seed;
    spec.exact_solution = parse_exact_solution(args.solution);
    const auto problem = generate_problem(spec);
    write_output(args.out, csv::format_matrix(problem.A));
    if (args.rhs_out) { csv::write_file(*args.rhs_out, csv::format_matrix(problem.f)); }
    if (args.solution_out) { csv::write_file(*args.solution_out, csv::format_matrix(problem.y_exact)); }
    return exit_ok;
  }

  int cmd_verify() {
    bool all = true;
    for (const auto& r : verify_invariants()) {
      std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
      all = all && r.passed;
    }
    return all ? exit_ok : exit_violation;
  }

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Complex-shift and fixed-point regularization of ill-posed linear problems"};
  app.require_subcommand(1);

  SolveArgs shift_args;
  auto* shift_cmd = app.add_subcommand("solve-shift", "Solve (A + i a I) u = f");
  shift_cmd->add_option("--matrix", shift_args.matrix, "Symmetric matrix CSV")->required();
  shift_cmd->add_option("--rhs", shift_args.rhs, "Right-hand side CSV (single column)")->required();
  shift_cmd->add_option("--a", shift_args.parameter, "Shift a > 0")->required();
  shift_cmd->add_option("--out", shift_args.out, "Output CSV (real,imag columns); stdout if omitted");

  SolveArgs tik_args;
  auto* tik_cmd = app.add_subcommand("solve-tikhonov", "Solve (A^T A + alpha I) u = A^T f");
  tik_cmd->add_option("--matrix", tik_args.matrix, "Matrix CSV")->required();
  tik_cmd->add_option("--rhs", tik_args.rhs, "Right-hand side CSV (single column)")->required();
  tik_cmd->add_option("--alpha", tik_args.parameter, "Regularization weight alpha > 0")->required();
  tik_cmd->add_option("--out", tik_args.out, "Output CSV; stdout if omitted");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval-unbounded", "Approximate A f from noisy f by the fixed-point iteration");
  eval_cmd->add_option("--matrix", eval_args.matrix, "Matrix CSV (m x n)")->required();
  eval_cmd->add_option("--rhs", eval_args.rhs, "Noisy data f_delta CSV (length n)")->required();
  eval_cmd->add_option("--delta", eval_args.delta, "Noise level delta >= 0")->required();
  auto* n_opt = eval_cmd->add_option("--n", eval_args.n, "Iteration count (overrides the schedule)");
  eval_cmd->add_option("--schedule", eval_args.schedule, "Schedule C,q for n = ceil(C delta^-q)")->excludes(n_opt);
  eval_cmd->add_option("--exact", eval_args.exact, "Exact A f CSV, enables error and bound on stderr");
  eval_cmd->add_option("--out", eval_args.out, "Output CSV; stdout if omitted");

  ConfigArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a delta-sweep described by a JSON config");
  sweep_cmd->add_option("--config", sweep_args.config, "Experiment JSON")->required();
  sweep_cmd->add_option("--out", sweep_args.out, "Report CSV (defaults to outputs.report)");

  ConfigArgs compare_args;
  auto* compare_cmd = app.add_subcommand("compare", "Compare the shift method with Tikhonov (alpha = a^2)");
  compare_cmd->add_option("--config", compare_args.config, "Experiment JSON")->required();
  compare_cmd->add_option("--out", compare_args.out, "Report CSV (defaults to outputs.report)");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Modeled operation counts and measured solve times");
  bench_cmd->add_option("--dims", bench_args.dims, "Comma-separated dimensions")->capture_default_str();
  bench_cmd->add_option("--kind", bench_args.kind, "Symmetric problem kind")->capture_default_str();
  bench_cmd->add_option("--a", bench_args.a, "Shift a (alpha = a^2)")->capture_default_str();
  bench_cmd->add_option("--repeats", bench_args.repeats, "Timing repeats (minimum is kept)")->capture_default_str();
  bench_cmd->add_option("--out", bench_args.out, "Output CSV; stdout if omitted");

  GenerateArgs gen_args;
  auto* problem_cmd = app.add_subcommand("problem", "Test-problem utilities");
  problem_cmd->require_subcommand(1);
  auto* gen_cmd = problem_cmd->add_subcommand("generate", "Write a canonical test operator as CSV");
  gen_cmd->add_option("--kind", gen_args.kind, "hilbert | gauss_deconv | second_derivative_sym | "
                                               "first_derivative_rect | rank_deficient_sym")->required();
  gen_cmd->add_option("--dim", gen_args.dim, "Dimension (rows)")->required();
  gen_cmd->add_option("--width", gen_args.width, "gauss_deconv kernel width")->capture_default_str();
  gen_cmd->add_option("--null-dim", gen_args.null_dim, "rank_deficient_sym null-space dimension")->capture_default_str();
  gen_cmd->add_option("--seed", gen_args.seed, "rank_deficient_sym basis seed")->capture_default_str();
  gen_cmd->add_option("--solution", gen_args.solution, "Exact solution: ones | smooth_sine")->capture_default_str();
  gen_cmd->add_option("--out", gen_args.out, "Matrix CSV; stdout if omitted");
  gen_cmd->add_option("--rhs-out", gen_args.rhs_out, "Write f = A y_exact");
  gen_cmd->add_option("--solution-out", gen_args.solution_out, "Write y_exact");

  auto* verify_cmd = app.add_subcommand("verify", "Run the built-in invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_bad_input;
  }

  try {
    if (*shift_cmd) { return cmd_solve_shift(shift_args); }
    if (*tik_cmd) { return cmd_solve_tikhonov(tik_args); }
    if (*eval_cmd) { return cmd_eval_unbounded(eval_args); }
    if (*sweep_cmd) { return cmd_sweep(sweep_args); }
    if (*compare_cmd) { return cmd_compare(compare_args); }
    if (*bench_cmd) { return cmd_bench(bench_args); }
    if (*gen_cmd) { return cmd_generate(gen_args); }
    if (*verify_cmd) { return cmd_verify(); }
  } catch (const invalid_input& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_bad_input;
  } catch (const io_failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_violation;
  } catch (const numerical_failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_violation;
  }
  return exit_bad_input;
}
