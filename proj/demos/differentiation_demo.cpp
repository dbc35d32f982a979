// Stable differentiation of noisy samples of sin(pi x) on [0, 1] with the
// fixed-point evaluator, compared against naive finite differences.

#include <cstdio>

#include <shiftreg/shiftreg.hpp>

int main() {
  using namespace shiftreg;
  const auto problem = generate_problem({.kind = ProblemKind::first_derivative_rect, .dim = 64});
  const auto ops = build_operators(problem.general_operator());
  std::printf("||A (I + A^T A)^{-1}|| = %.6f\n", verify_lemma1(ops));

  EvalOptions<double> options;
  options.exact_Af = problem.f;
  std::printf("%10s %8s %14s %14s %14s\n", "delta", "n", "err_iterate", "bound", "err_naive");
  for (double delta : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const auto datum = make_noisy(problem.y_exact, delta, 2);
    const auto report = evaluate_unbounded(ops, datum.f_delta, delta, IterationSchedule<double>{}, options);
    const double naive = (problem.A * datum.f_delta - problem.f).norm();
    std::printf("%10.1e %8lld %14.6e %14.6e %14.6e\n", delta, static_cast<long long>(report.n_used),
                *report.error_vs_Af, *report.bound_eq9, naive);
  }
  return 0;
}
