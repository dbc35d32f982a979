// Recovers a smooth vector from noisy Hilbert-matrix data with the complex
// shift, next to Tikhonov at alpha = a^2.

#include <cstdio>
#include <vector>

#include <shiftreg/shiftreg.hpp>

int main() {
  using namespace shiftreg;
  const auto problem = generate_problem({.kind = ProblemKind::hilbert, .dim = 12});
  const std::vector<double> deltas = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  const auto rows = compare_methods(problem.symmetric_operator(), problem.f, deltas, ShiftSchedule<double>{}, 1,
                                    std::optional<Vector<double>>{problem.y_exact});

  std::printf("%10s %10s %14s %14s %12s %12s\n", "delta", "a", "err_shift", "err_tikhonov", "kappa_shift",
              "kappa_normal");
  for (const auto& r : rows) {
    std::printf("%10.1e %10.2e %14.6e %14.6e %12.4e %12.4e\n", r.delta, r.a, r.error_shift, r.error_tikhonov,
                r.kappa_shift, r.kappa_normal);
  }
  return 0;
}
