#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <shiftreg/baseline.hpp>
#include <shiftreg/problems.hpp>
#include <shiftreg/shift.hpp>
#include <shiftreg/unbounded.hpp>

namespace shiftreg {

  struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
  };

  namespace detail {

    inline Matrix<double> seeded_gaussian(Index rows, Index cols, std::uint64_t seed) {
      std::mt19937_64 engine(seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      Matrix<double> m(rows, cols);
      for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) { m(i, j) = normal(engine); }
      }
      return m;
    }

    inline std::vector<Matrix<double>> verification_operators() {
      std::vector<Matrix<double>> ops;
      for (Index n : {4, 8, 12}) { ops.push_back(generate_problem({.kind = ProblemKind::hilbert, .dim = n}).A); }
      ops.push_back(generate_problem({.kind = ProblemKind::rank_deficient_sym, .dim = 8}).A);
      ops.push_back(generate_problem({.kind = ProblemKind::first_derivative_rect, .dim = 32}).A);
      for (std::uint64_t s = 0; s < 5; ++s) { ops.push_back(seeded_gaussian(8, 8, 1000 + s)); }
      return ops;
    }

    template <typename Fn>
    CheckResult run_check(std::string name, Fn&& fn) {
      CheckResult r{std::move(name), false, {}};
      try {
        std::ostringstream detail;
        r.passed = fn(detail);
        r.detail = detail.str();
      } catch (const std::exception& e) {
        r.detail = std::string("exception: ") + e.what();
      }
      return r;
    }

  } // namespace detail

  /**
   * @brief Quick self-check of the main invariants on small built-in problems.
   *
   * Covers the ||F|| <= 1/2 bound and the commutation identity, the
   * condition-number identity, both error bounds, and agreement of the
   * direct and spectral resolvent solves.
   */
  inline std::vector<CheckResult> verify_invariants() {
    std::vector<CheckResult> results;

    results.push_back(detail::run_check("lemma1_norm", [](std::ostream& os) {
      double worst = 0.0;
      for (const auto& a : detail::verification_operators()) {
        worst = std::max(worst, verify_lemma1(build_operators(GeneralOperator<double>(a))));
      }
      Matrix<double> unit = Matrix<double>::Zero(2, 2);
      unit(0, 0) = 1.0;
      unit(1, 1) = 3.0;
      const double attained = verify_lemma1(build_operators(GeneralOperator<double>(unit)));
      os << "max ||F|| = " << worst << ", at sigma=1: " << attained;
      return worst <= 0.5 + 1e-12 && std::abs(attained - 0.5) <= 1e-8;
    }));

    results.push_back(detail::run_check("lemma1_commutation", [](std::ostream& os) {
      double worst = 0.0;
      for (const auto& a : detail::verification_operators()) {
        const auto ops = build_operators(GeneralOperator<double>(a));
        worst = std::max(worst, commutation_residual(ops) / (1.0 + a.norm()));
      }
      os << "max relative residual = " << worst;
      return worst <= 1e-10;
    }));

    results.push_back(detail::run_check("condition_identity", [](std::ostream& os) {
      double worst = 0.0;
      for (Index n : {8, 10, 12}) {
        const auto op = generate_problem({.kind = ProblemKind::hilbert, .dim = n}).symmetric_operator();
        const auto decomp = eigendecompose(op);
        for (double a : {1e-2, 1e-4, 1e-6}) {
          const double direct = shift_condition_number(op, a);
          const double normal = condition_numbers(decomp, a).kappa_normal;
          worst = std::max(worst, std::abs(direct - std::sqrt(normal)) / direct);
        }
      }
      os << "max relative gap = " << worst;
      return worst <= 1e-8;
    }));

    results.push_back(detail::run_check("bound_eq4", [](std::ostream& os) {
      const auto problem = generate_problem({.kind = ProblemKind::hilbert, .dim = 10});
      const auto op = problem.symmetric_operator();
      std::size_t violations = 0;
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto report = convergence_sweep(op, problem.f, std::vector<double>{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7},
                                              ShiftSchedule<double>{}, seed,
                                              std::optional<Vector<double>>{problem.y_exact});
        for (const auto& row : report.rows) { violations += row.bound_violated ? 1 : 0; }
      }
      os << violations << " violations";
      return violations == 0;
    }));

    results.push_back(detail::run_check("bound_eq9", [](std::ostream& os) {
      const auto problem = generate_problem({.kind = ProblemKind::first_derivative_rect, .dim = 32});
      const auto ops = build_operators(problem.general_operator());
      const Vector<double> af = problem.f;
      std::size_t violations = 0;
      for (double delta : {1e-2, 1e-4}) {
        const auto datum = make_noisy(problem.y_exact, delta, 7);
        const Index n_max = 10 * schedule_n(IterationSchedule<double>{}, delta);
        Vector<double> v = Vector<double>::Zero(ops.rows());
        const Vector<double> forcing = ops.F * datum.f_delta;
        for (Index n = 1; n <= n_max; ++n) {
          v = ops.H * v + forcing;
          if ((v - af).norm() > bound_eq9(ops, Vector<double>(-af), n, delta) + 1e-8 * (1.0 + af.norm())) {
            ++violations;
          }
        }
      }
      os << violations << " violations";
      return violations == 0;
    }));

    results.push_back(detail::run_check("resolvent_oracle", [](std::ostream& os) {
      double worst = 0.0;
      for (Index n : {4, 8}) {
        const auto problem = generate_problem({.kind = ProblemKind::hilbert, .dim = n});
        const auto op = problem.symmetric_operator();
        const auto decomp = eigendecompose(op);
        for (double a : {1e-1, 1e-2, 1e-3}) {
          const auto direct = solve_shift(op, problem.f, a);
          const auto spectral = solve_shift_spectral(decomp, problem.f, a);
          worst = std::max(worst, (direct - spectral).norm() / spectral.norm());
        }
      }
      os << "max relative gap = " << worst;
      return worst <= 1e-10;
    }));

    return results;
  }

} // namespace shiftreg
