#pragma once

//
// ... Standard header files
//
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>

//
// ... Eigen header files
//
#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace shiftreg {

  using Index = Eigen::Index;

  template <typename Real>
  using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

  template <typename Real>
  using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  template <typename Real>
  using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

  template <typename Real>
  using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

  /// Largest operator dimension the dense routines are meant for.
  inline constexpr Index max_dense_dim = 2000;

  /// Bad arguments: shape mismatch, out-of-range parameters, malformed data.
  class invalid_input : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
  };

  /// A dense kernel failed (eigensolver did not converge, factorization broke down).
  class numerical_failure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
  };

  namespace detail {

    template <typename Derived>
    bool all_finite(const Eigen::MatrixBase<Derived>& m) {
      return m.allFinite();
    }

    inline void require(bool condition, const std::string& message) {
      if (!condition) { throw invalid_input(message); }
    }

    inline void require_dims(Index expected, Index actual, const char* what) {
      if (expected != actual) {
        std::ostringstream os;
        os << what << ": dimension mismatch (expected " << expected << ", got " << actual << ")";
        throw invalid_input(os.str());
      }
    }

  } // namespace detail

  /**
   * @brief Dense real symmetric matrix, the finite stand-in for a selfadjoint operator.
   *
   * Construction checks finiteness and symmetry to 1e-12 relative to the
   * largest entry. The stored matrix is exactly symmetrized.
   */
  template <typename Real = double>
  class SymmetricOperator {
  public:
    explicit SymmetricOperator(Matrix<Real> entries) : entries_{std::move(entries)} {
      detail::require(entries_.rows() > 0, "SymmetricOperator: empty matrix");
      detail::require(entries_.rows() == entries_.cols(), "SymmetricOperator: matrix is not square");
      detail::require(detail::all_finite(entries_), "SymmetricOperator: non-finite entry");
      const Real scale = entries_.cwiseAbs().maxCoeff();
      const Real asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
      if (asym > Real(1e-12) * scale) {
        std::ostringstream os;
        os << "SymmetricOperator: asymmetry " << asym << " exceeds 1e-12 * max|a_ij| = " << Real(1e-12) * scale;
        throw invalid_input(os.str());
      }
      entries_ = (Real(0.5) * (entries_ + entries_.transpose())).eval();
    }

    [[nodiscard]] Index dim() const noexcept { return entries_.rows(); }
    [[nodiscard]] const Matrix<Real>& matrix() const noexcept { return entries_; }

  private:
    Matrix<Real> entries_;
  };

  /// Dense real m x n matrix standing for a closed, densely defined operator.
  template <typename Real = double>
  class GeneralOperator {
  public:
    explicit GeneralOperator(Matrix<Real> entries) : entries_{std::move(entries)} {
      detail::require(entries_.rows() > 0 && entries_.cols() > 0, "GeneralOperator: empty matrix");
      detail::require(detail::all_finite(entries_), "GeneralOperator: non-finite entry");
    }

    explicit GeneralOperator(const SymmetricOperator<Real>& op) : entries_{op.matrix()} {}

    [[nodiscard]] Index rows() const noexcept { return entries_.rows(); }
    [[nodiscard]] Index cols() const noexcept { return entries_.cols(); }
    [[nodiscard]] const Matrix<Real>& matrix() const noexcept { return entries_; }

  private:
    Matrix<Real> entries_;
  };

  /**
   * @brief Eigenpairs of a symmetric operator, eigenvalues ascending.
   *
   * Column k of `eigenvectors` pairs with `eigenvalues[k]`. In finite
   * dimensions the spectral family E_s is the sum of the eigenprojectors
   * v_k v_k^T over lambda_k <= s.
   */
  template <typename Real = double>
  struct SpectralDecomposition {
    Vector<Real> eigenvalues;
    Matrix<Real> eigenvectors;
    Index source_dim{};

    [[nodiscard]] Real max_abs_eigenvalue() const {
      return eigenvalues.size() == 0 ? Real(0) : eigenvalues.cwiseAbs().maxCoeff();
    }

    /// Coefficients <x, v_k> of x in the eigenbasis.
    template <typename Derived>
    [[nodiscard]] auto coefficients(const Eigen::MatrixBase<Derived>& x) const {
      detail::require_dims(source_dim, x.size(), "SpectralDecomposition::coefficients");
      return (eigenvectors.transpose().template cast<typename Derived::Scalar>() * x).eval();
    }
  };

  /**
   * @brief Noisy data f_delta with its noise level.
   *
   * `noise` is the injected perturbation, ||noise|| == delta to working
   * precision. The realized difference f_delta - f additionally carries the
   * rounding of the sum, of order eps * ||f||.
   */
  template <typename Real = double>
  struct NoisyDatum {
    Vector<Real> f_delta;
    Vector<Real> noise;
    Real delta{};
  };

  template <typename Real = double>
  struct MinimalNormSolution {
    Vector<Real> y;
    Real rank_tolerance{};
    Index effective_rank{};
    /// ||A y - f||, nonzero when f has a component outside the range of A.
    Real residual{};
  };

  /// Which null space a projector targets: N = ker A or N* = ker A^T.
  enum class NullSpace { domain, adjoint };

  /**
   * @brief Symmetric eigendecomposition, eigenvalues ascending.
   *
   * Throws numerical_failure carrying dim and ||A||_F if the solver does
   * not converge.
   */
  template <typename Real>
  SpectralDecomposition<Real> eigendecompose(const SymmetricOperator<Real>& op) {
    Eigen::SelfAdjointEigenSolver<Matrix<Real>> solver(op.matrix(), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
      std::ostringstream os;
      os << "eigendecompose: eigensolver did not converge (dim=" << op.dim()
         << ", ||A||_F=" << op.matrix().norm() << ")";
      throw numerical_failure(os.str());
    }
    return {solver.eigenvalues(), solver.eigenvectors(), op.dim()};
  }

  /// Default cutoff for numerically zero eigenvalues: eps * dim * max|lambda|.
  template <typename Real>
  Real default_rank_tolerance(const SpectralDecomposition<Real>& decomp) {
    return std::numeric_limits<Real>::epsilon() * Real(decomp.source_dim) * decomp.max_abs_eigenvalue();
  }

  namespace detail {

    template <typename Real>
    struct ThinSvd {
      Vector<Real> singular_values;
      Matrix<Real> left;
      Matrix<Real> right;
    };

    template <typename Real>
    ThinSvd<Real> thin_svd(const Matrix<Real>& a) {
      Eigen::BDCSVD<Matrix<Real>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
      if (svd.info() != Eigen::Success) {
        std::ostringstream os;
        os << "svd: did not converge (" << a.rows() << "x" << a.cols() << ", ||A||_F=" << a.norm() << ")";
        throw numerical_failure(os.str());
      }
      return {svd.singularValues(), svd.matrixU(), svd.matrixV()};
    }

    template <typename Real>
    Real default_svd_tolerance(const ThinSvd<Real>& svd, Index rows, Index cols) {
      const Real smax = svd.singular_values.size() ? svd.singular_values.maxCoeff() : Real(0);
      return std::numeric_limits<Real>::epsilon() * Real(std::max(rows, cols)) * smax;
    }

  } // namespace detail

  /**
   * @brief Minimal-norm least-squares solution y = A^+ f.
   *
   * Eigen-directions with |lambda_k| <= rank_tolerance are dropped, so y is
   * orthogonal to the numerical null space.
   */
  template <typename Real, typename Derived>
  MinimalNormSolution<Real> minimal_norm_solution(
    const SymmetricOperator<Real>& op,
    const Eigen::MatrixBase<Derived>& f,
    std::optional<std::type_identity_t<Real>> rank_tolerance = std::nullopt) {
    detail::require_dims(op.dim(), f.size(), "minimal_norm_solution");
    const auto decomp = eigendecompose(op);
    const Real tol = rank_tolerance.value_or(default_rank_tolerance(decomp));
    detail::require(tol >= Real(0), "minimal_norm_solution: rank_tolerance must be >= 0");

    Vector<Real> coeff = decomp.eigenvectors.transpose() * f.template cast<Real>();
    Index rank = 0;
    for (Index k = 0; k < coeff.size(); ++k) {
      const Real lambda = decomp.eigenvalues[k];
      if (std::abs(lambda) > tol) {
        coeff[k] /= lambda;
        ++rank;
      } else {
        coeff[k] = Real(0);
      }
    }
    Vector<Real> y = decomp.eigenvectors * coeff;
    const Real residual = (op.matrix() * y - f.template cast<Real>()).norm();
    return {std::move(y), tol, rank, residual};
  }

  /// Minimal-norm least-squares solution for a rectangular operator, via SVD.
  template <typename Real, typename Derived>
  MinimalNormSolution<Real> minimal_norm_solution(
    const GeneralOperator<Real>& op,
    const Eigen::MatrixBase<Derived>& f,
    std::optional<std::type_identity_t<Real>> rank_tolerance = std::nullopt) {
    detail::require_dims(op.rows(), f.size(), "minimal_norm_solution");
    const auto svd = detail::thin_svd<Real>(op.matrix());
    const Real tol = rank_tolerance.value_or(detail::default_svd_tolerance(svd, op.rows(), op.cols()));
    detail::require(tol >= Real(0), "minimal_norm_solution: rank_tolerance must be >= 0");

    Vector<Real> coeff = svd.left.transpose() * f.template cast<Real>();
    Index rank = 0;
    for (Index k = 0; k < coeff.size(); ++k) {
      const Real sigma = svd.singular_values[k];
      if (sigma > tol) {
        coeff[k] /= sigma;
        ++rank;
      } else {
        coeff[k] = Real(0);
      }
    }
    Vector<Real> y = svd.right * coeff;
    const Real residual = (op.matrix() * y - f.template cast<Real>()).norm();
    return {std::move(y), tol, rank, residual};
  }

  /**
   * @brief Orthogonal projector onto the numerical null space of A or A^T.
   *
   * For a symmetric operator N and N* coincide. For a rectangular m x n
   * operator the N projector is n x n and the N* projector is m x m.
   */
  template <typename Real>
  Matrix<Real> null_projector(
    const SymmetricOperator<Real>& op,
    std::optional<std::type_identity_t<Real>> rank_tolerance = std::nullopt,
    [[maybe_unused]] NullSpace which = NullSpace::domain) {
    const auto decomp = eigendecompose(op);
    const Real tol = rank_tolerance.value_or(default_rank_tolerance(decomp));
    detail::require(tol >= Real(0), "null_projector: rank_tolerance must be >= 0");
    Matrix<Real> p = Matrix<Real>::Zero(op.dim(), op.dim());
    for (Index k = 0; k < decomp.eigenvalues.size(); ++k) {
      if (std::abs(decomp.eigenvalues[k]) <= tol) {
        const auto v = decomp.eigenvectors.col(k);
        p.noalias() += v * v.transpose();
      }
    }
    return (Real(0.5) * (p + p.transpose())).eval();
  }

  template <typename Real>
  Matrix<Real> null_projector(
    const GeneralOperator<Real>& op,
    std::optional<std::type_identity_t<Real>> rank_tolerance = std::nullopt,
    NullSpace which = NullSpace::domain) {
    const auto svd = detail::thin_svd<Real>(op.matrix());
    const Real tol = rank_tolerance.value_or(detail::default_svd_tolerance(svd, op.rows(), op.cols()));
    detail::require(tol >= Real(0), "null_projector: rank_tolerance must be >= 0");
    const Matrix<Real>& basis = which == NullSpace::domain ? svd.right : svd.left;
    const Index dim = which == NullSpace::domain ? op.cols() : op.rows();

    // P = I - sum over retained singular vectors
    Matrix<Real> p = Matrix<Real>::Identity(dim, dim);
    for (Index k = 0; k < svd.singular_values.size(); ++k) {
      if (svd.singular_values[k] > tol) {
        const auto v = basis.col(k);
        p.noalias() -= v * v.transpose();
      }
    }
    return (Real(0.5) * (p + p.transpose())).eval();
  }

  /**
   * @brief Deterministic noise injection with ||f_delta - f|| == delta.
   *
   * The direction is a seeded standard-normal draw normalized to unit
   * length. `stream` selects an independent substream for the same seed.
   * A zero draw is retried on the next stream.
   */
  template <typename Real, typename Derived>
  NoisyDatum<Real> make_noisy(
    const Eigen::MatrixBase<Derived>& f, Real delta, std::uint64_t seed, std::uint64_t stream = 0) {
    detail::require(std::isfinite(delta) && delta >= Real(0), "make_noisy: delta must be finite and >= 0");
    Vector<Real> base = f.template cast<Real>();
    if (delta == Real(0) || base.size() == 0) {
      Vector<Real> zero = Vector<Real>::Zero(base.size());
      return {std::move(base), std::move(zero), delta};
    }

    for (;; ++stream) {
      std::seed_seq seq{
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
      std::mt19937_64 engine(seq);
      std::normal_distribution<double> normal(0.0, 1.0);
      Vector<Real> e(base.size());
      for (Index i = 0; i < e.size(); ++i) { e[i] = static_cast<Real>(normal(engine)); }
      const Real norm = e.norm();
      if (norm > Real(0)) {
        Vector<Real> noise = (delta / norm) * e;
        base += noise;
        return {std::move(base), std::move(noise), delta};
      }
    }
  }

} // namespace shiftreg
