#pragma once

// Test-only reference computations. None of these call into the library's
// solvers; they use textbook algorithms that are easy to audit.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

  using Mat = Eigen::MatrixXd;
  using Vec = Eigen::VectorXd;

  struct Eigenpairs {
    Vec values;   // ascending
    Mat vectors;  // columns
  };

  /// Cyclic Jacobi rotations for a symmetric matrix.
  inline Eigenpairs jacobi_eigen(Mat a, int max_sweeps = 100) {
    const Eigen::Index n = a.rows();
    Mat v = Mat::Identity(n, n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      double off = 0.0;
      for (Eigen::Index p = 0; p < n; ++p) {
        for (Eigen::Index q = p + 1; q < n; ++q) { off += a(p, q) * a(p, q); }
      }
      if (off <= 1e-300) { break; }
      for (Eigen::Index p = 0; p < n; ++p) {
        for (Eigen::Index q = p + 1; q < n; ++q) {
          if (a(p, q) == 0.0) { continue; }
          const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
          const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double s = t * c;
          for (Eigen::Index k = 0; k < n; ++k) {
            const double akp = a(k, p);
            const double akq = a(k, q);
            a(k, p) = c * akp - s * akq;
            a(k, q) = s * akp + c * akq;
          }
          for (Eigen::Index k = 0; k < n; ++k) {
            const double apk = a(p, k);
            const double aqk = a(q, k);
            a(p, k) = c * apk - s * aqk;
            a(q, k) = s * apk + c * aqk;
          }
          for (Eigen::Index k = 0; k < n; ++k) {
            const double vkp = v(k, p);
            const double vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
    std::vector<std::pair<double, Eigen::Index>> order;
    for (Eigen::Index k = 0; k < n; ++k) { order.emplace_back(a(k, k), k); }
    std::sort(order.begin(), order.end());
    Eigenpairs out{Vec(n), Mat(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
      out.values[k] = order[static_cast<std::size_t>(k)].first;
      out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)].second);
    }
    return out;
  }

  /// Singular triplets from Jacobi on A^T A (right vectors) with u_k = A v_k / sigma_k.
  struct SingularTriplets {
    Vec values;  // descending
    Mat left;
    Mat right;
  };

  inline SingularTriplets jacobi_svd(const Mat& a) {
    auto eig = jacobi_eigen(a.transpose() * a);
    const Eigen::Index n = a.cols();
    SingularTriplets out{Vec(n), Mat(a.rows(), n), Mat(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Index src = n - 1 - k;
      const double sigma = std::sqrt(std::max(0.0, eig.values[src]));
      out.values[k] = sigma;
      out.right.col(k) = eig.vectors.col(src);
      out.left.col(k) = sigma > 0 ? Vec(a * eig.vectors.col(src) / sigma) : Vec::Zero(a.rows());
    }
    return out;
  }

  inline Mat hilbert(Eigen::Index n) {
    Mat h(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) { h(i, j) = 1.0 / double(i + j + 1); }
    }
    return h;
  }

  inline Mat gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) { m(i, j) = normal(engine); }
    }
    return m;
  }

  inline Vec gaussian_vector(Eigen::Index n, std::uint64_t seed) { return gaussian(n, 1, seed).col(0); }

  /// v_n by the summed form sum_{j<n} H^j F f + H^n v0.
  inline Vec summed_iterate(const Mat& h, const Mat& f_op, const Vec& f, int n, const Vec& v0) {
    Vec forcing = f_op * f;
    Vec sum = Vec::Zero(h.rows());
    Vec term = forcing;
    for (int j = 0; j < n; ++j) {
      sum += term;
      term = h * term;
    }
    Vec hv = v0;
    for (int j = 0; j < n; ++j) { hv = h * hv; }
    return sum + hv;
  }

} // namespace oracle
