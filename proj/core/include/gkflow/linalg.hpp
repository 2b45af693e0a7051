#pragma once

#include <Eigen/Dense>

#include <complex>

namespace gkflow {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

namespace linalg {

/// Default relative rank tolerance (fraction of the largest singular value).
inline constexpr double kRankTolerance = 1e-9;

[[nodiscard]] int numerical_rank(const CMat& a, double rel_tol = kRankTolerance);
[[nodiscard]] int numerical_rank(const Mat& a, double rel_tol = kRankTolerance);

/// Number of singular values above an absolute cutoff.
[[nodiscard]] int rank_above(const Mat& a, double abs_cut);

/// dim ker(a), counting singular values at most `abs_cut` as zero.
[[nodiscard]] inline int kernel_dim(const Mat& a, double abs_cut) { return static_cast<int>(a.cols()) - rank_above(a, abs_cut); }

/// Orthonormal basis of the column space.
[[nodiscard]] CMat column_space(const CMat& a, double rel_tol = kRankTolerance);

/// Orthonormal basis of the kernel. A zero matrix has the full kernel.
[[nodiscard]] CMat null_space(const CMat& a, double rel_tol = kRankTolerance);
[[nodiscard]] Mat null_space(const Mat& a, double rel_tol = kRankTolerance);

/// Spectral norm of the difference of orthogonal projectors; +inf on dimension mismatch.
/// Inputs need not be orthonormal.
[[nodiscard]] double subspace_distance(const CMat& a, const CMat& b);

/// dim(span a ∩ span b).
[[nodiscard]] int intersection_dim(const CMat& a, const CMat& b, double rel_tol = kRankTolerance);

/// True if every column of `sub` lies in span(`space`) to the given tolerance.
[[nodiscard]] bool contained_in(const CMat& sub, const CMat& space, double abs_tol);

[[nodiscard]] inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

template <class Derived>
[[nodiscard]] double max_abs(const Eigen::MatrixBase<Derived>& a) {
    return a.size() == 0 ? 0.0 : static_cast<double>(a.cwiseAbs().maxCoeff());
}

/// Antisymmetric part residual ‖a + aᵀ‖∞.
[[nodiscard]] inline double skew_defect(const Mat& a) { return max_abs(a + a.transpose()); }
[[nodiscard]] inline double symmetry_defect(const Mat& a) { return max_abs(a - a.transpose()); }

/// Standard complex structure on R^{2n} in coordinates (x1, y1, ..., xn, yn): ∂x ↦ ∂y.
[[nodiscard]] Mat standard_complex_structure(int n);

/// Square root of a symmetric positive semidefinite matrix.
[[nodiscard]] Mat sym_sqrt(const Mat& s);

[[nodiscard]] inline bool is_finite(const Mat& a) { return a.allFinite(); }

}  // namespace linalg
}  // namespace gkflow
