#include "gkflow/linalg.hpp"

#include <Eigen/SVD>

#include <limits>

namespace gkflow::linalg {

namespace {

template <class M>
int rank_from_singular(const M& s, double rel_tol) {
    if (s.size() == 0 || s(0) <= 0.0) return 0;
    const double cut = rel_tol * s(0);
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cut) ++r;
    return r;
}

}  // namespace

int numerical_rank(const CMat& a, double rel_tol) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<CMat> svd(a);
    return rank_from_singular(svd.singularValues(), rel_tol);
}

int numerical_rank(const Mat& a, double rel_tol) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(a);
    return rank_from_singular(svd.singularValues(), rel_tol);
}

int rank_above(const Mat& a, double abs_cut) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(a);
    int r = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > abs_cut) ++r;
    return r;
}

CMat column_space(const CMat& a, double rel_tol) {
    if (a.cols() == 0) return CMat(a.rows(), 0);
    Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeThinU);
    const int r = rank_from_singular(svd.singularValues(), rel_tol);
    return svd.matrixU().leftCols(r);
}

CMat null_space(const CMat& a, double rel_tol) {
    const auto n = a.cols();
    if (a.rows() == 0) return CMat::Identity(n, n);
    Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullV);
    const int r = rank_from_singular(svd.singularValues(), rel_tol);
    return svd.matrixV().rightCols(n - r);
}

Mat null_space(const Mat& a, double rel_tol) {
    const auto n = a.cols();
    if (a.rows() == 0) return Mat::Identity(n, n);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    const int r = rank_from_singular(svd.singularValues(), rel_tol);
    return svd.matrixV().rightCols(n - r);
}

double subspace_distance(const CMat& a, const CMat& b) {
    const CMat ua = column_space(a);
    const CMat ub = column_space(b);
    if (ua.cols() != ub.cols() || ua.rows() != ub.rows()) return std::numeric_limits<double>::infinity();
    const CMat diff = ua * ua.adjoint() - ub * ub.adjoint();
    if (diff.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMat> svd(diff);
    return svd.singularValues()(0);
}

int intersection_dim(const CMat& a, const CMat& b, double rel_tol) {
    const CMat ua = column_space(a, rel_tol);
    const CMat ub = column_space(b, rel_tol);
    CMat joined(ua.rows(), ua.cols() + ub.cols());
    joined << ua, ub;
    return static_cast<int>(ua.cols() + ub.cols()) - numerical_rank(joined, rel_tol);
}

bool contained_in(const CMat& sub, const CMat& space, double abs_tol) {
    const CMat u = column_space(space);
    const CMat residual = sub - u * (u.adjoint() * sub);
    return max_abs(residual) <= abs_tol;
}

Mat standard_complex_structure(int n) {
    Mat j = Mat::Zero(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        j(2 * k + 1, 2 * k) = 1.0;
        j(2 * k, 2 * k + 1) = -1.0;
    }
    return j;
}

Mat sym_sqrt(const Mat& s) {
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    const Vec w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace gkflow::linalg
