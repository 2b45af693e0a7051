#include "gkflow/gvs_core.hpp"

#include "gkflow/errors.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace gkflow::gvs {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_square(const Mat& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() == 0)
        throw DimensionError(std::string(what) + " must be square of positive even size");
}

void require_complex_structure(const Mat& i_map) {
    require_square(i_map, "complex structure");
    const auto n = i_map.rows();
    if (linalg::max_abs(i_map * i_map + Mat::Identity(n, n)) > kStructureTolerance * (1.0 + i_map.squaredNorm()))
        throw InvalidStructureError("I^2 != -1");
}

CMat stack(const CMat& top, const CMat& bottom) {
    CMat out(top.rows() + bottom.rows(), top.cols());
    out << top, bottom;
    return out;
}

CVec unit(int dim, int k) {
    CVec e = CVec::Zero(dim);
    e(k) = 1.0;
    return e;
}

}  // namespace

CVec DoubleVector::stacked() const {
    CVec out(tangent.size() + cotangent.size());
    out << tangent, cotangent;
    return out;
}

Complex natural_pairing(const DoubleVector& u, const DoubleVector& v) {
    if (u.tangent.size() != v.tangent.size() || u.cotangent.size() != v.cotangent.size() ||
        u.tangent.size() != u.cotangent.size())
        throw DimensionError("pairing operands differ in dimension");
    return 0.5 * (u.cotangent.transpose() * v.tangent + v.cotangent.transpose() * u.tangent)(0, 0);
}

Mat pairing_matrix(int dim) {
    Mat p = Mat::Zero(2 * dim, 2 * dim);
    p.topRightCorner(dim, dim).setIdentity();
    p.bottomLeftCorner(dim, dim).setIdentity();
    return 0.5 * p;
}

GeneralizedEndomorphism::GeneralizedEndomorphism(Mat full) : full_(std::move(full)), dim_(0) {
    if (full_.rows() != full_.cols() || full_.rows() % 4 != 0 || full_.rows() == 0)
        throw DimensionError("generalized endomorphism must be 4n x 4n");
    dim_ = static_cast<int>(full_.rows() / 2);
}

GeneralizedEndomorphism GeneralizedEndomorphism::from_blocks(const Mat& a, const Mat& p, const Mat& s, const Mat& d) {
    const auto dim = a.rows();
    if (a.cols() != dim || p.rows() != dim || p.cols() != dim || s.rows() != dim || s.cols() != dim ||
        d.rows() != dim || d.cols() != dim)
        throw DimensionError("block sizes differ");
    Mat full(2 * dim, 2 * dim);
    full << a, p, s, d;
    return GeneralizedEndomorphism(std::move(full));
}

GeneralizedEndomorphism GeneralizedEndomorphism::operator*(const GeneralizedEndomorphism& o) const {
    if (o.dim_ != dim_) throw DimensionError("generalized endomorphism sizes differ");
    return GeneralizedEndomorphism(full_ * o.full_);
}

GeneralizedEndomorphism gcs_from_complex(const Mat& complex_structure) {
    require_complex_structure(complex_structure);
    const auto dim = complex_structure.rows();
    return GeneralizedEndomorphism::from_blocks(-complex_structure, Mat::Zero(dim, dim), Mat::Zero(dim, dim),
                                                complex_structure.transpose());
}

GeneralizedEndomorphism gcs_from_symplectic(const Mat& symplectic) {
    require_square(symplectic, "symplectic form");
    if (linalg::skew_defect(symplectic) > kStructureTolerance) throw InvalidStructureError("omega not antisymmetric");
    const Mat flat = flat_of(symplectic);
    Eigen::FullPivLU<Mat> lu(flat);
    if (!lu.isInvertible()) throw InvalidStructureError("omega is not invertible");
    const auto dim = symplectic.rows();
    return GeneralizedEndomorphism::from_blocks(Mat::Zero(dim, dim), -lu.inverse(), flat, Mat::Zero(dim, dim));
}

GeneralizedEndomorphism gcs_from_poisson(const Mat& complex_structure, const CMat& sigma) {
    require_complex_structure(complex_structure);
    const auto dim = complex_structure.rows();
    if (sigma.rows() != dim || sigma.cols() != dim) throw DimensionError("bivector size mismatch");
    const Mat q = sigma.real();
    const double scale = 1.0 + q.norm();
    if (linalg::skew_defect(q) > kStructureTolerance * scale) throw InvalidStructureError("Q not antisymmetric");
    if (linalg::max_abs(complex_structure * q - q * complex_structure.transpose()) > kStructureTolerance * scale)
        throw InvalidStructureError("Re(sigma) is not of holomorphic type");
    return GeneralizedEndomorphism::from_blocks(-complex_structure, 4.0 * complex_structure * q, Mat::Zero(dim, dim),
                                                complex_structure.transpose());
}

CMat holomorphic_bivector(int n, int i, int j, Complex c) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw DimensionError("holomorphic index out of range");
    const int dim = 2 * n;
    auto partial_z = [dim](int k) {
        CVec v = CVec::Zero(dim);
        v(2 * k) = 0.5;
        v(2 * k + 1) = Complex(0.0, -0.5);
        return v;
    };
    const CVec zi = partial_z(i);
    const CVec zj = partial_z(j);
    return c * (zj * zi.transpose() - zi * zj.transpose());
}

GcsReport validate_gcs(const GeneralizedEndomorphism& j, double tol) {
    const Mat& m = j.matrix();
    const auto size = m.rows();
    const Mat pairing = pairing_matrix(j.dim());
    GcsReport report;
    report.square_residual = linalg::max_abs(m * m + Mat::Identity(size, size));
    report.orthogonality_defect = linalg::max_abs(m.transpose() * pairing * m - pairing);
    const double scale = 1.0 + m.squaredNorm();
    report.pass = report.square_residual <= tol * scale && report.orthogonality_defect <= tol * scale;
    return report;
}

Mat poisson_of(const GeneralizedEndomorphism& j, double tol) {
    const Mat p = j.poisson_block();
    if (linalg::skew_defect(p) > tol * (1.0 + j.matrix().norm()))
        throw InvalidStructureError("Poisson block is not antisymmetric");
    return 0.5 * (p - p.transpose());
}

int type_of(const GeneralizedEndomorphism& j, double rel_tol) {
    const double cut = rel_tol * std::max(1.0, j.matrix().norm());
    return (j.dim() - linalg::rank_above(j.poisson_block(), cut)) / 2;
}

Mat b_shear(const Mat& b_components) {
    const auto dim = b_components.rows();
    if (b_components.cols() != dim) throw DimensionError("B must be square");
    if (linalg::skew_defect(b_components) > kStructureTolerance * (1.0 + b_components.norm()))
        throw InvalidStructureError("B not antisymmetric");
    Mat shear = Mat::Identity(2 * dim, 2 * dim);
    shear.bottomLeftCorner(dim, dim) = b_components;
    return shear;
}

GeneralizedEndomorphism b_transform(const GeneralizedEndomorphism& j, const Mat& b_components) {
    if (b_components.rows() != j.dim()) throw DimensionError("B size mismatch");
    return GeneralizedEndomorphism(b_shear(b_components) * j.matrix() * b_shear(-b_components));
}

DiracSubspace::DiracSubspace(const CMat& columns) : basis_(linalg::column_space(columns)) {
    if (columns.rows() % 2 != 0) throw DimensionError("Dirac subspace rows must be even");
}

double DiracSubspace::isotropy_defect() const {
    const CMat gram = basis_.transpose() * pairing_matrix(space_dim()).cast<Complex>() * basis_;
    return linalg::max_abs(gram);
}

DiracSubspace DiracSubspace::transpose() const { return DiracSubspace(stack(tangent_parts(), -cotangent_parts())); }

int DiracSubspace::real_intersection_dim() const { return linalg::intersection_dim(basis_, basis_.conjugate()); }

CMat DiracSubspace::cotangent_kernel() const {
    const CMat kernel = linalg::null_space(tangent_parts());
    return linalg::column_space(cotangent_parts() * kernel);
}

double subspace_distance(const DiracSubspace& a, const DiracSubspace& b) {
    return linalg::subspace_distance(a.basis(), b.basis());
}

DiracSubspace tangent_space(int dim) {
    return DiracSubspace(stack(CMat::Identity(dim, dim), CMat::Zero(dim, dim)));
}

DiracSubspace bivector_graph(const CMat& bivector_map) {
    const auto dim = bivector_map.rows();
    return DiracSubspace(stack(bivector_map, CMat::Identity(dim, dim)));
}

DiracSubspace form_graph(const CMat& form_flat) {
    const auto dim = form_flat.rows();
    return DiracSubspace(stack(CMat::Identity(dim, dim), form_flat));
}

DiracSubspace holomorphic_poisson_dirac(const Mat& complex_structure, const CMat& sigma) {
    require_complex_structure(complex_structure);
    const auto dim = complex_structure.rows();
    const CMat id = CMat::Identity(dim, dim);
    const CMat antiholomorphic = linalg::null_space(CMat(complex_structure.cast<Complex>() + kI * id));
    const CMat holomorphic_forms = linalg::null_space(CMat(complex_structure.transpose().cast<Complex>() - kI * id));
    CMat columns = CMat::Zero(2 * dim, antiholomorphic.cols() + holomorphic_forms.cols());
    columns.topLeftCorner(dim, antiholomorphic.cols()) = antiholomorphic;
    columns.topRightCorner(dim, holomorphic_forms.cols()) = sigma * holomorphic_forms;
    columns.bottomRightCorner(dim, holomorphic_forms.cols()) = holomorphic_forms;
    return DiracSubspace(columns);
}

DiracSubspace i_eigenbundle(const GeneralizedEndomorphism& j) {
    const auto size = j.matrix().rows();
    const CMat shifted = j.matrix().cast<Complex>() - kI * CMat::Identity(size, size);
    return DiracSubspace(linalg::null_space(shifted));
}

GeneralizedEndomorphism dirac_to_gcs(const DiracSubspace& l) {
    const int meet = l.real_intersection_dim();
    if (meet != 0) throw NondegeneracyError("L meets its conjugate", meet);
    if (!l.is_maximal()) throw InvalidStructureError("L is not maximal");
    const auto size = l.basis().rows();
    CMat frame(size, size);
    frame << l.basis(), l.basis().conjugate();
    CVec eigen(size);
    eigen.head(size / 2).setConstant(kI);
    eigen.tail(size / 2).setConstant(-kI);
    const CMat j = frame * eigen.asDiagonal() * frame.inverse();
    return GeneralizedEndomorphism(j.real());
}

CMat clifford_matrix(const DoubleVector& u) { return interior_matrix(u.tangent) + wedge_matrix(u.cotangent); }

Spinor clifford_act(const DoubleVector& u, const Spinor& rho) {
    if (u.dim() != rho.dim() || u.cotangent.size() != u.tangent.size())
        throw DimensionError("Clifford operand dimensions differ");
    return rho.interior(u.tangent) + Spinor::covector(rho.dim(), u.cotangent).wedge(rho);
}

Annihilator annihilator(const Spinor& rho) {
    if (rho.max_abs() == 0.0) throw InvalidStructureError("zero spinor has no annihilator");
    const int dim = rho.dim();
    const CVec coeffs = rho.as_vector();
    CMat action(coeffs.size(), 2 * dim);
    for (int k = 0; k < dim; ++k) {
        action.col(k) = interior_matrix(unit(dim, k)) * coeffs;
        action.col(dim + k) = wedge_matrix(unit(dim, k)) * coeffs;
    }
    DiracSubspace kernel(linalg::null_space(action));
    const bool pure = kernel.dim() == dim;
    return {std::move(kernel), pure};
}

bool is_decomposable(const Spinor& omega_form, int degree, double tol) {
    const double scale = omega_form.max_abs();
    if (scale == 0.0 || !omega_form.is_homogeneous(degree, tol * scale)) return false;
    const int dim = omega_form.dim();
    const CVec coeffs = omega_form.as_vector();
    CMat action(coeffs.size(), dim);
    for (int k = 0; k < dim; ++k) action.col(k) = wedge_matrix(unit(dim, k)) * coeffs;
    return dim - linalg::numerical_rank(action) == degree;
}

Spinor pure_spinor_assemble(const Mat& b_components, const Mat& omega_components, const Spinor& decomposable) {
    const int dim = decomposable.dim();
    if (b_components.rows() != dim || omega_components.rows() != dim) throw DimensionError("form size mismatch");
    const int degree = decomposable.lowest_degree(0.0);
    if (degree < 0 || !is_decomposable(decomposable, degree)) throw InvalidStructureError("Omega is not decomposable");
    const CMat exponent = b_components.cast<Complex>() + kI * omega_components.cast<Complex>();
    return Spinor::two_form(exponent).exponential().wedge(decomposable);
}

Complex nondegeneracy_value(const Mat& omega_components, const Spinor& decomposable) {
    const int dim = decomposable.dim();
    const int degree = decomposable.lowest_degree(0.0);
    if (degree < 0 || !is_decomposable(decomposable, degree)) throw InvalidStructureError("Omega is not decomposable");
    const int power = dim / 2 - degree;
    if (power < 0) return 0.0;
    const Spinor omega = Spinor::two_form(omega_components.cast<Complex>());
    Spinor acc = Spinor::scalar(dim, 1.0);
    for (int p = 0; p < power; ++p) acc = acc.wedge(omega);
    return acc.wedge(decomposable).wedge(decomposable.conjugated()).top();
}

bool nondegeneracy_test(const Mat& omega_components, const Spinor& decomposable, double tol) {
    return std::abs(nondegeneracy_value(omega_components, decomposable)) > tol;
}

Complex chevalley_pairing(const Spinor& rho1, const Spinor& rho2) {
    if (rho1.dim() != rho2.dim()) throw DimensionError("spinor dimensions differ");
    return rho1.wedge(rho2.transposed()).top();
}

Spinor pure_spinor_of(const DiracSubspace& l) {
    if (!l.is_maximal()) throw InvalidStructureError("pure spinor needs a maximal subspace");
    const int dim = l.space_dim();
    Spinor omega_part = Spinor::scalar(dim, 1.0);
    const CMat kernel = l.cotangent_kernel();
    for (Eigen::Index c = 0; c < kernel.cols(); ++c)
        omega_part = omega_part.wedge(Spinor::covector(dim, kernel.col(c)));

    const CMat tangents = l.tangent_parts();
    const CMat image = linalg::column_space(tangents);
    if (image.cols() == 0) return omega_part;
    const CMat coords = image.adjoint() * tangents;
    const CMat restricted = l.cotangent_parts().transpose() * image;
    const CMat on_image = -coords.transpose().completeOrthogonalDecomposition().solve(restricted);
    const CMat skew = 0.5 * (on_image - on_image.transpose());
    const CMat left_inverse = image.adjoint();
    const CMat components = left_inverse.transpose() * skew * left_inverse;
    return Spinor::two_form(components).exponential().wedge(omega_part);
}

BaerSum baer_sum(const DiracSubspace& l1, const DiracSubspace& l2) {
    if (l1.space_dim() != l2.space_dim()) throw DimensionError("Baer sum operands differ in dimension");
    const CMat x1 = l1.tangent_parts();
    const CMat x2 = l2.tangent_parts();
    CMat fiber(x1.rows(), x1.cols() + x2.cols());
    fiber << x1, -x2;
    const CMat kernel = linalg::null_space(fiber);
    const CMat a = kernel.topRows(x1.cols());
    const CMat b = kernel.bottomRows(x2.cols());
    DiracSubspace sum(stack(x1 * a, l1.cotangent_parts() * a + l2.cotangent_parts() * b));
    const int meet = linalg::intersection_dim(l1.cotangent_kernel(), l2.cotangent_kernel());
    const bool maximal = sum.is_maximal();
    return {std::move(sum), meet, maximal};
}

SubmanifoldVerdict submanifold_tests(const GeneralizedEndomorphism& j, const Mat& conormal, double rel_tol) {
    const int dim = j.dim();
    if (conormal.rows() != dim) throw DimensionError("conormal size mismatch");
    Mat embedded = Mat::Zero(2 * dim, conormal.cols());
    embedded.bottomRows(dim) = conormal;
    const Mat image = j.matrix() * embedded;

    SubmanifoldVerdict verdict;
    verdict.generalized_poisson =
        linalg::contained_in(image.cast<Complex>(), embedded.cast<Complex>(), rel_tol * std::max(1.0, image.norm()) * 10.0);

    const Mat tangent_annihilator = linalg::null_space(Mat(conormal.transpose()), rel_tol);
    Mat orthogonal = Mat::Zero(2 * dim, tangent_annihilator.cols() + dim);
    orthogonal.topLeftCorner(dim, tangent_annihilator.cols()) = tangent_annihilator;
    orthogonal.bottomRightCorner(dim, dim).setIdentity();
    verdict.transversal =
        linalg::intersection_dim(image.cast<Complex>(), orthogonal.cast<Complex>(), rel_tol) == 0;
    return verdict;
}

}  // namespace gkflow::gvs
