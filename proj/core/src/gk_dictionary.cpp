#include "gkflow/gk_dictionary.hpp"

#include "gkflow/errors.hpp"

#include <Eigen/Eigenvalues>

#include <random>

namespace gkflow::gk {

namespace {

constexpr Complex kI{0.0, 1.0};

Mat block_middle(const Mat& tangent, const Mat& upper, const Mat& lower, const Mat& dual) {
    const auto dim = tangent.rows();
    Mat m(2 * dim, 2 * dim);
    m << tangent, upper, lower, dual;
    return m;
}

Mat inverse_or_throw(const Mat& m, const char* what) {
    Eigen::FullPivLU<Mat> lu(m);
    if (!lu.isInvertible()) throw InvalidStructureError(std::string(what) + " is singular");
    return lu.inverse();
}

double scale_of(const Mat& m) { return 1.0 + m.norm(); }

Mat random_orthogonal(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Mat a(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) a(r, c) = normal(rng);
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    const Mat r = qr.matrixQR();
    for (int c = 0; c < dim; ++c)
        if (r(c, c) < 0) q.col(c) = -q.col(c);
    return q;
}

}  // namespace

ValidityReport validate_point(const BiHermitianPoint& p, double tol) {
    const int dim = p.dim();
    ValidityReport report;
    if (p.g.cols() != dim || p.b.rows() != dim || p.b.cols() != dim || p.i_plus.rows() != dim ||
        p.i_plus.cols() != dim || p.i_minus.rows() != dim || p.i_minus.cols() != dim || dim % 2 != 0 || dim == 0)
        throw DimensionError("bi-Hermitian tensors have inconsistent sizes");
    const Mat id = Mat::Identity(dim, dim);
    report.complex_defect = std::max(linalg::max_abs(p.i_plus * p.i_plus + id), linalg::max_abs(p.i_minus * p.i_minus + id));
    report.compatibility_defect = std::max(linalg::max_abs(p.i_plus.transpose() * p.g * p.i_plus - p.g),
                                           linalg::max_abs(p.i_minus.transpose() * p.g * p.i_minus - p.g));
    report.b_skew_defect = linalg::skew_defect(p.b);
    report.min_metric_eigenvalue = Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (p.g + p.g.transpose())).eigenvalues()(0);
    const double scale = scale_of(p.g) + scale_of(p.i_plus) * scale_of(p.i_minus);
    report.pass = report.complex_defect <= tol * scale && report.compatibility_defect <= tol * scale &&
                  report.b_skew_defect <= tol * scale && linalg::symmetry_defect(p.g) <= tol * scale &&
                  (p.degenerate || report.min_metric_eigenvalue > tol);
    return report;
}

PairReport validate_pair(const GKPair& q, double tol) {
    PairReport report;
    const Mat& a = q.j1.matrix();
    const Mat& b = q.j2.matrix();
    report.commutator = linalg::max_abs(linalg::commutator(a, b));
    const Mat metric = q.generalized_metric();
    report.metric_square_residual = linalg::max_abs(metric * metric - Mat::Identity(a.rows(), a.rows()));
    const Mat form = metric.transpose() * gvs::pairing_matrix(q.j1.dim());
    report.min_metric_eigenvalue = Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (form + form.transpose())).eigenvalues()(0);
    const double scale = 1.0 + a.squaredNorm() + b.squaredNorm();
    report.pass = gvs::validate_gcs(q.j1, tol).pass && gvs::validate_gcs(q.j2, tol).pass &&
                  report.commutator <= tol * scale && report.metric_square_residual <= tol * scale &&
                  report.min_metric_eigenvalue > tol;
    return report;
}

GKPair assemble_gk(const BiHermitianPoint& p) {
    if (p.degenerate) throw DegenerateMetricError("assembling a GK pair needs an invertible metric");
    const ValidityReport report = validate_point(p);
    if (report.min_metric_eigenvalue <= gvs::kStructureTolerance) throw InvalidStructureError("metric is not positive definite");
    if (!report.pass) throw InvalidStructureError("I+ or I- is not a g-compatible complex structure");

    const Mat wp = p.omega_plus();
    const Mat wm = p.omega_minus();
    const Mat wp_inv = inverse_or_throw(wp, "omega+");
    const Mat wm_inv = inverse_or_throw(wm, "omega-");
    const Mat shear = gvs::b_shear(p.b);
    const Mat unshear = gvs::b_shear(-p.b);
    const Mat ip = p.i_plus;
    const Mat im = p.i_minus;
    const Mat m1 = block_middle(ip + im, -(wp_inv - wm_inv), wp - wm, -(ip + im).transpose());
    const Mat m2 = block_middle(ip - im, -(wp_inv + wm_inv), wp + wm, -(ip - im).transpose());
    return {GeneralizedEndomorphism(0.5 * shear * m1 * unshear), GeneralizedEndomorphism(0.5 * shear * m2 * unshear)};
}

BiHermitianPoint disassemble_gk(const GKPair& q) {
    const int dim = q.j1.dim();
    const PairReport report = validate_pair(q);
    if (!report.pass) throw InvalidStructureError("not a generalized Kahler pair");

    const Mat metric = q.generalized_metric();
    const Mat pairing = gvs::pairing_matrix(dim);
    const Mat form = metric.transpose() * pairing;
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> solver(pairing, 0.5 * (form + form.transpose()));
    if (solver.info() != Eigen::Success) throw InvalidStructureError("generalized metric eigensolve failed");

    Mat v_plus(2 * dim, dim);
    Mat v_minus(2 * dim, dim);
    int n_plus = 0;
    int n_minus = 0;
    for (int k = 0; k < 2 * dim; ++k) {
        const double mu = solver.eigenvalues()(k);
        if (mu > 0 && n_plus < dim) v_plus.col(n_plus++) = solver.eigenvectors().col(k);
        else if (mu < 0 && n_minus < dim) v_minus.col(n_minus++) = solver.eigenvectors().col(k);
    }
    if (n_plus != dim || n_minus != dim) throw InvalidStructureError("eigenspaces of the generalized metric are not half-dimensional");

    auto graph_map = [dim](const Mat& v) {
        const Mat tangent = v.topRows(dim);
        return Mat(v.bottomRows(dim) * inverse_or_throw(tangent, "graph projection"));
    };
    const Mat a_plus = graph_map(v_plus);
    const Mat a_minus = graph_map(v_minus);

    BiHermitianPoint p;
    p.g = 0.5 * (a_plus - a_minus);
    p.g = 0.5 * (p.g + p.g.transpose());
    p.b = 0.5 * (a_plus + a_minus);
    p.b = 0.5 * (p.b - p.b.transpose());
    const Mat& j1 = q.j1.matrix();
    const Mat top_left = j1.topLeftCorner(dim, dim);
    const Mat top_right = j1.topRightCorner(dim, dim);
    p.i_plus = top_left + top_right * (p.g + p.b);
    p.i_minus = top_left + top_right * (-p.g + p.b);
    return p;
}

double point_distance(const BiHermitianPoint& a, const BiHermitianPoint& b) {
    return std::max({linalg::max_abs(a.g - b.g), linalg::max_abs(a.b - b.b), linalg::max_abs(a.i_plus - b.i_plus),
                     linalg::max_abs(a.i_minus - b.i_minus)});
}

PoissonTriple derived_poisson(const BiHermitianPoint& p) {
    PoissonTriple out;
    if (p.degenerate) {
        if (!p.external_q) throw DegenerateMetricError("degenerate point needs an externally supplied Q");
        out.q = *p.external_q;
    } else {
        const Mat g_inv = inverse_or_throw(p.g, "metric");
        out.q = -0.5 * linalg::commutator(p.i_plus, p.i_minus) * g_inv;
        const Mat wp_inv = inverse_or_throw(p.omega_plus(), "omega+");
        const Mat wm_inv = inverse_or_throw(p.omega_minus(), "omega-");
        out.pi_j1 = -0.5 * (wp_inv - wm_inv);
        out.pi_j2 = -0.5 * (wp_inv + wm_inv);
    }
    const CMat q = out.q.cast<Complex>();
    out.sigma_plus = q - kI * p.i_plus.cast<Complex>() * q;
    out.sigma_minus = q - kI * p.i_minus.cast<Complex>() * q;
    return out;
}

CMat sigma_plus_from_projectors(const BiHermitianPoint& p) {
    if (p.degenerate) throw DegenerateMetricError("projector form needs an invertible metric");
    const int dim = p.dim();
    const CMat id = CMat::Identity(dim, dim);
    const CMat proj_plus = 0.5 * (id - kI * p.i_plus.cast<Complex>());
    const CMat proj_minus = 0.5 * (id - kI * p.i_minus.cast<Complex>());
    const CMat g_inv = inverse_or_throw(p.g, "metric").cast<Complex>();
    return 4.0 * g_inv * proj_plus.conjugate().transpose() * proj_minus.conjugate().transpose() * proj_plus.transpose();
}

double holomorphic_type_defect(const CMat& sigma, const Mat& complex_structure) {
    const int dim = static_cast<int>(complex_structure.rows());
    const CMat shifted = complex_structure.transpose().cast<Complex>() + kI * CMat::Identity(dim, dim);
    const CMat antiholomorphic = linalg::null_space(shifted);
    return linalg::max_abs(CMat(sigma * antiholomorphic));
}

KernelSplit kernel_split(const BiHermitianPoint& p, double tol) {
    const double cut = tol * (scale_of(p.i_plus) + scale_of(p.i_minus));
    KernelSplit out;
    out.plus_sum = linalg::kernel_dim(p.i_plus + p.i_minus, cut);
    out.minus_diff = linalg::kernel_dim(p.i_plus - p.i_minus, cut);
    out.commutator = linalg::kernel_dim(linalg::commutator(p.i_plus, p.i_minus), tol * scale_of(p.i_plus) * scale_of(p.i_minus));
    out.identity_holds = out.commutator == out.plus_sum + out.minus_diff;
    return out;
}

int orientation_sign(const Mat& complex_structure) {
    const int dim = static_cast<int>(complex_structure.rows());
    Mat frame(dim, 0);
    for (int k = 0; k < dim && frame.cols() < dim; ++k) {
        Mat trial(dim, frame.cols() + 2);
        trial << frame, Vec::Unit(dim, k), complex_structure.col(k);
        if (linalg::numerical_rank(trial) == trial.cols()) frame = trial;
    }
    if (frame.cols() != dim) throw InvalidStructureError("could not build a complex frame");
    return frame.determinant() > 0 ? 1 : -1;
}

TypeFacts type_facts(const GKPair& q) {
    const BiHermitianPoint p = disassemble_gk(q);
    TypeFacts facts;
    facts.n = q.j1.dim() / 2;
    facts.type_j1 = gvs::type_of(q.j1);
    facts.type_j2 = gvs::type_of(q.j2);
    facts.sum_bound = facts.type_j1 + facts.type_j2 <= facts.n;
    const int sign_plus = orientation_sign(p.i_plus);
    facts.same_orientation = sign_plus == orientation_sign(p.i_minus);
    facts.opposite_orientation = sign_plus == orientation_sign(-p.i_minus);
    facts.parity_j1 = ((facts.type_j1 - facts.n) % 2 == 0) == facts.same_orientation;
    facts.parity_j2 = ((facts.type_j2 - facts.n) % 2 == 0) == facts.opposite_orientation;
    return facts;
}

BiHermitianPoint random_bihermitian(int n, std::uint64_t seed, double gap, double b_scale) {
    if (n < 1 || n > 4) throw DimensionError("random_bihermitian supports 1 <= n <= 4");
    if (gap <= 0.0 || gap > 1.0) throw InvalidStructureError("spectral gap must lie in (0, 1]");
    const int dim = 2 * n;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> spectrum(gap, 1.0);
    std::normal_distribution<double> normal;

    const Mat frame = random_orthogonal(dim, rng);
    Vec eigen(dim);
    for (int k = 0; k < dim; ++k) eigen(k) = gap >= 1.0 ? 1.0 : spectrum(rng);

    BiHermitianPoint p;
    p.g = gap >= 1.0 ? Mat(Mat::Identity(dim, dim)) : Mat(frame * eigen.asDiagonal() * frame.transpose());
    const Mat root = linalg::sym_sqrt(p.g);
    const Mat root_inv = inverse_or_throw(root, "metric root");
    const Mat standard = linalg::standard_complex_structure(n);
    const Mat o_plus = random_orthogonal(dim, rng);
    const Mat o_minus = random_orthogonal(dim, rng);
    p.i_plus = root_inv * o_plus * standard * o_plus.transpose() * root;
    p.i_minus = root_inv * o_minus * standard * o_minus.transpose() * root;

    Mat raw(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) raw(r, c) = normal(rng);
    p.b = b_scale * 0.5 * (raw - raw.transpose());
    return p;
}

BiHermitianPoint direct_sum(const BiHermitianPoint& a, const BiHermitianPoint& b) {
    auto diag = [](const Mat& x, const Mat& y) {
        Mat m = Mat::Zero(x.rows() + y.rows(), x.cols() + y.cols());
        m.topLeftCorner(x.rows(), x.cols()) = x;
        m.bottomRightCorner(y.rows(), y.cols()) = y;
        return m;
    };
    BiHermitianPoint p;
    p.g = diag(a.g, b.g);
    p.b = diag(a.b, b.b);
    p.i_plus = diag(a.i_plus, b.i_plus);
    p.i_minus = diag(a.i_minus, b.i_minus);
    p.degenerate = a.degenerate || b.degenerate;
    return p;
}

BiHermitianPoint kahler_point(int n) {
    const int dim = 2 * n;
    BiHermitianPoint p;
    p.g = Mat::Identity(dim, dim);
    p.b = Mat::Zero(dim, dim);
    p.i_plus = linalg::standard_complex_structure(n);
    p.i_minus = p.i_plus;
    return p;
}

}  // namespace gkflow::gk
