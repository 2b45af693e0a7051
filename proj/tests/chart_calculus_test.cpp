#include "gkflow/chart_calculus.hpp"
#include "gkflow/scenarios.hpp"

#include "doctest.h"
#include "generators.hpp"

#include <cmath>

using namespace gkflow;
using namespace gkflow::chart;
using gkflow::testing::for_all;
using gkflow::testing::Gen;

namespace {

constexpr Complex kI{0.0, 1.0};

ChartDomain box(int dim, double half_width = 2.0) {
    return ChartDomain(Vec::Constant(dim, -half_width), Vec::Constant(dim, half_width));
}

TensorField constant(const Mat& m) {
    return {[m](const Vec&) { return m; }};
}

/// Quadratic polynomial 1-form β_j = a_jk x_k + b_jkl x_k x_l with its exact differential.
struct PolynomialOneForm {
    Mat a;
    std::vector<Mat> b;

    static PolynomialOneForm random(Gen& gen, int dim) {
        PolynomialOneForm p{gen.matrix(dim, dim), {}};
        for (int j = 0; j < dim; ++j) p.b.push_back(gen.matrix(dim, dim, 0.5));
        return p;
    }
    [[nodiscard]] Vec value(const Vec& x) const {
        Vec out = a * x;
        for (std::size_t j = 0; j < b.size(); ++j) out(static_cast<Eigen::Index>(j)) += x.dot(b[j] * x);
        return out;
    }
    /// ∂_i β_j.
    [[nodiscard]] Mat gradient(const Vec& x) const {
        Mat out = a.transpose();
        for (std::size_t j = 0; j < b.size(); ++j) out.col(static_cast<Eigen::Index>(j)) += (b[j] + b[j].transpose()) * x;
        return out;
    }
    /// Components (dβ)_ij = ∂_i β_j − ∂_j β_i.
    [[nodiscard]] Mat differential(const Vec& x) const {
        const Mat g = gradient(x);
        return g - g.transpose();
    }
};

/// Jacobian of the polynomial diffeomorphism x + (0.2 x3², 0.3 x1 y2, 0.1 y1², 0.2 x1²).
Mat warp_jacobian(const Vec& x) {
    Mat j = Mat::Identity(4, 4);
    j(0, 2) = 0.4 * x(2);
    j(1, 0) = 0.3 * x(3);
    j(1, 3) = 0.3 * x(0);
    j(2, 1) = 0.2 * x(1);
    j(3, 0) = 0.4 * x(0);
    return j;
}

Mat taylor_exponential(const Mat& a) {
    Mat term = Mat::Identity(a.rows(), a.cols());
    Mat sum = term;
    for (int k = 1; k < 40; ++k) {
        term = term * a / static_cast<double>(k);
        sum += term;
    }
    return sum;
}

}  // namespace

TEST_SUITE("domain") {
    TEST_CASE("grid skips excluded points and keeps lexicographic order") {
        const Exclusion origin{"origin", [](const Vec& x) { return x.norm(); }, 0.3};
        const ChartDomain d(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0), {origin});
        const auto grid = d.sample_grid({3, 3});
        CHECK(grid.size() == 8);
        CHECK(grid.front()(0) == -1.0);
        CHECK(grid.front()(1) == -1.0);
        CHECK(d.excluded_by(Vec::Zero(2)) == "origin");
        CHECK_THROWS_AS(d.require_admissible(Vec::Constant(2, 0.1)), ExclusionError);
    }

    TEST_CASE("empty box is refused") { CHECK_THROWS((ChartDomain(Vec::Zero(2), Vec::Zero(2)))); }
}

TEST_SUITE("exterior derivative") {
    TEST_CASE("df of a coordinate is exact") {
        const FormField f = scalar_as_form({[](const Vec& x) { return x(0); }}, 2);
        const RealForm df = fd_d(f, Vec::Constant(2, 0.3));
        CHECK(df[0b01] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(df[0b10]) < 1e-12);
    }

    TEST_CASE("d(x dy) is dx^dy") {
        const FormField xdy = covector_as_form({[](const Vec& x) { return Vec((Vec(2) << 0.0, x(0)).finished()); }});
        const RealForm d = fd_d(xdy, Vec::Constant(2, -0.7));
        CHECK(d[0b11] == doctest::Approx(1.0).epsilon(1e-10));
    }

    TEST_CASE("d of an exact 1-form matches the analytic differential") {
        for_all(51, 20, [](Gen& gen, int) {
            const PolynomialOneForm beta = PolynomialOneForm::random(gen, 4);
            const FormField field = covector_as_form({[beta](const Vec& x) { return beta.value(x); }});
            const Vec x = gen.point_in_box(4, 1.0);
            const Mat expected = beta.differential(x);
            CHECK(linalg::max_abs(Mat(fd_d(field, x).two_form_components()) - expected) < 1e-7);
        });
    }

    TEST_CASE("d squared vanishes to second order") {
        for_all(52, 10, [](Gen& gen, int) {
            const PolynomialOneForm beta = PolynomialOneForm::random(gen, 4);
            const TensorField f = {[beta](const Vec& x) { return beta.differential(x); }};
            const Vec x = gen.point_in_box(4, 1.0);
            FdOptions opt;
            opt.h = 1e-3;
            CHECK(fd_d(two_form_as_form(f), x, opt).max_abs() < 1e-8);
        });
    }
}

TEST_SUITE("dc") {
    TEST_CASE("ddc of the squared radius is 4 dx^dy") {
        const TensorField i = constant(linalg::standard_complex_structure(1));
        const ScalarField r2 = {[](const Vec& x) { return x.squaredNorm(); }};
        const FormField dc_r2 = {[&](const Vec& x) { return dc(i, scalar_as_form(r2, 2), x); }};
        FdOptions opt;
        opt.h = 1e-3;
        const RealForm ddc = fd_d(dc_r2, Vec::Constant(2, 0.25), opt);
        CHECK(ddc[0b11] == doctest::Approx(4.0).epsilon(1e-6));
    }

    TEST_CASE("dc of a function is -df o I") {
        Gen gen(53);
        const Mat i = gen.complex_structure(2);
        const Vec grad = gen.vector(4);
        const ScalarField f = {[grad](const Vec& x) { return grad.dot(x); }};
        const RealForm out = dc(constant(i), scalar_as_form(f, 4), Vec::Zero(4));
        const Vec expected = -i.transpose() * grad;
        for (int k = 0; k < 4; ++k) CHECK(out[Monomial{1} << k] == doctest::Approx(expected(k)).epsilon(1e-8));
    }

    TEST_CASE("dc of a constant is zero") {
        const ScalarField c = {[](const Vec&) { return 3.0; }};
        CHECK(dc(constant(linalg::standard_complex_structure(2)), scalar_as_form(c, 4), Vec::Ones(4)).max_abs() == 0.0);
    }

    TEST_CASE("closed 2-forms satisfy dc F11 = i d(F20 - F02) and a flipped sign does not") {
        for_all(54, 50, [](Gen& gen, int) {
            const PolynomialOneForm beta = PolynomialOneForm::random(gen, 4);
            const Mat i = gen.complex_structure(2);
            const TensorField complex_structure = constant(i);
            const TensorField f11 = {[beta, i](const Vec& x) { return part_11(beta.differential(x), i); }};
            const TensorField mixed = {[beta, i](const Vec& x) {
                const Mat f = beta.differential(x);
                return Mat((kI * (pq_project(f, i, 2, 0) - pq_project(f, i, 0, 2))).real());
            }};
            const Vec x = gen.point_in_box(4, 1.0);
            const RealForm lhs = dc(complex_structure, two_form_as_form(f11), x);
            const RealForm rhs = fd_d(two_form_as_form(mixed), x);
            const double scale = std::max(1.0, rhs.max_abs());
            CHECK((lhs - rhs).max_abs() < 1e-6 * scale);
            CHECK((lhs + rhs).max_abs() > 1e-3 * scale);
        });
    }
}

TEST_SUITE("type projections") {
    TEST_CASE("compatible form is pure (1,1)") {
        for_all(55, 20, [](Gen& gen, int) {
            const int n = gen.integer(1, 3);
            const Mat a = gen.frame(2 * n);
            const Mat i = a * linalg::standard_complex_structure(n) * a.inverse();
            // g = A⁻ᵀA⁻¹ is I-compatible, and ω = Iᵀ g is of type (1,1).
            const Mat ainv = a.inverse();
            const Mat g = ainv.transpose() * ainv;
            const Mat omega = i.transpose() * g;
            CHECK(linalg::max_abs(part_11(omega, i) - omega) < 1e-12);
            CHECK(linalg::max_abs(pq_project(omega, i, 1, 1).real() - omega) < 1e-12);
        });
    }

    TEST_CASE("dz^dw has no (1,1) part") {
        // dz∧dw = (dx1 + i dy1)∧(dx2 + i dy2); the real part is dx1∧dx2 − dy1∧dy2.
        Mat re = Mat::Zero(4, 4);
        re(0, 2) = 1.0;
        re(1, 3) = -1.0;
        re = re - Mat(re.transpose());
        const Mat i = linalg::standard_complex_structure(2);
        CHECK(linalg::max_abs(part_11(re, i)) < 1e-15);
        CHECK(linalg::max_abs(pq_project(re, i, 1, 1)) < 1e-15);
    }

    TEST_CASE("projections resolve the identity") {
        for_all(56, 50, [](Gen& gen, int) {
            const int n = gen.integer(1, 3);
            const Mat i = gen.complex_structure(n);
            const Mat f = gen.antisymmetric(2 * n);
            const CMat sum = pq_project(f, i, 2, 0) + pq_project(f, i, 1, 1) + pq_project(f, i, 0, 2);
            CHECK(linalg::max_abs(sum - f.cast<Complex>()) < 1e-12);
            CHECK(linalg::max_abs(part_11(f, i) + part_20_02(f, i) - f) < 1e-12);
        });
    }
}

TEST_SUITE("nijenhuis") {
    TEST_CASE("constant structure is integrable") {
        CHECK(nijenhuis(constant(linalg::standard_complex_structure(2)), Vec::Zero(4)) == 0.0);
    }

    TEST_CASE("pulled-back structure converges to zero") {
        const Mat i0 = linalg::standard_complex_structure(2);
        const TensorField pulled = {[i0](const Vec& x) {
            const Mat j = warp_jacobian(x);
            return Mat(j.inverse() * i0 * j);
        }};
        const Vec x = Vec::Constant(4, 0.3);
        FdOptions coarse, fine;
        coarse.h = 1e-2;
        fine.h = 5e-3;
        const double a = nijenhuis(pulled, x, coarse);
        const double b = nijenhuis(pulled, x, fine);
        CHECK(b < 1e-3);
        CHECK(b <= a * 0.3 + 1e-12);
    }

    TEST_CASE("point-dependent rotation is not integrable") {
        const Mat i0 = linalg::standard_complex_structure(2);
        const TensorField rotated = {[i0](const Vec& x) {
            // Rotation in the (y1, x2) plane by θ = x1; mixes the two complex lines.
            Mat r = Mat::Identity(4, 4);
            const double c = std::cos(x(0)), s = std::sin(x(0));
            r(1, 1) = c;
            r(1, 2) = -s;
            r(2, 1) = s;
            r(2, 2) = c;
            return Mat(r * i0 * r.transpose());
        }};
        const Vec x = Vec::Constant(4, 0.2);
        for (double h : {1e-2, 1e-3, 1e-4}) {
            FdOptions opt;
            opt.h = h;
            CHECK(nijenhuis(rotated, x, opt) > 0.1);
        }
    }
}

TEST_SUITE("flow") {
    TEST_CASE("zero field is the identity") {
        const FlowMap flow({[](const Vec&) { return Vec(Vec::Zero(2)); }}, box(2));
        const Vec x = Vec::Constant(2, 0.4);
        CHECK(flow.point(x, 0.5) == x);
        CHECK(linalg::max_abs(flow.jacobian(x, 0.5) - Mat::Identity(2, 2)) == 0.0);
    }

    TEST_CASE("translation field") {
        const FlowMap flow({[](const Vec&) { return Vec(Vec::Unit(2, 0)); }}, box(2));
        const Vec y = flow.point(Vec::Constant(2, 0.1), 0.7);
        CHECK(y(0) == doctest::Approx(0.8).epsilon(1e-13));
        CHECK(y(1) == doctest::Approx(0.1).epsilon(1e-13));
    }

    TEST_CASE("linear field matches the matrix exponential") {
        for_all(57, 20, [](Gen& gen, int) {
            const Mat a = gen.matrix(4, 4);
            const double t = 1.0 / (a.norm() + 1.0);
            const FlowMap flow({[a](const Vec& x) { return Vec(a * x); }}, box(4, 10.0));
            const Vec x = gen.point_in_box(4, 1.0);
            const Mat expected = taylor_exponential(t * a);
            CHECK((flow.point(x, t) - expected * x).norm() < 1e-8);
            CHECK(linalg::max_abs(flow.jacobian(x, t) - expected) < 1e-8);
        });
    }

    TEST_CASE("group law and Jacobian modes on a scenario field") {
        const flow::Scenario s = scenarios::poisson_c2();
        const FlowMap variational(s.potential.x_alpha, s.domain, 1e-3, JacobianMode::variational);
        const FlowMap fd(s.potential.x_alpha, s.domain, 1e-3, JacobianMode::finite_difference);
        for_all(58, 20, [&](Gen& gen, int) {
            const Vec x = gen.point_in_box(4, 0.5);
            const double a = gen.uniform(-0.1, 0.1);
            const double b = gen.uniform(-0.1, 0.1);
            CHECK((variational.point(variational.point(x, a), b) - variational.point(x, a + b)).norm() <= 1e-6);
            CHECK(linalg::max_abs(variational.jacobian(x, a) - fd.jacobian(x, a)) <= 1e-5);
        });
    }

    TEST_CASE("escaping trajectories are reported") {
        const FlowMap flow({[](const Vec&) { return Vec(Vec::Unit(2, 0)); }}, box(2, 1.0));
        CHECK_THROWS_AS((void)flow.point(Vec::Zero(2), 5.0), EscapeError);
    }
}

TEST_SUITE("pushforward") {
    TEST_CASE("identity Jacobian leaves tensors unchanged") {
        Gen gen(59);
        const Mat t = gen.matrix(4, 4);
        for (auto kind : {TensorKind::two_form, TensorKind::endomorphism, TensorKind::bivector})
            CHECK(linalg::max_abs(pushforward(t, kind, Mat::Identity(4, 4)) - t) == 0.0);
    }

    TEST_CASE("metric transforms to a symmetric form") {
        for_all(60, 20, [](Gen& gen, int) {
            const Mat a = gen.matrix(4, 4);
            const Mat g = a * a.transpose() + Mat::Identity(4, 4);
            const Mat j = gen.frame(4);
            const Mat pushed = pushforward(g, TensorKind::symmetric_form, j);
            CHECK(linalg::symmetry_defect(pushed) < 1e-12);
            CHECK(linalg::max_abs(pushed - j.inverse().transpose() * g * j.inverse()) < 1e-12);
        });
    }

    TEST_CASE("conjugation keeps complex structures") {
        for_all(61, 20, [](Gen& gen, int) {
            const Mat i = gen.complex_structure(2);
            const Mat pushed = pushforward(i, TensorKind::endomorphism, gen.frame(4));
            CHECK(linalg::max_abs(pushed * pushed + Mat::Identity(4, 4)) < 1e-10);
        });
    }

    TEST_CASE("pullback inverts pushforward") {
        Gen gen(62);
        const Mat t = gen.antisymmetric(4);
        const Mat j = gen.frame(4);
        CHECK(linalg::max_abs(pullback(pushforward(t, TensorKind::two_form, j), TensorKind::two_form, j) - t) < 1e-12);
    }
}

TEST_SUITE("time integral") {
    TEST_CASE("constant integrand") {
        const Mat g = Mat::Constant(2, 2, 1.5);
        const Mat out = time_integral<Mat>([&](double) { return g; }, 0.4);
        CHECK(linalg::max_abs(out - 0.4 * g) < 1e-15);
    }

    TEST_CASE("linear integrand") {
        const Mat f = Mat::Constant(2, 2, -2.0);
        const Mat out = time_integral<Mat>([&](double s) { return Mat(s * f); }, 0.3, 8);
        CHECK(linalg::max_abs(out - 0.5 * 0.09 * f) < 1e-15);
    }

    TEST_CASE("fourth-order convergence") {
        auto err = [](int panels) { return std::abs(time_integral<double>([](double s) { return std::exp(s); }, 1.0, panels) - (std::exp(1.0) - 1.0)); };
        CHECK(std::log2(err(8) / err(16)) == doctest::Approx(4.0).epsilon(0.05));
    }

    TEST_CASE("non-finite samples are refused") {
        CHECK_THROWS_AS((void)time_integral<double>([](double) { return std::nan(""); }, 1.0), NonFiniteError);
    }
}

TEST_SUITE("lie derivative") {
    TEST_CASE("constant tensor along a constant field") {
        const FlowMap flow({[](const Vec&) { return Vec(Vec::Ones(2)); }}, box(2));
        const Mat out = lie_derivative(constant(Mat::Identity(2, 2)), TensorKind::symmetric_form, flow, Vec::Zero(2), 1e-3);
        CHECK(linalg::max_abs(out) < 1e-12);
    }

    TEST_CASE("on scalars it is df(X)") {
        const Vec v = (Vec(2) << 0.3, -1.1).finished();
        const FlowMap flow({[v](const Vec&) { return v; }}, box(2));
        const TensorField f = {[](const Vec& x) { return Mat::Constant(1, 1, std::sin(x(0)) * x(1)); }};
        const Vec x = (Vec(2) << 0.2, 0.5).finished();
        const double expected = std::cos(x(0)) * x(1) * v(0) + std::sin(x(0)) * v(1);
        CHECK(lie_derivative(f, TensorKind::scalar, flow, x, 1e-3)(0, 0) == doctest::Approx(expected).epsilon(1e-6));
    }

    TEST_CASE("x d_y acting on dy gives dx") {
        const FlowMap flow({[](const Vec& x) { return Vec((Vec(2) << 0.0, x(0)).finished()); }}, box(2));
        const TensorField dy = {[](const Vec&) { return Mat(Vec::Unit(2, 1)); }};
        const Mat out = lie_derivative(dy, TensorKind::covector, flow, Vec::Constant(2, 0.3), 1e-3);
        CHECK(out(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(std::abs(out(1, 0)) < 1e-8);
    }
}
