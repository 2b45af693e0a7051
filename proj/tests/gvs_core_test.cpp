#include "gkflow/gk_dictionary.hpp"
#include "gkflow/gvs_core.hpp"
#include "gkflow/suites.hpp"

#include "doctest.h"
#include "generators.hpp"

using namespace gkflow;
using namespace gkflow::gvs;
using gkflow::testing::for_all;
using gkflow::testing::Gen;

namespace {

constexpr Complex kI{0.0, 1.0};

Vec unit(int dim, int k) { return Vec::Unit(dim, k); }

/// dz_k = dx_k + i dy_k as a complex covector on ℝ²ⁿ.
CVec dz(int n, int k) {
    CVec v = CVec::Zero(2 * n);
    v(2 * k) = 1.0;
    v(2 * k + 1) = kI;
    return v;
}

Spinor one_form(int n, const CVec& xi) { return Spinor::covector(2 * n, xi); }

Mat area_form() {
    Mat w(2, 2);
    w << 0.0, 1.0, -1.0, 0.0;
    return w;
}

/// T^{0,1} ⊕ (T*)^{1,0} for the standard structure, built by hand.
DiracSubspace hand_built_l_i(int n) {
    const int dim = 2 * n;
    CMat cols = CMat::Zero(2 * dim, dim);
    for (int k = 0; k < n; ++k) {
        cols(2 * k, k) = 1.0;
        cols(2 * k + 1, k) = kI;
        cols.block(dim, n + k, dim, 1) = dz(n, k);
    }
    return DiracSubspace(cols);
}

CVec random_cvec(Gen& gen, int dim) {
    CVec v(dim);
    for (int k = 0; k < dim; ++k) v(k) = Complex(gen.normal(), gen.normal());
    return v;
}

}  // namespace

TEST_SUITE("pairing") {
    TEST_CASE("tangent against cotangent gives one half") {
        const auto x = DoubleVector::real(unit(2, 0), Vec::Zero(2));
        const auto xi = DoubleVector::real(Vec::Zero(2), unit(2, 0));
        CHECK(natural_pairing(x, xi) == Complex(0.5));
        CHECK(natural_pairing(xi, x) == Complex(0.5));
    }

    TEST_CASE("tangent directions are isotropic") {
        const auto a = DoubleVector::real(unit(2, 0), Vec::Zero(2));
        const auto b = DoubleVector::real(unit(2, 1), Vec::Zero(2));
        CHECK(natural_pairing(a, b) == Complex(0.0));
    }

    TEST_CASE("mixed vector has unit square") {
        const auto u = DoubleVector::real(unit(2, 0), unit(2, 0));
        CHECK(natural_pairing(u, u) == Complex(1.0));
    }

    TEST_CASE("pairing matrix agrees with the bilinear form") {
        for_all(11, 20, [](Gen& gen, int) {
            const int dim = 2 * gen.integer(1, 3);
            const auto u = DoubleVector::real(gen.vector(dim), gen.vector(dim));
            const auto v = DoubleVector::real(gen.vector(dim), gen.vector(dim));
            const Complex direct = natural_pairing(u, v);
            const Complex via_matrix = u.stacked().transpose() * pairing_matrix(dim).cast<Complex>() * v.stacked();
            CHECK(std::abs(direct - via_matrix) < 1e-12);
        });
    }
}

TEST_SUITE("structures") {
    TEST_CASE("zero Poisson tensor reduces to the complex structure") {
        const Mat i = linalg::standard_complex_structure(1);
        CHECK(linalg::max_abs(gcs_from_poisson(i, CMat::Zero(2, 2)).matrix() - gcs_from_complex(i).matrix()) == 0.0);
    }

    TEST_CASE("area form is a type 0 structure") {
        const auto j = gcs_from_symplectic(area_form());
        CHECK(validate_gcs(j).pass);
        CHECK(type_of(j) == 0);
    }

    TEST_CASE("holomorphic Poisson z d_z ^ d_w changes type across z = 0") {
        const Mat i = linalg::standard_complex_structure(2);
        const auto at_origin = gcs_from_poisson(i, holomorphic_bivector(2, 0, 1, Complex(0.0)));
        CHECK(linalg::max_abs(poisson_of(at_origin)) == 0.0);
        CHECK(type_of(at_origin) == 2);
        const auto at_one = gcs_from_poisson(i, holomorphic_bivector(2, 0, 1, Complex(1.0)));
        CHECK(validate_gcs(at_one).pass);
        CHECK(type_of(at_one) == 0);
    }

    TEST_CASE("identity map is not a generalized complex structure") {
        const GeneralizedEndomorphism id(Mat::Identity(4, 4));
        const auto report = validate_gcs(id);
        CHECK_FALSE(report.pass);
        CHECK(report.square_residual == doctest::Approx(2.0));
    }

    TEST_CASE("standard complex structure validates") {
        CHECK(validate_gcs(gcs_from_complex(linalg::standard_complex_structure(3))).pass);
    }

    TEST_CASE("complex type has no Poisson part and full type") {
        for_all(12, 10, [](Gen& gen, int) {
            const int n = gen.integer(1, 3);
            const auto j = gcs_from_complex(gen.complex_structure(n));
            CHECK(linalg::max_abs(poisson_of(j)) < 1e-12);
            CHECK(type_of(j) == n);
        });
    }

    TEST_CASE("symplectic Poisson tensor is minus the inverse flat map") {
        for_all(13, 20, [](Gen& gen, int) {
            const int n = gen.integer(1, 3);
            const Mat w = gen.symplectic(n);
            const Mat expected = -flat_of(w).inverse();
            CHECK(linalg::max_abs(poisson_of(gcs_from_symplectic(w)) - expected) < 1e-9);
        });
    }

    TEST_CASE("holomorphic Poisson block is 4 I Q") {
        for_all(14, 20, [](Gen& gen, int) {
            const Mat i = linalg::standard_complex_structure(2);
            const CMat sigma = holomorphic_bivector(2, 0, 1, Complex(gen.normal(), gen.normal()));
            const auto j = gcs_from_poisson(i, sigma);
            CHECK(validate_gcs(j).pass);
            CHECK(linalg::max_abs(poisson_of(j) - 4.0 * i * sigma.real()) < 1e-12);
        });
    }

    TEST_CASE("non-complex input is refused") {
        CHECK_THROWS_AS((void)gcs_from_complex(Mat::Identity(2, 2)), InvalidStructureError);
        CHECK_THROWS_AS((void)gcs_from_symplectic(Mat::Zero(2, 2)), InvalidStructureError);
    }
}

TEST_SUITE("b-field") {
    TEST_CASE("zero B is the identity") {
        Gen gen(15);
        const auto j = suites::random_gcs(2, 2, gen.engine());
        CHECK(linalg::max_abs(b_transform(j, Mat::Zero(4, 4)).matrix() - j.matrix()) == 0.0);
    }

    TEST_CASE("B-transforms preserve validity, type and Poisson tensor") {
        for_all(16, 60, [](Gen& gen, int k) {
            const int n = gen.integer(1, 3);
            const auto j = suites::random_gcs(n, k, gen.engine());
            const auto jb = b_transform(j, gen.antisymmetric(2 * n, 0.7));
            CHECK(validate_gcs(jb).pass);
            CHECK(type_of(jb) == type_of(j));
            CHECK(linalg::max_abs(poisson_of(jb) - poisson_of(j)) < 1e-9);
        });
    }

    TEST_CASE("exponential law for shears") {
        for_all(17, 20, [](Gen& gen, int k) {
            const int n = gen.integer(1, 3);
            const auto j = suites::random_gcs(n, k, gen.engine());
            const Mat b1 = gen.antisymmetric(2 * n, 0.5);
            const Mat b2 = gen.antisymmetric(2 * n, 0.5);
            CHECK(linalg::max_abs(b_transform(b_transform(j, b1), b2).matrix() - b_transform(j, b1 + b2).matrix()) <
                  1e-10);
        });
    }

    TEST_CASE("shear acts as X + xi - i_X B") {
        Gen gen(18);
        const Mat b = gen.antisymmetric(4);
        const Vec x = gen.vector(4);
        const Vec xi = gen.vector(4);
        Vec stacked(8);
        stacked << x, xi;
        const Vec image = b_shear(b) * stacked;
        // ι_X B = B(X, ·) has components Bᵀ X.
        CHECK(linalg::max_abs(image.head(4) - x) == 0.0);
        CHECK(linalg::max_abs(image.tail(4) - (xi - b.transpose() * x)) < 1e-14);
    }
}

TEST_SUITE("dirac subspaces") {
    TEST_CASE("eigenbundle of the complex structure is T01 plus T*10") {
        for (int n = 1; n <= 3; ++n) {
            const Mat i = linalg::standard_complex_structure(n);
            CHECK(subspace_distance(i_eigenbundle(gcs_from_complex(i)), hand_built_l_i(n)) < 1e-10);
            CHECK(subspace_distance(holomorphic_poisson_dirac(i, CMat::Zero(2 * n, 2 * n)), hand_built_l_i(n)) < 1e-10);
        }
    }

    TEST_CASE("eigenbundle of a symplectic structure is the graph of -i omega") {
        for_all(19, 20, [](Gen& gen, int) {
            const int n = gen.integer(1, 3);
            const Mat w = gen.symplectic(n);
            const DiracSubspace expected = form_graph(-kI * flat_of(w).cast<Complex>());
            CHECK(subspace_distance(i_eigenbundle(gcs_from_symplectic(w)), expected) < 1e-10);
        });
    }

    TEST_CASE("eigenbundle round trip") {
        for_all(20, 20, [](Gen& gen, int k) {
            const int n = gen.integer(1, 3);
            const auto j = suites::random_gcs(n, k, gen.engine());
            const DiracSubspace l = i_eigenbundle(j);
            CHECK(l.is_maximal());
            CHECK(l.isotropy_defect() < 1e-10);
            CHECK(l.real_intersection_dim() == 0);
            CHECK(linalg::max_abs(dirac_to_gcs(l).matrix() - j.matrix()) < 1e-9);
        });
    }

    TEST_CASE("real index is reported when L meets its conjugate") {
        try {
            (void)dirac_to_gcs(tangent_space(4));
            FAIL("tangent space must be refused");
        } catch (const NondegeneracyError& e) {
            CHECK(e.intersection_dim() == 4);
        }
    }
}

TEST_SUITE("spinors") {
    TEST_CASE("Clifford action on the unit spinor") {
        const Spinor one = Spinor::scalar(2, 1.0);
        const Spinor killed = clifford_act(DoubleVector::real(unit(2, 0), Vec::Zero(2)), one);
        CHECK(killed.max_abs() == 0.0);
        const Spinor wedged = clifford_act(DoubleVector::real(Vec::Zero(2), unit(2, 0)), one);
        CHECK(wedged[0b01] == Complex(1.0));
        CHECK((wedged - Spinor::covector(2, unit(2, 0).cast<Complex>())).max_abs() == 0.0);
    }

    TEST_CASE("Clifford relation u.u.rho = <u,u> rho") {
        for_all(21, 50, [](Gen& gen, int) {
            const int dim = 2 * gen.integer(1, 3);
            const DoubleVector u{random_cvec(gen, dim), random_cvec(gen, dim)};
            const Spinor rho = Spinor::from_vector(dim, random_cvec(gen, 1 << dim));
            const Spinor lhs = clifford_act(u, clifford_act(u, rho));
            const Spinor rhs = rho * natural_pairing(u, u);
            const double scale = (u.tangent.squaredNorm() + u.cotangent.squaredNorm()) * rho.max_abs();
            CHECK((lhs - rhs).max_abs() <= 1e-12 * std::max(1.0, scale));
        });
    }

    TEST_CASE("Clifford matrix matches the action") {
        Gen gen(22);
        const DoubleVector u{random_cvec(gen, 4), random_cvec(gen, 4)};
        const Spinor rho = Spinor::from_vector(4, random_cvec(gen, 16));
        CHECK(linalg::max_abs(clifford_matrix(u) * rho.as_vector() - clifford_act(u, rho).as_vector()) < 1e-13);
    }

    TEST_CASE("annihilator of 1 is the tangent space") {
        const Annihilator a = annihilator(Spinor::scalar(4, 1.0));
        CHECK(a.pure);
        CHECK(subspace_distance(a.subspace, tangent_space(4)) < 1e-12);
    }

    TEST_CASE("annihilator of the holomorphic volume form is L_I") {
        const Spinor omega = one_form(2, dz(2, 0)).wedge(one_form(2, dz(2, 1)));
        const Annihilator a = annihilator(omega);
        CHECK(a.pure);
        CHECK(subspace_distance(a.subspace, hand_built_l_i(2)) < 1e-10);
    }

    TEST_CASE("dz1 plus dz1 dz2 dz2bar is pure") {
        // It factors as dz1 ∧ exp(dz2 ∧ dz̄2); ∂z2 ± dz̄2 and ∂z̄2 ± dz2 join ∂z̄1 and dz1 in the kernel.
        const Spinor dz1 = one_form(2, dz(2, 0));
        const Spinor rho = dz1 + dz1.wedge(one_form(2, dz(2, 1))).wedge(one_form(2, CVec(dz(2, 1).conjugate())));
        const Annihilator a = annihilator(rho);
        CHECK(a.pure);
        CHECK(a.subspace.dim() == 4);
    }

    TEST_CASE("mixed-degree spinor is not pure") {
        // 1 + dz1 is killed only by vectors annihilating dz1.
        const Spinor rho = Spinor::scalar(4, 1.0) + one_form(2, dz(2, 0));
        const Annihilator a = annihilator(rho);
        CHECK_FALSE(a.pure);
        CHECK(a.subspace.dim() == 3);
        CHECK(a.subspace.isotropy_defect() < 1e-10);
    }

    TEST_CASE("zero spinor is refused") { CHECK_THROWS((void)annihilator(Spinor(4))); }

    TEST_CASE("degenerate datum fails the nondegeneracy test") {
        CHECK_FALSE(nondegeneracy_test(Mat::Zero(2, 2), Spinor::scalar(2, 1.0)));
    }

    TEST_CASE("exponential of i omega passes and pairs to 2i") {
        const Spinor rho = pure_spinor_assemble(Mat::Zero(2, 2), area_form(), Spinor::scalar(2, 1.0));
        CHECK(rho[0] == Complex(1.0));
        CHECK(rho[0b11] == kI);
        CHECK(nondegeneracy_test(area_form(), Spinor::scalar(2, 1.0)));
        CHECK(std::abs(chevalley_pairing(rho, rho.conjugated()) - 2.0 * kI) < 1e-14);
    }

    TEST_CASE("holomorphic volume form of C^2 is nondegenerate") {
        const Spinor omega = one_form(2, dz(2, 0)).wedge(one_form(2, dz(2, 1)));
        CHECK(is_decomposable(omega, 2));
        CHECK(nondegeneracy_test(Mat::Zero(4, 4), omega));
    }

    TEST_CASE("dz against its conjugate pairs to -2i") {
        const Spinor a = one_form(1, dz(1, 0));
        CHECK(std::abs(chevalley_pairing(a, a.conjugated()) + 2.0 * kI) < 1e-14);
    }

    TEST_CASE("top form against 1 carries the transpose sign") {
        for (int n = 1; n <= 3; ++n) {
            Spinor vol(2 * n);
            vol[(Monomial{1} << (2 * n)) - 1] = 3.0;
            const Complex expected = 3.0 * static_cast<double>(transpose_sign(0));
            CHECK(chevalley_pairing(vol, Spinor::scalar(2 * n, 1.0)) == expected);
            CHECK(chevalley_pairing(Spinor::scalar(2 * n, 1.0), vol) ==
                  3.0 * static_cast<double>(transpose_sign(2 * n)));
        }
    }

    TEST_CASE("assembled pure spinors are pure") {
        for_all(23, 30, [](Gen& gen, int) {
            const int n = gen.integer(1, 3);
            const int k = gen.integer(0, n);
            const Mat i = gen.complex_structure(n);
            // (1,0)-forms for I are the +i eigencovectors of Iᵀ.
            Eigen::ComplexEigenSolver<CMat> eig(i.transpose().cast<Complex>());
            Spinor omega = Spinor::scalar(2 * n, 1.0);
            int taken = 0;
            for (int c = 0; c < 2 * n && taken < k; ++c)
                if (eig.eigenvalues()(c).imag() > 0) {
                    omega = omega.wedge(Spinor::covector(2 * n, eig.eigenvectors().col(c)));
                    ++taken;
                }
            const Spinor rho = pure_spinor_assemble(gen.antisymmetric(2 * n), gen.antisymmetric(2 * n), omega);
            CHECK(annihilator(rho).pure);
        });
    }

    TEST_CASE("Chevalley pairing detects transversality") {
        for_all(24, 40, [](Gen& gen, int k) {
            const int n = gen.integer(1, 3);
            const DiracSubspace l = i_eigenbundle(suites::random_gcs(n, k, gen.engine()));
            const Spinor rho = pure_spinor_of(l);
            const Annihilator a = annihilator(rho);
            const double pairing = std::abs(chevalley_pairing(rho, rho.conjugated()));
            CHECK(a.subspace.real_intersection_dim() == 0);
            CHECK(pairing > 1e-6 * rho.max_abs() * rho.max_abs());
        });
        // Real controls: 1 and dx₁ have L ∩ L̄ ≠ 0 and vanishing pairing.
        const Spinor one = Spinor::scalar(4, 1.0);
        CHECK(chevalley_pairing(one, one) == Complex(0.0));
        const Spinor dx = Spinor::covector(4, CVec(unit(4, 0).cast<Complex>()));
        CHECK(annihilator(dx).subspace.real_intersection_dim() > 0);
        CHECK(chevalley_pairing(dx, dx.conjugated()) == Complex(0.0));
    }
}

TEST_SUITE("baer sums") {
    TEST_CASE("tangent space is a two-sided unit") {
        for_all(25, 30, [](Gen& gen, int k) {
            const int n = gen.integer(1, 3);
            const DiracSubspace l = i_eigenbundle(suites::random_gcs(n, k, gen.engine()));
            const DiracSubspace t = tangent_space(2 * n);
            CHECK(subspace_distance(baer_sum(l, t).sum, l) < 1e-8);
            CHECK(subspace_distance(baer_sum(t, l).sum, l) < 1e-8);
        });
    }

    TEST_CASE("transpose is an inverse in type 0") {
        for_all(26, 30, [](Gen& gen, int) {
            const int n = gen.integer(1, 3);
            const auto j = b_transform(gcs_from_symplectic(gen.symplectic(n)), gen.antisymmetric(2 * n, 0.5));
            const DiracSubspace l = i_eigenbundle(j);
            const BaerSum s = baer_sum(l, l.transpose());
            CHECK(s.maximal);
            CHECK(subspace_distance(s.sum, tangent_space(2 * n)) < 1e-8);
        });
    }

    TEST_CASE("transpose inverse fails off type 0") {
        // L = T* gives T* ⊠ T* = T*.
        const Mat i = linalg::standard_complex_structure(1);
        const DiracSubspace l = i_eigenbundle(gcs_from_complex(i));
        CHECK(subspace_distance(baer_sum(l, l.transpose()).sum, tangent_space(2)) > 0.5);
    }

    TEST_CASE("sum with the conjugate transpose is the graph of -i/2 pi") {
        for_all(27, 40, [](Gen& gen, int k) {
            const int n = gen.integer(1, 3);
            const auto j = suites::random_gcs(n, k, gen.engine());
            const DiracSubspace l = i_eigenbundle(j);
            const DiracSubspace expected = bivector_graph(-0.5 * kI * poisson_of(j).cast<Complex>());
            CHECK(subspace_distance(baer_sum(l, l.conjugate().transpose()).sum, expected) < 1e-8);
        });
    }

    TEST_CASE("associative on form graphs") {
        for_all(28, 20, [](Gen& gen, int) {
            const int dim = 2 * gen.integer(1, 3);
            auto graph = [&] { return form_graph(gen.antisymmetric(dim).cast<Complex>() + kI * gen.antisymmetric(dim)); };
            const DiracSubspace a = graph(), b = graph(), c = graph();
            const DiracSubspace left = baer_sum(baer_sum(a, b).sum, c).sum;
            const DiracSubspace right = baer_sum(a, baer_sum(b, c).sum).sum;
            CHECK(subspace_distance(left, right) < 1e-8);
        });
    }
}

TEST_SUITE("submanifolds") {
    TEST_CASE("complex subspace is generalized Poisson for the complex structure") {
        const Mat i = linalg::standard_complex_structure(2);
        const Mat n = Mat::Identity(4, 2);
        CHECK(submanifold_tests(gcs_from_complex(i), n).generalized_poisson);
    }

    TEST_CASE("symplectic subspace is a Poisson transversal") {
        const Mat w = linalg::standard_complex_structure(2);
        const Mat n = Mat::Identity(4, 2);
        const auto verdict = submanifold_tests(gcs_from_symplectic(w), n);
        CHECK(verdict.transversal);
        CHECK_FALSE(verdict.generalized_poisson);
    }

    TEST_CASE("generalized Poisson for J1 implies transversal for J2") {
        // Kähler block ⊕ generic block, pulled back by a random frame; N lies in the Kähler block.
        int tested = 0;
        for_all(29, 500, [&](Gen& gen, int) {
            const gk::BiHermitianPoint base = suites::kernel_block_point(1, 0, 2, gen.seed());
            const Mat a = gen.frame(base.dim());
            gk::BiHermitianPoint p;
            p.g = a.transpose() * base.g * a;
            p.b = a.transpose() * (base.b + gen.antisymmetric(base.dim(), 0.2)) * a;
            p.i_plus = a.inverse() * base.i_plus * a;
            p.i_minus = a.inverse() * base.i_minus * a;
            const gk::GKPair q = gk::assemble_gk(p);
            const Mat conormal = a.transpose() * Mat::Identity(base.dim(), 2);
            const auto first = submanifold_tests(q.j1, conormal);
            if (!first.generalized_poisson) return;
            ++tested;
            CHECK(submanifold_tests(q.j2, conormal).transversal);
        });
        CHECK(tested > 400);
    }
}
