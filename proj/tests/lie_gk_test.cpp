#include "gkflow/errors.hpp"
#include "gkflow/lie_gk.hpp"

#include "doctest.h"
#include "generators.hpp"

#include <map>
#include <set>

using namespace gkflow;
using namespace gkflow::lie;
using gkflow::testing::for_all;
using gkflow::testing::Gen;

namespace {

RationalVector basis_vector(int dim, int k) {
    RationalVector v(static_cast<std::size_t>(dim), Rational(0));
    v[static_cast<std::size_t>(k)] = 1;
    return v;
}

RationalVector mat_apply(const RationalMatrix& m, const RationalVector& v) {
    RationalVector out(v.size(), Rational(0));
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < v.size(); ++c) out[r] += m[r][c] * v[c];
    return out;
}

RationalVector scaled(const RationalVector& v, Rational s) {
    RationalVector out = v;
    for (auto& e : out) e *= s;
    return out;
}

bool is_zero(const RationalVector& v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& e) { return e.numerator() == 0; });
}

RationalVector random_rational(Gen& gen, int dim) {
    RationalVector v(static_cast<std::size_t>(dim));
    for (auto& e : v) e = Rational(gen.integer(-5, 5), gen.integer(1, 4));
    return v;
}

Rational pairing(const RationalMatrix& metric, const RationalVector& a, const RationalVector& b) {
    Rational acc(0);
    for (std::size_t r = 0; r < a.size(); ++r)
        for (std::size_t c = 0; c < b.size(); ++c) acc += a[r] * metric[r][c] * b[c];
    return acc;
}

/// Random antisymmetric bracket; generically not degenerate from dimension 3.
ComplexBracket random_bracket(int dim, Gen& gen) {
    ComplexBracket b(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            for (int k = 0; k < dim; ++k) {
                const Complex v(gen.normal(), gen.normal());
                b(i, j, k) = v;
                b(j, i, k) = -v;
            }
    return b;
}

}  // namespace

TEST_SUITE("root data") {
    TEST_CASE("products of A1 satisfy the root-sum criterion") {
        CHECK(root_sum_criterion(root_datum("A1")));
        CHECK(root_sum_criterion(root_datum("A1xA1xA1")));
        CHECK_FALSE(root_sum_witness(root_datum("A1xA1")).has_value());
    }

    TEST_CASE("A2, B2 and G2 fail with a witness pair") {
        for (const char* name : {"A2", "B2", "G2"}) {
            CAPTURE(name);
            const RootDatum rd = root_datum(name);
            CHECK_FALSE(root_sum_criterion(rd));
            const auto w = root_sum_witness(rd);
            REQUIRE(w.has_value());
            Weight sum = w->alpha;
            for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += w->beta[k];
            CHECK(is_root(rd, sum));
        }
    }

    TEST_CASE("root counts of the table") {
        CHECK(root_datum("A2").positive.size() == 3);
        CHECK(root_datum("B2").positive.size() == 4);
        CHECK(root_datum("G2").positive.size() == 6);
        CHECK(root_datum("G2").roots.size() == 12);
    }

    TEST_CASE("criterion agrees with the structural classification on the whole table") {
        const auto table = supported_table();
        CHECK(table.size() >= 9);
        for (const RootDatum& rd : table) {
            CAPTURE(rd.name);
            CHECK(validate_root_datum(rd));
            CHECK(root_sum_criterion(rd) == classify_products_of_A1(rd));
        }
    }

    TEST_CASE("unsupported names are refused") { CHECK_THROWS((void)root_datum("E8")); }
}

TEST_SUITE("compact algebras") {
    TEST_CASE("abelian algebra has no brackets") {
        const CompactAlgebra a = build_compact_algebra(2, 0);
        CHECK(a.dim == 2);
        CHECK(std::all_of(a.c.c.begin(), a.c.c.end(), [](const Rational& r) { return r.numerator() == 0; }));
    }

    TEST_CASE("su(2) is exact") {
        const CompactAlgebra a = build_compact_algebra(0, 1);
        CHECK(a.dim == 3);
        CHECK(validate_algebra(a).exact());
        // [x,y] = h cyclic.
        CHECK(bracket(a, basis_vector(3, 0), basis_vector(3, 1)) == basis_vector(3, 2));
        CHECK(bracket(a, basis_vector(3, 1), basis_vector(3, 2)) == basis_vector(3, 0));
    }

    TEST_CASE("H lives on the su(2) block of u(1) + su(2)") {
        const CompactAlgebra a = build_compact_algebra(1, 1);
        CHECK(a.dim == 4);
        auto h = [&](int i, int j, int k) {
            return pairing(a.metric, bracket(a, basis_vector(4, i), basis_vector(4, j)), basis_vector(4, k));
        };
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) CHECK(h(0, j, k).numerator() == 0);
        CHECK(h(1, 2, 3).numerator() != 0);
    }

    TEST_CASE("every product is exact") {
        for (int n = 0; n <= 3; ++n)
            for (int m = 0; m <= 3; ++m) {
                CAPTURE(n);
                CAPTURE(m);
                CHECK(validate_algebra(build_compact_algebra(n, m)).exact());
            }
    }

    TEST_CASE("negative counts are refused") { CHECK_THROWS_AS((void)build_compact_algebra(-1, 0), InvalidStructureError); }

    TEST_CASE("matrix models satisfy Jacobi and invariance to 1e-12") {
        const std::map<std::string, std::pair<int, std::size_t>> expected{
            {"A1", {3, 1}}, {"A2", {8, 3}}, {"B2", {10, 4}}, {"G2", {14, 6}}};
        for (const auto& [name, shape] : expected) {
            CAPTURE(name);
            const FloatAlgebra a = float_algebra(name);
            CHECK(a.dim == shape.first);
            CHECK(a.root_vectors.size() == shape.second);
            CHECK(jacobi_defect(a) <= 1e-12);
            CHECK(ad_invariance_defect(a) <= 1e-12);
        }
    }
}

TEST_SUITE("complex structures") {
    TEST_CASE("abelian algebra keeps the torus structure") {
        const CompactAlgebra a = build_compact_algebra(2, 0);
        const RationalMatrix i = invariant_complex_structure(a, product_pairing(a, 0));
        const RationalVector ie0 = mat_apply(i, basis_vector(2, 0));
        CHECK((ie0 == basis_vector(2, 1) || ie0 == scaled(basis_vector(2, 1), -1)));
        const auto report = check_complex_structure(a, i);
        CHECK(report.square_is_minus_one);
        CHECK(report.metric_compatible);
        CHECK(report.closed);
    }

    TEST_CASE("u(1) + su(2) is closed for both positivity choices") {
        const CompactAlgebra a = build_compact_algebra(1, 1);
        for (int sign : {1, -1}) {
            const RationalMatrix i = invariant_complex_structure(a, product_pairing(a, 0), {sign});
            const auto report = check_complex_structure(a, i);
            CHECK(report.square_is_minus_one);
            CHECK(report.metric_compatible);
            CHECK(report.closed);
        }
    }

    TEST_CASE("bracket one on the su(2) root plane, by hand") {
        // x − iy ∈ 𝔤^{1,0} gives Ix = y; then [x,h]₁ = ½[Ix,h] = ½[y,h] = ½x since I h ∈ 𝔞.
        const CompactAlgebra a = build_compact_algebra(1, 1);
        for (int sign : {1, -1}) {
            const RationalMatrix i = invariant_complex_structure(a, product_pairing(a, 0), {sign});
            const RationalVector x = basis_vector(4, 1), y = basis_vector(4, 2), h = basis_vector(4, 3);
            CHECK(mat_apply(i, x) == scaled(y, sign));
            CHECK(bracket_one(a, i, x, h) == scaled(x, Rational(sign, 2)));
            CHECK(is_zero(bracket_one(a, i, x, y)));
            CHECK(is_zero(bracket_one(a, i, basis_vector(4, 0), h)));
        }
    }

    TEST_CASE("bracket one is antisymmetric") {
        const CompactAlgebra a = build_compact_algebra(2, 2);
        const RationalMatrix i = invariant_complex_structure(a, product_pairing(a, 2));
        for_all(81, 50, [&](Gen& gen, int) {
            const RationalVector x = random_rational(gen, a.dim), y = random_rational(gen, a.dim);
            RationalVector sum = bracket_one(a, i, x, y);
            const RationalVector other = bracket_one(a, i, y, x);
            for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += other[k];
            CHECK(is_zero(sum));
        });
    }

    TEST_CASE("positive root spaces close, and a flipped root breaks closure") {
        for (const char* name : {"A2", "B2", "G2"}) {
            CAPTURE(name);
            const FloatAlgebra a = float_algebra(name);
            CHECK(positive_closure(a));
            CHECK_FALSE(positive_closure(a, static_cast<int>(a.root_vectors.size()) - 1));
        }
    }
}

TEST_SUITE("degeneracy") {
    TEST_CASE("abelian bracket is degenerate") {
        CHECK(degeneracy_test(abelian_bracket(3)).degenerate);
    }

    TEST_CASE("Heisenberg bracket is not degenerate and names its triple") {
        const DegeneracyResult r = degeneracy_test(heisenberg_bracket());
        CHECK_FALSE(r.degenerate);
        REQUIRE(r.witness.has_value());
        const std::set<int> triple(r.witness->begin(), r.witness->end());
        CHECK(triple == std::set<int>{0, 1, 2});
    }

    TEST_CASE("affine bracket is degenerate") { CHECK(degeneracy_test(affine_bracket()).degenerate); }

    TEST_CASE("trilinear test agrees with the plane criterion on 1000 brackets") {
        for_all(82, 1000, [](Gen& gen, int k) {
            const int dim = gen.integer(1, 4);
            const ComplexBracket b = (k % 2 == 0) ? random_degenerate_bracket(dim, gen.engine()) : random_bracket(dim, gen);
            CHECK(degeneracy_test(b).degenerate == plane_criterion(b, gen.engine()));
        });
    }

    TEST_CASE("exact degeneracy test matches the floating one") {
        const CompactAlgebra a = build_compact_algebra(1, 1);
        const RationalMatrix i = invariant_complex_structure(a, product_pairing(a, 0));
        const ConormalBracket cb = conormal_bracket(a, i, a.circles());
        CHECK(cb.complex_linear);
        CHECK(degeneracy_test(cb.bracket).degenerate == degeneracy_test(to_complex(cb.bracket)).degenerate);
    }

    TEST_CASE("torus conormal bracket of su(2) is degenerate, of A2 is not") {
        const ComplexBracket a1 = torus_conormal_bracket(float_algebra("A1"));
        CHECK(a1.dim == 1);
        CHECK(degeneracy_test(a1).degenerate);
        CHECK_FALSE(degeneracy_test(torus_conormal_bracket(float_algebra("A2"))).degenerate);
    }
}

TEST_SUITE("twists") {
    TEST_CASE("abelian bracket stays degenerate under any twist") {
        Gen gen(83);
        const CMat a = gen.matrix(3, 3).cast<Complex>();
        CHECK(twisted_degeneracy(abelian_bracket(3), a));
    }

    TEST_CASE("affine bracket with an admissible diagonal twist") {
        CMat a = CMat::Zero(2, 2);
        a(0, 0) = 2.5;
        a(1, 1) = 2.5;
        CHECK(twisted_degeneracy(affine_bracket(), a));
        a(1, 1) = 1.0;
        CHECK_THROWS_AS((void)twist(affine_bracket(), a), InvalidStructureError);
    }

    TEST_CASE("degenerate brackets stay degenerate under 200 random twists") {
        int twisted = 0;
        for_all(84, 200, [&](Gen& gen, int) {
            const ComplexBracket b = random_degenerate_bracket(gen.integer(2, 4), gen.engine());
            const auto a = random_twist(b, gen.engine());
            if (!a) return;
            ++twisted;
            CHECK(twisted_degeneracy(b, *a));
        });
        CHECK(twisted == 200);
    }

    TEST_CASE("Heisenberg stays non-degenerate") {
        Gen gen(85);
        const ComplexBracket h = heisenberg_bracket();
        const auto a = random_twist(h, gen.engine());
        REQUIRE(a.has_value());
        CHECK_FALSE(twisted_degeneracy(h, *a));
    }
}

TEST_SUITE("eligibility") {
    TEST_CASE("verdict table") {
        struct Row {
            int n, m;
            const char* y;
            Verdict verdict;
        };
        const std::vector<Row> rows{
            {2, 2, "Z^1 x T^2", Verdict::eligible_case_i}, {0, 2, "pt x T^2", Verdict::eligible_case_i},
            {2, 0, "pt", Verdict::eligible_case_i},        {0, 2, "T", Verdict::eligible_case_i},
            {1, 1, "T", Verdict::eligible_case_ii},        {3, 1, "pt x T^2", Verdict::eligible_case_ii},
            {1, 2, "T", Verdict::parity_obstruction},      {0, 1, "T", Verdict::parity_obstruction},
        };
        for (const Row& row : rows) {
            CAPTURE(row.n);
            CAPTURE(row.m);
            CAPTURE(row.y);
            const CompactAlgebra a = build_compact_algebra(row.n, row.m);
            const EligibilityReport r = blowup_eligibility(row.n, row.m, parse_y_spec(row.y, a));
            CHECK(r.verdict == row.verdict);
            if (row.verdict == Verdict::eligible_case_i || row.verdict == Verdict::eligible_case_ii) {
                CHECK(r.conormal_zero);
                REQUIRE(r.conormal.has_value());
                CHECK(r.conormal->complex_linear);
                CHECK(r.conormal->closed);
                for (const auto& e : r.conormal->bracket.c) CHECK(e.is_zero());
            }
        }
    }

    TEST_CASE("extra A2, B2 or G2 factor is rejected with a witness") {
        for (const char* extra : {"A2", "B2", "G2"}) {
            CAPTURE(extra);
            const CompactAlgebra a = build_compact_algebra(1, 1);
            const EligibilityReport r = blowup_eligibility(1, 1, parse_y_spec("T", a), extra);
            CHECK(r.verdict == Verdict::torus_not_degenerate);
            CHECK(r.witness.has_value());
        }
    }

    TEST_CASE("a nonzero conormal bracket is not covered") {
        const CompactAlgebra a = build_compact_algebra(0, 2);
        const EligibilityReport r = blowup_eligibility(0, 2, parse_y_spec("pt", a));
        CHECK(r.verdict == Verdict::not_covered);
        CHECK_FALSE(r.conormal_zero);
    }

    TEST_CASE("malformed Y is refused") {
        const CompactAlgebra a = build_compact_algebra(2, 2);
        CHECK_THROWS((void)parse_y_spec("banana", a));
    }

    TEST_CASE("verdict names") {
        CHECK(to_string(Verdict::eligible_case_i) == "eligible_case_i");
        CHECK(to_string(Verdict::torus_not_degenerate) == "torus_not_degenerate");
    }
}
