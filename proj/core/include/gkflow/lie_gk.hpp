#pragma once

#include "gkflow/linalg.hpp"

#include <boost/rational.hpp>

#include <array>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace gkflow::lie {

using Rational = boost::rational<long long>;

/// Exact complex number with rational parts.
struct GaussRational {
    Rational re{0};
    Rational im{0};

    friend GaussRational operator+(const GaussRational& a, const GaussRational& b) { return {a.re + b.re, a.im + b.im}; }
    friend GaussRational operator-(const GaussRational& a, const GaussRational& b) { return {a.re - b.re, a.im - b.im}; }
    friend GaussRational operator*(const GaussRational& a, const GaussRational& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend bool operator==(const GaussRational& a, const GaussRational& b) = default;
    [[nodiscard]] bool is_zero() const { return re.numerator() == 0 && im.numerator() == 0; }
    [[nodiscard]] Complex to_complex() const { return {boost::rational_cast<double>(re), boost::rational_cast<double>(im)}; }
};

// ---------------------------------------------------------------- root data

using Weight = std::vector<int>;

/// Roots in simple-root coordinates.
struct RootDatum {
    std::string name;
    int rank = 0;
    /// A_ij = ⟨α_i, α_j^∨⟩.
    std::vector<std::vector<int>> cartan;
    std::vector<Weight> roots;
    std::vector<Weight> positive;
};

/// "A1", "A2", "B2", "G2", or products joined by 'x' (e.g. "A1xA1xA1", "A2xA1").
[[nodiscard]] RootDatum root_datum(std::string_view name);
[[nodiscard]] RootDatum product(const RootDatum& a, const RootDatum& b);
[[nodiscard]] bool is_root(const RootDatum& rd, const Weight& w);
/// ± pairing and closure of the positive set under root sums.
[[nodiscard]] bool validate_root_datum(const RootDatum& rd);

struct RootPair {
    Weight alpha;
    Weight beta;
};

/// First pair of positive roots whose sum is a root, in table order.
[[nodiscard]] std::optional<RootPair> root_sum_witness(const RootDatum& rd);
[[nodiscard]] bool root_sum_criterion(const RootDatum& rd);
/// Structural test: the Cartan matrix is diagonal.
[[nodiscard]] bool classify_products_of_A1(const RootDatum& rd);
/// A1, A2, B2, G2 and their products up to rank 3.
[[nodiscard]] std::vector<RootDatum> supported_table();

// ---------------------------------------------------------------- brackets

/// Structure constants c(i,j,k) = coefficient of e_k in [e_i, e_j].
template <class Scalar>
struct BracketTable {
    int dim = 0;
    std::vector<Scalar> c;

    BracketTable() = default;
    explicit BracketTable(int n) : dim(n), c(static_cast<std::size_t>(n) * n * n, Scalar{}) {}

    [[nodiscard]] Scalar& operator()(int i, int j, int k) { return c[index(i, j, k)]; }
    [[nodiscard]] const Scalar& operator()(int i, int j, int k) const { return c[index(i, j, k)]; }

private:
    [[nodiscard]] std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * dim + j) * dim + k;
    }
};

using ExactBracket = BracketTable<GaussRational>;
using ComplexBracket = BracketTable<Complex>;

[[nodiscard]] ComplexBracket to_complex(const ExactBracket& b);
[[nodiscard]] CVec apply_bracket(const ComplexBracket& b, const CVec& x, const CVec& y);

[[nodiscard]] ComplexBracket abelian_bracket(int dim);
/// [x,y] = z on a 3-dim space.
[[nodiscard]] ComplexBracket heisenberg_bracket();
/// Two-dimensional [x,y] = y.
[[nodiscard]] ComplexBracket affine_bracket();
/// [x,y] = φ(x)y − φ(y)x, the plane-preserving family.
[[nodiscard]] ComplexBracket functional_bracket(const CVec& phi);

struct DegeneracyResult {
    bool degenerate = true;
    /// Basis triple with nonzero u·[v,w] + v·[w,u] + w·[u,v] in Sym².
    std::optional<std::array<int, 3>> witness;
};

/// Exact evaluation of the trilinear map on all basis triples.
[[nodiscard]] DegeneracyResult degeneracy_test(const ExactBracket& b);
[[nodiscard]] DegeneracyResult degeneracy_test(const ComplexBracket& b, double tol = 1e-10);
/// [x,y] ∈ span(x,y) on `pairs` random pairs.
[[nodiscard]] bool plane_criterion(const ComplexBracket& b, std::mt19937_64& rng, int pairs = 64, double tol = 1e-9);
[[nodiscard]] double antisymmetry_defect(const ComplexBracket& b);

/// [u,v]_A = [Au, v]; throws InvalidStructureError when the result is not antisymmetric.
[[nodiscard]] ComplexBracket twist(const ComplexBracket& b, const CMat& a, double tol = 1e-9);
[[nodiscard]] bool twisted_degeneracy(const ComplexBracket& b, const CMat& a, double tol = 1e-9);
/// Basis of the maps A for which [Au, v] is antisymmetric.
[[nodiscard]] std::vector<CMat> admissible_twists(const ComplexBracket& b);
/// A random invertible admissible twist, or nothing when only singular ones exist.
[[nodiscard]] std::optional<CMat> random_twist(const ComplexBracket& b, std::mt19937_64& rng);
/// Random degenerate bracket of dimension `dim`: abelian, plane-preserving functional, or arbitrary in dim 2.
[[nodiscard]] ComplexBracket random_degenerate_bracket(int dim, std::mt19937_64& rng);

// ---------------------------------------------------------------- exact u(1)ⁿ × su(2)ᵐ

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Basis order: 𝔞 = e_0..e_{n−1}, then (x, y, h) per su(2) factor with [x,y] = h cyclic.
struct CompactAlgebra {
    int n_u1 = 0;
    int m_su2 = 0;
    int dim = 0;
    BracketTable<Rational> c;
    RationalMatrix metric;

    /// Indices of 𝔞 ⊕ 𝔱: the circle factors of T = (S¹)ⁿ × (S¹)ᵐ in order.
    [[nodiscard]] std::vector<int> circles() const;
    /// Indices spanning the root planes (𝔤_α ⊕ 𝔤̄_α)_ℝ.
    [[nodiscard]] std::vector<int> root_plane() const;
};

/// Throws InvalidStructureError on negative counts.
[[nodiscard]] CompactAlgebra build_compact_algebra(int n_u1, int m_su2);

struct AlgebraReport {
    Rational jacobi_defect{0};
    Rational antisymmetry_defect{0};
    Rational ad_invariance_defect{0};
    /// Total antisymmetry of H(ξ,η,ζ) = ⟨[ξ,η],ζ⟩.
    Rational h_antisymmetry_defect{0};
    [[nodiscard]] bool exact() const {
        return jacobi_defect.numerator() == 0 && antisymmetry_defect.numerator() == 0 &&
               ad_invariance_defect.numerator() == 0 && h_antisymmetry_defect.numerator() == 0;
    }
};

[[nodiscard]] AlgebraReport validate_algebra(const CompactAlgebra& a);

/// Complex structure on 𝔞 ⊕ 𝔱 pairing circle c_{2j} ↦ c_{2j+1} within each block; blocks list circle positions.
struct TorusPairing {
    std::vector<std::pair<int, int>> pairs;
};

/// Product pairing: the first `circles − tail` circles pair among themselves, then the last `tail`.
[[nodiscard]] TorusPairing product_pairing(const CompactAlgebra& a, int tail);

/// Positive root per su(2) factor: +1 takes x − iy in 𝔤^{1,0}, −1 the conjugate.
[[nodiscard]] RationalMatrix invariant_complex_structure(const CompactAlgebra& a, const TorusPairing& j0,
                                                         const std::vector<int>& positivity = {});

struct ComplexStructureReport {
    bool square_is_minus_one = false;
    bool metric_compatible = false;
    /// [𝔤^{1,0}, 𝔤^{1,0}] ⊂ 𝔤^{1,0}.
    bool closed = false;
};

[[nodiscard]] ComplexStructureReport check_complex_structure(const CompactAlgebra& a, const RationalMatrix& i);

using RationalVector = std::vector<Rational>;

[[nodiscard]] RationalVector bracket(const CompactAlgebra& a, const RationalVector& x, const RationalVector& y);
/// ½([Iξ,η] + [ξ,Iη]).
[[nodiscard]] RationalVector bracket_one(const CompactAlgebra& a, const RationalMatrix& i, const RationalVector& x,
                                         const RationalVector& y);

/// Y = Y' × (last `circle_factors` circles of T), Y' spanned by the first `y_prime_pairs` pairs of the head block.
struct YSpec {
    int y_prime_pairs = 0;
    int circle_factors = 0;
};

/// "pt x T^2", "Z^1 x T^3", "T" (whole torus) or "pt".
[[nodiscard]] YSpec parse_y_spec(std::string_view text, const CompactAlgebra& a);

struct ConormalBracket {
    /// Real basis b_k of the conormal fiber (via the metric); complex coordinates use b_k, I b_k.
    std::vector<RationalVector> complex_basis;
    ExactBracket bracket;
    /// [Iξ,η]₁ = I[ξ,η]₁ held on all basis pairs.
    bool complex_linear = false;
    /// The fiber is closed under [,]₁.
    bool closed = false;
};

/// Throws InvalidStructureError when TY is not I-invariant.
[[nodiscard]] ConormalBracket conormal_bracket(const CompactAlgebra& a, const RationalMatrix& i,
                                               const std::vector<int>& tangent_indices);
/// Tangent indices of Y inside 𝔤 for `y` under the product pairing with tail = circle_factors.
[[nodiscard]] std::vector<int> y_tangent_indices(const CompactAlgebra& a, const YSpec& y);

enum class Verdict { eligible_case_i, eligible_case_ii, torus_not_degenerate, parity_obstruction, not_covered };

[[nodiscard]] std::string_view to_string(Verdict v);

struct EligibilityReport {
    Verdict verdict = Verdict::not_covered;
    std::optional<RootPair> witness;
    std::optional<ConormalBracket> conormal;
    bool conormal_zero = false;
    bool conormal_degenerate = false;
    std::string detail;
};

/// `extra_roots` names an additional semisimple factor ("" for none).
[[nodiscard]] EligibilityReport blowup_eligibility(int n_u1, int m_su2, const YSpec& y,
                                                   std::string_view extra_roots = "");

// ---------------------------------------------------------------- floating root-data algebras

/// Compact real form from a matrix basis: su(2) (A1), su(3) (A2), so(5) (B2), Der(𝕆) (G2).
struct FloatAlgebra {
    std::string name;
    int dim = 0;
    std::vector<Mat> basis;
    BracketTable<double> c;
    Mat metric;
    /// Orthonormal basis of a maximal torus, in algebra coordinates.
    Mat torus;
    /// Positive root vectors in 𝔤_ℂ coordinates and their root values on `torus` (imaginary parts).
    std::vector<CVec> root_vectors;
    std::vector<Vec> root_values;
};

/// Throws InvalidStructureError for unsupported names.
[[nodiscard]] FloatAlgebra float_algebra(std::string_view name);
[[nodiscard]] double jacobi_defect(const FloatAlgebra& a);
[[nodiscard]] double ad_invariance_defect(const FloatAlgebra& a);

/// Bracket [,]₁ on (T_eT)^⊥ in the complex basis of positive root vectors; `flip` negates positivity of one root.
[[nodiscard]] ComplexBracket torus_conormal_bracket(const FloatAlgebra& a, std::optional<int> flip = std::nullopt);
/// Closure of 𝔤^{1,0} spanned by (optionally flipped) positive root vectors.
[[nodiscard]] bool positive_closure(const FloatAlgebra& a, std::optional<int> flip = std::nullopt);

}  // namespace gkflow::lie
