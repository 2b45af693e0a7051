#pragma once

#include "gkflow/exterior.hpp"
#include "gkflow/linalg.hpp"

#include <optional>

namespace gkflow::gvs {

/// Default absolute tolerance for structural validation.
inline constexpr double kStructureTolerance = 1e-9;

/// X + ξ in V ⊕ V*, complexified. Covectors are stored as columns.
struct DoubleVector {
    CVec tangent;
    CVec cotangent;

    [[nodiscard]] static DoubleVector real(const Vec& x, const Vec& xi) {
        return {x.cast<Complex>(), xi.cast<Complex>()};
    }
    [[nodiscard]] int dim() const { return static_cast<int>(tangent.size()); }
    [[nodiscard]] CVec stacked() const;
};

/// ½(ξ(Y) + η(X)), complex-bilinear.
[[nodiscard]] Complex natural_pairing(const DoubleVector& u, const DoubleVector& v);

/// Gram matrix of the pairing on V ⊕ V*: ½[[0,1],[1,0]].
[[nodiscard]] Mat pairing_matrix(int dim);

/// Real 4n×4n map on V ⊕ V*, blocks [[A, P], [S, D]].
class GeneralizedEndomorphism {
public:
    explicit GeneralizedEndomorphism(Mat full);
    [[nodiscard]] static GeneralizedEndomorphism from_blocks(const Mat& a, const Mat& p, const Mat& s, const Mat& d);

    [[nodiscard]] const Mat& matrix() const noexcept { return full_; }
    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] Mat tangent_block() const { return full_.topLeftCorner(dim_, dim_); }
    [[nodiscard]] Mat poisson_block() const { return full_.topRightCorner(dim_, dim_); }
    [[nodiscard]] Mat form_block() const { return full_.bottomLeftCorner(dim_, dim_); }
    [[nodiscard]] Mat dual_block() const { return full_.bottomRightCorner(dim_, dim_); }

    [[nodiscard]] GeneralizedEndomorphism operator*(const GeneralizedEndomorphism& o) const;
    [[nodiscard]] GeneralizedEndomorphism operator-() const { return GeneralizedEndomorphism(-full_); }

private:
    Mat full_;
    int dim_;
};

/// Maps a 2-form's component matrix F(X,Y) = Xᵀ F Y to its flat map X ↦ F(X,·).
[[nodiscard]] inline Mat flat_of(const Mat& components) { return components.transpose(); }

[[nodiscard]] GeneralizedEndomorphism gcs_from_complex(const Mat& complex_structure);
/// `symplectic` is the component matrix of ω.
[[nodiscard]] GeneralizedEndomorphism gcs_from_symplectic(const Mat& symplectic);
/// `sigma` is the map ξ ↦ σ(ξ,·) of a holomorphic-type bivector; only its real part enters.
[[nodiscard]] GeneralizedEndomorphism gcs_from_poisson(const Mat& complex_structure, const CMat& sigma);

/// Map ξ ↦ c(ξ(∂_{z_i}) ∂_{z_j} − ξ(∂_{z_j}) ∂_{z_i}) of c ∂_{z_i}∧∂_{z_j} in (x1,y1,...) coordinates.
[[nodiscard]] CMat holomorphic_bivector(int n, int i, int j, Complex c);

struct GcsReport {
    double square_residual = 0.0;
    double orthogonality_defect = 0.0;
    bool pass = false;
};

[[nodiscard]] GcsReport validate_gcs(const GeneralizedEndomorphism& j, double tol = kStructureTolerance);

[[nodiscard]] Mat poisson_of(const GeneralizedEndomorphism& j, double tol = kStructureTolerance);
[[nodiscard]] int type_of(const GeneralizedEndomorphism& j, double rel_tol = linalg::kRankTolerance);

/// e^B_*: X+ξ ↦ X+ξ−ι_X B, with B given by components.
[[nodiscard]] Mat b_shear(const Mat& b_components);
[[nodiscard]] GeneralizedEndomorphism b_transform(const GeneralizedEndomorphism& j, const Mat& b_components);

/// Span of columns [tangent; cotangent] in (V ⊕ V*)_C, orthonormalized.
class DiracSubspace {
public:
    explicit DiracSubspace(const CMat& columns);

    [[nodiscard]] const CMat& basis() const noexcept { return basis_; }
    [[nodiscard]] int dim() const noexcept { return static_cast<int>(basis_.cols()); }
    /// Real dimension 2n of V.
    [[nodiscard]] int space_dim() const noexcept { return static_cast<int>(basis_.rows() / 2); }
    [[nodiscard]] bool is_maximal() const noexcept { return dim() == space_dim(); }
    [[nodiscard]] CMat tangent_parts() const { return basis_.topRows(space_dim()); }
    [[nodiscard]] CMat cotangent_parts() const { return basis_.bottomRows(space_dim()); }

    [[nodiscard]] double isotropy_defect() const;
    [[nodiscard]] DiracSubspace conjugate() const { return DiracSubspace(basis_.conjugate()); }
    [[nodiscard]] DiracSubspace transpose() const;
    /// dim(L ∩ L̄).
    [[nodiscard]] int real_intersection_dim() const;
    /// Covector subspace L ∩ V*.
    [[nodiscard]] CMat cotangent_kernel() const;

private:
    CMat basis_;
};

[[nodiscard]] double subspace_distance(const DiracSubspace& a, const DiracSubspace& b);

[[nodiscard]] DiracSubspace tangent_space(int dim);
/// {π(ξ) + ξ} for a bivector map π.
[[nodiscard]] DiracSubspace bivector_graph(const CMat& bivector_map);
/// {X + F(X,·)} for a 2-form with the given flat map.
[[nodiscard]] DiracSubspace form_graph(const CMat& form_flat);

/// L_(I,σ) = T^{0,1} ⊕ (1+σ)(T*)^{1,0}; σ = 0 gives the eigenbundle of 𝒥_I.
[[nodiscard]] DiracSubspace holomorphic_poisson_dirac(const Mat& complex_structure, const CMat& sigma);

[[nodiscard]] DiracSubspace i_eigenbundle(const GeneralizedEndomorphism& j);
/// Throws NondegeneracyError carrying dim(L ∩ L̄) if L is not of real index zero.
[[nodiscard]] GeneralizedEndomorphism dirac_to_gcs(const DiracSubspace& l);

using Spinor = ComplexForm;

[[nodiscard]] Spinor clifford_act(const DoubleVector& u, const Spinor& rho);
/// Matrix of ρ ↦ u·ρ on the full exterior algebra.
[[nodiscard]] CMat clifford_matrix(const DoubleVector& u);

struct Annihilator {
    DiracSubspace subspace;
    bool pure = false;
};

[[nodiscard]] Annihilator annihilator(const Spinor& rho);

/// True if Ω is a nonzero decomposable form of degree `degree`.
[[nodiscard]] bool is_decomposable(const Spinor& omega_form, int degree, double tol = kStructureTolerance);

/// e^{B+iω} ∧ Ω with B, ω given by components.
[[nodiscard]] Spinor pure_spinor_assemble(const Mat& b_components, const Mat& omega_components,
                                          const Spinor& decomposable);

/// Top coefficient of ω^{n−k} ∧ Ω ∧ Ω̄ where k = deg Ω and 2n = dim.
[[nodiscard]] Complex nondegeneracy_value(const Mat& omega_components, const Spinor& decomposable);
[[nodiscard]] bool nondegeneracy_test(const Mat& omega_components, const Spinor& decomposable,
                                      double tol = kStructureTolerance);

/// (ρ₁ ∧ ρ₂ᵀ)_top.
[[nodiscard]] Complex chevalley_pairing(const Spinor& rho1, const Spinor& rho2);

/// A pure spinor line generator of a maximal isotropic L.
[[nodiscard]] Spinor pure_spinor_of(const DiracSubspace& l);

struct BaerSum {
    DiracSubspace sum;
    int cotangent_intersection_dim = 0;
    bool maximal = false;
};

[[nodiscard]] BaerSum baer_sum(const DiracSubspace& l1, const DiracSubspace& l2);

struct SubmanifoldVerdict {
    bool generalized_poisson = false;
    bool transversal = false;
};

/// `conormal` columns span N ⊂ V*.
[[nodiscard]] SubmanifoldVerdict submanifold_tests(const GeneralizedEndomorphism& j, const Mat& conormal,
                                                   double rel_tol = linalg::kRankTolerance);

}  // namespace gkflow::gvs
