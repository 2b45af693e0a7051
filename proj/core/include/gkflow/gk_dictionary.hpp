#pragma once

#include "gkflow/gvs_core.hpp"

#include <cstdint>
#include <optional>

namespace gkflow::gk {

using gvs::GeneralizedEndomorphism;

/// Pointwise bi-Hermitian data. `b` is given by components; I± act on tangent vectors.
struct BiHermitianPoint {
    Mat g;
    Mat b;
    Mat i_plus;
    Mat i_minus;
    /// Set when g may be singular; Q must then be supplied.
    bool degenerate = false;
    std::optional<Mat> external_q;

    [[nodiscard]] int dim() const { return static_cast<int>(g.rows()); }
    /// ω± = g I± as maps X ↦ ω±(X,·).
    [[nodiscard]] Mat omega_plus() const { return g * i_plus; }
    [[nodiscard]] Mat omega_minus() const { return g * i_minus; }
};

struct ValidityReport {
    double complex_defect = 0.0;
    double compatibility_defect = 0.0;
    double b_skew_defect = 0.0;
    double min_metric_eigenvalue = 0.0;
    bool pass = false;
};

[[nodiscard]] ValidityReport validate_point(const BiHermitianPoint& p, double tol = gvs::kStructureTolerance);

struct GKPair {
    GeneralizedEndomorphism j1;
    GeneralizedEndomorphism j2;

    /// 𝒢 = −𝒥₁𝒥₂.
    [[nodiscard]] Mat generalized_metric() const { return -(j1.matrix() * j2.matrix()); }
};

struct PairReport {
    double commutator = 0.0;
    double metric_square_residual = 0.0;
    double min_metric_eigenvalue = 0.0;
    bool pass = false;
};

[[nodiscard]] PairReport validate_pair(const GKPair& q, double tol = gvs::kStructureTolerance);

/// Throws InvalidStructureError or DegenerateMetricError on invalid input.
[[nodiscard]] GKPair assemble_gk(const BiHermitianPoint& p);
[[nodiscard]] BiHermitianPoint disassemble_gk(const GKPair& q);

/// Distance between two points in the max-abs norm over all four tensors.
[[nodiscard]] double point_distance(const BiHermitianPoint& a, const BiHermitianPoint& b);

struct PoissonTriple {
    Mat q;
    std::optional<Mat> pi_j1;
    std::optional<Mat> pi_j2;
    CMat sigma_plus;
    CMat sigma_minus;
};

/// Q = −½[I₊,I₋]g⁻¹; for degenerate points the external Q is used and π_{𝒥ᵢ} are absent.
[[nodiscard]] PoissonTriple derived_poisson(const BiHermitianPoint& p);

/// σ₊ via the projector product 4 g⁻¹ P̄₊* P̄₋* P₊*, with P = ½(1 − iI).
[[nodiscard]] CMat sigma_plus_from_projectors(const BiHermitianPoint& p);

/// Largest |σ(ξ)| over (0,1)-covectors ξ for the complex structure.
[[nodiscard]] double holomorphic_type_defect(const CMat& sigma, const Mat& complex_structure);

struct KernelSplit {
    int plus_sum = 0;
    int minus_diff = 0;
    int commutator = 0;
    bool identity_holds = false;
};

[[nodiscard]] KernelSplit kernel_split(const BiHermitianPoint& p, double tol = gvs::kStructureTolerance);

/// Sign of det of a frame (e₁, I e₁, e₂, I e₂, ...) chosen greedily from the standard basis.
[[nodiscard]] int orientation_sign(const Mat& complex_structure);

struct TypeFacts {
    int n = 0;
    int type_j1 = 0;
    int type_j2 = 0;
    bool sum_bound = false;
    bool same_orientation = false;
    bool opposite_orientation = false;
    /// type(𝒥₁) ≡ n mod 2 ⟺ same orientation.
    bool parity_j1 = false;
    /// type(𝒥₂) ≡ n mod 2 ⟺ I₊ and −I₋ orient alike.
    bool parity_j2 = false;
};

[[nodiscard]] TypeFacts type_facts(const GKPair& q);

/// Random valid point; g has spectrum in [gap, 1], gap = 1 gives the identity.
[[nodiscard]] BiHermitianPoint random_bihermitian(int n, std::uint64_t seed, double gap = 0.3, double b_scale = 0.5);

/// Block-diagonal direct sum of two points.
[[nodiscard]] BiHermitianPoint direct_sum(const BiHermitianPoint& a, const BiHermitianPoint& b);

/// Flat point with g = 1, b = 0 and I₊ = I₋ = standard.
[[nodiscard]] BiHermitianPoint kahler_point(int n);

}  // namespace gkflow::gk
