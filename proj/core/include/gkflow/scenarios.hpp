#pragma once

#include "gkflow/flow_engine.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace gkflow::scenarios {

using chart::ChartDomain;
using flow::Scenario;

/// Complex-analytic description of a real function φ on ℂⁿ ≅ ℝ²ⁿ: value, ∂φ/∂z_j and the Levi
/// matrix ∂²φ/∂z_j∂z̄_k.
struct ComplexJet {
    double value = 0.0;
    CVec dz;
    CMat levi;
};

/// Real covector dφ = 2 Re Σ φ_j dz_j.
[[nodiscard]] Vec jet_differential(const ComplexJet& jet);
/// Components of ddᶜφ = 2i Σ φ_{jk̄} dz_j ∧ dz̄_k (standard complex structure).
[[nodiscard]] Mat levi_components(const CMat& levi);
/// Real map of the holomorphic bivector c ∂_{z_i} ∧ ∂_{z_j}.
[[nodiscard]] Mat holomorphic_bivector_map(int n, int i, int j, Complex c);

/// Degree-9 smoothstep cutoff: 1 below r0, 0 above r1. Returns {χ, χ', χ''}.
struct Cutoff {
    double r0 = 0.25;
    double r1 = 1.0;
    [[nodiscard]] std::array<double, 3> operator()(double r) const;
};

/// Blow-up chart (u, v) ↦ (u, uv) of a point in ℂ², pulled-back flat Kähler metric, Q = 0,
/// f = −log|u| − ½χ(r) log(1+|v|²) with r = |u|²(1+|v|²).
[[nodiscard]] Scenario kahler_blowup(const Cutoff& cutoff = {});
/// ℂ² with g ≡ 0, I± standard, σ = ∂_z∧∂_w, f = sign·(|z|²+|w|²).
[[nodiscard]] Scenario poisson_c2(double potential_sign = -1.0);
/// Blow-up chart of 0 for σ = zw ∂_z∧∂_w with g ≡ 0 and f = −log|u| − ½log(1+|v|²) − ½r.
[[nodiscard]] Scenario abelian_blowup();
/// Flat Kähler ℂ² with f = β(|z|²+|w|²); g_t = (1 − 4βt) g.
[[nodiscard]] Scenario flat_window(double beta);
/// Constant output of poisson_c2 at time `t0`, reused as nondegenerate input.
[[nodiscard]] Scenario second_generation(double t0 = 0.05);
/// Flat Kähler ℂ² with no potential; identity checks at t = 0.
[[nodiscard]] Scenario flat_kahler();

struct NamedScenario {
    std::string name;
    std::function<Scenario()> make;
};

[[nodiscard]] const std::vector<NamedScenario>& scenario_library();
/// Throws InvalidStructureError for unknown names.
[[nodiscard]] Scenario make_scenario(const std::string& name);

/// Fields of a scenario defined by expressions in the coordinates of ℂ².
struct ExpressionSpec {
    std::string name = "custom";
    Vec lower;
    Vec upper;
    /// "zero", "flat", or an expression used as Kähler potential for g.
    std::string metric = "zero";
    /// Coefficient c(z) of σ = c ∂_{z1}∧∂_{z2}; empty for Q = 0.
    std::string poisson;
    /// Potential f; α = −df.
    std::string potential;
    std::vector<int> grid{3, 3, 3, 3};
    double grid_inset = 0.0;
};

/// Builds a scenario with FD-derived α, X_α and dᶜ±α. Throws ParseError on malformed expressions.
[[nodiscard]] Scenario expression_scenario(const ExpressionSpec& spec);

}  // namespace gkflow::scenarios
