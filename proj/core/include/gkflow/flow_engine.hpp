#pragma once

#include "gkflow/chart_calculus.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gkflow::flow {

using chart::ChartDomain;
using chart::Exclusion;
using chart::FormField;
using chart::ScalarField;
using chart::TensorField;
using chart::VectorField;

/// α = −df for a densely defined f. `x_alpha` and `dc_plus` must extend smoothly over the box;
/// `dc_minus` is only evaluated off `singular_set`.
struct PotentialSpec {
    ScalarField f;
    VectorField alpha;
    VectorField x_alpha;
    TensorField dc_plus;
    TensorField dc_minus;
    std::vector<Exclusion> singular_set;
};

struct Numerics {
    double h = chart::kDefaultFdStep;
    double dt = chart::kDefaultFlowStep;
    int panels = chart::kDefaultPanels;
    chart::JacobianMode jacobian_mode = chart::JacobianMode::variational;
};

struct Tolerances {
    double nijenhuis = 1e-5;
    double torsion = 1e-4;
    double dh = 1e-6;
    double flow_identity = 5e-5;
    double lie = 1e-4;
    double pullback = 1e-4;
    double compatibility = 1e-8;
    /// Points closer than this to the degeneracy locus are left out of positivity verdicts.
    double collar = 0.0;
};

/// Degenerate bi-Hermitian data on a chart plus a potential. All 2-tensors are component matrices
/// except I± (endomorphisms) and Q (bivector map ξ ↦ Q(ξ,·)).
struct Scenario {
    std::string name;
    std::string description;
    ChartDomain domain;
    TensorField g{};
    FormField h{};
    TensorField i_plus{};
    TensorField i_minus{};
    TensorField q{};
    /// Distance to the degeneracy locus E; empty when g is nondegenerate. `degenerate_everywhere` covers E = M.
    std::optional<Exclusion> degeneracy_locus{};
    bool degenerate_everywhere = false;
    PotentialSpec potential{};
    std::vector<int> grid{};
    double grid_inset = 0.0;
    Numerics numerics{};
    Tolerances tolerances{};
    double default_t = 0.05;
};

/// Evaluator for the deformed tuple at a fixed time.
class Deformation {
public:
    Deformation(const Scenario& scenario, double t);

    [[nodiscard]] double time() const noexcept { return t_; }
    [[nodiscard]] const Scenario& scenario() const noexcept { return *scenario_; }
    [[nodiscard]] const chart::FlowMap& flow() const noexcept { return flow_; }

    /// Components of F_t^+ = ∫₀ᵗ (φ_s)_* dᶜ₊α ds.
    [[nodiscard]] Mat f_plus(const Vec& x) const;
    /// Components of F^-_{-t}.
    [[nodiscard]] Mat f_minus_backward(const Vec& x) const;

    [[nodiscard]] Mat g_t(const Vec& x) const;
    /// Closed form I₊ − Q♯F♭ with F = F_t^+.
    [[nodiscard]] Mat i_plus_t(const Vec& x) const;
    [[nodiscard]] Mat i_minus_t(const Vec& x) const;
    /// Pushforward route (φ_t)_* I₊.
    [[nodiscard]] Mat i_plus_pushed(const Vec& x) const;
    [[nodiscard]] RealForm h_t(const Vec& x) const;
    /// Components I±,tᵀ g_t of ω±,t.
    [[nodiscard]] Mat omega_plus_t(const Vec& x) const;
    [[nodiscard]] Mat omega_minus_t(const Vec& x) const;

    [[nodiscard]] TensorField g_t_field() const;
    [[nodiscard]] TensorField i_plus_t_field() const;
    [[nodiscard]] TensorField i_minus_t_field() const;
    [[nodiscard]] FormField h_t_field() const;
    [[nodiscard]] chart::FdOptions fd() const;

private:
    /// ∫₀^τ (φ_s)_* β ds at x, sampled along one chained trajectory.
    [[nodiscard]] Mat integrate_pushforward(const Vec& x, const TensorField& integrand, double tau) const;

    struct Cache;

    const Scenario* scenario_;
    double t_;
    chart::FlowMap flow_;
    std::shared_ptr<Cache> cache_;
};

struct DeformedPoint {
    Vec x;
    Mat g_t;
    Mat i_plus_t;
    Mat i_minus_t;
    RealForm h_t;
    Mat f_plus;
};

struct DeformedStructure {
    double t = 0.0;
    std::vector<DeformedPoint> points;
};

/// Deformed tensors at every grid point. Throws EscapeError / NonFiniteError.
[[nodiscard]] DeformedStructure deform(const Scenario& s, double t, const std::vector<Vec>& grid);

struct ResidualReport {
    std::string name;
    double max_residual = 0.0;
    /// Largest magnitude of the compared quantities, for scale.
    double max_magnitude = 0.0;
    int points = 0;
    bool pass = false;
};

/// Closed form vs pushforward route for I₊ (and Q F^- consistency for I₋ where defined).
[[nodiscard]] ResidualReport check_flow_identity(const Scenario& s, double t, const std::vector<Vec>& grid);
/// Returns {metric identity, torsion identity}.
[[nodiscard]] std::vector<ResidualReport> check_lie_identities(const Scenario& s, const std::vector<Vec>& grid);
/// Returns {metric pullback, H pullback}.
[[nodiscard]] std::vector<ResidualReport> check_pullback_consistency(const Scenario& s, double t,
                                                                     const std::vector<Vec>& grid);

struct PointDiagnostics {
    Vec x;
    double min_eig_g_t = 0.0;
    double nijenhuis_plus = 0.0;
    double nijenhuis_minus = 0.0;
    double torsion_plus = 0.0;
    double torsion_minus = 0.0;
    double flow_identity = 0.0;
    double dh = 0.0;
    double compatibility = 0.0;
    double symmetry = 0.0;
    bool in_collar = false;
};

struct BihermitianReport {
    double t = 0.0;
    std::vector<PointDiagnostics> points;
    double min_eig = 0.0;
    /// Lipschitz estimate of λ_min(g_t) times the grid half-spacing.
    double lipschitz_margin = 0.0;
    double max_nijenhuis = 0.0;
    double max_torsion = 0.0;
    double max_dh = 0.0;
    double max_flow_identity = 0.0;
    double max_compatibility = 0.0;
    bool positive = false;
    bool pass = false;
};

[[nodiscard]] BihermitianReport verify_bihermitian(const Scenario& s, const DeformedStructure& d);

struct WindowResult {
    double t_max = 0.0;
    /// First bracket (last pass, first failure); equal entries when no failure was found.
    double bracket_low = 0.0;
    double bracket_high = 0.0;
    bool hit_upper_bound = false;
    int evaluations = 0;
};

/// Smallest grid eigenvalue of g_t off the collar.
[[nodiscard]] double min_grid_eigenvalue(const Scenario& s, double t, const std::vector<Vec>& grid);

[[nodiscard]] WindowResult positivity_window(const Scenario& s, const std::vector<Vec>& grid, double t_hi,
                                             int scan_steps = 16, int bisection_steps = 30);

[[nodiscard]] std::vector<Vec> scenario_grid(const Scenario& s);

}  // namespace gkflow::flow
