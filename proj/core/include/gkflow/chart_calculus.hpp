#pragma once

#include "gkflow/errors.hpp"
#include "gkflow/exterior.hpp"
#include "gkflow/linalg.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace gkflow::chart {

enum class Smoothness { everywhere, dense };

/// A field is a re-entrant evaluation function on chart points.
template <class Value>
struct Field {
    std::function<Value(const Vec&)> evaluate;
    Smoothness claim = Smoothness::everywhere;

    [[nodiscard]] Value operator()(const Vec& x) const { return evaluate(x); }
};

using ScalarField = Field<double>;
/// Vectors and covectors are columns.
using VectorField = Field<Vec>;
/// Matrix-valued tensors: endomorphisms, bivector maps, 2-form or symmetric components.
using TensorField = Field<Mat>;
using FormField = Field<RealForm>;

/// Zero set of `distance` (an estimate of the distance to the set), avoided by `radius`.
struct Exclusion {
    std::string name;
    std::function<double(const Vec&)> distance;
    double radius = 0.0;
};

class ChartDomain {
public:
    ChartDomain(Vec lower, Vec upper, std::vector<Exclusion> exclusions = {});

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(lower_.size()); }
    [[nodiscard]] const Vec& lower() const noexcept { return lower_; }
    [[nodiscard]] const Vec& upper() const noexcept { return upper_; }
    [[nodiscard]] const std::vector<Exclusion>& exclusions() const noexcept { return exclusions_; }

    [[nodiscard]] bool in_box(const Vec& x) const;
    /// Name of the first exclusion closer than its radius plus `margin`, or empty.
    [[nodiscard]] std::string excluded_by(const Vec& x, double margin = 0.0) const;
    /// Throws ExclusionError if `x` is within an exclusion ball enlarged by `margin`.
    void require_admissible(const Vec& x, double margin = 0.0) const;

    /// Tensor grid with `counts[i]` points per axis, inset by `inset` from each face,
    /// excluded points dropped. Iteration order is lexicographic and fixed.
    [[nodiscard]] std::vector<Vec> sample_grid(const std::vector<int>& counts, double inset = 0.0,
                                               double margin = 0.0) const;

private:
    Vec lower_;
    Vec upper_;
    std::vector<Exclusion> exclusions_;
};

inline constexpr double kDefaultFdStep = 1e-4;
inline constexpr double kDefaultFlowStep = 1e-3;
inline constexpr int kDefaultPanels = 64;

struct FdOptions {
    double h = kDefaultFdStep;
    /// 2 (central) or 4 (five-point).
    int order = 2;
    const ChartDomain* domain = nullptr;
};

/// ∂f/∂x_axis by central differences.
template <class Value>
[[nodiscard]] Value partial(const Field<Value>& field, const Vec& x, int axis, const FdOptions& opt) {
    if (opt.domain != nullptr) opt.domain->require_admissible(x, 2.0 * opt.h);
    Vec step = Vec::Zero(x.size());
    step(axis) = opt.h;
    if (opt.order == 4) {
        Value out = field(x - 2.0 * step) - 8.0 * field(x - step) + 8.0 * field(x + step) - field(x + 2.0 * step);
        return out * (1.0 / (12.0 * opt.h));
    }
    Value out = field(x + step) - field(x - step);
    return out * (1.0 / (2.0 * opt.h));
}

[[nodiscard]] Vec fd_gradient(const ScalarField& f, const Vec& x, const FdOptions& opt = {});
/// Matrix with column j = ∂_j X.
[[nodiscard]] Mat fd_jacobian(const VectorField& field, const Vec& x, const FdOptions& opt = {});
[[nodiscard]] RealForm fd_d(const FormField& form, const Vec& x, const FdOptions& opt = {});

/// The derivation I*: (I*β)(X₁,…) = Σ β(…, I X_j, …).
[[nodiscard]] RealForm derivation_action(const Mat& complex_structure, const RealForm& form);

/// dᶜβ = d(I*β) − I*(dβ); on functions dᶜf = −df∘I.
[[nodiscard]] RealForm dc(const TensorField& complex_structure, const FormField& form, const Vec& x,
                          const FdOptions& opt = {});

[[nodiscard]] FormField scalar_as_form(const ScalarField& f, int dim);
[[nodiscard]] FormField covector_as_form(const VectorField& xi);
[[nodiscard]] FormField two_form_as_form(const TensorField& components);

/// Complex (p,q) part of a 2-form's components; P = ½(1 − iI) projects onto T^{1,0}.
[[nodiscard]] CMat pq_project(const Mat& components, const Mat& complex_structure, int p, int q);
/// Real (1,1) part: ½(F + Iᵀ F I).
[[nodiscard]] Mat part_11(const Mat& components, const Mat& complex_structure);
/// Real form F^{2,0} + F^{0,2}.
[[nodiscard]] Mat part_20_02(const Mat& components, const Mat& complex_structure);

/// Components of the Nijenhuis tensor N^k_ij at x (k major).
[[nodiscard]] std::vector<Mat> nijenhuis_components(const TensorField& complex_structure, const Vec& x,
                                                    const FdOptions& opt = {});
[[nodiscard]] double nijenhuis(const TensorField& complex_structure, const Vec& x, const FdOptions& opt = {});

enum class JacobianMode { finite_difference, variational };

/// Classical RK4 flow of a vector field with fixed step.
class FlowMap {
public:
    FlowMap(VectorField field, ChartDomain domain, double dt = kDefaultFlowStep,
            JacobianMode mode = JacobianMode::variational, double fd_h = kDefaultFdStep);

    [[nodiscard]] Vec point(const Vec& x0, double t) const;
    /// Dφ_t at x0.
    [[nodiscard]] Mat jacobian(const Vec& x0, double t) const;
    [[nodiscard]] Mat jacobian(const Vec& x0, double t, JacobianMode mode) const;

    [[nodiscard]] const ChartDomain& domain() const noexcept { return domain_; }
    [[nodiscard]] double step() const noexcept { return dt_; }
    [[nodiscard]] const VectorField& field() const noexcept { return field_; }

    /// Largest displacement ‖X‖·Δt accepted per step.
    static constexpr double kMaxStepDisplacement = 0.05;

private:
    [[nodiscard]] int step_count(double t) const;
    void check_state(const Vec& x, const Vec& velocity, double h) const;

    VectorField field_;
    ChartDomain domain_;
    double dt_;
    JacobianMode mode_;
    double fd_h_;
};

enum class TensorKind { scalar, vector, covector, two_form, symmetric_form, endomorphism, bivector };

/// Transport of a tensor at x to φ(x) given J = Dφ(x). Scalars pass through.
[[nodiscard]] Mat pushforward(const Mat& tensor, TensorKind kind, const Mat& jacobian);
/// Transport of a tensor at φ(x) back to x given J = Dφ(x).
[[nodiscard]] Mat pullback(const Mat& tensor, TensorKind kind, const Mat& jacobian);

/// Composite Simpson rule for ∫₀ᵗ integrand(s) ds with an even number of panels.
template <class Value>
[[nodiscard]] Value time_integral(const std::function<Value(double)>& integrand, double t, int panels = kDefaultPanels) {
    if (panels < 2) panels = 2;
    if (panels % 2 != 0) ++panels;
    const double h = t / panels;
    Value sum = integrand(0.0) + integrand(t);
    for (int k = 1; k < panels; ++k) sum = sum + integrand(k * h) * ((k % 2 == 1) ? 4.0 : 2.0);
    Value out = sum * (h / 3.0);
    if constexpr (std::is_same_v<Value, Mat>) {
        if (!out.allFinite()) throw NonFiniteError("time integral produced non-finite values");
    } else if constexpr (std::is_same_v<Value, double>) {
        if (!std::isfinite(out)) throw NonFiniteError("time integral produced non-finite values");
    }
    return out;
}

/// (d/dt)|₀ of φ_t^* T at x by a centered difference in t.
[[nodiscard]] Mat lie_derivative(const TensorField& tensor, TensorKind kind, const FlowMap& flow, const Vec& x,
                                 double dt);

}  // namespace gkflow::chart
