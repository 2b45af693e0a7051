#include "gkflow/scenarios.hpp"

#include "gkflow/expression.hpp"
#include "gkflow/gvs_core.hpp"

#include <algorithm>
#include <cmath>

namespace gkflow::scenarios {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr int kComplexDim = 2;
constexpr int kRealDim = 2 * kComplexDim;

Complex coord(const Vec& x, int k) { return {x(2 * k), x(2 * k + 1)}; }

CVec dz(int n, int k) {
    CVec e = CVec::Zero(2 * n);
    e(2 * k) = 1.0;
    e(2 * k + 1) = kI;
    return e;
}

/// Real Jacobian of a holomorphic map from its complex Jacobian.
Mat realify(const CMat& c) {
    Mat out(2 * c.rows(), 2 * c.cols());
    for (Eigen::Index a = 0; a < c.rows(); ++a)
        for (Eigen::Index b = 0; b < c.cols(); ++b)
            out.block<2, 2>(2 * a, 2 * b) << c(a, b).real(), -c(a, b).imag(), c(a, b).imag(), c(a, b).real();
    return out;
}

/// ddᶜφ for constant I from the real Hessian.
Mat ddc_from_hessian(const Mat& hessian, const Mat& complex_structure) {
    return -(hessian * complex_structure - complex_structure.transpose() * hessian);
}

/// Real covector d log|u| on the (u, v) chart.
Vec dlog_abs_u(const Vec& x) {
    const double r2 = x(0) * x(0) + x(1) * x(1);
    Vec out = Vec::Zero(kRealDim);
    out(0) = x(0) / r2;
    out(1) = x(1) / r2;
    return out;
}

double distance_to_u_axis(const Vec& x) { return std::hypot(x(0), x(1)); }

/// Jets of ℓ = log(1+|v|²) and r = |u|²(1+|v|²).
struct BlowupJets {
    ComplexJet ell;
    ComplexJet r;
};

BlowupJets blowup_jets(const Vec& x) {
    const Complex u = coord(x, 0);
    const Complex v = coord(x, 1);
    const double nu = std::norm(u);
    const double nv = 1.0 + std::norm(v);
    BlowupJets j;
    j.ell.value = std::log(nv);
    j.ell.dz = CVec::Zero(kComplexDim);
    j.ell.dz(1) = std::conj(v) / nv;
    j.ell.levi = CMat::Zero(kComplexDim, kComplexDim);
    j.ell.levi(1, 1) = 1.0 / (nv * nv);
    j.r.value = nu * nv;
    j.r.dz = CVec(kComplexDim);
    j.r.dz << std::conj(u) * nv, nu * std::conj(v);
    j.r.levi = CMat(kComplexDim, kComplexDim);
    j.r.levi << nv, std::conj(u) * v, u * std::conj(v), nu;
    return j;
}

ComplexJet scaled(const ComplexJet& a, double s) { return {a.value * s, a.dz * s, a.levi * s}; }

ComplexJet sum(const ComplexJet& a, const ComplexJet& b) { return {a.value + b.value, a.dz + b.dz, a.levi + b.levi}; }

/// Jet of χ(r)·ℓ.
ComplexJet cutoff_product(const Cutoff& cutoff, const ComplexJet& r, const ComplexJet& ell) {
    const auto [chi, chi1, chi2] = cutoff(r.value);
    ComplexJet out;
    out.value = chi * ell.value;
    out.dz = chi1 * ell.value * r.dz + chi * ell.dz;
    out.levi = chi2 * ell.value * r.dz * r.dz.adjoint() + chi1 * ell.value * r.levi +
               chi1 * (r.dz * ell.dz.adjoint() + ell.dz * r.dz.adjoint()) + chi * ell.levi;
    return out;
}

flow::TensorField constant_tensor(Mat m) {
    return {[m = std::move(m)](const Vec&) { return m; }};
}

flow::FormField zero_three_form() {
    return {[](const Vec&) { return RealForm(kRealDim); }};
}

ChartDomain cube(double half_width) {
    return ChartDomain(Vec::Constant(kRealDim, -half_width), Vec::Constant(kRealDim, half_width));
}

flow::Exclusion u_axis(double radius) { return {"E={u=0}", distance_to_u_axis, radius}; }

}  // namespace

Vec jet_differential(const ComplexJet& jet) {
    const int n = static_cast<int>(jet.dz.size());
    CVec acc = CVec::Zero(2 * n);
    for (int k = 0; k < n; ++k) acc += jet.dz(k) * dz(n, k);
    return 2.0 * acc.real();
}

Mat levi_components(const CMat& levi) {
    const int n = static_cast<int>(levi.rows());
    CMat acc = CMat::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const CVec a = dz(n, j);
            const CVec b = dz(n, k).conjugate();
            acc += levi(j, k) * (a * b.transpose() - b * a.transpose());
        }
    return (2.0 * kI * acc).real();
}

Mat holomorphic_bivector_map(int n, int i, int j, Complex c) { return gvs::holomorphic_bivector(n, i, j, c).real(); }

std::array<double, 3> Cutoff::operator()(double r) const {
    const double width = r1 - r0;
    const double s = std::clamp((r - r0) / width, 0.0, 1.0);
    const double p = s * (1.0 - s);
    const double step = s * s * s * s * s * (126.0 + s * (-420.0 + s * (540.0 + s * (-315.0 + s * 70.0))));
    const double d1 = 630.0 * p * p * p * p;
    const double d2 = 2520.0 * p * p * p * (1.0 - 2.0 * s);
    return {1.0 - step, -d1 / width, -d2 / (width * width)};
}

Scenario kahler_blowup(const Cutoff& cutoff) {
    Scenario s{.name = "kahler_blowup",
               .description = "Kähler blow-up chart of a point in C^2, Q = 0",
               .domain = cube(0.8)};
    const Mat std_i = linalg::standard_complex_structure(kComplexDim);
    s.g = {[](const Vec& x) {
        CMat jac(kComplexDim, kComplexDim);
        jac << 1.0, 0.0, coord(x, 1), coord(x, 0);
        const Mat real = realify(jac);
        return Mat(real.transpose() * real);
    }};
    s.h = zero_three_form();
    s.i_plus = constant_tensor(std_i);
    s.i_minus = constant_tensor(std_i);
    s.q = constant_tensor(Mat::Zero(kRealDim, kRealDim));
    s.degeneracy_locus = u_axis(0.05);

    // f = −log|u| + φ with φ = −½χ(r)ℓ; log|u| is pluriharmonic.
    auto smooth_part = [cutoff](const Vec& x) {
        const BlowupJets j = blowup_jets(x);
        return scaled(cutoff_product(cutoff, j.r, j.ell), -0.5);
    };
    s.potential.f = {[smooth_part](const Vec& x) { return -std::log(distance_to_u_axis(x)) + smooth_part(x).value; },
                     chart::Smoothness::dense};
    s.potential.alpha = {[smooth_part](const Vec& x) {
                             return Vec(dlog_abs_u(x) - jet_differential(smooth_part(x)));
                         },
                         chart::Smoothness::dense};
    s.potential.x_alpha = {[](const Vec&) { return Vec(Vec::Zero(kRealDim)); }};
    s.potential.dc_plus = {[smooth_part](const Vec& x) { return levi_components(smooth_part(x).levi); }};
    s.potential.dc_minus = s.potential.dc_plus;
    s.potential.singular_set = {u_axis(0.05)};
    s.grid = {5, 5, 3, 3};
    s.grid_inset = 0.05;
    s.tolerances.collar = 0.05;
    s.default_t = 0.05;
    return s;
}

Scenario poisson_c2(double potential_sign) {
    Scenario s{.name = "poisson_c2",
               .description = "C^2 with g = 0 and sigma = d_z ^ d_w",
               .domain = cube(1.0)};
    const Mat std_i = linalg::standard_complex_structure(kComplexDim);
    const Mat q = holomorphic_bivector_map(kComplexDim, 0, 1, 1.0);
    s.g = constant_tensor(Mat::Zero(kRealDim, kRealDim));
    s.h = zero_three_form();
    s.i_plus = constant_tensor(std_i);
    s.i_minus = constant_tensor(std_i);
    s.q = constant_tensor(q);
    s.degenerate_everywhere = true;

    s.potential.f = {[potential_sign](const Vec& x) { return potential_sign * x.squaredNorm(); }};
    s.potential.alpha = {[potential_sign](const Vec& x) { return Vec(-2.0 * potential_sign * x); }};
    s.potential.x_alpha = {[q, potential_sign](const Vec& x) { return Vec(-2.0 * potential_sign * q * x); }};
    const Mat ddc_f = ddc_from_hessian(2.0 * potential_sign * Mat::Identity(kRealDim, kRealDim), std_i);
    s.potential.dc_plus = constant_tensor(ddc_f);
    s.potential.dc_minus = constant_tensor(ddc_f);
    s.grid = {3, 3, 3, 3};
    s.grid_inset = 0.2;
    s.default_t = 0.05;
    return s;
}

Scenario abelian_blowup() {
    Scenario s{.name = "abelian_blowup",
               .description = "blow-up chart of 0 for sigma = zw d_z ^ d_w, g = 0",
               .domain = cube(0.8)};
    const Mat std_i = linalg::standard_complex_structure(kComplexDim);
    auto q_at = [](const Vec& x) {
        return holomorphic_bivector_map(kComplexDim, 0, 1, coord(x, 0) * coord(x, 1));
    };
    s.g = constant_tensor(Mat::Zero(kRealDim, kRealDim));
    s.h = zero_three_form();
    s.i_plus = constant_tensor(std_i);
    s.i_minus = constant_tensor(std_i);
    s.q = {q_at};
    s.degenerate_everywhere = true;

    // f = −log|u| + φ with φ = −½(ℓ + r).
    auto smooth_part = [](const Vec& x) {
        const BlowupJets j = blowup_jets(x);
        return scaled(sum(j.ell, j.r), -0.5);
    };
    s.potential.f = {[smooth_part](const Vec& x) { return -std::log(distance_to_u_axis(x)) + smooth_part(x).value; },
                     chart::Smoothness::dense};
    s.potential.alpha = {[smooth_part](const Vec& x) {
                             return Vec(dlog_abs_u(x) - jet_differential(smooth_part(x)));
                         },
                         chart::Smoothness::dense};
    // Q(d log|u|) = Re(½ v ∂_v): the factor u of σ cancels the pole.
    s.potential.x_alpha = {[q_at, smooth_part](const Vec& x) {
        const Vec regular = -q_at(x) * jet_differential(smooth_part(x));
        const Vec pole = holomorphic_bivector_map(kComplexDim, 0, 1, coord(x, 1)) * Vec::Unit(kRealDim, 0);
        return Vec(regular + pole);
    }};
    s.potential.dc_plus = {[smooth_part](const Vec& x) { return levi_components(smooth_part(x).levi); }};
    s.potential.dc_minus = s.potential.dc_plus;
    s.potential.singular_set = {u_axis(0.05)};
    s.grid = {3, 3, 3, 3};
    s.grid_inset = 0.15;
    s.default_t = 0.05;
    return s;
}

Scenario flat_window(double beta) {
    Scenario s{.name = "flat_window",
               .description = "flat Kähler C^2 with f = beta |x|^2",
               .domain = cube(1.0)};
    const Mat std_i = linalg::standard_complex_structure(kComplexDim);
    s.g = constant_tensor(Mat::Identity(kRealDim, kRealDim));
    s.h = zero_three_form();
    s.i_plus = constant_tensor(std_i);
    s.i_minus = constant_tensor(std_i);
    s.q = constant_tensor(Mat::Zero(kRealDim, kRealDim));
    s.potential.f = {[beta](const Vec& x) { return beta * x.squaredNorm(); }};
    s.potential.alpha = {[beta](const Vec& x) { return Vec(-2.0 * beta * x); }};
    s.potential.x_alpha = {[](const Vec&) { return Vec(Vec::Zero(kRealDim)); }};
    const Mat ddc_f = ddc_from_hessian(2.0 * beta * Mat::Identity(kRealDim, kRealDim), std_i);
    s.potential.dc_plus = constant_tensor(ddc_f);
    s.potential.dc_minus = constant_tensor(ddc_f);
    s.grid = {3, 3, 3, 3};
    s.grid_inset = 0.05;
    s.default_t = 0.05;
    return s;
}

Scenario flat_kahler() {
    Scenario s = flat_window(0.0);
    s.name = "flat_kahler";
    s.description = "flat Kähler C^2 without potential";
    return s;
}

Scenario second_generation(double t0) {
    const Scenario base = poisson_c2();
    const Vec origin = Vec::Zero(kRealDim);
    const flow::Deformation def(base, t0);
    const Mat g0 = def.g_t(origin);
    const Mat ip0 = def.i_plus_t(origin);
    const Mat std_i = linalg::standard_complex_structure(kComplexDim);
    const Mat q = holomorphic_bivector_map(kComplexDim, 0, 1, 1.0);

    Scenario s{.name = "second_generation",
               .description = "constant output of poisson_c2 reused as input",
               .domain = cube(1.0)};
    s.g = constant_tensor(0.5 * (g0 + g0.transpose()));
    s.h = zero_three_form();
    s.i_plus = constant_tensor(ip0);
    s.i_minus = constant_tensor(std_i);
    s.q = constant_tensor(q);
    s.potential = base.potential;
    const Mat hessian = -2.0 * Mat::Identity(kRealDim, kRealDim);
    s.potential.dc_plus = constant_tensor(ddc_from_hessian(hessian, ip0));
    s.potential.dc_minus = constant_tensor(ddc_from_hessian(hessian, std_i));
    s.grid = {3, 3, 3, 3};
    s.grid_inset = 0.2;
    s.default_t = 0.05;
    return s;
}

const std::vector<NamedScenario>& scenario_library() {
    static const std::vector<NamedScenario> library{
        {"kahler_blowup", [] { return kahler_blowup(); }},
        {"poisson_c2", [] { return poisson_c2(); }},
        {"abelian_blowup", [] { return abelian_blowup(); }},
        {"flat_kahler", [] { return flat_kahler(); }},
        {"flat_window", [] { return flat_window(0.5); }},
        {"second_generation", [] { return second_generation(); }},
        {"poisson_c2_wrong_sign", [] { return poisson_c2(1.0); }},
    };
    return library;
}

Scenario make_scenario(const std::string& name) {
    for (const auto& entry : scenario_library())
        if (entry.name == name) return entry.make();
    throw InvalidStructureError("unknown scenario '" + name + "'");
}

Scenario expression_scenario(const ExpressionSpec& spec) {
    if (spec.lower.size() != spec.upper.size() || spec.lower.size() % 2 != 0)
        throw DimensionError("expression scenario box must have even real dimension");
    const int n = static_cast<int>(spec.lower.size() / 2);
    const int dim = 2 * n;
    const Mat std_i = linalg::standard_complex_structure(n);
    const chart::FdOptions hess_opt{1e-3, 4, nullptr};

    Scenario s{.name = spec.name, .description = "expression-defined scenario", .domain = ChartDomain(spec.lower, spec.upper)};
    s.h = {[dim](const Vec&) { return RealForm(dim); }};
    s.i_plus = constant_tensor(std_i);
    s.i_minus = constant_tensor(std_i);

    auto hessian_of = [hess_opt](const chart::ScalarField& f) {
        return [f, hess_opt](const Vec& x) {
            const chart::VectorField grad{[f, hess_opt](const Vec& y) { return chart::fd_gradient(f, y, hess_opt); }};
            const Mat h = chart::fd_jacobian(grad, x, hess_opt);
            return Mat(0.5 * (h + h.transpose()));
        };
    };

    if (spec.metric == "zero") {
        s.g = constant_tensor(Mat::Zero(dim, dim));
        s.degenerate_everywhere = true;
    } else if (spec.metric == "flat") {
        s.g = constant_tensor(Mat::Identity(dim, dim));
    } else {
        const auto kahler = expr::Expression::parse(spec.metric, n);
        const chart::ScalarField k{[kahler](const Vec& x) { return kahler.real_value(x); }};
        const auto hess = hessian_of(k);
        s.g = {[hess, std_i](const Vec& x) {
            const Mat g = ddc_from_hessian(hess(x), std_i) * std_i;
            return Mat(0.5 * (g + g.transpose()));
        }};
    }

    if (spec.poisson.empty()) {
        s.q = constant_tensor(Mat::Zero(dim, dim));
    } else {
        if (n < 2) throw DimensionError("a holomorphic Poisson coefficient needs complex dimension 2 or more");
        const auto coeff = expr::Expression::parse(spec.poisson, n);
        s.q = {[coeff, n](const Vec& x) { return holomorphic_bivector_map(n, 0, 1, coeff.evaluate(x)); }};
    }

    const auto potential = expr::Expression::parse(spec.potential.empty() ? "0" : spec.potential, n);
    s.potential.f = {[potential](const Vec& x) { return potential.real_value(x); }};
    const chart::FdOptions grad_opt{1e-4, 4, nullptr};
    s.potential.alpha = {[f = s.potential.f, grad_opt](const Vec& x) { return Vec(-chart::fd_gradient(f, x, grad_opt)); }};
    s.potential.x_alpha = {[q = s.q, alpha = s.potential.alpha](const Vec& x) { return Vec(q(x) * alpha(x)); }};
    const auto hess = hessian_of(s.potential.f);
    s.potential.dc_plus = {[hess, std_i](const Vec& x) { return ddc_from_hessian(hess(x), std_i); }};
    s.potential.dc_minus = s.potential.dc_plus;
    s.grid = spec.grid;
    s.grid_inset = spec.grid_inset;
    return s;
}

}  // namespace gkflow::scenarios
