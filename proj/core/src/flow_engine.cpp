#include "gkflow/flow_engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace gkflow::flow {

namespace {

using chart::FdOptions;

/// Runs fn(i) for i in [0, n) on a fixed pool; the lowest-index exception is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
    std::vector<std::exception_ptr> errors(n);
    auto run = [&](std::size_t w) {
        for (std::size_t i = w; i < n; i += workers) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run, w);
    run(0);
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// I ᵀ F♭^{1,1} for 2-form components `fc`, with F♭ = fcᵀ and the (1,1) part taken w.r.t. I.
Mat twisted_11(const Mat& complex_structure, const Mat& fc) {
    const Mat flat = fc.transpose();
    const Mat part = 0.5 * (flat + complex_structure.transpose() * flat * complex_structure);
    return complex_structure.transpose() * part;
}

double min_eigenvalue(const Mat& sym) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(0.5 * (sym + sym.transpose()), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

bool in_collar(const Scenario& s, const Vec& x) {
    if (!s.degeneracy_locus) return false;
    return s.degeneracy_locus->distance(x) < s.tolerances.collar;
}

RealForm half_d_twisted(const TensorField& complex_structure, const std::function<Mat(const Vec&)>& fc, const Vec& x,
                        const FdOptions& opt) {
    const FormField twisted{[&](const Vec& y) -> RealForm {
        return chart::derivation_action(complex_structure(y), RealForm::two_form(fc(y)));
    }};
    return chart::fd_d(twisted, x, opt) * 0.5;
}

}  // namespace

struct Deformation::Cache {
    std::mutex mutex;
    std::map<std::vector<double>, Mat> f_plus;
    std::map<std::vector<double>, Mat> f_minus;
};

Deformation::Deformation(const Scenario& scenario, double t)
    : scenario_(&scenario),
      t_(t),
      flow_(scenario.potential.x_alpha, scenario.domain, scenario.numerics.dt, scenario.numerics.jacobian_mode,
            scenario.numerics.h),
      cache_(std::make_shared<Cache>()) {}

chart::FdOptions Deformation::fd() const { return {scenario_->numerics.h, 2, nullptr}; }

Mat Deformation::integrate_pushforward(const Vec& x, const TensorField& integrand, double tau) const {
    const auto dim = x.size();
    if (tau == 0.0) return Mat::Zero(dim, dim);
    int panels = std::max(2, scenario_->numerics.panels);
    if (panels % 2 != 0) ++panels;
    const double ds = std::abs(tau) / panels;
    // (φ_s)_* β at x = Kᵀ β(φ_{-s} x) K with K = Dφ_{-s}(x); s runs with the sign of τ.
    const double step = -std::copysign(ds, tau);
    Vec y = x;
    Mat k = Mat::Identity(dim, dim);
    Mat sum = integrand(y);
    for (int p = 1; p <= panels; ++p) {
        const Mat local = flow_.jacobian(y, step);
        y = flow_.point(y, step);
        k = local * k;
        const double weight = (p == panels) ? 1.0 : ((p % 2 == 1) ? 4.0 : 2.0);
        sum += weight * (k.transpose() * integrand(y) * k);
    }
    const Mat out = std::copysign(ds / 3.0, tau) * sum;
    if (!out.allFinite()) throw NonFiniteError("flow integral produced non-finite values");
    return out;
}

Mat Deformation::f_plus(const Vec& x) const {
    const std::vector<double> key(x.data(), x.data() + x.size());
    {
        std::lock_guard lock(cache_->mutex);
        if (auto it = cache_->f_plus.find(key); it != cache_->f_plus.end()) return it->second;
    }
    Mat out = integrate_pushforward(x, scenario_->potential.dc_plus, t_);
    std::lock_guard lock(cache_->mutex);
    cache_->f_plus.emplace(key, out);
    return out;
}

Mat Deformation::f_minus_backward(const Vec& x) const {
    const std::vector<double> key(x.data(), x.data() + x.size());
    {
        std::lock_guard lock(cache_->mutex);
        if (auto it = cache_->f_minus.find(key); it != cache_->f_minus.end()) return it->second;
    }
    Mat out = integrate_pushforward(x, scenario_->potential.dc_minus, -t_);
    std::lock_guard lock(cache_->mutex);
    cache_->f_minus.emplace(key, out);
    return out;
}

Mat Deformation::g_t(const Vec& x) const {
    return scenario_->g(x) - twisted_11(scenario_->i_minus(x), f_plus(x));
}

Mat Deformation::i_plus_t(const Vec& x) const {
    return scenario_->i_plus(x) - scenario_->q(x) * f_plus(x).transpose();
}

Mat Deformation::i_minus_t(const Vec& x) const { return scenario_->i_minus(x); }

Mat Deformation::i_plus_pushed(const Vec& x) const {
    if (t_ == 0.0) return scenario_->i_plus(x);
    const Mat k = flow_.jacobian(x, -t_);
    const Vec y = flow_.point(x, -t_);
    Eigen::FullPivLU<Mat> lu(k);
    if (!lu.isInvertible()) throw InvalidStructureError("flow Jacobian is singular");
    return lu.inverse() * scenario_->i_plus(y) * k;
}

RealForm Deformation::h_t(const Vec& x) const {
    RealForm out = scenario_->h(x);
    if (t_ == 0.0) return out;
    return out + half_d_twisted(scenario_->i_minus, [this](const Vec& y) { return f_plus(y); }, x, fd());
}

Mat Deformation::omega_plus_t(const Vec& x) const { return i_plus_t(x).transpose() * g_t(x); }

Mat Deformation::omega_minus_t(const Vec& x) const { return i_minus_t(x).transpose() * g_t(x); }

TensorField Deformation::g_t_field() const {
    return {[self = *this](const Vec& x) { return self.g_t(x); }};
}

TensorField Deformation::i_plus_t_field() const {
    return {[self = *this](const Vec& x) { return self.i_plus_t(x); }};
}

TensorField Deformation::i_minus_t_field() const {
    return {[self = *this](const Vec& x) { return self.i_minus_t(x); }};
}

FormField Deformation::h_t_field() const {
    return {[self = *this](const Vec& x) { return self.h_t(x); }};
}

std::vector<Vec> scenario_grid(const Scenario& s) { return s.domain.sample_grid(s.grid, s.grid_inset); }

DeformedStructure deform(const Scenario& s, double t, const std::vector<Vec>& grid) {
    const Deformation def(s, t);
    DeformedStructure out;
    out.t = t;
    out.points.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const Vec& x = grid[i];
        out.points[i] = {x, def.g_t(x), def.i_plus_t(x), def.i_minus_t(x), def.h_t(x), def.f_plus(x)};
    });
    return out;
}

ResidualReport check_flow_identity(const Scenario& s, double t, const std::vector<Vec>& grid) {
    const Deformation def(s, t);
    std::vector<double> residual(grid.size()), magnitude(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const Mat closed = def.i_plus_t(grid[i]);
        residual[i] = linalg::max_abs(closed - def.i_plus_pushed(grid[i]));
        magnitude[i] = linalg::max_abs(closed);
    });
    ResidualReport r{"flow_identity", 0.0, 0.0, static_cast<int>(grid.size()), false};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        r.max_residual = std::max(r.max_residual, residual[i]);
        r.max_magnitude = std::max(r.max_magnitude, magnitude[i]);
    }
    r.pass = r.max_residual <= s.tolerances.flow_identity;
    return r;
}

std::vector<ResidualReport> check_lie_identities(const Scenario& s, const std::vector<Vec>& all_points) {
    std::vector<Vec> grid;
    for (const Vec& x : all_points) {
        const bool singular = std::any_of(s.potential.singular_set.begin(), s.potential.singular_set.end(),
                                          [&](const Exclusion& e) { return e.distance(x) < e.radius; });
        const bool degenerate = !s.degenerate_everywhere && s.degeneracy_locus &&
                                s.degeneracy_locus->distance(x) < s.degeneracy_locus->radius;
        if (!singular && !degenerate) grid.push_back(x);
    }
    const chart::FlowMap flow(s.potential.x_alpha, s.domain, s.numerics.dt, s.numerics.jacobian_mode, s.numerics.h);
    const FdOptions opt{s.numerics.h, 2, nullptr};
    const double lie_dt = std::sqrt(s.numerics.h);
    const auto& pot = s.potential;

    const chart::VectorField im_alpha{[&](const Vec& x) { return Vec(s.i_minus(x).transpose() * pot.alpha(x)); }};
    const chart::VectorField ip_alpha{[&](const Vec& x) { return Vec(s.i_plus(x).transpose() * pot.alpha(x)); }};

    std::vector<double> metric(grid.size()), torsion(grid.size()), mag_metric(grid.size()), mag_torsion(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const Vec& x = grid[i];
        const Mat lhs = chart::lie_derivative(s.g, chart::TensorKind::symmetric_form, flow, x, lie_dt);
        const Mat rhs = twisted_11(s.i_minus(x), pot.dc_plus(x)) - twisted_11(s.i_plus(x), pot.dc_minus(x));
        metric[i] = linalg::max_abs(lhs - rhs);
        mag_metric[i] = linalg::max_abs(rhs);

        const RealForm contracted = s.h(x).interior(pot.x_alpha(x));
        const RealForm expected = (chart::dc(s.i_plus, chart::covector_as_form(im_alpha), x, opt) +
                                   chart::dc(s.i_minus, chart::covector_as_form(ip_alpha), x, opt)) *
                                  0.5;
        torsion[i] = (contracted - expected).max_abs();
        mag_torsion[i] = expected.max_abs();
    });
    ResidualReport m{"lie_metric", 0.0, 0.0, static_cast<int>(grid.size()), false};
    ResidualReport h{"lie_torsion", 0.0, 0.0, static_cast<int>(grid.size()), false};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        m.max_residual = std::max(m.max_residual, metric[i]);
        m.max_magnitude = std::max(m.max_magnitude, mag_metric[i]);
        h.max_residual = std::max(h.max_residual, torsion[i]);
        h.max_magnitude = std::max(h.max_magnitude, mag_torsion[i]);
    }
    m.pass = m.max_residual <= s.tolerances.lie;
    h.pass = h.max_residual <= s.tolerances.lie;
    return {m, h};
}

std::vector<ResidualReport> check_pullback_consistency(const Scenario& s, double t, const std::vector<Vec>& grid) {
    const Deformation def(s, t);
    const FdOptions opt = def.fd();
    std::vector<double> metric(grid.size()), torsion(grid.size()), mag_metric(grid.size()), mag_torsion(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const Vec& x = grid[i];
        const Vec y = def.flow().point(x, t);
        const Mat j = def.flow().jacobian(x, t);
        const Mat pulled_g = j.transpose() * def.g_t(y) * j;
        const Mat expected_g = s.g(x) + twisted_11(s.i_plus(x), def.f_minus_backward(x));
        metric[i] = linalg::max_abs(pulled_g - expected_g);
        mag_metric[i] = linalg::max_abs(expected_g);

        const RealForm pulled_h = pullback_form(def.h_t(y), j);
        const RealForm expected_h =
            s.h(x) + half_d_twisted(s.i_plus, [&def](const Vec& z) { return def.f_minus_backward(z); }, x, opt);
        torsion[i] = (pulled_h - expected_h).max_abs();
        mag_torsion[i] = expected_h.max_abs();
    });
    ResidualReport m{"pullback_metric", 0.0, 0.0, static_cast<int>(grid.size()), false};
    ResidualReport h{"pullback_torsion", 0.0, 0.0, static_cast<int>(grid.size()), false};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        m.max_residual = std::max(m.max_residual, metric[i]);
        m.max_magnitude = std::max(m.max_magnitude, mag_metric[i]);
        h.max_residual = std::max(h.max_residual, torsion[i]);
        h.max_magnitude = std::max(h.max_magnitude, mag_torsion[i]);
    }
    m.pass = m.max_residual <= s.tolerances.pullback;
    h.pass = h.max_residual <= s.tolerances.pullback;
    return {m, h};
}

BihermitianReport verify_bihermitian(const Scenario& s, const DeformedStructure& d) {
    const Deformation def(s, d.t);
    const FdOptions opt = def.fd();
    const TensorField ip = def.i_plus_t_field();
    const TensorField im = def.i_minus_t_field();
    const FormField omega_plus = chart::two_form_as_form({[&def](const Vec& x) { return def.omega_plus_t(x); }});
    const FormField omega_minus = chart::two_form_as_form({[&def](const Vec& x) { return def.omega_minus_t(x); }});
    const FormField h_field = def.h_t_field();

    BihermitianReport r;
    r.t = d.t;
    r.points.resize(d.points.size());
    parallel_for(d.points.size(), [&](std::size_t i) {
        const DeformedPoint& p = d.points[i];
        PointDiagnostics diag;
        diag.x = p.x;
        diag.min_eig_g_t = min_eigenvalue(p.g_t);
        diag.symmetry = linalg::symmetry_defect(p.g_t);
        const Mat id = Mat::Identity(p.x.size(), p.x.size());
        diag.compatibility = std::max({linalg::max_abs(p.i_plus_t * p.i_plus_t + id),
                                       linalg::max_abs(p.i_minus_t * p.i_minus_t + id),
                                       linalg::max_abs(p.i_plus_t.transpose() * p.g_t * p.i_plus_t - p.g_t),
                                       linalg::max_abs(p.i_minus_t.transpose() * p.g_t * p.i_minus_t - p.g_t)});
        diag.nijenhuis_plus = chart::nijenhuis(ip, p.x, opt);
        diag.nijenhuis_minus = chart::nijenhuis(im, p.x, opt);
        diag.torsion_plus = (chart::dc(ip, omega_plus, p.x, opt) - p.h_t).max_abs();
        diag.torsion_minus = (chart::dc(im, omega_minus, p.x, opt) + p.h_t).max_abs();
        diag.flow_identity = linalg::max_abs(p.i_plus_t - def.i_plus_pushed(p.x));
        diag.dh = chart::fd_d(h_field, p.x, opt).max_abs();
        diag.in_collar = in_collar(s, p.x);
        r.points[i] = std::move(diag);
    });

    r.min_eig = std::numeric_limits<double>::infinity();
    for (const auto& p : r.points) {
        if (!p.in_collar) r.min_eig = std::min(r.min_eig, p.min_eig_g_t);
        r.max_nijenhuis = std::max({r.max_nijenhuis, p.nijenhuis_plus, p.nijenhuis_minus});
        r.max_torsion = std::max({r.max_torsion, p.torsion_plus, p.torsion_minus});
        r.max_dh = std::max(r.max_dh, p.dh);
        r.max_flow_identity = std::max(r.max_flow_identity, p.flow_identity);
        r.max_compatibility = std::max({r.max_compatibility, p.compatibility, p.symmetry});
    }

    // Lipschitz constant of λ_min from axis-neighbour differences on the grid.
    double lipschitz = 0.0;
    double spacing = 0.0;
    for (std::size_t a = 0; a < r.points.size(); ++a)
        for (std::size_t b = a + 1; b < r.points.size(); ++b) {
            const Vec diff = r.points[b].x - r.points[a].x;
            if ((diff.array().abs() > 1e-12).count() != 1) continue;
            const double dist = diff.norm();
            const int axis = [&] {
                Eigen::Index k = 0;
                diff.cwiseAbs().maxCoeff(&k);
                return static_cast<int>(k);
            }();
            const int count = s.grid.empty() ? 2 : std::max(2, s.grid[axis]);
            const double axis_step =
                (s.domain.upper()(axis) - s.domain.lower()(axis) - 2.0 * s.grid_inset) / (count - 1);
            if (dist > 1.0001 * axis_step) continue;
            spacing = std::max(spacing, axis_step);
            lipschitz = std::max(lipschitz, std::abs(r.points[b].min_eig_g_t - r.points[a].min_eig_g_t) / dist);
        }
    const double half_diagonal = 0.5 * spacing * std::sqrt(static_cast<double>(s.domain.dim()));
    r.lipschitz_margin = r.min_eig - lipschitz * half_diagonal;
    r.positive = r.min_eig > 0.0 && std::isfinite(r.min_eig);

    const Tolerances& tol = s.tolerances;
    r.pass = r.positive && r.max_nijenhuis <= tol.nijenhuis && r.max_torsion <= tol.torsion && r.max_dh <= tol.dh &&
             r.max_flow_identity <= tol.flow_identity && r.max_compatibility <= tol.compatibility;
    return r;
}

double min_grid_eigenvalue(const Scenario& s, double t, const std::vector<Vec>& grid) {
    const Deformation def(s, t);
    std::vector<double> eig(grid.size(), std::numeric_limits<double>::infinity());
    parallel_for(grid.size(), [&](std::size_t i) {
        if (!in_collar(s, grid[i])) eig[i] = min_eigenvalue(def.g_t(grid[i]));
    });
    return *std::min_element(eig.begin(), eig.end());
}

WindowResult positivity_window(const Scenario& s, const std::vector<Vec>& grid, double t_hi, int scan_steps,
                               int bisection_steps) {
    if (grid.empty()) throw InvalidStructureError("positivity window needs a nonempty grid");
    WindowResult w;
    auto positive = [&](double t) {
        ++w.evaluations;
        try {
            return min_grid_eigenvalue(s, t, grid) > 0.0;
        } catch (const EscapeError&) {
            return false;
        }
    };
    if (positive(t_hi)) {
        w.t_max = w.bracket_low = w.bracket_high = t_hi;
        w.hit_upper_bound = true;
        return w;
    }
    scan_steps = std::max(1, scan_steps);
    double lo = 0.0;
    double hi = t_hi;
    for (int k = 1; k <= scan_steps; ++k) {
        const double t = t_hi * k / scan_steps;
        if (!positive(t)) {
            hi = t;
            break;
        }
        lo = t;
    }
    if (lo == 0.0 && !positive(hi / (1 << 10))) {
        w.bracket_high = hi / (1 << 10);
        return w;
    }
    if (lo == 0.0) lo = hi / (1 << 10);
    for (int k = 0; k < bisection_steps; ++k) {
        const double mid = 0.5 * (lo + hi);
        (positive(mid) ? lo : hi) = mid;
    }
    w.t_max = lo;
    w.bracket_low = lo;
    w.bracket_high = hi;
    return w;
}

}  // namespace gkflow::flow
