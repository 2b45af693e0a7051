#include "gkflow/chart_calculus.hpp"

#include <algorithm>

namespace gkflow::chart {

namespace {

constexpr Complex kI{0.0, 1.0};

Mat inverse_or_throw(const Mat& m) {
    Eigen::FullPivLU<Mat> lu(m);
    if (!lu.isInvertible()) throw InvalidStructureError("flow Jacobian is singular");
    return lu.inverse();
}

}  // namespace

ChartDomain::ChartDomain(Vec lower, Vec upper, std::vector<Exclusion> exclusions)
    : lower_(std::move(lower)), upper_(std::move(upper)), exclusions_(std::move(exclusions)) {
    if (lower_.size() != upper_.size() || lower_.size() == 0) throw DimensionError("box bounds differ in dimension");
    if ((upper_.array() <= lower_.array()).any()) throw InvalidStructureError("degenerate box");
    for (const auto& ex : exclusions_)
        if (!(ex.radius > 0.0)) throw InvalidStructureError("exclusion radius must be positive");
}

bool ChartDomain::in_box(const Vec& x) const {
    return x.size() == lower_.size() && (x.array() >= lower_.array()).all() && (x.array() <= upper_.array()).all();
}

std::string ChartDomain::excluded_by(const Vec& x, double margin) const {
    for (const auto& ex : exclusions_)
        if (ex.distance(x) < ex.radius + margin) return ex.name;
    return {};
}

void ChartDomain::require_admissible(const Vec& x, double margin) const {
    const std::string hit = excluded_by(x, margin);
    if (!hit.empty()) throw ExclusionError("point lies within the exclusion radius of " + hit);
}

std::vector<Vec> ChartDomain::sample_grid(const std::vector<int>& counts, double inset, double margin) const {
    const int dim = this->dim();
    if (static_cast<int>(counts.size()) != dim) throw DimensionError("grid counts differ from chart dimension");
    std::vector<Vec> out;
    std::vector<int> index(dim, 0);
    while (true) {
        Vec x(dim);
        for (int a = 0; a < dim; ++a) {
            const double lo = lower_(a) + inset;
            const double hi = upper_(a) - inset;
            x(a) = counts[a] <= 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * index[a] / (counts[a] - 1);
        }
        if (excluded_by(x, margin).empty()) out.push_back(x);
        int a = dim - 1;
        while (a >= 0 && ++index[a] >= std::max(counts[a], 1)) index[a--] = 0;
        if (a < 0) break;
    }
    return out;
}

Vec fd_gradient(const ScalarField& f, const Vec& x, const FdOptions& opt) {
    Vec out(x.size());
    for (Eigen::Index a = 0; a < x.size(); ++a) out(a) = partial(f, x, static_cast<int>(a), opt);
    return out;
}

Mat fd_jacobian(const VectorField& field, const Vec& x, const FdOptions& opt) {
    Mat out(x.size(), x.size());
    for (Eigen::Index a = 0; a < x.size(); ++a) out.col(a) = partial(field, x, static_cast<int>(a), opt);
    return out;
}

RealForm fd_d(const FormField& form, const Vec& x, const FdOptions& opt) {
    const int dim = static_cast<int>(x.size());
    RealForm out(dim);
    for (int a = 0; a < dim; ++a) {
        const RealForm derivative = partial(form, x, a, opt);
        out += RealForm::covector(dim, Vec::Unit(dim, a)).wedge(derivative);
    }
    return out;
}

RealForm derivation_action(const Mat& complex_structure, const RealForm& form) {
    const int dim = form.dim();
    if (complex_structure.rows() != dim) throw DimensionError("complex structure size mismatch");
    RealForm out(dim);
    for (Monomial m = 0; m < form.size(); ++m) {
        const double c = form[m];
        if (c == 0.0) continue;
        for (int i = 0; i < dim; ++i) {
            const Monomial bit = Monomial{1} << i;
            if ((m & bit) == 0) continue;
            const Monomial rest = m & ~bit;
            const int sign_i = wedge_sign(bit, rest);
            for (int l = 0; l < dim; ++l) {
                const Monomial lbit = Monomial{1} << l;
                if ((rest & lbit) != 0 || complex_structure(i, l) == 0.0) continue;
                out[rest | lbit] += c * sign_i * wedge_sign(lbit, rest) * complex_structure(i, l);
            }
        }
    }
    return out;
}

RealForm dc(const TensorField& complex_structure, const FormField& form, const Vec& x, const FdOptions& opt) {
    const FormField twisted{[&](const Vec& y) { return derivation_action(complex_structure(y), form(y)); }, form.claim};
    return fd_d(twisted, x, opt) - derivation_action(complex_structure(x), fd_d(form, x, opt));
}

FormField scalar_as_form(const ScalarField& f, int dim) {
    return {[f, dim](const Vec& x) { return RealForm::scalar(dim, f(x)); }, f.claim};
}

FormField covector_as_form(const VectorField& xi) {
    return {[xi](const Vec& x) {
                const Vec v = xi(x);
                return RealForm::covector(static_cast<int>(v.size()), v);
            },
            xi.claim};
}

FormField two_form_as_form(const TensorField& components) {
    return {[components](const Vec& x) { return RealForm::two_form(components(x)); }, components.claim};
}

CMat pq_project(const Mat& components, const Mat& complex_structure, int p, int q) {
    if (p + q != 2 || p < 0 || q < 0) throw InvalidStructureError("(p,q) must satisfy p + q = 2");
    const auto dim = components.rows();
    const CMat id = CMat::Identity(dim, dim);
    const CMat holo = 0.5 * (id - kI * complex_structure.cast<Complex>());
    const CMat anti = holo.conjugate();
    const CMat f = components.cast<Complex>();
    if (p == 2) return holo.transpose() * f * holo;
    if (q == 2) return anti.transpose() * f * anti;
    return holo.transpose() * f * anti + anti.transpose() * f * holo;
}

Mat part_11(const Mat& components, const Mat& complex_structure) {
    return 0.5 * (components + complex_structure.transpose() * components * complex_structure);
}

Mat part_20_02(const Mat& components, const Mat& complex_structure) {
    return 0.5 * (components - complex_structure.transpose() * components * complex_structure);
}

std::vector<Mat> nijenhuis_components(const TensorField& complex_structure, const Vec& x, const FdOptions& opt) {
    const int dim = static_cast<int>(x.size());
    const Mat i_map = complex_structure(x);
    std::vector<Mat> derivative(dim);
    for (int l = 0; l < dim; ++l) derivative[l] = partial(complex_structure, x, l, opt);
    std::vector<Mat> out(dim, Mat::Zero(dim, dim));
    for (int k = 0; k < dim; ++k)
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                double v = 0.0;
                for (int l = 0; l < dim; ++l) {
                    v += i_map(l, i) * derivative[l](k, j) - i_map(l, j) * derivative[l](k, i);
                    v += i_map(k, l) * derivative[j](l, i) - i_map(k, l) * derivative[i](l, j);
                }
                out[k](i, j) = v;
            }
    return out;
}

double nijenhuis(const TensorField& complex_structure, const Vec& x, const FdOptions& opt) {
    double best = 0.0;
    for (const auto& slice : nijenhuis_components(complex_structure, x, opt)) best = std::max(best, linalg::max_abs(slice));
    return best;
}

FlowMap::FlowMap(VectorField field, ChartDomain domain, double dt, JacobianMode mode, double fd_h)
    : field_(std::move(field)), domain_(std::move(domain)), dt_(dt), mode_(mode), fd_h_(fd_h) {
    if (!(dt_ > 0.0) || !(fd_h_ > 0.0)) throw InvalidStructureError("flow steps must be positive");
}

int FlowMap::step_count(double t) const { return std::max(1, static_cast<int>(std::ceil(std::abs(t) / dt_ - 1e-12))); }

void FlowMap::check_state(const Vec& x, const Vec& velocity, double h) const {
    if (!x.allFinite() || !velocity.allFinite()) throw NonFiniteError("flow produced non-finite values");
    if (!domain_.in_box(x)) throw EscapeError("trajectory left the chart box");
    if (!domain_.excluded_by(x).empty()) throw EscapeError("trajectory entered an exclusion ball");
    if (velocity.norm() * std::abs(h) > kMaxStepDisplacement) throw EscapeError("flow step rejected: stiffness bound exceeded");
}

Vec FlowMap::point(const Vec& x0, double t) const {
    if (t == 0.0) return x0;
    const int steps = step_count(t);
    const double h = t / steps;
    Vec x = x0;
    for (int s = 0; s < steps; ++s) {
        const Vec k1 = field_(x);
        check_state(x, k1, h);
        const Vec k2 = field_(x + 0.5 * h * k1);
        const Vec k3 = field_(x + 0.5 * h * k2);
        const Vec k4 = field_(x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    check_state(x, field_(x), 0.0);
    return x;
}

Mat FlowMap::jacobian(const Vec& x0, double t) const { return jacobian(x0, t, mode_); }

Mat FlowMap::jacobian(const Vec& x0, double t, JacobianMode mode) const {
    const auto dim = x0.size();
    if (t == 0.0) return Mat::Identity(dim, dim);
    if (mode == JacobianMode::finite_difference) {
        Mat out(dim, dim);
        for (Eigen::Index a = 0; a < dim; ++a) {
            Vec step = Vec::Zero(dim);
            step(a) = fd_h_;
            out.col(a) = (point(x0 + step, t) - point(x0 - step, t)) / (2.0 * fd_h_);
        }
        return out;
    }
    const FdOptions opt{fd_h_, 2, nullptr};
    const int steps = step_count(t);
    const double h = t / steps;
    Vec x = x0;
    Mat j = Mat::Identity(dim, dim);
    for (int s = 0; s < steps; ++s) {
        const Vec k1 = field_(x);
        check_state(x, k1, h);
        const Mat a1 = fd_jacobian(field_, x, opt);
        const Vec x2 = x + 0.5 * h * k1;
        const Vec k2 = field_(x2);
        const Mat a2 = fd_jacobian(field_, x2, opt);
        const Vec x3 = x + 0.5 * h * k2;
        const Vec k3 = field_(x3);
        const Mat a3 = fd_jacobian(field_, x3, opt);
        const Vec x4 = x + h * k3;
        const Vec k4 = field_(x4);
        const Mat a4 = fd_jacobian(field_, x4, opt);
        const Mat j1 = a1 * j;
        const Mat j2 = a2 * (j + 0.5 * h * j1);
        const Mat j3 = a3 * (j + 0.5 * h * j2);
        const Mat j4 = a4 * (j + h * j3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        j += (h / 6.0) * (j1 + 2.0 * j2 + 2.0 * j3 + j4);
    }
    check_state(x, field_(x), 0.0);
    return j;
}

Mat pushforward(const Mat& tensor, TensorKind kind, const Mat& jacobian) {
    switch (kind) {
        case TensorKind::scalar: return tensor;
        case TensorKind::vector: return jacobian * tensor;
        case TensorKind::bivector: return jacobian * tensor * jacobian.transpose();
        default: break;
    }
    const Mat inv = inverse_or_throw(jacobian);
    switch (kind) {
        case TensorKind::covector: return inv.transpose() * tensor;
        case TensorKind::two_form:
        case TensorKind::symmetric_form: return inv.transpose() * tensor * inv;
        case TensorKind::endomorphism: return jacobian * tensor * inv;
        default: return tensor;
    }
}

Mat pullback(const Mat& tensor, TensorKind kind, const Mat& jacobian) {
    return pushforward(tensor, kind, inverse_or_throw(jacobian));
}

Mat lie_derivative(const TensorField& tensor, TensorKind kind, const FlowMap& flow, const Vec& x, double dt) {
    auto pulled = [&](double t) {
        const Vec y = flow.point(x, t);
        return pullback(tensor(y), kind, flow.jacobian(x, t));
    };
    return (pulled(dt) - pulled(-dt)) / (2.0 * dt);
}

}  // namespace gkflow::chart
