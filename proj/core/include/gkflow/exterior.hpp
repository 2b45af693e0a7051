#pragma once

#include "gkflow/errors.hpp"
#include "gkflow/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <type_traits>
#include <cstdint>
#include <vector>

namespace gkflow {

using Monomial = std::uint32_t;

/// Largest ambient dimension supported by dense forms (2^8 coefficients).
inline constexpr int kMaxFormDimension = 8;

/// Sign of dx_a ∧ dx_b for disjoint index sets `a`, `b` (as bitmasks).
[[nodiscard]] int wedge_sign(Monomial a, Monomial b) noexcept;

[[nodiscard]] inline int degree_of(Monomial m) noexcept { return std::popcount(m); }

/// Sign (-1)^{k(k-1)/2} of the transpose antiautomorphism on degree k.
[[nodiscard]] inline int transpose_sign(int degree) noexcept {
    return ((degree * (degree - 1) / 2) % 2 == 0) ? 1 : -1;
}

/// Dense mixed-degree form on R^dim, one coefficient per monomial bitmask.
template <class Scalar>
class Form {
public:
    Form() = default;
    explicit Form(int dim) : dim_(dim), coeffs_(std::size_t{1} << dim, Scalar{}) {
        if (dim < 0 || dim > kMaxFormDimension) throw DimensionError("form dimension out of range");
    }

    [[nodiscard]] static Form scalar(int dim, Scalar value) {
        Form f(dim);
        f.coeffs_[0] = value;
        return f;
    }

    [[nodiscard]] static Form covector(int dim, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& xi) {
        Form f(dim);
        for (int i = 0; i < dim; ++i) f.coeffs_[Monomial{1} << i] = xi(i);
        return f;
    }

    /// 2-form with components F(e_i, e_j) = comp(i, j); comp must be antisymmetric.
    [[nodiscard]] static Form two_form(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& comp) {
        const int dim = static_cast<int>(comp.rows());
        Form f(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = i + 1; j < dim; ++j) f.coeffs_[(Monomial{1} << i) | (Monomial{1} << j)] = comp(i, j);
        return f;
    }

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return coeffs_.size(); }
    [[nodiscard]] Scalar operator[](Monomial m) const { return coeffs_[m]; }
    [[nodiscard]] Scalar& operator[](Monomial m) { return coeffs_[m]; }
    [[nodiscard]] const std::vector<Scalar>& coefficients() const noexcept { return coeffs_; }

    [[nodiscard]] Scalar top() const { return coeffs_.back(); }

    /// Component matrix of the degree-2 part.
    [[nodiscard]] Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> two_form_components() const {
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> comp =
            Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(dim_, dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = i + 1; j < dim_; ++j) {
                comp(i, j) = coeffs_[(Monomial{1} << i) | (Monomial{1} << j)];
                comp(j, i) = -comp(i, j);
            }
        return comp;
    }

    [[nodiscard]] Form degree_part(int k) const {
        Form out(dim_);
        for (Monomial m = 0; m < coeffs_.size(); ++m)
            if (degree_of(m) == k) out.coeffs_[m] = coeffs_[m];
        return out;
    }

    /// Lowest degree carrying a coefficient above `tol`; -1 for the zero form.
    [[nodiscard]] int lowest_degree(double tol) const {
        int best = -1;
        for (Monomial m = 0; m < coeffs_.size(); ++m)
            if (std::abs(coeffs_[m]) > tol && (best < 0 || degree_of(m) < best)) best = degree_of(m);
        return best;
    }

    [[nodiscard]] bool is_homogeneous(int k, double tol) const {
        for (Monomial m = 0; m < coeffs_.size(); ++m)
            if (degree_of(m) != k && std::abs(coeffs_[m]) > tol) return false;
        return true;
    }

    [[nodiscard]] Form transposed() const {
        Form out(*this);
        for (Monomial m = 0; m < coeffs_.size(); ++m) out.coeffs_[m] *= Scalar(transpose_sign(degree_of(m)));
        return out;
    }

    [[nodiscard]] Form conjugated() const {
        Form out(*this);
        for (auto& c : out.coeffs_) c = conj_value(c);
        return out;
    }

    [[nodiscard]] Form wedge(const Form& other) const {
        check_same(other);
        Form out(dim_);
        for (Monomial a = 0; a < coeffs_.size(); ++a) {
            if (coeffs_[a] == Scalar{}) continue;
            for (Monomial b = 0; b < coeffs_.size(); ++b) {
                if ((a & b) != 0 || other.coeffs_[b] == Scalar{}) continue;
                out.coeffs_[a | b] += Scalar(wedge_sign(a, b)) * coeffs_[a] * other.coeffs_[b];
            }
        }
        return out;
    }

    /// Interior product ι_X.
    [[nodiscard]] Form interior(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) const {
        Form out(dim_);
        for (Monomial m = 0; m < coeffs_.size(); ++m) {
            if (coeffs_[m] == Scalar{}) continue;
            int position = 0;
            for (int i = 0; i < dim_; ++i) {
                const Monomial bit = Monomial{1} << i;
                if ((m & bit) == 0) continue;
                const Scalar sign = Scalar((position % 2 == 0) ? 1 : -1);
                out.coeffs_[m & ~bit] += sign * x(i) * coeffs_[m];
                ++position;
            }
        }
        return out;
    }

    /// exp(self) via the finite wedge series.
    [[nodiscard]] Form exponential() const {
        Form term = scalar(dim_, Scalar(1));
        Form sum = term;
        for (int k = 1; k <= dim_; ++k) {
            term = term.wedge(*this) * Scalar(1.0 / k);
            sum += term;
        }
        return sum;
    }

    Form& operator+=(const Form& o) {
        check_same(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }
    Form& operator-=(const Form& o) {
        check_same(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        return *this;
    }
    Form& operator*=(Scalar s) {
        for (auto& c : coeffs_) c *= s;
        return *this;
    }
    friend Form operator+(Form a, const Form& b) { return a += b; }
    friend Form operator-(Form a, const Form& b) { return a -= b; }
    friend Form operator*(Form a, Scalar s) { return a *= s; }
    friend Form operator*(Scalar s, Form a) { return a *= s; }

    [[nodiscard]] double max_abs() const {
        double best = 0.0;
        for (const auto& c : coeffs_) best = std::max(best, static_cast<double>(std::abs(c)));
        return best;
    }

    [[nodiscard]] Eigen::Matrix<Scalar, Eigen::Dynamic, 1> as_vector() const {
        return Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(coeffs_.data(),
                                                                           static_cast<Eigen::Index>(coeffs_.size()));
    }

    [[nodiscard]] static Form from_vector(int dim, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v) {
        Form f(dim);
        for (Eigen::Index i = 0; i < v.size(); ++i) f.coeffs_[static_cast<std::size_t>(i)] = v(i);
        return f;
    }

private:
    static Scalar conj_value(const Scalar& c) {
        if constexpr (std::is_same_v<Scalar, Complex>) return std::conj(c);
        else return c;
    }
    void check_same(const Form& o) const {
        if (o.dim_ != dim_) throw DimensionError("form dimensions differ");
    }

    int dim_ = 0;
    std::vector<Scalar> coeffs_;
};

using RealForm = Form<double>;
using ComplexForm = Form<Complex>;

[[nodiscard]] ComplexForm complexify(const RealForm& f);

/// Pullback of a form along a linear map with matrix `jacobian`: (φ*β)(X,…) = β(J X,…).
[[nodiscard]] RealForm pullback_form(const RealForm& form, const Mat& jacobian);

/// Matrix of ξ∧(·) on the full exterior algebra.
[[nodiscard]] CMat wedge_matrix(const CVec& covector);

/// Matrix of ι_X on the full exterior algebra.
[[nodiscard]] CMat interior_matrix(const CVec& vector);

}  // namespace gkflow
