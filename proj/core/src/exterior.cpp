#include "gkflow/exterior.hpp"

namespace gkflow {

int wedge_sign(Monomial a, Monomial b) noexcept {
    // count pairs (i in a, j in b) with i > j
    int swaps = 0;
    while (b != 0) {
        const int j = std::countr_zero(b);
        b &= b - 1;
        swaps += std::popcount(a >> (j + 1));
    }
    return (swaps % 2 == 0) ? 1 : -1;
}

ComplexForm complexify(const RealForm& f) {
    ComplexForm out(f.dim());
    for (Monomial m = 0; m < f.size(); ++m) out[m] = f[m];
    return out;
}

RealForm pullback_form(const RealForm& form, const Mat& jacobian) {
    const int dim = form.dim();
    if (jacobian.rows() != dim || jacobian.cols() != dim) throw DimensionError("pullback Jacobian size mismatch");
    RealForm out(dim);
    for (Monomial m = 0; m < form.size(); ++m) {
        if (form[m] == 0.0) continue;
        RealForm term = RealForm::scalar(dim, form[m]);
        for (int i = 0; i < dim; ++i)
            if ((m & (Monomial{1} << i)) != 0) term = term.wedge(RealForm::covector(dim, jacobian.row(i).transpose()));
        out += term;
    }
    return out;
}

CMat wedge_matrix(const CVec& covector) {
    const int dim = static_cast<int>(covector.size());
    const auto total = Eigen::Index{1} << dim;
    CMat op = CMat::Zero(total, total);
    for (Monomial m = 0; m < static_cast<Monomial>(total); ++m)
        for (int i = 0; i < dim; ++i) {
            const Monomial bit = Monomial{1} << i;
            if ((m & bit) != 0) continue;
            op(m | bit, m) += static_cast<double>(wedge_sign(bit, m)) * covector(i);
        }
    return op;
}

CMat interior_matrix(const CVec& vector) {
    const int dim = static_cast<int>(vector.size());
    const auto total = Eigen::Index{1} << dim;
    CMat op = CMat::Zero(total, total);
    for (Monomial m = 0; m < static_cast<Monomial>(total); ++m) {
        int position = 0;
        for (int i = 0; i < dim; ++i) {
            const Monomial bit = Monomial{1} << i;
            if ((m & bit) == 0) continue;
            op(m & ~bit, m) += ((position % 2 == 0) ? 1.0 : -1.0) * vector(i);
            ++position;
        }
    }
    return op;
}

}  // namespace gkflow
