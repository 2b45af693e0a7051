#include "gkflow/lie_gk.hpp"

#include "gkflow/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

namespace gkflow::lie {

namespace {

constexpr Complex kI{0.0, 1.0};

Weight add(const Weight& a, const Weight& b) {
    Weight out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
    return out;
}

Weight scaled(const Weight& a, int s) {
    Weight out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = s * a[k];
    return out;
}

bool contains(const std::vector<Weight>& set, const Weight& w) { return std::find(set.begin(), set.end(), w) != set.end(); }

RootDatum simple_datum(std::string name, std::vector<std::vector<int>> cartan) {
    RootDatum rd;
    rd.name = std::move(name);
    rd.rank = static_cast<int>(cartan.size());
    rd.cartan = std::move(cartan);
    for (int i = 0; i < rd.rank; ++i) {
        Weight e(rd.rank, 0);
        e[i] = 1;
        rd.positive.push_back(e);
    }
    // Root strings: p = max{k : β − kα_i ∈ R⁺}, q = p − ⟨β, α_i^∨⟩.
    for (std::size_t at = 0; at < rd.positive.size(); ++at) {
        for (int i = 0; i < rd.rank; ++i) {
            const Weight beta = rd.positive[at];
            Weight simple(rd.rank, 0);
            simple[i] = 1;
            int p = 0;
            while (contains(rd.positive, add(beta, scaled(simple, -(p + 1))))) ++p;
            int pairing = 0;
            for (int j = 0; j < rd.rank; ++j) pairing += beta[j] * rd.cartan[j][i];
            if (p - pairing > 0) {
                const Weight next = add(beta, simple);
                if (!contains(rd.positive, next)) rd.positive.push_back(next);
            }
        }
    }
    rd.roots = rd.positive;
    for (const auto& w : rd.positive) rd.roots.push_back(scaled(w, -1));
    return rd;
}

RootDatum single_factor(std::string_view name) {
    if (name == "A1") return simple_datum("A1", {{2}});
    if (name == "A2") return simple_datum("A2", {{2, -1}, {-1, 2}});
    if (name == "B2") return simple_datum("B2", {{2, -2}, {-1, 2}});
    if (name == "G2") return simple_datum("G2", {{2, -1}, {-3, 2}});
    throw InvalidStructureError("unsupported root datum '" + std::string(name) + "'");
}

template <class Scalar>
bool scalar_is_zero(const Scalar& s, double tol) {
    if constexpr (std::is_same_v<Scalar, GaussRational>) {
        (void)tol;
        return s.is_zero();
    } else {
        return std::abs(s) <= tol;
    }
}

template <class Scalar>
DegeneracyResult degeneracy_impl(const BracketTable<Scalar>& b, double tol) {
    DegeneracyResult out;
    const int n = b.dim;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                std::map<std::pair<int, int>, Scalar> sym;
                auto accumulate = [&](int u, int v, int w) {
                    for (int l = 0; l < n; ++l) {
                        const auto key = std::minmax(u, l);
                        sym[{key.first, key.second}] = sym[{key.first, key.second}] + b(v, w, l);
                    }
                };
                accumulate(i, j, k);
                accumulate(j, k, i);
                accumulate(k, i, j);
                for (const auto& [key, value] : sym)
                    if (!scalar_is_zero(value, tol)) {
                        out.degenerate = false;
                        out.witness = std::array<int, 3>{i, j, k};
                        return out;
                    }
            }
    return out;
}

CVec random_cvec(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    CVec v(n);
    for (int k = 0; k < n; ++k) v(k) = Complex(normal(rng), normal(rng));
    return v;
}

RationalMatrix zero_matrix(int n) { return RationalMatrix(n, RationalVector(n, Rational(0))); }

RationalVector mat_apply(const RationalMatrix& m, const RationalVector& x) {
    const std::size_t n = m.size();
    RationalVector out(n, Rational(0));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (m[r][c].numerator() != 0 && x[c].numerator() != 0) out[r] += m[r][c] * x[c];
    return out;
}

RationalVector unit(int n, int k) {
    RationalVector v(n, Rational(0));
    v[k] = 1;
    return v;
}

bool is_zero(const RationalVector& v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& r) { return r.numerator() == 0; });
}

RationalVector minus(const RationalVector& a, const RationalVector& b) {
    RationalVector out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
    return out;
}

Rational abs_max(Rational acc, const Rational& v) { return std::max(acc, v.numerator() < 0 ? -v : v); }

Mat bracket_matrix(const Mat& a, const Mat& b) { return a * b - b * a; }

double form(const Mat& a, const Mat& b) { return -(a * b).trace(); }

Mat realify(const CMat& m) {
    const auto n = m.rows();
    Mat out(2 * n, 2 * n);
    out << m.real(), -m.imag(), m.imag(), m.real();
    return out;
}

std::vector<Mat> su3_basis() {
    std::vector<Mat> out;
    for (int j = 0; j < 3; ++j)
        for (int k = j + 1; k < 3; ++k) {
            CMat a = CMat::Zero(3, 3);
            a(j, k) = 1.0;
            a(k, j) = -1.0;
            out.push_back(realify(a));
            CMat s = CMat::Zero(3, 3);
            s(j, k) = kI;
            s(k, j) = kI;
            out.push_back(realify(s));
        }
    for (int j = 0; j < 2; ++j) {
        CMat d = CMat::Zero(3, 3);
        d(j, j) = kI;
        d(j + 1, j + 1) = -kI;
        out.push_back(realify(d));
    }
    return out;
}

std::vector<Mat> so_basis(int n) {
    std::vector<Mat> out;
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            Mat a = Mat::Zero(n, n);
            a(j, k) = 1.0;
            a(k, j) = -1.0;
            out.push_back(a);
        }
    return out;
}

/// Structure tensor of the octonions on 1, e1..e7.
std::array<std::array<std::pair<int, int>, 8>, 8> octonion_table() {
    std::array<std::array<std::pair<int, int>, 8>, 8> t{};
    for (int i = 0; i < 8; ++i) {
        t[0][i] = {i, 1};
        t[i][0] = {i, 1};
    }
    for (int i = 1; i < 8; ++i) t[i][i] = {0, -1};
    static constexpr int kTriples[7][3] = {{1, 2, 3}, {1, 4, 5}, {1, 7, 6}, {2, 4, 6}, {2, 5, 7}, {3, 4, 7}, {3, 6, 5}};
    for (const auto& tr : kTriples) {
        const int a = tr[0], b = tr[1], c = tr[2];
        t[a][b] = {c, 1};
        t[b][c] = {a, 1};
        t[c][a] = {b, 1};
        t[b][a] = {c, -1};
        t[c][b] = {a, -1};
        t[a][c] = {b, -1};
    }
    return t;
}

std::vector<Mat> g2_basis() {
    const auto table = octonion_table();
    // D on imaginary octonions (7×7, D(1) = 0); D(e_i e_j) = D(e_i) e_j + e_i D(e_j) in 8 components.
    const int unknowns = 49;
    Mat system = Mat::Zero(7 * 7 * 8, unknowns);
    auto var = [](int row, int col) { return (row - 1) * 7 + (col - 1); };  // D(row, col) over imaginary units
    int eq = 0;
    for (int i = 1; i < 8; ++i)
        for (int j = 1; j < 8; ++j, eq += 8) {
            const auto [prod, sign] = table[i][j];
            if (prod != 0)
                for (int m = 1; m < 8; ++m) system(eq + m, var(m, prod)) += sign;
            for (int m = 1; m < 8; ++m) {
                const auto [left, ls] = table[m][j];
                system(eq + left, var(m, i)) -= ls;
                const auto [right, rs] = table[i][m];
                system(eq + right, var(m, j)) -= rs;
            }
        }
    const Mat kernel = linalg::null_space(system);
    std::vector<Mat> out;
    for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
        Mat d(7, 7);
        for (int r = 0; r < 7; ++r)
            for (int s = 0; s < 7; ++s) d(r, s) = kernel(var(r + 1, s + 1), c);
        out.push_back(d);
    }
    return out;
}

std::vector<Mat> orthonormalize(const std::vector<Mat>& raw) {
    std::vector<Mat> out;
    for (const Mat& m : raw) {
        Mat v = m;
        for (const Mat& b : out) v -= form(v, b) * b;
        const double norm = std::sqrt(std::max(form(v, v), 0.0));
        if (norm > 1e-9) out.push_back(v / norm);
    }
    return out;
}

Mat ad_matrix(const BracketTable<double>& c, const Vec& x) {
    Mat out = Mat::Zero(c.dim, c.dim);
    for (int i = 0; i < c.dim; ++i)
        if (x(i) != 0.0)
            for (int j = 0; j < c.dim; ++j)
                for (int k = 0; k < c.dim; ++k) out(k, j) += x(i) * c(i, j, k);
    return out;
}

CVec complex_bracket(const BracketTable<double>& c, const CVec& x, const CVec& y) {
    CVec out = CVec::Zero(c.dim);
    for (int i = 0; i < c.dim; ++i)
        for (int j = 0; j < c.dim; ++j) {
            const Complex w = x(i) * y(j);
            if (w == 0.0) continue;
            for (int k = 0; k < c.dim; ++k) out(k) += w * c(i, j, k);
        }
    return out;
}

/// Positive basis of 𝔤^{1,0} on the root part, with one root optionally conjugated.
std::vector<CVec> chosen_roots(const FloatAlgebra& a, std::optional<int> flip) {
    std::vector<CVec> out = a.root_vectors;
    if (flip) {
        if (*flip < 0 || *flip >= static_cast<int>(out.size())) throw InvalidStructureError("flip index out of range");
        out[*flip] = out[*flip].conjugate();
    }
    return out;
}

/// Root-part complex structure: i on the chosen vectors, −i on their conjugates, 0 on the torus.
CMat root_complex_structure(const std::vector<CVec>& chosen) {
    const auto n = chosen.front().size();
    const auto k = static_cast<Eigen::Index>(chosen.size());
    CMat basis(n, 2 * k);
    for (Eigen::Index j = 0; j < k; ++j) {
        basis.col(j) = chosen[j];
        basis.col(k + j) = chosen[j].conjugate();
    }
    CMat diag = CMat::Zero(2 * k, 2 * k);
    for (Eigen::Index j = 0; j < k; ++j) {
        diag(j, j) = kI;
        diag(k + j, k + j) = -kI;
    }
    const CMat pinv = basis.completeOrthogonalDecomposition().pseudoInverse();
    return basis * diag * pinv;
}

}  // namespace

// ---------------------------------------------------------------- root data

RootDatum product(const RootDatum& a, const RootDatum& b) {
    RootDatum out;
    out.name = a.name + "x" + b.name;
    out.rank = a.rank + b.rank;
    out.cartan.assign(out.rank, std::vector<int>(out.rank, 0));
    for (int i = 0; i < a.rank; ++i)
        for (int j = 0; j < a.rank; ++j) out.cartan[i][j] = a.cartan[i][j];
    for (int i = 0; i < b.rank; ++i)
        for (int j = 0; j < b.rank; ++j) out.cartan[a.rank + i][a.rank + j] = b.cartan[i][j];
    for (const auto& w : a.positive) {
        Weight e(out.rank, 0);
        std::copy(w.begin(), w.end(), e.begin());
        out.positive.push_back(e);
    }
    for (const auto& w : b.positive) {
        Weight e(out.rank, 0);
        std::copy(w.begin(), w.end(), e.begin() + a.rank);
        out.positive.push_back(e);
    }
    out.roots = out.positive;
    for (const auto& w : out.positive) out.roots.push_back(scaled(w, -1));
    return out;
}

RootDatum root_datum(std::string_view name) {
    std::optional<RootDatum> acc;
    std::size_t start = 0;
    while (start <= name.size()) {
        const std::size_t end = std::min(name.find('x', start), name.size());
        const RootDatum factor = single_factor(name.substr(start, end - start));
        acc = acc ? product(*acc, factor) : factor;
        start = end + 1;
    }
    return *acc;
}

bool is_root(const RootDatum& rd, const Weight& w) { return contains(rd.roots, w); }

bool validate_root_datum(const RootDatum& rd) {
    for (const auto& w : rd.roots)
        if (!is_root(rd, scaled(w, -1))) return false;
    if (rd.roots.size() != 2 * rd.positive.size()) return false;
    for (const auto& a : rd.positive)
        for (const auto& b : rd.positive) {
            const Weight s = add(a, b);
            if (is_root(rd, s) && !contains(rd.positive, s)) return false;
        }
    return true;
}

std::optional<RootPair> root_sum_witness(const RootDatum& rd) {
    for (std::size_t i = 0; i < rd.positive.size(); ++i)
        for (std::size_t j = i + 1; j < rd.positive.size(); ++j)
            if (is_root(rd, add(rd.positive[i], rd.positive[j]))) return RootPair{rd.positive[i], rd.positive[j]};
    return std::nullopt;
}

bool root_sum_criterion(const RootDatum& rd) { return !root_sum_witness(rd).has_value(); }

bool classify_products_of_A1(const RootDatum& rd) {
    for (int i = 0; i < rd.rank; ++i)
        for (int j = 0; j < rd.rank; ++j)
            if (i != j && rd.cartan[i][j] != 0) return false;
    return true;
}

std::vector<RootDatum> supported_table() {
    static const char* const kNames[] = {"A1",   "A1xA1", "A1xA1xA1", "A2",   "B2",
                                         "G2",   "A2xA1", "B2xA1",    "G2xA1"};
    std::vector<RootDatum> out;
    for (const char* n : kNames) out.push_back(root_datum(n));
    return out;
}

// ---------------------------------------------------------------- brackets

ComplexBracket to_complex(const ExactBracket& b) {
    ComplexBracket out(b.dim);
    for (std::size_t k = 0; k < b.c.size(); ++k) out.c[k] = b.c[k].to_complex();
    return out;
}

CVec apply_bracket(const ComplexBracket& b, const CVec& x, const CVec& y) {
    CVec out = CVec::Zero(b.dim);
    for (int i = 0; i < b.dim; ++i)
        for (int j = 0; j < b.dim; ++j) {
            const Complex w = x(i) * y(j);
            if (w == 0.0) continue;
            for (int k = 0; k < b.dim; ++k) out(k) += w * b(i, j, k);
        }
    return out;
}

ComplexBracket abelian_bracket(int dim) { return ComplexBracket(dim); }

ComplexBracket heisenberg_bracket() {
    ComplexBracket b(3);
    b(0, 1, 2) = 1.0;
    b(1, 0, 2) = -1.0;
    return b;
}

ComplexBracket affine_bracket() {
    ComplexBracket b(2);
    b(0, 1, 1) = 1.0;
    b(1, 0, 1) = -1.0;
    return b;
}

ComplexBracket functional_bracket(const CVec& phi) {
    const int n = static_cast<int>(phi.size());
    ComplexBracket b(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            b(i, j, j) += phi(i);
            b(i, j, i) -= phi(j);
        }
    return b;
}

DegeneracyResult degeneracy_test(const ExactBracket& b) { return degeneracy_impl(b, 0.0); }

DegeneracyResult degeneracy_test(const ComplexBracket& b, double tol) { return degeneracy_impl(b, tol); }

bool plane_criterion(const ComplexBracket& b, std::mt19937_64& rng, int pairs, double tol) {
    if (b.dim < 3) return true;
    for (int p = 0; p < pairs; ++p) {
        const CVec x = random_cvec(b.dim, rng);
        const CVec y = random_cvec(b.dim, rng);
        CMat span(b.dim, 3);
        span << x, y, apply_bracket(b, x, y);
        const Vec sv = Eigen::JacobiSVD<CMat>(span).singularValues();
        if (sv(2) > tol * std::max(1.0, sv(0))) return false;
    }
    return true;
}

double antisymmetry_defect(const ComplexBracket& b) {
    double worst = 0.0;
    for (int i = 0; i < b.dim; ++i)
        for (int j = 0; j < b.dim; ++j)
            for (int k = 0; k < b.dim; ++k) worst = std::max(worst, std::abs(b(i, j, k) + b(j, i, k)));
    return worst;
}

ComplexBracket twist(const ComplexBracket& b, const CMat& a, double tol) {
    if (a.rows() != b.dim || a.cols() != b.dim) throw DimensionError("twist size mismatch");
    ComplexBracket out(b.dim);
    for (int i = 0; i < b.dim; ++i)
        for (int m = 0; m < b.dim; ++m) {
            if (a(m, i) == 0.0) continue;
            for (int j = 0; j < b.dim; ++j)
                for (int k = 0; k < b.dim; ++k) out(i, j, k) += a(m, i) * b(m, j, k);
        }
    if (antisymmetry_defect(out) > tol * std::max(1.0, a.norm())) throw InvalidStructureError("twisted bracket is not antisymmetric");
    return out;
}

bool twisted_degeneracy(const ComplexBracket& b, const CMat& a, double tol) {
    return degeneracy_test(twist(b, a, tol), tol).degenerate;
}

std::vector<CMat> admissible_twists(const ComplexBracket& b) {
    const int n = b.dim;
    CMat system = CMat::Zero(static_cast<Eigen::Index>(n) * n * n, static_cast<Eigen::Index>(n) * n);
    // Row (i,j,k): Σ_m A(m,i) c(m,j,k) + A(m,j) c(m,i,k); unknown A(m,i) at column m*n + i.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const Eigen::Index row = (static_cast<Eigen::Index>(i) * n + j) * n + k;
                for (int m = 0; m < n; ++m) {
                    system(row, m * n + i) += b(m, j, k);
                    system(row, m * n + j) += b(m, i, k);
                }
            }
    const CMat kernel = linalg::null_space(system);
    std::vector<CMat> out;
    for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
        CMat a(n, n);
        for (int m = 0; m < n; ++m)
            for (int i = 0; i < n; ++i) a(m, i) = kernel(m * n + i, c);
        out.push_back(a);
    }
    return out;
}

std::optional<CMat> random_twist(const ComplexBracket& b, std::mt19937_64& rng) {
    const auto basis = admissible_twists(b);
    if (basis.empty()) return std::nullopt;
    std::normal_distribution<double> normal;
    for (int attempt = 0; attempt < 16; ++attempt) {
        CMat a = CMat::Zero(b.dim, b.dim);
        for (const auto& m : basis) a += Complex(normal(rng), normal(rng)) * m;
        const Vec sv = Eigen::JacobiSVD<CMat>(a).singularValues();
        if (sv(sv.size() - 1) > 1e-6 * sv(0)) return a;
    }
    return std::nullopt;
}

ComplexBracket random_degenerate_bracket(int dim, std::mt19937_64& rng) {
    if (dim < 1) throw DimensionError("bracket dimension must be positive");
    std::uniform_int_distribution<int> kind(0, 3);
    const int k = kind(rng);
    if (dim == 2 && k < 2) {
        const CVec v = random_cvec(2, rng);
        ComplexBracket b(2);
        for (int l = 0; l < 2; ++l) {
            b(0, 1, l) = v(l);
            b(1, 0, l) = -v(l);
        }
        return b;
    }
    if (k == 0) return abelian_bracket(dim);
    return functional_bracket(random_cvec(dim, rng));
}

// ---------------------------------------------------------------- exact algebra

std::vector<int> CompactAlgebra::circles() const {
    std::vector<int> out;
    for (int k = 0; k < n_u1; ++k) out.push_back(k);
    for (int k = 0; k < m_su2; ++k) out.push_back(n_u1 + 3 * k + 2);
    return out;
}

std::vector<int> CompactAlgebra::root_plane() const {
    std::vector<int> out;
    for (int k = 0; k < m_su2; ++k) {
        out.push_back(n_u1 + 3 * k);
        out.push_back(n_u1 + 3 * k + 1);
    }
    return out;
}

CompactAlgebra build_compact_algebra(int n_u1, int m_su2) {
    if (n_u1 < 0 || m_su2 < 0) throw InvalidStructureError("factor counts must be nonnegative");
    CompactAlgebra a;
    a.n_u1 = n_u1;
    a.m_su2 = m_su2;
    a.dim = n_u1 + 3 * m_su2;
    a.c = BracketTable<Rational>(a.dim);
    for (int k = 0; k < m_su2; ++k) {
        const int o = n_u1 + 3 * k;
        const int cyc[3][3] = {{o, o + 1, o + 2}, {o + 1, o + 2, o}, {o + 2, o, o + 1}};
        for (const auto& t : cyc) {
            a.c(t[0], t[1], t[2]) = 1;
            a.c(t[1], t[0], t[2]) = -1;
        }
    }
    // Negative Killing form of su(2) in this basis is 2·Id; 𝔞 uses the same scale.
    a.metric = zero_matrix(a.dim);
    for (int k = 0; k < a.dim; ++k) a.metric[k][k] = 2;
    return a;
}

AlgebraReport validate_algebra(const CompactAlgebra& a) {
    AlgebraReport r;
    const int n = a.dim;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                r.antisymmetry_defect = abs_max(r.antisymmetry_defect, a.c(i, j, k) + a.c(j, i, k));
                // Jacobi: [e_i,[e_j,e_k]] + cyclic, component l.
                for (int l = 0; l < n; ++l) {
                    Rational s = 0;
                    for (int m = 0; m < n; ++m)
                        s += a.c(j, k, m) * a.c(i, m, l) + a.c(k, i, m) * a.c(j, m, l) + a.c(i, j, m) * a.c(k, m, l);
                    r.jacobi_defect = abs_max(r.jacobi_defect, s);
                }
                // ⟨[e_i,e_j],e_k⟩ + ⟨e_j,[e_i,e_k]⟩.
                Rational inv = 0;
                for (int m = 0; m < n; ++m) inv += a.c(i, j, m) * a.metric[m][k] + a.metric[j][m] * a.c(i, k, m);
                r.ad_invariance_defect = abs_max(r.ad_invariance_defect, inv);
                // H(e_i,e_j,e_k) + H(e_i,e_k,e_j).
                Rational h1 = 0, h2 = 0;
                for (int m = 0; m < n; ++m) {
                    h1 += a.c(i, j, m) * a.metric[m][k];
                    h2 += a.c(i, k, m) * a.metric[m][j];
                }
                r.h_antisymmetry_defect = abs_max(r.h_antisymmetry_defect, h1 + h2);
            }
    return r;
}

TorusPairing product_pairing(const CompactAlgebra& a, int tail) {
    const int total = a.n_u1 + a.m_su2;
    if (tail < 0 || tail > total || tail % 2 != 0 || (total - tail) % 2 != 0)
        throw InvalidStructureError("product complex structure needs even head and tail blocks on the torus");
    TorusPairing p;
    for (int k = 0; k + 1 < total; k += 2) p.pairs.emplace_back(k, k + 1);
    // Blocks are consecutive, so even-aligned pairs never straddle the boundary when both sizes are even.
    return p;
}

RationalMatrix invariant_complex_structure(const CompactAlgebra& a, const TorusPairing& j0,
                                           const std::vector<int>& positivity) {
    const std::vector<int> circles = a.circles();
    if (circles.size() % 2 != 0) throw InvalidStructureError("a ⊕ t must be even-dimensional");
    std::vector<int> seen(circles.size(), 0);
    for (const auto& [p, q] : j0.pairs) {
        if (p < 0 || q < 0 || p >= static_cast<int>(circles.size()) || q >= static_cast<int>(circles.size()) || p == q)
            throw InvalidStructureError("torus pairing index out of range");
        ++seen[p];
        ++seen[q];
    }
    if (std::any_of(seen.begin(), seen.end(), [](int s) { return s != 1; }))
        throw InvalidStructureError("torus pairing must use every circle exactly once");
    if (!positivity.empty() && static_cast<int>(positivity.size()) != a.m_su2)
        throw DimensionError("one positivity sign per su(2) factor");

    RationalMatrix i = zero_matrix(a.dim);  // i[row][col]: column col is I(e_col)
    for (const auto& [p, q] : j0.pairs) {
        i[circles[q]][circles[p]] = 1;
        i[circles[p]][circles[q]] = -1;
    }
    for (int k = 0; k < a.m_su2; ++k) {
        const int x = a.n_u1 + 3 * k;
        const int s = positivity.empty() ? 1 : (positivity[k] >= 0 ? 1 : -1);
        i[x + 1][x] = s;
        i[x][x + 1] = -s;
    }
    return i;
}

RationalVector bracket(const CompactAlgebra& a, const RationalVector& x, const RationalVector& y) {
    RationalVector out(a.dim, Rational(0));
    for (int i = 0; i < a.dim; ++i) {
        if (x[i].numerator() == 0) continue;
        for (int j = 0; j < a.dim; ++j) {
            if (y[j].numerator() == 0) continue;
            for (int k = 0; k < a.dim; ++k)
                if (a.c(i, j, k).numerator() != 0) out[k] += x[i] * y[j] * a.c(i, j, k);
        }
    }
    return out;
}

RationalVector bracket_one(const CompactAlgebra& a, const RationalMatrix& i, const RationalVector& x,
                           const RationalVector& y) {
    const RationalVector lhs = bracket(a, mat_apply(i, x), y);
    const RationalVector rhs = bracket(a, x, mat_apply(i, y));
    RationalVector out(a.dim);
    for (int k = 0; k < a.dim; ++k) out[k] = (lhs[k] + rhs[k]) / 2;
    return out;
}

ComplexStructureReport check_complex_structure(const CompactAlgebra& a, const RationalMatrix& i) {
    ComplexStructureReport r{true, true, true};
    const int n = a.dim;
    for (int k = 0; k < n; ++k) {
        const RationalVector ek = unit(n, k);
        RationalVector sq = mat_apply(i, mat_apply(i, ek));
        sq[k] += 1;
        if (!is_zero(sq)) r.square_is_minus_one = false;
    }
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            Rational lhs = 0;
            for (int s = 0; s < n; ++s)
                for (int t = 0; t < n; ++t) lhs += i[s][p] * a.metric[s][t] * i[t][q];
            if (lhs != a.metric[p][q]) r.metric_compatible = false;
        }
    // Nijenhuis tensor of the left-invariant extension.
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) {
            const RationalVector x = unit(n, p), y = unit(n, q);
            const RationalVector ix = mat_apply(i, x), iy = mat_apply(i, y);
            RationalVector nij = minus(bracket(a, ix, iy), bracket(a, x, y));
            nij = minus(nij, mat_apply(i, bracket(a, ix, y)));
            nij = minus(nij, mat_apply(i, bracket(a, x, iy)));
            if (!is_zero(nij)) r.closed = false;
        }
    return r;
}

YSpec parse_y_spec(std::string_view text, const CompactAlgebra& a) {
    YSpec y;
    const int total = a.n_u1 + a.m_su2;
    std::string cleaned;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) cleaned += ch;
    if (cleaned.empty()) throw ParseError("empty Y specification");
    std::size_t start = 0;
    bool torus_seen = false;
    while (start <= cleaned.size()) {
        const std::size_t end = std::min(cleaned.find('x', start), cleaned.size());
        const std::string token = cleaned.substr(start, end - start);
        auto exponent = [&](std::size_t offset) {
            if (token.size() <= offset || token[offset] != '^') throw ParseError("Y factor '" + token + "' needs '^k'");
            const std::string digits = token.substr(offset + 1);
            if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
                throw ParseError("Y factor '" + token + "' has a malformed exponent");
            return std::stoi(digits);
        };
        if (token == "pt") {
        } else if (token == "T") {
            y.circle_factors = total;
            torus_seen = true;
        } else if (token.rfind("T", 0) == 0) {
            y.circle_factors = exponent(1);
            torus_seen = true;
        } else if (token.rfind("Z", 0) == 0) {
            y.y_prime_pairs = exponent(1);
        } else {
            throw ParseError("unknown Y factor '" + token + "'");
        }
        start = end + 1;
    }
    (void)torus_seen;
    if (y.circle_factors > total) throw ParseError("Y uses more circles than the torus has");
    if (2 * y.y_prime_pairs > total - y.circle_factors) throw ParseError("Y' does not fit in the remaining circles");
    return y;
}

std::vector<int> y_tangent_indices(const CompactAlgebra& a, const YSpec& y) {
    const std::vector<int> circles = a.circles();
    const int total = static_cast<int>(circles.size());
    std::vector<int> out;
    for (int k = 0; k < 2 * y.y_prime_pairs; ++k) out.push_back(circles[k]);
    for (int k = total - y.circle_factors; k < total; ++k) out.push_back(circles[k]);
    return out;
}

ConormalBracket conormal_bracket(const CompactAlgebra& a, const RationalMatrix& i,
                                 const std::vector<int>& tangent_indices) {
    const int n = a.dim;
    std::set<int> tangent(tangent_indices.begin(), tangent_indices.end());
    // Metric is diagonal, so the conormal fiber is spanned by the complementary basis vectors.
    std::vector<int> normal;
    for (int k = 0; k < n; ++k)
        if (!tangent.count(k)) normal.push_back(k);
    auto image_index = [&](int k) -> std::pair<int, Rational> {
        for (int r = 0; r < n; ++r)
            if (i[r][k].numerator() != 0) return {r, i[r][k]};
        throw InvalidStructureError("complex structure has a zero column");
    };
    for (int k : tangent_indices)
        if (!tangent.count(image_index(k).first)) throw InvalidStructureError("TY is not invariant under I");

    ConormalBracket out;
    std::vector<std::pair<int, int>> coords;  // (index of b_l, index of I b_l)
    std::vector<Rational> signs;
    std::set<int> covered;
    for (int k : normal) {
        if (covered.count(k)) continue;
        const auto [img, sign] = image_index(k);
        covered.insert(k);
        covered.insert(img);
        coords.emplace_back(k, img);
        signs.push_back(sign);
        out.complex_basis.push_back(unit(n, k));
    }
    const int d = static_cast<int>(coords.size());
    out.bracket = ExactBracket(d);
    out.closed = true;
    out.complex_linear = true;
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            const RationalVector bj = out.complex_basis[j];
            const RationalVector bk = out.complex_basis[k];
            const RationalVector v = bracket_one(a, i, bj, bk);
            for (int t : tangent_indices)
                if (v[t].numerator() != 0) out.closed = false;
            for (int l = 0; l < d; ++l) {
                const auto [re_idx, im_idx] = coords[l];
                out.bracket(j, k, l) = GaussRational{v[re_idx], v[im_idx] * signs[l]};
            }
            if (mat_apply(i, v) != bracket_one(a, i, mat_apply(i, bj), bk)) out.complex_linear = false;
        }
    return out;
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::eligible_case_i: return "eligible_case_i";
        case Verdict::eligible_case_ii: return "eligible_case_ii";
        case Verdict::torus_not_degenerate: return "torus_not_degenerate";
        case Verdict::parity_obstruction: return "parity_obstruction";
        case Verdict::not_covered: return "not_covered";
    }
    return "not_covered";
}

EligibilityReport blowup_eligibility(int n_u1, int m_su2, const YSpec& y, std::string_view extra_roots) {
    EligibilityReport r;
    if (!extra_roots.empty()) {
        const RootDatum rd = root_datum(extra_roots);
        if (!classify_products_of_A1(rd)) {
            r.verdict = Verdict::torus_not_degenerate;
            r.witness = root_sum_witness(rd);
            r.detail = "root datum " + rd.name + " has positive roots summing to a root";
            return r;
        }
        m_su2 += rd.rank;
    }
    if ((n_u1 + m_su2) % 2 != 0) {
        r.verdict = Verdict::parity_obstruction;
        r.detail = "a ⊕ t is odd-dimensional";
        return r;
    }
    const CompactAlgebra a = build_compact_algebra(n_u1, m_su2);
    const RationalMatrix i = invariant_complex_structure(a, product_pairing(a, y.circle_factors));
    const ConormalBracket cb = conormal_bracket(a, i, y_tangent_indices(a, y));
    r.conormal_zero = std::all_of(cb.bracket.c.begin(), cb.bracket.c.end(), [](const GaussRational& g) { return g.is_zero(); });
    r.conormal_degenerate = degeneracy_test(cb.bracket).degenerate;
    r.conormal = cb;
    const bool family_i = m_su2 % 2 == 0 && y.circle_factors == m_su2;
    const bool family_ii = m_su2 % 2 == 1 && y.circle_factors == m_su2 + 1;
    if (r.conormal_zero) {
        r.verdict = m_su2 % 2 == 0 ? Verdict::eligible_case_i : Verdict::eligible_case_ii;
        r.detail = (family_i || family_ii) ? "conormal bracket vanishes; listed family"
                                           : "conormal bracket vanishes outside the listed families";
    } else {
        r.verdict = Verdict::not_covered;
        r.detail = r.conormal_degenerate ? "conormal bracket nonzero but degenerate" : "conormal bracket not degenerate";
    }
    return r;
}

// ---------------------------------------------------------------- floating algebras

FloatAlgebra float_algebra(std::string_view name) {
    FloatAlgebra a;
    a.name = std::string(name);
    std::vector<Mat> raw;
    if (name == "A1") raw = so_basis(3);
    else if (name == "A2") raw = su3_basis();
    else if (name == "B2") raw = so_basis(5);
    else if (name == "G2") raw = g2_basis();
    else throw InvalidStructureError("no matrix model for '" + std::string(name) + "'");
    a.basis = orthonormalize(raw);
    a.dim = static_cast<int>(a.basis.size());
    a.c = BracketTable<double>(a.dim);
    for (int i = 0; i < a.dim; ++i)
        for (int j = 0; j < a.dim; ++j) {
            const Mat br = bracket_matrix(a.basis[i], a.basis[j]);
            for (int k = 0; k < a.dim; ++k) {
                const double v = form(br, a.basis[k]);
                a.c(i, j, k) = std::abs(v) < 1e-14 ? 0.0 : v;
            }
        }
    a.metric = Mat::Identity(a.dim, a.dim);

    // Regular element with fixed irrational weights; its centralizer is a maximal torus.
    Vec generic(a.dim);
    for (int k = 0; k < a.dim; ++k) generic(k) = std::sqrt(2.0 + k) - std::floor(std::sqrt(2.0 + k)) + 0.1 * (k + 1);
    a.torus = linalg::null_space(ad_matrix(a.c, generic));
    Vec weights(a.torus.cols());
    for (Eigen::Index k = 0; k < weights.size(); ++k) weights(k) = 1.0 + std::sqrt(3.0 + 2.0 * k);
    const Mat ad_t0 = ad_matrix(a.c, a.torus * weights);
    Eigen::ComplexEigenSolver<CMat> es(ad_t0.cast<Complex>());
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        if (es.eigenvalues()(k).imag() <= 1e-8) continue;
        const CVec v = es.eigenvectors().col(k).normalized();
        Vec values(a.torus.cols());
        for (Eigen::Index t = 0; t < a.torus.cols(); ++t) {
            const CVec image = ad_matrix(a.c, a.torus.col(t)).cast<Complex>() * v;
            values(t) = (v.adjoint() * image)(0).imag();
        }
        a.root_vectors.push_back(v);
        a.root_values.push_back(values);
    }
    return a;
}

double jacobi_defect(const FloatAlgebra& a) {
    double worst = 0.0;
    const int n = a.dim;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int m = 0; m < n; ++m)
                        s += a.c(j, k, m) * a.c(i, m, l) + a.c(k, i, m) * a.c(j, m, l) + a.c(i, j, m) * a.c(k, m, l);
                    worst = std::max(worst, std::abs(s));
                }
    return worst;
}

double ad_invariance_defect(const FloatAlgebra& a) {
    double worst = 0.0;
    for (int i = 0; i < a.dim; ++i)
        for (int j = 0; j < a.dim; ++j)
            for (int k = 0; k < a.dim; ++k) {
                double s = 0.0;
                for (int m = 0; m < a.dim; ++m) s += a.c(i, j, m) * a.metric(m, k) + a.metric(j, m) * a.c(i, k, m);
                worst = std::max(worst, std::abs(s));
            }
    return worst;
}

ComplexBracket torus_conormal_bracket(const FloatAlgebra& a, std::optional<int> flip) {
    const std::vector<CVec> chosen = chosen_roots(a, flip);
    const CMat i_root = root_complex_structure(chosen);
    const int d = static_cast<int>(chosen.size());
    // Real basis b_l = v_l + v̄_l; a real vector x has complex coordinate z_l = coefficient of v_l.
    CMat all(a.dim, 2 * d);
    for (int l = 0; l < d; ++l) {
        all.col(l) = chosen[l];
        all.col(d + l) = chosen[l].conjugate();
    }
    const CMat coords = all.completeOrthogonalDecomposition().pseudoInverse();
    ComplexBracket out(d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            const CVec bj = chosen[j] + chosen[j].conjugate();
            const CVec bk = chosen[k] + chosen[k].conjugate();
            const CVec w = 0.5 * (complex_bracket(a.c, i_root * bj, bk) + complex_bracket(a.c, bj, i_root * bk));
            const CVec z = coords * w;
            for (int l = 0; l < d; ++l) out(j, k, l) = std::abs(z(l)) < 1e-12 ? Complex(0.0) : z(l);
        }
    return out;
}

bool positive_closure(const FloatAlgebra& a, std::optional<int> flip) {
    const std::vector<CVec> chosen = chosen_roots(a, flip);
    const int d = static_cast<int>(chosen.size());
    CMat holo(a.dim, d + a.torus.cols());
    for (int l = 0; l < d; ++l) holo.col(l) = chosen[l];
    holo.rightCols(a.torus.cols()) = a.torus.cast<Complex>();
    const CMat proj = holo * holo.completeOrthogonalDecomposition().pseudoInverse();
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
            const CVec w = complex_bracket(a.c, chosen[j], chosen[k]);
            if ((w - proj * w).norm() > 1e-9) return false;
        }
    return true;
}

}  // namespace gkflow::lie
