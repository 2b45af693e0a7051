#include "gkflow/suites.hpp"

#include "gkflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace gkflow::suites {

namespace {

constexpr Complex kI{0.0, 1.0};

class CheckAccumulator {
public:
    CheckAccumulator(std::string name, double tolerance) { check_.name = std::move(name), check_.tolerance = tolerance; }

    /// Records a residual that must not exceed the tolerance.
    void residual(double value, const std::string& where = {}) {
        ++check_.samples;
        if (!std::isfinite(value)) value = std::numeric_limits<double>::infinity();
        check_.residual = std::max(check_.residual, value);
        if (value > check_.tolerance) fail(where);
    }

    /// Records a boolean outcome; the residual column tracks the number of failures.
    void outcome(bool ok, const std::string& where = {}) {
        ++check_.samples;
        if (!ok) {
            check_.residual += 1.0;
            fail(where);
        }
    }

    [[nodiscard]] Check take() && { return std::move(check_); }

private:
    void fail(const std::string& where) {
        if (check_.failures++ == 0 && !where.empty()) check_.detail = "first failure: " + where;
    }

    Check check_;
};

Mat random_matrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = normal(rng);
    return m;
}

Mat random_frame(int dim, std::mt19937_64& rng) {
    return Mat::Identity(dim, dim) + random_matrix(dim, dim, rng, 0.4 / std::sqrt(static_cast<double>(dim)));
}

Mat random_antisymmetric(int dim, std::mt19937_64& rng, double scale) {
    const Mat m = random_matrix(dim, dim, rng, scale);
    return m - m.transpose();
}

std::string at(int n, int sample) {
    std::ostringstream out;
    out << "n=" << n << " sample=" << sample;
    return out.str();
}

/// L = span{∂x₁ + i∂y₁, dx₁ + i dy₁, ∂x_k, ∂y_k (k ≥ 2)}: maximal isotropic with L ∩ L̄ of dimension 2n − 2.
gvs::DiracSubspace mixed_real_subspace(int n) {
    const int dim = 2 * n;
    CMat cols = CMat::Zero(2 * dim, dim);
    cols(0, 0) = 1.0;
    cols(1, 0) = kI;
    cols(dim, 1) = 1.0;
    cols(dim + 1, 1) = kI;
    for (int k = 2; k < dim; ++k) cols(k, k) = 1.0;
    return gvs::DiracSubspace(cols);
}

gk::BiHermitianPoint opposite_block(int n) {
    gk::BiHermitianPoint p = gk::kahler_point(n);
    p.i_minus = -p.i_plus;
    return p;
}

}  // namespace

bool SuiteReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

const Check* SuiteReport::find(const std::string& name) const {
    const auto it = std::find_if(checks.begin(), checks.end(), [&](const Check& c) { return c.name == name; });
    return it == checks.end() ? nullptr : &*it;
}

Mat random_complex_structure(int n, std::mt19937_64& rng) {
    const Mat a = random_frame(2 * n, rng);
    return a * linalg::standard_complex_structure(n) * a.inverse();
}

gvs::GeneralizedEndomorphism random_gcs(int n, int kind, std::mt19937_64& rng) {
    const int dim = 2 * n;
    switch (kind % kGcsKinds) {
        case 0: return gvs::gcs_from_complex(random_complex_structure(n, rng));
        case 1: {
            const Mat a = random_frame(dim, rng);
            return gvs::gcs_from_symplectic(a.transpose() * linalg::standard_complex_structure(n) * a);
        }
        case 2: {
            const Mat a = random_frame(dim, rng);
            const Mat omega = a.transpose() * linalg::standard_complex_structure(n) * a;
            return gvs::b_transform(gvs::gcs_from_symplectic(omega), random_antisymmetric(dim, rng, 0.5));
        }
        case 3: {
            if (n < 2) return gvs::b_transform(gvs::gcs_from_complex(random_complex_structure(n, rng)),
                                               random_antisymmetric(dim, rng, 0.5));
            std::normal_distribution<double> normal;
            const Mat a = random_frame(dim, rng);
            const Mat i = a * linalg::standard_complex_structure(n) * a.inverse();
            const CMat sigma0 = gvs::holomorphic_bivector(n, 0, 1, Complex(normal(rng), normal(rng)));
            const CMat sigma = a.cast<Complex>() * sigma0 * a.transpose().cast<Complex>();
            return gvs::gcs_from_poisson(i, sigma);
        }
        default: {
            std::uniform_int_distribution<std::uint64_t> seeds;
            const gk::GKPair pair = gk::assemble_gk(gk::random_bihermitian(n, seeds(rng)));
            return (seeds(rng) & 1U) ? pair.j1 : pair.j2;
        }
    }
}

gk::BiHermitianPoint kernel_block_point(int equal, int opposite, int generic, std::uint64_t seed) {
    std::optional<gk::BiHermitianPoint> acc;
    auto append = [&](const gk::BiHermitianPoint& p) { acc = acc ? gk::direct_sum(*acc, p) : p; };
    if (equal > 0) append(gk::kahler_point(equal));
    if (opposite > 0) append(opposite_block(opposite));
    // One complex dimension always has I+ = ±I-, so a generic block needs two.
    if (generic == 1) throw DimensionError("generic kernel block needs dimension at least 2");
    if (generic > 0) {
        // Redraw until the block contributes no kernel of its own.
        for (std::uint64_t s = seed;; ++s) {
            gk::BiHermitianPoint g = gk::random_bihermitian(generic, s);
            if (gk::kernel_split(g).commutator == 0) {
                append(g);
                break;
            }
        }
    }
    if (!acc) throw DimensionError("kernel block point needs at least one block");
    return *acc;
}

SuiteReport algebra_suite(const AlgebraOptions& options) {
    if (options.n_max < 1 || options.n_max > 4) throw DimensionError("algebra suite supports n in 1..4");
    std::mt19937_64 rng(options.seed);
    const double tol = options.tol;
    CheckAccumulator complex_gcs("gcs_from_complex", tol), symplectic_gcs("gcs_from_symplectic", tol),
        poisson_gcs("gcs_from_poisson", tol), b_field("b_transform_preserves", tol),
        isotropic("eigenbundle_maximal_isotropic", tol), roundtrip("dirac_roundtrip", tol),
        annihilator("spinor_annihilator", tol), chevalley("chevalley_iff_transverse", 0.0),
        baer_unit("baer_tangent_unit", tol), baer_transpose("baer_transpose_type0", tol),
        baer_conjugate("baer_conjugate_poisson", tol);

    for (int n = 1; n <= options.n_max; ++n) {
        const int dim = 2 * n;
        const int samples = n == 4 ? std::max(1, options.samples / 10) : options.samples;
        for (int s = 0; s < samples; ++s) {
            const std::string where = at(n, s);
            Mat i = random_complex_structure(n, rng);
            auto jc = gvs::gcs_from_complex(i);
            if (options.fault == Fault::sign_flip)
                jc = gvs::GeneralizedEndomorphism::from_blocks(jc.tangent_block(), jc.poisson_block(), jc.form_block(),
                                                               -jc.dual_block());
            const auto rc = gvs::validate_gcs(jc, tol);
            complex_gcs.residual(std::max(rc.square_residual, rc.orthogonality_defect), where);

            const auto js = random_gcs(n, 1, rng);
            const auto rs = gvs::validate_gcs(js, tol);
            symplectic_gcs.residual(std::max(rs.square_residual, rs.orthogonality_defect), where);

            const auto jp = random_gcs(n, 3, rng);
            const auto rp = gvs::validate_gcs(jp, tol);
            poisson_gcs.residual(std::max(rp.square_residual, rp.orthogonality_defect), where);

            const auto jb = gvs::b_transform(jc, random_antisymmetric(dim, rng, 0.5));
            const auto rb = gvs::validate_gcs(jb, tol);
            b_field.residual(std::max(rb.square_residual, rb.orthogonality_defect), where);

            const auto j = random_gcs(n, s, rng);
            const gvs::DiracSubspace l = gvs::i_eigenbundle(j);
            isotropic.residual(l.isotropy_defect() + (l.is_maximal() ? 0.0 : 1.0) + l.real_intersection_dim(), where);
            roundtrip.residual(linalg::max_abs(gvs::dirac_to_gcs(l).matrix() - j.matrix()), where);

            const gvs::Spinor rho = gvs::pure_spinor_of(l);
            annihilator.residual(gvs::subspace_distance(gvs::annihilator(rho).subspace, l), where);

            // Relative size of (ρ, ρ̄) against ‖ρ‖², for L transverse to L̄ and for two real-index controls.
            auto relative_pairing = [](const gvs::Spinor& r) {
                const double scale = std::max(r.max_abs() * r.max_abs(), 1e-300);
                return std::abs(gvs::chevalley_pairing(r, r.conjugated())) / scale;
            };
            chevalley.outcome(relative_pairing(rho) > 1e-8, where + " (transverse)");
            if (s == 0) {
                chevalley.outcome(relative_pairing(gvs::pure_spinor_of(gvs::tangent_space(dim))) <= 1e-12,
                                  where + " (tangent)");
                if (n >= 2)
                    chevalley.outcome(relative_pairing(gvs::pure_spinor_of(mixed_real_subspace(n))) <= 1e-12,
                                      where + " (mixed)");
            }

            baer_unit.residual(gvs::subspace_distance(gvs::baer_sum(l, gvs::tangent_space(dim)).sum, l), where);
            if (gvs::type_of(j) == 0)
                baer_transpose.residual(
                    gvs::subspace_distance(gvs::baer_sum(l, l.transpose()).sum, gvs::tangent_space(dim)), where);
            const CMat pi = gvs::poisson_of(j).cast<Complex>();
            const auto expected = gvs::bivector_graph(-0.5 * kI * pi);
            baer_conjugate.residual(
                gvs::subspace_distance(gvs::baer_sum(l, l.conjugate().transpose()).sum, expected), where);
        }
    }

    SuiteReport report{"algebra", {}};
    for (auto* acc : {&complex_gcs, &symplectic_gcs, &poisson_gcs, &b_field, &isotropic, &roundtrip, &annihilator,
                      &chevalley, &baer_unit, &baer_transpose, &baer_conjugate})
        report.checks.push_back(std::move(*acc).take());
    return report;
}

SuiteReport dictionary_suite(const DictionaryOptions& options) {
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<std::uint64_t> seeds;
    CheckAccumulator roundtrip("roundtrip", options.roundtrip_tol), pair_valid("gk_pair_valid", 0.0),
        metric("generalized_metric_positive", 0.0), pi1("poisson_j1", options.poisson_tol),
        pi2("poisson_j2", options.poisson_tol), sigma("sigma_projector_form", options.poisson_tol),
        holo("sigma_holomorphic", options.poisson_tol), types("type_sum_bound", 0.0),
        parity("type_parity", 0.0), kernels("kernel_split", 0.0);

    for (int n : options.dims) {
        if (n < 1 || n > 4) throw DimensionError("dictionary suite supports n in 1..4");
        for (int s = 0; s < options.samples; ++s) {
            const std::string where = at(n, s);
            const gk::BiHermitianPoint p = gk::random_bihermitian(n, seeds(rng));
            const gk::GKPair q = gk::assemble_gk(p);
            roundtrip.residual(gk::point_distance(gk::disassemble_gk(q), p), where);
            const gk::PairReport pr = gk::validate_pair(q);
            pair_valid.outcome(pr.pass, where);
            metric.outcome(pr.min_metric_eigenvalue > 0.0, where);

            // Inverse of ω± as maps X ↦ ω±(X,·), compared with the Poisson blocks of 𝒥₁, 𝒥₂.
            const Mat wp_inv = p.omega_plus().inverse();
            const Mat wm_inv = p.omega_minus().inverse();
            const double scale = std::max(1.0, linalg::max_abs(wp_inv) + linalg::max_abs(wm_inv));
            pi1.residual(linalg::max_abs(gvs::poisson_of(q.j1) - (-0.5) * (wp_inv - wm_inv)) / scale, where);
            pi2.residual(linalg::max_abs(gvs::poisson_of(q.j2) - (-0.5) * (wp_inv + wm_inv)) / scale, where);

            const gk::PoissonTriple triple = gk::derived_poisson(p);
            sigma.residual(linalg::max_abs(triple.sigma_plus - gk::sigma_plus_from_projectors(p)), where);
            holo.residual(std::max(gk::holomorphic_type_defect(triple.sigma_plus, p.i_plus),
                                   gk::holomorphic_type_defect(triple.sigma_minus, p.i_minus)),
                          where);

            const gk::TypeFacts facts = gk::type_facts(q);
            types.outcome(facts.sum_bound, where);
            parity.outcome(facts.parity_j1 && facts.parity_j2, where);
        }
    }

    std::uniform_int_distribution<int> block(0, 2);
    for (int s = 0; s < options.kernel_samples; ++s) {
        int equal = block(rng), opposite = block(rng), generic = block(rng) == 0 ? 0 : 2;
        if (equal + opposite + generic == 0) equal = 1;
        const gk::BiHermitianPoint p = kernel_block_point(equal, opposite, generic, seeds(rng));
        const gk::KernelSplit split = gk::kernel_split(p);
        const bool prescribed =
            split.minus_diff == 2 * equal && split.plus_sum == 2 * opposite && split.commutator == 2 * (equal + opposite);
        std::ostringstream where;
        where << "blocks=(" << equal << "," << opposite << "," << generic << ")";
        kernels.outcome(prescribed && split.identity_holds, where.str());
    }

    SuiteReport report{"dictionary", {}};
    for (auto* acc : {&roundtrip, &pair_valid, &metric, &pi1, &pi2, &sigma, &holo, &types, &parity, &kernels})
        report.checks.push_back(std::move(*acc).take());

    if (options.degenerate) {
        const int n = 2;
        gk::BiHermitianPoint d = gk::kahler_point(n);
        d.g = Mat::Zero(2 * n, 2 * n);
        d.degenerate = true;
        CheckAccumulator refuse_assemble("degenerate_refuses_assembly", 0.0),
            refuse_missing_q("degenerate_requires_q", 0.0), refuse_projector("degenerate_refuses_projector_form", 0.0),
            accepts_q("degenerate_accepts_external_q", options.poisson_tol);
        auto throws_degenerate = [](auto&& fn) {
            try {
                fn();
            } catch (const DegenerateMetricError&) {
                return true;
            }
            return false;
        };
        refuse_assemble.outcome(throws_degenerate([&] { (void)gk::assemble_gk(d); }));
        refuse_missing_q.outcome(throws_degenerate([&] { (void)gk::derived_poisson(d); }));
        refuse_projector.outcome(throws_degenerate([&] { (void)gk::sigma_plus_from_projectors(d); }));
        d.external_q = gvs::holomorphic_bivector(n, 0, 1, Complex(1.0, 0.0)).real();
        const gk::PoissonTriple triple = gk::derived_poisson(d);
        accepts_q.residual(gk::holomorphic_type_defect(triple.sigma_plus, d.i_plus));
        for (auto* acc : {&refuse_assemble, &refuse_missing_q, &refuse_projector, &accepts_q})
            report.checks.push_back(std::move(*acc).take());
    }
    return report;
}

}  // namespace gkflow::suites
