#pragma once

#include "gkflow/gk_dictionary.hpp"
#include "gkflow/gvs_core.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace gkflow::suites {

/// One invariant evaluated over many samples; `residual` is the worst value seen.
struct Check {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    int samples = 0;
    int failures = 0;
    std::string detail;

    [[nodiscard]] bool pass() const { return failures == 0 && samples > 0; }
};

struct SuiteReport {
    std::string suite;
    std::vector<Check> checks;

    [[nodiscard]] bool pass() const;
    [[nodiscard]] const Check* find(const std::string& name) const;
};

enum class Fault { none, sign_flip };

struct AlgebraOptions {
    int n_max = 3;
    int samples = 100;
    std::uint64_t seed = 1;
    double tol = 1e-8;
    Fault fault = Fault::none;
};

/// Structural invariants of generalized complex structures, Dirac subspaces, pure spinors and Baer sums
/// for complex dimensions 1..n_max.
[[nodiscard]] SuiteReport algebra_suite(const AlgebraOptions& options);

struct DictionaryOptions {
    std::vector<int> dims{1, 2, 3};
    int samples = 200;
    std::uint64_t seed = 1;
    double roundtrip_tol = 1e-10;
    double poisson_tol = 1e-9;
    int kernel_samples = 100;
    /// Adds the refusal checks for degenerate input.
    bool degenerate = false;
};

/// Round trip, generalized-metric positivity, Poisson formulas, type bounds and kernel splitting.
[[nodiscard]] SuiteReport dictionary_suite(const DictionaryOptions& options);

/// Random complex structure A I₀ A⁻¹ on ℝ²ⁿ.
[[nodiscard]] Mat random_complex_structure(int n, std::mt19937_64& rng);
/// Random generalized complex structure, cycling through complex, symplectic, B-transformed,
/// holomorphic Poisson and generalized Kähler kinds by `kind`.
[[nodiscard]] gvs::GeneralizedEndomorphism random_gcs(int n, int kind, std::mt19937_64& rng);
inline constexpr int kGcsKinds = 5;

/// Direct sum of blocks with I₋ = I₊, I₋ = −I₊ and generic pairs of the given complex sizes.
[[nodiscard]] gk::BiHermitianPoint kernel_block_point(int equal, int opposite, int generic, std::uint64_t seed);

}  // namespace gkflow::suites
