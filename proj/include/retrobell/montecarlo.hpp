#pragma once

#include <cstdint>
#include <vector>

#include "retrobell/outcome.hpp"
#include "retrobell/sphere.hpp"

namespace retrobell {

// Samples are processed in fixed-size chunks; chunk k draws from
// make_stream(seed, k). The parallel and serial kernels therefore visit
// identical samples and return bit-identical counts for any thread count.
inline constexpr std::uint64_t kChunkSize = std::uint64_t{1} << 16;

struct AnticoincidenceCounts {
    std::uint64_t samples = 0;
    std::uint64_t anticoincidences = 0;
    std::uint64_t ambiguous = 0;  // consistent set held both classes
    std::uint64_t empty = 0;      // no consistent pair (reported, never resolved)

    AnticoincidenceCounts& operator+=(const AnticoincidenceCounts& o) {
        samples += o.samples;
        anticoincidences += o.anticoincidences;
        ambiguous += o.ambiguous;
        empty += o.empty;
        return *this;
    }
    bool operator==(const AnticoincidenceCounts&) const = default;
};

struct McEstimate {
    double probability = 0.0;
    double std_error = 0.0;  // binomial sqrt(p(1-p)/n)
    AnticoincidenceCounts counts;

    double ambiguity_frequency() const {
        return counts.samples ? static_cast<double>(counts.ambiguous) / counts.samples : 0.0;
    }
};

McEstimate estimate_from_counts(const AnticoincidenceCounts& c);

// Draws S0 uniformly n times, resolves each consistent set with `policy` and
// returns the A != B frequency. Throws EmptySet (with counts) if any sample had
// no consistent pair. OpenMP-parallel over chunks.
McEstimate monte_carlo_anticoincidence(const UnitVec3& a, const UnitVec3& b, const ModelParams& p,
                                       SfpPolicy policy, std::uint64_t n, std::uint64_t seed);

// Reference implementation: same chunks, one thread. Kept for testing and benchmarks.
McEstimate monte_carlo_anticoincidence_serial(const UnitVec3& a, const UnitVec3& b,
                                              const ModelParams& p, SfpPolicy policy,
                                              std::uint64_t n, std::uint64_t seed);

// Raw counts without the EmptySet check.
AnticoincidenceCounts anticoincidence_counts(const UnitVec3& a, const UnitVec3& b,
                                             const ModelParams& p, SfpPolicy policy,
                                             std::uint64_t n, std::uint64_t seed);
AnticoincidenceCounts anticoincidence_counts_serial(const UnitVec3& a, const UnitVec3& b,
                                                    const ModelParams& p, SfpPolicy policy,
                                                    std::uint64_t n, std::uint64_t seed);

struct ScreeningEntry {
    UnitVec3 b;
    std::uint64_t samples = 0;
    std::uint64_t a_up = 0;
    double p_a_up = 0.0;
    double std_error = 0.0;
};

struct ScreeningReport {
    std::vector<ScreeningEntry> entries;
    // z[i][j] = (p_i - p_j) / sqrt(se_i^2 + se_j^2); 0 when both errors vanish
    // and the estimates agree, +-inf when they vanish but disagree.
    std::vector<std::vector<double>> z_scores;
};

struct SpinBin {
    UnitVec3 center;
    double radius = 0.01;  // angular radius of the cap, radians
};

// P(A = +1 | a, b, S0 in bin) for every b variant; S0 is sampled directly in the
// cap. Variant i uses make_stream(seed, i). Throws EmptyBin for a non-positive
// radius and DomainError for n == 0.
ScreeningReport screening_analysis(const UnitVec3& a, const std::vector<UnitVec3>& b_variants,
                                   const ModelParams& p, SfpPolicy policy, const SpinBin& bin,
                                   std::uint64_t n, std::uint64_t seed);

}  // namespace retrobell
