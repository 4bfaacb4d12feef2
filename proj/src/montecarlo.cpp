#include "retrobell/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "retrobell/errors.hpp"

namespace retrobell {

namespace {

std::uint64_t chunk_count(std::uint64_t n) { return (n + kChunkSize - 1) / kChunkSize; }

AnticoincidenceCounts run_chunk(const UnitVec3& a, const UnitVec3& b, double a_b,
                                const ModelParams& p, SfpPolicy policy, std::uint64_t n,
                                std::uint64_t seed, std::uint64_t chunk) {
    RandomStream rng = make_stream(seed, chunk);
    const std::uint64_t begin = chunk * kChunkSize;
    const std::uint64_t count = std::min(kChunkSize, n - begin);
    AnticoincidenceCounts c;
    for (std::uint64_t i = 0; i < count; ++i) {
        const UnitVec3 s0 = sample_uniform(rng);
        const ConsistentSet set = consistent_outcomes(dot(a, s0), dot(b, s0), a_b, p);
        ++c.samples;
        if (set.empty()) {
            ++c.empty;
            continue;
        }
        if (set.has_equal() && set.has_unequal()) ++c.ambiguous;
        if (!resolve_sfp(set, policy, rng).equal()) ++c.anticoincidences;
    }
    return c;
}

void require_samples(std::uint64_t n) {
    if (n == 0) throw DomainError("Monte Carlo needs n >= 1");
}

McEstimate checked_estimate(const AnticoincidenceCounts& c) {
    if (c.empty > 0) {
        std::ostringstream msg;
        msg << c.empty << " of " << c.samples << " samples had no consistent outcome pair";
        throw EmptySet(msg.str());
    }
    return estimate_from_counts(c);
}

}  // namespace

McEstimate estimate_from_counts(const AnticoincidenceCounts& c) {
    McEstimate e;
    e.counts = c;
    const std::uint64_t resolved = c.samples - c.empty;
    if (resolved == 0) return e;
    const double n = static_cast<double>(resolved);
    e.probability = static_cast<double>(c.anticoincidences) / n;
    e.std_error = std::sqrt(e.probability * (1.0 - e.probability) / n);
    return e;
}

AnticoincidenceCounts anticoincidence_counts(const UnitVec3& a, const UnitVec3& b,
                                             const ModelParams& p, SfpPolicy policy,
                                             std::uint64_t n, std::uint64_t seed) {
    require_samples(n);
    const double a_b = dot(a, b);
    const auto chunks = static_cast<std::int64_t>(chunk_count(n));
    std::uint64_t samples = 0, anti = 0, ambiguous = 0, empty = 0;
#pragma omp parallel for schedule(static) reduction(+ : samples, anti, ambiguous, empty)
    for (std::int64_t k = 0; k < chunks; ++k) {
        const auto c = run_chunk(a, b, a_b, p, policy, n, seed, static_cast<std::uint64_t>(k));
        samples += c.samples;
        anti += c.anticoincidences;
        ambiguous += c.ambiguous;
        empty += c.empty;
    }
    return {samples, anti, ambiguous, empty};
}

AnticoincidenceCounts anticoincidence_counts_serial(const UnitVec3& a, const UnitVec3& b,
                                                    const ModelParams& p, SfpPolicy policy,
                                                    std::uint64_t n, std::uint64_t seed) {
    require_samples(n);
    const double a_b = dot(a, b);
    AnticoincidenceCounts total;
    for (std::uint64_t k = 0; k < chunk_count(n); ++k) {
        total += run_chunk(a, b, a_b, p, policy, n, seed, k);
    }
    return total;
}

McEstimate monte_carlo_anticoincidence(const UnitVec3& a, const UnitVec3& b, const ModelParams& p,
                                       SfpPolicy policy, std::uint64_t n, std::uint64_t seed) {
    return checked_estimate(anticoincidence_counts(a, b, p, policy, n, seed));
}

McEstimate monte_carlo_anticoincidence_serial(const UnitVec3& a, const UnitVec3& b,
                                              const ModelParams& p, SfpPolicy policy,
                                              std::uint64_t n, std::uint64_t seed) {
    return checked_estimate(anticoincidence_counts_serial(a, b, p, policy, n, seed));
}

ScreeningReport screening_analysis(const UnitVec3& a, const std::vector<UnitVec3>& b_variants,
                                   const ModelParams& p, SfpPolicy policy, const SpinBin& bin,
                                   std::uint64_t n, std::uint64_t seed) {
    if (!(bin.radius > 0.0)) throw EmptyBin("spin bin must have positive angular radius");
    if (n == 0) throw DomainError("screening needs n >= 1");

    ScreeningReport report;
    report.entries.resize(b_variants.size());
    const auto nb = static_cast<std::int64_t>(b_variants.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < nb; ++i) {
        const UnitVec3& b = b_variants[i];
        RandomStream rng = make_stream(seed, static_cast<std::uint64_t>(i));
        ScreeningEntry e;
        e.b = b;
        const double a_b = dot(a, b);
        for (std::uint64_t k = 0; k < n; ++k) {
            const UnitVec3 s0 = sample_cap(bin.center, bin.radius, rng);
            const ConsistentSet set = consistent_outcomes(dot(a, s0), dot(b, s0), a_b, p);
            if (set.empty()) continue;
            ++e.samples;
            if (resolve_sfp(set, policy, rng).a == Outcome::Up) ++e.a_up;
        }
        if (e.samples > 0) {
            e.p_a_up = static_cast<double>(e.a_up) / e.samples;
            e.std_error = std::sqrt(e.p_a_up * (1.0 - e.p_a_up) / e.samples);
        }
        report.entries[i] = e;
    }
    for (const auto& e : report.entries) {
        if (e.samples == 0) throw EmptyBin("no resolvable samples in bin");
    }

    const std::size_t m = report.entries.size();
    report.z_scores.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const auto& ei = report.entries[i];
            const auto& ej = report.entries[j];
            const double diff = ei.p_a_up - ej.p_a_up;
            const double se = std::hypot(ei.std_error, ej.std_error);
            if (se > 0.0) {
                report.z_scores[i][j] = diff / se;
            } else if (diff != 0.0) {
                report.z_scores[i][j] = std::copysign(std::numeric_limits<double>::infinity(), diff);
            }
        }
    }
    return report;
}

}  // namespace retrobell
