#include <cmath>
#include <set>

#include "doctest.h"
#include "retrobell/errors.hpp"
#include "retrobell/outcome.hpp"
#include "retrobell/probability.hpp"

using namespace retrobell;

namespace {

const OutcomePair kPP{Outcome::Up, Outcome::Up};
const OutcomePair kPM{Outcome::Up, Outcome::Down};
const OutcomePair kMP{Outcome::Down, Outcome::Up};
const OutcomePair kMM{Outcome::Down, Outcome::Down};

int sgn(double x) { return x >= 0 ? 1 : -1; }

// Independent enumeration written straight from the sign equations.
std::set<std::pair<int, int>> enumerate(double as0, double bs0, double ab, double al, double be,
                                        double ga) {
    std::set<std::pair<int, int>> out;
    for (int A : {1, -1}) {
        for (int B : {1, -1}) {
            const int a_new = sgn(al * as0 - B * be * ab + A * ga);
            const int b_new = sgn(-al * bs0 - A * be * ab + B * ga);
            if (a_new == A && b_new == B) out.insert({A, B});
        }
    }
    return out;
}

std::set<std::pair<int, int>> as_set(const ConsistentSet& s) {
    std::set<std::pair<int, int>> out;
    for (const auto& p : s.members()) out.insert({value(p.a), value(p.b)});
    return out;
}

// Random coplanar or general settings with <a,b> in the regime for p.
struct Draw {
    UnitVec3 s0, a, b;
};

Draw regime_draw(RandomStream& rng, const ModelParams& p) {
    for (;;) {
        Draw d{sample_uniform(rng), sample_uniform(rng), sample_uniform(rng)};
        if (in_case_regime(dot(d.a, d.b), p)) return d;
    }
}

}  // namespace

TEST_CASE("ModelParams construction") {
    const auto p = ModelParams::checked(0.7, 0.2, 0.1);
    CHECK(p.alpha() == 0.7);
    CHECK_THROWS_AS(ModelParams::checked(0.5, 0.3, 0.3), OutOfRange);    // sum
    CHECK_THROWS_AS(ModelParams::checked(0.25, 0.5, 0.25), OutOfRange);  // ordering
    CHECK_THROWS_AS(ModelParams::checked(1.0, 0.0, 0.0), OutOfRange);    // positivity
    CHECK_NOTHROW(ModelParams::unchecked(1.0, 0.0, 0.0));
    CHECK_THROWS_AS(ModelParams::unchecked(0.0, 0.5, 0.5), OutOfRange);
    const auto q = ModelParams::from_beta_gamma(0.2, 0.3);
    CHECK(q.alpha() == doctest::Approx(0.5));
}

TEST_CASE("final_spin examples") {
    const auto s0 = UnitVec3::normalize(0.3, -0.5, 0.8);
    const auto a = UnitVec3::in_plane(0);
    const auto b = UnitVec3::in_plane(120);
    const double eps = 1e-9;
    const auto local = ModelParams::unchecked(1 - 2 * eps, eps, eps);
    const auto sa = final_spin(s0, a, b, kPM, local, Side::A);
    CHECK(norm(sa.vec() - s0.vec()) < 1e-6);
    const auto sb = final_spin(s0, a, b, kPM, local, Side::B);
    CHECK(norm(sb.vec() + s0.vec()) < 1e-6);

    const auto z = UnitVec3::normalize(0, 0, 1);
    const auto aligned = final_spin(z, z, -z, kPM, ModelParams::checked(0.7, 0.2, 0.1), Side::A);
    CHECK(norm(aligned.vec() - z.vec()) < 1e-15);

    // Vanishing combination.
    CHECK_THROWS_AS(final_spin(z, -z, z, kPP, ModelParams::unchecked(0.5, 0.5, 0.0), Side::A),
                    DegenerateCombination);
}

TEST_CASE("final_spin lies in the spherical cone of its three vertices") {
    auto rng = make_stream(17);
    const auto p = nu_params(0.3);
    for (int i = 0; i < 2000; ++i) {
        const auto s0 = sample_uniform(rng);
        const auto a = sample_uniform(rng);
        const auto b = sample_uniform(rng);
        for (const auto& o : kAllOutcomePairs) {
            const Vec3 v1 = s0;
            const Vec3 v2 = -value(o.b) * b.vec();
            const Vec3 v3 = value(o.a) * a.vec();
            const double det = dot(v1, cross(v2, v3));
            if (std::abs(det) < 1e-3) continue;
            const auto s = final_spin(s0, a, b, o, p, Side::A);
            // Barycentric coordinates by Cramer's rule must be non-negative.
            const double c1 = dot(s.vec(), cross(v2, v3)) / det;
            const double c2 = dot(v1, cross(s.vec(), v3)) / det;
            const double c3 = dot(v1, cross(v2, s.vec())) / det;
            CHECK(c1 > -1e-12);
            CHECK(c2 > -1e-12);
            CHECK(c3 > -1e-12);
        }
    }
}

TEST_CASE("consistent_outcomes examples") {
    const auto p = ModelParams::checked(0.7, 0.2, 0.1);
    const auto a = UnitVec3::in_plane(0);
    const auto s0 = UnitVec3::normalize(0.5, 0.3, 0.6);
    // Equal settings: only anti-coincidence.
    const auto same = consistent_outcomes(s0, a, a, p);
    CHECK(same.size() == 1);
    CHECK(same.contains(kPM));

    // Far above and far below the thresholds: only (+1,+1).
    const auto b = UnitVec3::in_plane(120);
    const auto s1 = UnitVec3::normalize(std::cos(-0.9), std::sin(-0.9), 0.0);  // <a,S0> ~ 0.62, <b,S0> ~ -0.97
    REQUIRE(dot(a, s1) > 0.5);
    REQUIRE(dot(b, s1) < -0.5);
    const auto c1 = consistent_outcomes(s1, a, b, p);
    CHECK(c1.size() == 1);
    CHECK(c1.contains(kPP));

    // Both scalar products inside the SFP window at nu = 0.3.
    const auto q = nu_params(0.3);
    const double lo = (q.beta() * 0.5 - q.gamma()) / q.alpha();
    const double hi = (q.beta() * 0.5 + q.gamma()) / q.alpha();
    const double x = 0.5 * (lo + hi);
    const auto both = consistent_outcomes(x, x, -0.5, q);
    CHECK(both.has_equal());
    CHECK(both.has_unequal());
}

TEST_CASE("enumeration matches an independent transcription") {
    auto rng = make_stream(21);
    for (int i = 0; i < 100000; ++i) {
        const double as0 = 2 * uniform01(rng) - 1;
        const double bs0 = 2 * uniform01(rng) - 1;
        const double ab = 2 * uniform01(rng) - 1;
        const double g = 0.2 * uniform01(rng);
        const double be = g + (0.5 - g) * uniform01(rng);
        const auto p = ModelParams::unchecked(1 - be - g, be, g);
        CHECK(as_set(consistent_outcomes(as0, bs0, ab, p)) ==
              enumerate(as0, bs0, ab, p.alpha(), be, g));
    }
}

TEST_CASE("classify_case examples") {
    const auto p = nu_params(0.3);
    const double ab = -0.5;
    CHECK(classify_case(0.4, -0.2, ab, p) == CaseLabel::OppositeSigns_ForcedEqual);
    CHECK(classify_case(-0.4, 0.2, ab, p) == CaseLabel::OppositeSigns_ForcedEqual);
    const double hi = (p.beta() * 0.5 + p.gamma()) / p.alpha();
    const double lo = (p.beta() * 0.5 - p.gamma()) / p.alpha();
    CHECK(classify_case(hi + 0.01, hi + 0.2, ab, p) == CaseLabel::SameSigns_OnlyUnequal);
    CHECK(classify_case(lo - 0.01, 0.5, ab, p) == CaseLabel::SameSigns_OnlyEqual);
    CHECK(classify_case(0.5 * (lo + hi), 0.5 * (lo + hi), ab, p) == CaseLabel::SameSigns_BothPossible);
    // Negative-side mirror.
    CHECK(classify_case(-(hi + 0.01), -(hi + 0.2), ab, p) == CaseLabel::SameSigns_OnlyUnequal);

    CHECK_THROWS_AS(classify_case(0.1, 0.1, 0.5, p), RegimeViolation);
    CHECK_THROWS_AS(classify_case(0.1, 0.1, -0.1, p), RegimeViolation);  // beta|ab| < gamma
    CHECK_NOTHROW(classify_case(0.1, 0.1, 0.5, p, true));
}

TEST_CASE("possibility flags equal enumeration on 1e5 regime-valid draws") {
    auto rng = make_stream(31);
    int mismatches = 0;
    int empty = 0;
    for (int i = 0; i < 100000; ++i) {
        const double nu = 0.05 + 0.45 * uniform01(rng);
        const auto p = nu_params_unchecked(nu);
        const auto d = regime_draw(rng, p);
        const auto set = consistent_outcomes(d.s0, d.a, d.b, p);
        const auto flags = possibility_of(classify_case(d.s0, d.a, d.b, p));
        if (flags.equal != set.has_equal() || flags.unequal != set.has_unequal()) ++mismatches;
        if (set.empty()) ++empty;
    }
    CHECK(mismatches == 0);
    CHECK(empty == 0);
}

TEST_CASE("possibility flags are invariant under S0 -> -S0 with a <-> b") {
    auto rng = make_stream(41);
    const auto p = nu_params(0.3);
    for (int i = 0; i < 20000; ++i) {
        const auto d = regime_draw(rng, p);
        const auto s = consistent_outcomes(d.s0, d.a, d.b, p);
        const auto t = consistent_outcomes(-d.s0, d.b, d.a, p);
        CHECK(s.has_equal() == t.has_equal());
        CHECK(s.has_unequal() == t.has_unequal());
    }
}

TEST_CASE("perfect correlations at equal and opposite settings") {
    auto rng = make_stream(51);
    for (int i = 0; i < 10000; ++i) {
        const auto s0 = sample_uniform(rng);
        const auto a = sample_uniform(rng);
        if (dot(a, s0) == 0.0) continue;
        const double nu = 0.01 + 0.5 * uniform01(rng);
        const auto p = nu_params_unchecked(nu);
        REQUIRE(p.beta() > p.gamma());
        const auto same = consistent_outcomes(s0, a, a, p);
        CHECK_FALSE(same.empty());
        CHECK_FALSE(same.has_equal());
        const auto opposite = consistent_outcomes(s0, a, -a, p);
        CHECK_FALSE(opposite.empty());
        CHECK_FALSE(opposite.has_unequal());
    }
}

TEST_CASE("small beta and gamma reproduce the local outcome") {
    auto rng = make_stream(61);
    const double eps = 1e-9;
    const auto p = ModelParams::unchecked(1 - 2 * eps, eps, eps);
    for (int i = 0; i < 10000; ++i) {
        const auto s0 = sample_uniform(rng);
        const auto a = sample_uniform(rng);
        const auto b = sample_uniform(rng);
        if (std::abs(dot(a, s0)) < 1e-6 || std::abs(dot(b, s0)) < 1e-6) continue;
        const auto set = consistent_outcomes(s0, a, b, p);
        REQUIRE(set.size() == 1);
        const auto o = set.members().front();
        CHECK(o.a == measure_spin(a, s0));
        CHECK(o.b == measure_spin(b, -s0));
    }
}

TEST_CASE("resolve_sfp examples") {
    auto rng = make_stream(71);
    ConsistentSet single;
    single.insert(kPP);
    for (auto pol : {SfpPolicy::FavorEqual, SfpPolicy::FavorUnequal, SfpPolicy::Unbiased}) {
        CHECK(resolve_sfp(single, pol, rng) == kPP);
    }
    ConsistentSet mixed;
    mixed.insert(kPP);
    mixed.insert(kPM);
    CHECK(resolve_sfp(mixed, SfpPolicy::FavorUnequal, rng) == kPM);
    CHECK(resolve_sfp(mixed, SfpPolicy::FavorEqual, rng) == kPP);

    const int n = 100000;
    int unequal = 0;
    for (int i = 0; i < n; ++i) unequal += resolve_sfp(mixed, SfpPolicy::Unbiased, rng).equal() ? 0 : 1;
    CHECK(std::abs(static_cast<double>(unequal) / n - 0.5) < 0.005);

    // Within a class the member is uniform.
    ConsistentSet two_equal;
    two_equal.insert(kPP);
    two_equal.insert(kMM);
    two_equal.insert(kMP);
    int pp = 0;
    for (int i = 0; i < n; ++i) pp += resolve_sfp(two_equal, SfpPolicy::FavorEqual, rng) == kPP ? 1 : 0;
    CHECK(std::abs(static_cast<double>(pp) / n - 0.5) < 0.005);

    CHECK_THROWS_AS(resolve_sfp(ConsistentSet{}, SfpPolicy::Unbiased, rng), EmptySet);
}

TEST_CASE("ConsistentSet bookkeeping") {
    ConsistentSet s;
    CHECK(s.empty());
    s.insert(kMP);
    s.insert(kMP);
    CHECK(s.size() == 1);
    CHECK(s.has_unequal());
    CHECK_FALSE(s.has_equal());
    s.insert(kMM);
    CHECK(s.has_equal());
    CHECK(s.members().size() == 2);
}

TEST_CASE("policy names round trip") {
    for (auto pol : {SfpPolicy::FavorEqual, SfpPolicy::FavorUnequal, SfpPolicy::Unbiased}) {
        CHECK(parse_policy(to_string(pol)) == pol);
    }
    CHECK_THROWS_AS(parse_policy("sometimes"), DomainError);
}
