#include "retrobell/outcome.hpp"

#include <cmath>
#include <sstream>

#include "retrobell/errors.hpp"

namespace retrobell {

namespace {

constexpr double kSumTolerance = 1e-12;

void require_simplex(double alpha, double beta, double gamma) {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma)) {
        throw OutOfRange("model weights must be finite");
    }
    if (std::abs(alpha + beta + gamma - 1.0) > kSumTolerance) {
        std::ostringstream msg;
        msg << "alpha + beta + gamma = " << alpha + beta + gamma << ", expected 1";
        throw OutOfRange(msg.str());
    }
}

int sgn(double x) { return x >= 0.0 ? 1 : -1; }

}  // namespace

ModelParams ModelParams::checked(double alpha, double beta, double gamma) {
    require_simplex(alpha, beta, gamma);
    if (!(alpha > 0.0 && beta > 0.0 && gamma > 0.0)) {
        throw OutOfRange("alpha, beta, gamma must be strictly positive");
    }
    if (!(alpha > beta && beta > gamma)) {
        std::ostringstream msg;
        msg << "ordering alpha > beta > gamma violated: (" << alpha << ", " << beta << ", " << gamma
            << ")";
        throw OutOfRange(msg.str());
    }
    return ModelParams(alpha, beta, gamma);
}

ModelParams ModelParams::unchecked(double alpha, double beta, double gamma) {
    require_simplex(alpha, beta, gamma);
    if (!(alpha > 0.0 && beta >= 0.0 && gamma >= 0.0)) {
        throw OutOfRange("weights must be non-negative with alpha > 0");
    }
    return ModelParams(alpha, beta, gamma);
}

ModelParams ModelParams::from_beta_gamma(double beta, double gamma) {
    return unchecked(1.0 - beta - gamma, beta, gamma);
}

std::string to_string(const OutcomePair& p) {
    std::string s = "(";
    s += p.a == Outcome::Up ? "+1" : "-1";
    s += ",";
    s += p.b == Outcome::Up ? "+1" : "-1";
    s += ")";
    return s;
}

std::vector<OutcomePair> ConsistentSet::members() const {
    std::vector<OutcomePair> out;
    for (const auto& p : kAllOutcomePairs) {
        if (contains(p)) out.push_back(p);
    }
    return out;
}

std::string to_string(SfpPolicy policy) {
    switch (policy) {
        case SfpPolicy::FavorEqual: return "favor-equal";
        case SfpPolicy::FavorUnequal: return "favor-unequal";
        case SfpPolicy::Unbiased: return "unbiased";
    }
    return "?";
}

std::string to_string(CaseLabel label) {
    switch (label) {
        case CaseLabel::OppositeSigns_ForcedEqual: return "OppositeSigns_ForcedEqual";
        case CaseLabel::SameSigns_BothPossible: return "SameSigns_BothPossible";
        case CaseLabel::SameSigns_OnlyEqual: return "SameSigns_OnlyEqual";
        case CaseLabel::SameSigns_OnlyUnequal: return "SameSigns_OnlyUnequal";
    }
    return "?";
}

SfpPolicy parse_policy(const std::string& name) {
    if (name == "favor-equal") return SfpPolicy::FavorEqual;
    if (name == "favor-unequal") return SfpPolicy::FavorUnequal;
    if (name == "unbiased") return SfpPolicy::Unbiased;
    throw DomainError("unknown SFP policy '" + name + "'");
}

Possibility possibility_of(CaseLabel label) {
    switch (label) {
        case CaseLabel::OppositeSigns_ForcedEqual: return {true, false};
        case CaseLabel::SameSigns_BothPossible: return {true, true};
        case CaseLabel::SameSigns_OnlyEqual: return {true, false};
        case CaseLabel::SameSigns_OnlyUnequal: return {false, true};
    }
    return {};
}

UnitVec3 final_spin(const UnitVec3& s0, const UnitVec3& a, const UnitVec3& b,
                    const OutcomePair& outcome, const ModelParams& p, Side particle) {
    const double A = value(outcome.a);
    const double B = value(outcome.b);
    const Vec3 combo = particle == Side::A
                           ? p.alpha() * s0.vec() - p.beta() * B * b.vec() + p.gamma() * A * a.vec()
                           : -p.alpha() * s0.vec() - p.beta() * A * a.vec() + p.gamma() * B * b.vec();
    if (!(norm(combo) > kUnitTolerance)) {
        throw DegenerateCombination("final-spin combination vanishes");
    }
    return UnitVec3::normalize(combo);
}

ConsistentSet consistent_outcomes(double a_s0, double b_s0, double a_b, const ModelParams& p) {
    const double al = p.alpha(), be = p.beta(), ga = p.gamma();
    ConsistentSet set;
    for (const auto& pair : kAllOutcomePairs) {
        const int A = value(pair.a);
        const int B = value(pair.b);
        const int lhs_a = sgn(al * a_s0 - B * be * a_b + A * ga);
        const int lhs_b = sgn(-al * b_s0 - A * be * a_b + B * ga);
        if (lhs_a == A && lhs_b == B) set.insert(pair);
    }
    return set;
}

ConsistentSet consistent_outcomes(const UnitVec3& s0, const UnitVec3& a, const UnitVec3& b,
                                  const ModelParams& p) {
    return consistent_outcomes(dot(a, s0), dot(b, s0), dot(a, b), p);
}

bool in_case_regime(double a_b, const ModelParams& p) {
    // The slack keeps boundary grid points such as beta = 2 gamma at 120 degrees
    // inside, where cos(2 pi / 3) rounds to -0.49999999999999978.
    return a_b < 0.0 && p.beta() * std::abs(a_b) >= p.gamma() - kRegimeSlack;
}

namespace {

CaseLabel label_from_set(double a_s0, double b_s0, const ConsistentSet& set) {
    if (set.has_equal() && set.has_unequal()) return CaseLabel::SameSigns_BothPossible;
    if (set.has_unequal()) return CaseLabel::SameSigns_OnlyUnequal;
    if (set.has_equal()) {
        return sgn(a_s0) != sgn(b_s0) ? CaseLabel::OppositeSigns_ForcedEqual
                                      : CaseLabel::SameSigns_OnlyEqual;
    }
    throw EmptySet("no consistent outcome pair for this configuration");
}

}  // namespace

CaseLabel classify_case(double a_s0, double b_s0, double a_b, const ModelParams& p, bool fallback) {
    if (!in_case_regime(a_b, p)) {
        if (fallback) return label_from_set(a_s0, b_s0, consistent_outcomes(a_s0, b_s0, a_b, p));
        std::ostringstream msg;
        msg << "case table needs <a,b> < 0 and beta|<a,b>| >= gamma (got <a,b> = " << a_b
            << ", beta = " << p.beta() << ", gamma = " << p.gamma() << ")";
        throw RegimeViolation(msg.str());
    }
    // Reduce to <a,S0> > 0 via S0 -> -S0 with the particle labels exchanged.
    double x = a_s0, y = b_s0;
    if (x < 0.0) {
        x = -b_s0;
        y = -a_s0;
    }
    if (sgn(x) != sgn(y)) return CaseLabel::OppositeSigns_ForcedEqual;

    const double feed = p.beta() * std::abs(a_b);
    const double ax = p.alpha() * std::abs(x);
    const double ay = p.alpha() * std::abs(y);
    const bool equal_possible = ax < feed + p.gamma() || ay < feed + p.gamma();
    const bool unequal_possible = ax + p.gamma() > feed && ay + p.gamma() > feed;

    if (equal_possible && unequal_possible) return CaseLabel::SameSigns_BothPossible;
    if (equal_possible) return CaseLabel::SameSigns_OnlyEqual;
    if (unequal_possible) return CaseLabel::SameSigns_OnlyUnequal;
    throw EmptySet("neither coincidence nor anti-coincidence is possible");
}

CaseLabel classify_case(const UnitVec3& s0, const UnitVec3& a, const UnitVec3& b,
                        const ModelParams& p, bool fallback) {
    return classify_case(dot(a, s0), dot(b, s0), dot(a, b), p, fallback);
}

OutcomePair resolve_sfp(const ConsistentSet& set, SfpPolicy policy, RandomStream& rng) {
    if (set.empty()) throw EmptySet("cannot resolve an empty consistent set");

    bool want_equal;
    if (set.has_equal() && set.has_unequal()) {
        switch (policy) {
            case SfpPolicy::FavorEqual: want_equal = true; break;
            case SfpPolicy::FavorUnequal: want_equal = false; break;
            default: want_equal = fair_coin(rng); break;
        }
    } else {
        want_equal = set.has_equal();
    }

    OutcomePair candidates[4];
    int count = 0;
    for (const auto& p : kAllOutcomePairs) {
        if (set.contains(p) && p.equal() == want_equal) candidates[count++] = p;
    }
    if (count == 1) return candidates[0];
    return candidates[uniform_index(rng, static_cast<std::uint64_t>(count))];
}

}  // namespace retrobell
