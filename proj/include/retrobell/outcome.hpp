#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "retrobell/random.hpp"
#include "retrobell/sphere.hpp"

namespace retrobell {

// Convex weights of the final-spin decomposition
//   S_A ~ alpha S0 - beta B b + gamma A a
// alpha carries the initial spin, beta the feed-forward, gamma the preinforcement.
class ModelParams {
public:
    // alpha, beta, gamma > 0, summing to 1 within 1e-12, and alpha > beta > gamma.
    static ModelParams checked(double alpha, double beta, double gamma);

    // Only requires finite non-negative weights summing to 1 and alpha > 0.
    // Used for the local limit (1,0,0) and for (beta,gamma) grid sweeps.
    static ModelParams unchecked(double alpha, double beta, double gamma);

    // alpha = 1 - beta - gamma.
    static ModelParams from_beta_gamma(double beta, double gamma);

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double gamma() const { return gamma_; }

private:
    ModelParams(double a, double b, double g) : alpha_(a), beta_(b), gamma_(g) {}
    double alpha_;
    double beta_;
    double gamma_;
};

struct OutcomePair {
    Outcome a = Outcome::Up;
    Outcome b = Outcome::Up;

    bool equal() const { return a == b; }
    bool operator==(const OutcomePair&) const = default;
};

std::string to_string(const OutcomePair& p);

inline constexpr OutcomePair kAllOutcomePairs[4] = {
    {Outcome::Up, Outcome::Up},
    {Outcome::Up, Outcome::Down},
    {Outcome::Down, Outcome::Up},
    {Outcome::Down, Outcome::Down},
};

// Subset of {+1,-1}^2 stored as a 4-bit mask indexed like kAllOutcomePairs.
class ConsistentSet {
public:
    constexpr ConsistentSet() = default;

    static constexpr int index_of(const OutcomePair& p) {
        return (p.a == Outcome::Up ? 0 : 2) + (p.b == Outcome::Up ? 0 : 1);
    }

    void insert(const OutcomePair& p) { mask_ |= static_cast<std::uint8_t>(1u << index_of(p)); }
    bool contains(const OutcomePair& p) const { return (mask_ >> index_of(p)) & 1u; }
    int size() const { return __builtin_popcount(mask_); }
    bool empty() const { return mask_ == 0; }
    // (+,+) and (-,-) occupy bits 0 and 3.
    bool has_equal() const { return (mask_ & 0b1001u) != 0; }
    bool has_unequal() const { return (mask_ & 0b0110u) != 0; }
    std::uint8_t mask() const { return mask_; }
    std::vector<OutcomePair> members() const;

    bool operator==(const ConsistentSet&) const = default;

private:
    std::uint8_t mask_ = 0;
};

enum class SfpPolicy { FavorEqual, FavorUnequal, Unbiased };

enum class CaseLabel {
    OppositeSigns_ForcedEqual,
    SameSigns_BothPossible,
    SameSigns_OnlyEqual,
    SameSigns_OnlyUnequal,
};

enum class Side { A, B };

std::string to_string(SfpPolicy policy);
std::string to_string(CaseLabel label);
// Accepts "favor-equal", "favor-unequal", "unbiased". Throws DomainError otherwise.
SfpPolicy parse_policy(const std::string& name);

struct Possibility {
    bool equal = false;
    bool unequal = false;
};

Possibility possibility_of(CaseLabel label);

// Final pre-measurement spin of one particle given the outcome pair.
//   A-side: normalize( alpha S0 - beta B b + gamma A a)
//   B-side: normalize(-alpha S0 - beta A a + gamma B b)
// Throws DegenerateCombination if the combination vanishes.
UnitVec3 final_spin(const UnitVec3& s0, const UnitVec3& a, const UnitVec3& b,
                    const OutcomePair& outcome, const ModelParams& p, Side particle);

// Brute-force substitution of all four (A,B) into
//   A = sgn{ alpha<a,S0> - B beta<a,b> + A gamma}
//   B = sgn{-alpha<b,S0> - A beta<a,b> + B gamma}
// Works on the three scalar products so the Monte Carlo kernels can skip vector algebra.
ConsistentSet consistent_outcomes(double a_s0, double b_s0, double a_b, const ModelParams& p);
ConsistentSet consistent_outcomes(const UnitVec3& s0, const UnitVec3& a, const UnitVec3& b,
                                  const ModelParams& p);

// Absolute tolerance on beta |<a,b>| >= gamma.
inline constexpr double kRegimeSlack = 1e-12;

// <a,b> < 0 and beta |<a,b>| >= gamma (up to kRegimeSlack).
bool in_case_regime(double a_b, const ModelParams& p);

// Case label from the closed-form possibility conditions. Outside the regime
// either throws RegimeViolation or, with `fallback`, derives the label from
// consistent_outcomes.
CaseLabel classify_case(const UnitVec3& s0, const UnitVec3& a, const UnitVec3& b,
                        const ModelParams& p, bool fallback = false);
CaseLabel classify_case(double a_s0, double b_s0, double a_b, const ModelParams& p,
                        bool fallback = false);

// Picks one consistent pair. Favor* policies prefer their class whenever it is
// present; Unbiased flips a fair coin between the classes when both are present.
// Within the chosen class the member is drawn uniformly. Throws EmptySet.
OutcomePair resolve_sfp(const ConsistentSet& set, SfpPolicy policy, RandomStream& rng);

}  // namespace retrobell
