#pragma once

// Probability table over the 2^(n-1) outcomes of (zeta_2, ..., zeta_n).
// Outcomes are indexed by bitmask with index 2 at bit 0; that encoding is
// shared by every module and file format.

#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

#include "recind/core.hpp"
#include "recind/errors.hpp"
#include "recind/rational.hpp"

namespace recind {

enum class PmfSource { Enumeration, Quadrature, Empirical };

inline std::string to_string(PmfSource s) {
    switch (s) {
        case PmfSource::Enumeration: return "enumeration";
        case PmfSource::Quadrature: return "quadrature";
        default: return "empirical";
    }
}

inline std::uint64_t outcome_count(int n) {
    if (n < 1) throw InputError("path length must be >= 1");
    if (n - 1 >= 63) throw CapError("outcome table for n = " + std::to_string(n) + " does not fit a 64-bit mask");
    return std::uint64_t{1} << (n - 1);
}

inline std::uint64_t pattern_mask(const RecordPattern& r) {
    outcome_count(r.n());  // range check
    std::uint64_t mask = 0;
    for (int j : r.indices()) mask |= std::uint64_t{1} << (j - 2);
    return mask;
}

inline RecordPattern pattern_from_mask(int n, std::uint64_t mask) {
    if (mask >= outcome_count(n)) throw InputError("outcome mask out of range for n = " + std::to_string(n));
    std::vector<int> idx;
    for (int j = 2; j <= n; ++j) {
        if (mask >> (j - 2) & 1) idx.push_back(j);
    }
    return RecordPattern(n, std::move(idx));
}

inline std::uint64_t indicator_mask(const IndicatorVector& iv) {
    outcome_count(iv.n());
    std::uint64_t mask = 0;
    for (int j = 2; j <= iv.n(); ++j) {
        if (iv.bit(j)) mask |= std::uint64_t{1} << (j - 2);
    }
    return mask;
}

template <typename S>
struct JointPmf {
    int n = 1;
    std::vector<S> probs;  // size 2^(n-1), index = outcome mask
    PmfSource source = PmfSource::Enumeration;

    std::uint64_t outcomes() const { return outcome_count(n); }
};

template <typename S>
S pmf_total(const JointPmf<S>& pmf) {
    S total{0};
    for (const S& p : pmf.probs) total += p;
    return total;
}

// Exact equality with 1 for rational tables, |sum - 1| <= tol otherwise.
template <typename S>
bool is_normalized(const JointPmf<S>& pmf, double tol = 1e-9) {
    if (pmf.probs.size() != pmf.outcomes()) return false;
    const S total = pmf_total(pmf);
    if constexpr (std::is_same_v<S, Rational>) {
        (void)tol;
        return total == Rational(1);
    } else {
        double residual = static_cast<double>(total) - 1.0;
        return residual <= tol && residual >= -tol;
    }
}

template <typename S>
void require_normalized(const JointPmf<S>& pmf, double tol = 1e-9) {
    if (pmf.probs.size() != pmf.outcomes()) {
        throw InputError("pmf table has " + std::to_string(pmf.probs.size()) + " entries, expected " +
                         std::to_string(pmf.outcomes()));
    }
    if (!is_normalized(pmf, tol)) throw InputError("pmf is not normalized");
}

// Marginal record probabilities: out[j - 2] = P(zeta_j = 1) for j in 2..n.
template <typename S>
std::vector<S> marginals(const JointPmf<S>& pmf) {
    std::vector<S> out(static_cast<std::size_t>(pmf.n - 1), S{0});
    for (std::uint64_t mask = 0; mask < pmf.probs.size(); ++mask) {
        for (int j = 2; j <= pmf.n; ++j) {
            if (mask >> (j - 2) & 1) out[static_cast<std::size_t>(j - 2)] += pmf.probs[mask];
        }
    }
    return out;
}

inline JointPmf<double> to_double_pmf(const JointPmf<Rational>& pmf) {
    JointPmf<double> out;
    out.n = pmf.n;
    out.source = pmf.source;
    out.probs.reserve(pmf.probs.size());
    for (const Rational& p : pmf.probs) out.probs.push_back(to_double(p));
    return out;
}

}  // namespace recind
