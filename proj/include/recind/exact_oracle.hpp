#pragma once

// Ground-truth joint law of (zeta_2, ..., zeta_n) for iid continuous data
// with independent coordinates. Indicators are rank statistics (monotone
// maps per coordinate leave them unchanged), so enumerating the (n!)^d
// equiprobable rank tuples and counting outcomes gives the law exactly in
// rational arithmetic.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "recind/core.hpp"
#include "recind/errors.hpp"
#include "recind/joint_pmf.hpp"
#include "recind/rational.hpp"

namespace recind {

inline constexpr std::uint64_t kDefaultEnumerationCap = 2'000'000;

namespace detail {

// (n!)^d, or nullopt-style 0 sentinel avoided: throws CapError as soon as
// the running product exceeds cap.
inline std::uint64_t checked_rank_tuple_count(int n, int d, std::uint64_t cap) {
    std::uint64_t fact = 1;
    for (int i = 2; i <= n; ++i) {
        if (fact > cap / static_cast<std::uint64_t>(i)) {
            throw CapError("(n!)^d for n = " + std::to_string(n) + ", d = " + std::to_string(d) +
                           " exceeds the enumeration cap of " + std::to_string(cap));
        }
        fact *= static_cast<std::uint64_t>(i);
    }
    std::uint64_t total = 1;
    for (int i = 0; i < d; ++i) {
        if (fact != 0 && total > cap / fact) {
            throw CapError("(n!)^d for n = " + std::to_string(n) + ", d = " + std::to_string(d) +
                           " exceeds the enumeration cap of " + std::to_string(cap));
        }
        total *= fact;
    }
    return total;
}

inline bool within_rank_tuple_cap(int n, int d, std::uint64_t cap) {
    try {
        checked_rank_tuple_count(n, d, cap);
        return true;
    } catch (const CapError&) {
        return false;
    }
}

}  // namespace detail

// Whether joint_pmf_iid(n, d, ...) fits under the enumeration cap.
inline bool enumeration_feasible(int n, int d, std::uint64_t cap = kDefaultEnumerationCap) {
    return n >= 1 && d >= 1 && detail::within_rank_tuple_cap(n, d, cap);
}

namespace detail {

inline std::vector<std::vector<int>> all_permutations(int n) {
    std::vector<int> base(static_cast<std::size_t>(n));
    std::iota(base.begin(), base.end(), 1);
    std::vector<std::vector<int>> perms;
    do {
        perms.push_back(base);
    } while (std::next_permutation(base.begin(), base.end()));
    return perms;
}

}  // namespace detail

// Exact joint pmf of the indicators for n iid observations in dimension d
// (continuous marginals, independent coordinates). Sums to 1 exactly.
inline JointPmf<Rational> joint_pmf_iid(int n, int d, SemanticsMode mode,
                                        std::uint64_t cap = kDefaultEnumerationCap) {
    if (n < 1) throw InputError("path length must be >= 1");
    if (d < 1) throw InputError("dimension must be >= 1");
    const std::uint64_t total = detail::checked_rank_tuple_count(n, d, cap);

    std::vector<std::uint64_t> counts(outcome_count(n), 0);
    const auto perms = detail::all_permutations(n);
    const std::size_t nperm = perms.size();

    std::vector<std::size_t> which(static_cast<std::size_t>(d), 0);
    std::vector<int> best(static_cast<std::size_t>(d));  // running max (Dominance)
    for (std::uint64_t t = 0; t < total; ++t) {
        std::uint64_t mask = 0;
        if (mode == SemanticsMode::Chain) {
            int last = 0;
            for (int j = 1; j < n; ++j) {
                bool rec = true;
                for (int i = 0; i < d && rec; ++i) {
                    const auto& p = perms[which[static_cast<std::size_t>(i)]];
                    rec = p[static_cast<std::size_t>(j)] > p[static_cast<std::size_t>(last)];
                }
                if (rec) {
                    mask |= std::uint64_t{1} << (j - 1);
                    last = j;
                }
            }
        } else {
            for (int i = 0; i < d; ++i) {
                best[static_cast<std::size_t>(i)] = perms[which[static_cast<std::size_t>(i)]][0];
            }
            for (int j = 1; j < n; ++j) {
                bool rec = true;
                for (int i = 0; i < d; ++i) {
                    const int v = perms[which[static_cast<std::size_t>(i)]][static_cast<std::size_t>(j)];
                    if (v <= best[static_cast<std::size_t>(i)]) rec = false;
                    best[static_cast<std::size_t>(i)] = std::max(best[static_cast<std::size_t>(i)], v);
                }
                if (rec) mask |= std::uint64_t{1} << (j - 1);
            }
        }
        ++counts[mask];

        for (int i = 0; i < d; ++i) {  // odometer over rank tuples
            if (++which[static_cast<std::size_t>(i)] < nperm) break;
            which[static_cast<std::size_t>(i)] = 0;
        }
    }

    JointPmf<Rational> pmf;
    pmf.n = n;
    pmf.source = PmfSource::Enumeration;
    pmf.probs.reserve(counts.size());
    for (std::uint64_t c : counts) pmf.probs.emplace_back(c, total);
    return pmf;
}

// P(zeta_j = 1) under iid sampling. Enumerates within the cap; falls back
// to the closed forms 1/j (d = 1) and 1/j^d (Dominance, independent
// coordinates) beyond it. Chain with d >= 2 has no closed form here.
inline Rational marginal_record_prob(int n, int j, int d, SemanticsMode mode,
                                     std::uint64_t cap = kDefaultEnumerationCap) {
    if (n < 1 || j < 1 || j > n) throw InputError("need 1 <= j <= n");
    if (d < 1) throw InputError("dimension must be >= 1");
    if (j == 1) return Rational(1);
    if (detail::within_rank_tuple_cap(n, d, cap)) {
        const auto pmf = joint_pmf_iid(n, d, mode, cap);
        return marginals(pmf)[static_cast<std::size_t>(j - 2)];
    }
    if (d == 1) return Rational(1, j);
    if (mode == SemanticsMode::Dominance) {
        BigInt den = 1;
        for (int i = 0; i < d; ++i) den *= j;
        return Rational(1, den);
    }
    throw CapError("chain marginal for d >= 2 needs enumeration, and (n!)^d exceeds the cap of " +
                   std::to_string(cap));
}

}  // namespace recind
