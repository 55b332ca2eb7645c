#pragma once

// Test-only brute-force oracles, independent of the library's detector and
// enumeration paths: indicator bits straight from the definitions, and the
// iid joint law by direct enumeration of rank orders.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "recind/core.hpp"
#include "recind/joint_pmf.hpp"
#include "recind/rational.hpp"

namespace recind::test {

inline bool strictly_below(const std::vector<double>& x, const std::vector<double>& y) {
    for (std::size_t c = 0; c < x.size(); ++c) {
        if (!(y[c] > x[c])) return false;
    }
    return true;
}

// zeta bits from the definitions: dominance compares against every previous
// observation; chain compares against the most recent index flagged so far.
inline std::vector<int> naive_indicators(const std::vector<std::vector<double>>& xs,
                                         SemanticsMode mode) {
    const int n = static_cast<int>(xs.size());
    std::vector<int> bits(static_cast<std::size_t>(n), 0);
    bits[0] = 1;
    if (mode == SemanticsMode::Dominance) {
        for (int j = 1; j < n; ++j) {
            bool rec = true;
            for (int i = 0; i < j && rec; ++i) {
                rec = strictly_below(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)]);
            }
            bits[static_cast<std::size_t>(j)] = rec ? 1 : 0;
        }
    } else {
        int last = 0;
        for (int j = 1; j < n; ++j) {
            if (strictly_below(xs[static_cast<std::size_t>(last)], xs[static_cast<std::size_t>(j)])) {
                bits[static_cast<std::size_t>(j)] = 1;
                last = j;
            }
        }
    }
    return bits;
}

// Exact iid joint law by enumerating all (n!)^d rank tuples with the naive
// indicator definitions.
inline JointPmf<Rational> brute_force_iid_pmf(int n, int d, SemanticsMode mode) {
    std::vector<int> base(static_cast<std::size_t>(n));
    std::iota(base.begin(), base.end(), 1);
    std::vector<std::vector<int>> perms;
    do {
        perms.push_back(base);
    } while (std::next_permutation(base.begin(), base.end()));

    std::uint64_t total = 1;
    for (int i = 0; i < d; ++i) total *= perms.size();

    std::vector<std::uint64_t> counts(std::uint64_t{1} << (n - 1), 0);
    std::vector<std::size_t> which(static_cast<std::size_t>(d), 0);
    std::vector<std::vector<double>> xs(static_cast<std::size_t>(n),
                                        std::vector<double>(static_cast<std::size_t>(d)));
    for (std::uint64_t t = 0; t < total; ++t) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < d; ++i) {
                xs[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                    perms[which[static_cast<std::size_t>(i)]][static_cast<std::size_t>(j)];
            }
        }
        const auto bits = naive_indicators(xs, mode);
        std::uint64_t mask = 0;
        for (int j = 1; j < n; ++j) {
            if (bits[static_cast<std::size_t>(j)]) mask |= std::uint64_t{1} << (j - 1);
        }
        ++counts[mask];
        for (int i = 0; i < d; ++i) {
            if (++which[static_cast<std::size_t>(i)] < perms.size()) break;
            which[static_cast<std::size_t>(i)] = 0;
        }
    }

    JointPmf<Rational> pmf;
    pmf.n = n;
    pmf.source = PmfSource::Enumeration;
    for (std::uint64_t c : counts) pmf.probs.emplace_back(c, total);
    return pmf;
}

inline std::vector<std::vector<double>> random_coords(std::mt19937& rng, int n, int d,
                                                      bool integer_valued = false) {
    std::vector<std::vector<double>> xs(static_cast<std::size_t>(n),
                                        std::vector<double>(static_cast<std::size_t>(d)));
    std::uniform_real_distribution<double> real(-1.0, 1.0);
    std::uniform_int_distribution<int> ints(-2, 2);
    for (auto& row : xs) {
        for (auto& v : row) v = integer_valued ? static_cast<double>(ints(rng)) : real(rng);
    }
    return xs;
}

inline Path make_path(const std::vector<std::vector<double>>& xs) {
    std::vector<Observation> obs;
    obs.reserve(xs.size());
    for (const auto& row : xs) obs.emplace_back(row);
    return Path(std::move(obs));
}

}  // namespace recind::test
