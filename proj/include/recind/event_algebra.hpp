#pragma once

// Pattern space over {2..n}, the record-pattern events, and the two routes
// for E prod_j h_j(zeta_j): the per-outcome product and the segment
// decomposition. The decomposition is a rearrangement of the same sum, so
// the two must agree for any normalized table, independent or not.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "recind/core.hpp"
#include "recind/errors.hpp"
#include "recind/joint_pmf.hpp"

namespace recind {

// All 2^(n-1) patterns in canonical binary order (index 2 at bit 0).
inline std::vector<RecordPattern> enumerate_patterns(int n, int cap = 20) {
    if (n < 1) throw InputError("path length must be >= 1");
    if (n > cap) {
        throw CapError("pattern enumeration for n = " + std::to_string(n) +
                       " exceeds the cap of n = " + std::to_string(cap));
    }
    const std::uint64_t total = outcome_count(n);
    std::vector<RecordPattern> out;
    out.reserve(total);
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        out.push_back(pattern_from_mask(n, mask));
    }
    return out;
}

namespace detail {

// Chain-mode event, assembled factor by factor: no index before r_1
// dominates the first observation, each record dominates the previous one
// with no interior index dominating it, and nothing after r_k dominates the
// last record (vacuous when r_k = n).
inline bool chain_pattern_event(const Path& path, const RecordPattern& r) {
    const int n = path.length();
    if (r.k() == 0) {
        for (int j = 2; j <= n; ++j) {
            if (dominates(path.at(1), path.at(j))) return false;
        }
        return true;
    }
    int prev = 1;
    for (int cur : r.indices()) {
        for (int j = prev + 1; j < cur; ++j) {
            if (dominates(path.at(prev), path.at(j))) return false;
        }
        if (!dominates(path.at(prev), path.at(cur))) return false;
        prev = cur;
    }
    for (int j = prev + 1; j <= n; ++j) {
        if (dominates(path.at(prev), path.at(j))) return false;
    }
    return true;
}

// Dominance-mode analogue: index j is a record iff it dominates every
// previous observation; the event requires that to match r exactly.
inline bool dominance_pattern_event(const Path& path, const RecordPattern& r) {
    for (int j = 2; j <= path.length(); ++j) {
        bool rec = true;
        for (int i = 1; i < j && rec; ++i) {
            rec = dominates(path.at(i), path.at(j));
        }
        if (rec != r.contains(j)) return false;
    }
    return true;
}

}  // namespace detail

inline bool pattern_event_holds(const Path& path, const RecordPattern& r, SemanticsMode mode) {
    if (r.n() != path.length()) {
        throw InputError("pattern is over n = " + std::to_string(r.n()) + " but path has n = " +
                         std::to_string(path.length()));
    }
    return mode == SemanticsMode::Chain ? detail::chain_pattern_event(path, r)
                                        : detail::dominance_pattern_event(path, r);
}

// Values (h_j(0), h_j(1)) for j in 2..n.
template <typename S>
struct HTable {
    int n = 1;
    std::vector<std::array<S, 2>> values;  // values[j - 2]

    static HTable constant(int n, S value) {
        HTable t;
        t.n = n;
        t.values.assign(static_cast<std::size_t>(n - 1), {value, value});
        return t;
    }

    const S& operator()(int j, int bit) const {
        return values.at(static_cast<std::size_t>(j - 2))[static_cast<std::size_t>(bit)];
    }
};

template <typename S>
void require_same_n(const HTable<S>& h, const JointPmf<S>& pmf) {
    if (h.n != pmf.n || h.values.size() != static_cast<std::size_t>(h.n - 1)) {
        throw InputError("h-table is over n = " + std::to_string(h.n) + " but pmf has n = " +
                         std::to_string(pmf.n));
    }
}

// Segment products of prod_j h_j(zeta_j) on a pattern event, partitioning
// {2..n} by the record indices:
//   v0    covers 2..r_1 (all of 2..n when r is empty),
//   vmid  covers (r_{l-1}, r_l] for l = 2..k,
//   vend  covers (r_k, n], empty product when r_k = n.
// z is the same value assembled directly from r and its complement; the
// segment product must always equal it.
template <typename S>
struct VProducts {
    S v0;
    std::vector<S> vmid;
    S vend;
    S z;
};

template <typename S>
VProducts<S> v_products(const RecordPattern& r, const HTable<S>& h) {
    if (r.n() != h.n) {
        throw InputError("pattern is over n = " + std::to_string(r.n()) + " but h-table has n = " +
                         std::to_string(h.n));
    }
    const int n = r.n();
    VProducts<S> out{S{1}, {}, S{1}, S{1}};
    if (r.k() == 0) {
        for (int j = 2; j <= n; ++j) out.v0 *= h(j, 0);
    } else {
        const auto& idx = r.indices();
        int prev = 1;
        for (std::size_t l = 0; l < idx.size(); ++l) {
            S seg{1};
            for (int j = prev + 1; j < idx[l]; ++j) seg *= h(j, 0);
            seg *= h(idx[l], 1);
            if (l == 0) {
                out.v0 = seg;
            } else {
                out.vmid.push_back(seg);
            }
            prev = idx[l];
        }
        for (int j = prev + 1; j <= n; ++j) out.vend *= h(j, 0);
    }
    for (int j = 2; j <= n; ++j) out.z *= h(j, r.contains(j) ? 1 : 0);
    return out;
}

// E prod h_j(zeta_j), summing outcome probabilities times per-bit products.
template <typename S>
S expectation_direct(const HTable<S>& h, const JointPmf<S>& pmf, double tol = 1e-9) {
    require_same_n(h, pmf);
    require_normalized(pmf, tol);
    S total{0};
    for (std::uint64_t mask = 0; mask < pmf.probs.size(); ++mask) {
        S term = pmf.probs[mask];
        for (int j = 2; j <= pmf.n; ++j) {
            term *= h(j, static_cast<int>(mask >> (j - 2) & 1));
        }
        total += term;
    }
    return total;
}

// Same expectation assembled from the pattern decomposition: the piecewise
// constant v-segments times the pattern probability, summed over all patterns.
template <typename S>
S expectation_via_decomposition(const HTable<S>& h, const JointPmf<S>& pmf, double tol = 1e-9) {
    require_same_n(h, pmf);
    require_normalized(pmf, tol);
    S total{0};
    for (std::uint64_t mask = 0; mask < pmf.probs.size(); ++mask) {
        const RecordPattern r = pattern_from_mask(pmf.n, mask);
        const VProducts<S> v = v_products(r, h);
        S piece = v.v0;
        for (const S& seg : v.vmid) piece *= seg;
        piece *= v.vend;
        total += piece * pmf.probs[mask];
    }
    return total;
}

// prod_j E h_j(zeta_j) from the pmf marginals.
template <typename S>
S product_of_marginal_expectations(const HTable<S>& h, const JointPmf<S>& pmf, double tol = 1e-9) {
    require_same_n(h, pmf);
    require_normalized(pmf, tol);
    const std::vector<S> m = marginals(pmf);
    S total{1};
    for (int j = 2; j <= pmf.n; ++j) {
        const S& mj = m[static_cast<std::size_t>(j - 2)];
        total *= h(j, 0) * (S{1} - mj) + h(j, 1) * mj;
    }
    return total;
}

}  // namespace recind
