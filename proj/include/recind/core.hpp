#pragma once

// Record semantics over the strict all-coordinate order: domain types,
// the streaming detector, and batch indicator computation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "recind/errors.hpp"

namespace recind {

// Chain: an observation is a record iff it strictly dominates the most
// recent record. Dominance: iff it strictly dominates every previous
// observation. The two coincide in dimension one.
enum class SemanticsMode { Chain, Dominance };

inline std::string to_string(SemanticsMode mode) {
    return mode == SemanticsMode::Chain ? "chain" : "dominance";
}

// A point in R^d. Coordinates must be finite; NaN is rejected at
// construction rather than silently ordered.
class Observation {
public:
    explicit Observation(std::vector<double> coords) : coords_(std::move(coords)) {
        if (coords_.empty()) throw InputError("observation needs at least one coordinate");
        for (double c : coords_) {
            if (!std::isfinite(c)) throw InputError("non-finite coordinate in observation");
        }
    }
    Observation(std::initializer_list<double> coords)
        : Observation(std::vector<double>(coords)) {}

    int dim() const { return static_cast<int>(coords_.size()); }
    std::span<const double> coords() const { return coords_; }

    friend bool operator==(const Observation& a, const Observation& b) {
        return a.coords_ == b.coords_;
    }

private:
    std::vector<double> coords_;
};

// x < y in the all-coordinate order: true iff every coordinate of y strictly
// exceeds the matching coordinate of x. Any tie or reversal yields false.
inline bool dominates(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw InputError("dimension mismatch: " + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()));
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > x[i])) return false;
    }
    return true;
}

inline bool dominates(const Observation& x, const Observation& y) {
    return dominates(x.coords(), y.coords());
}

// An ordered sequence of observations sharing one dimension; n >= 1.
class Path {
public:
    explicit Path(std::vector<Observation> observations)
        : observations_(std::move(observations)) {
        if (observations_.empty()) throw InputError("path must contain at least one observation");
        const int d = observations_.front().dim();
        for (const auto& obs : observations_) {
            if (obs.dim() != d) {
                throw InputError("nonuniform dimension: expected " + std::to_string(d) +
                                 ", found " + std::to_string(obs.dim()));
            }
        }
    }

    int length() const { return static_cast<int>(observations_.size()); }
    int dim() const { return observations_.front().dim(); }

    // 1-based, matching the index convention used throughout.
    const Observation& at(int j) const { return observations_.at(static_cast<std::size_t>(j - 1)); }

    auto begin() const { return observations_.begin(); }
    auto end() const { return observations_.end(); }

private:
    std::vector<Observation> observations_;
};

// Binary sequence zeta_1..zeta_n; the first observation is a record by
// convention, so bits.front() == 1 for any vector produced here.
struct IndicatorVector {
    std::vector<std::uint8_t> bits;

    int n() const { return static_cast<int>(bits.size()); }
    int bit(int j) const { return bits.at(static_cast<std::size_t>(j - 1)); }
};

inline int count_records(const IndicatorVector& iv) {
    int total = 0;
    for (auto b : iv.bits) total += b;
    return total;
}

// The ordered index set r = (r_1 < ... < r_k) within {2..n} at which records
// occur after the first observation; empty means no record after index 1.
class RecordPattern {
public:
    RecordPattern(int n, std::vector<int> indices) : n_(n), indices_(std::move(indices)) {
        if (n_ < 1) throw InputError("pattern length must be >= 1");
        int prev = 1;
        for (int r : indices_) {
            if (r <= prev || r > n_) throw InputError("pattern indices must be strictly increasing in [2, n]");
            prev = r;
        }
    }

    static RecordPattern empty(int n) { return RecordPattern(n, {}); }

    int n() const { return n_; }
    int k() const { return static_cast<int>(indices_.size()); }
    const std::vector<int>& indices() const { return indices_; }

    bool contains(int j) const {
        return std::binary_search(indices_.begin(), indices_.end(), j);
    }

    // {2..n} \ r.
    std::vector<int> complement() const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(n_ - 1 - k()));
        for (int j = 2; j <= n_; ++j) {
            if (!contains(j)) out.push_back(j);
        }
        return out;
    }

    friend bool operator==(const RecordPattern& a, const RecordPattern& b) {
        return a.n_ == b.n_ && a.indices_ == b.indices_;
    }

private:
    int n_;
    std::vector<int> indices_;
};

// Streaming record detector. Chain mode keeps the last record; Dominance
// mode maintains the front (skyline) of mutually non-dominating points seen
// so far, which generalizes the running maximum. Eviction is immediate, so
// a step costs O(|front| * d).
class RecordDetector {
public:
    explicit RecordDetector(SemanticsMode mode) : mode_(mode) {}

    // Returns the indicator bit for x and updates the state.
    int step(std::span<const double> x) {
        if (dim_ == 0) {
            dim_ = static_cast<int>(x.size());
            if (dim_ == 0) throw InputError("observation needs at least one coordinate");
        } else if (static_cast<int>(x.size()) != dim_) {
            throw InputError("dimension mismatch: expected " + std::to_string(dim_) + ", found " +
                             std::to_string(x.size()));
        }
        int bit;
        if (mode_ == SemanticsMode::Chain) {
            bit = last_record_.empty() || dominates(last_record_, x) ? 1 : 0;
            if (bit) last_record_.assign(x.begin(), x.end());
        } else {
            bit = 1;
            bool covered = false;  // x strictly below some front member
            for (const auto& m : front_) {
                if (!dominates(m, x)) bit = 0;
                if (dominates(x, m)) covered = true;
            }
            if (!covered) {
                std::erase_if(front_, [&](const std::vector<double>& m) { return dominates(m, x); });
                front_.emplace_back(x.begin(), x.end());
            }
        }
        count_ += bit;
        return bit;
    }

    int step(const Observation& x) { return step(x.coords()); }

    SemanticsMode mode() const { return mode_; }
    std::int64_t count() const { return count_; }
    const std::vector<double>& last_record() const { return last_record_; }
    const std::vector<std::vector<double>>& front() const { return front_; }
    std::size_t front_size() const {
        return mode_ == SemanticsMode::Chain ? (last_record_.empty() ? 0 : 1) : front_.size();
    }

private:
    SemanticsMode mode_;
    int dim_ = 0;
    std::int64_t count_ = 0;
    std::vector<double> last_record_;
    std::vector<std::vector<double>> front_;
};

// zeta_1..zeta_n for the whole path; equals folding step() over it.
inline IndicatorVector indicators(const Path& path, SemanticsMode mode) {
    RecordDetector detector(mode);
    IndicatorVector iv;
    iv.bits.reserve(static_cast<std::size_t>(path.length()));
    for (const auto& obs : path) {
        iv.bits.push_back(static_cast<std::uint8_t>(detector.step(obs)));
    }
    return iv;
}

inline RecordPattern record_pattern(const Path& path, SemanticsMode mode) {
    const IndicatorVector iv = indicators(path, mode);
    std::vector<int> idx;
    for (int j = 2; j <= iv.n(); ++j) {
        if (iv.bit(j)) idx.push_back(j);
    }
    return RecordPattern(path.length(), std::move(idx));
}

}  // namespace recind
