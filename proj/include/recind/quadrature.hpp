#pragma once

// Deterministic quadrature oracle for independent (not necessarily iid)
// 1-D data. In dimension one the pattern event is a chain of inequalities
// against the running maximum, so each pattern probability collapses to a nested integral
// over the record values only: every non-record index contributes a CDF
// factor evaluated at the current maximum. Composite midpoint on a grid
// aligned with all support breakpoints, with two resolutions compared for
// the declared error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "recind/core.hpp"
#include "recind/distributions.hpp"
#include "recind/errors.hpp"
#include "recind/joint_pmf.hpp"

namespace recind {

namespace detail {

class QuadratureTables {
public:
    QuadratureTables(const DistributionSpec& spec, int total_cells) : n_(spec.n()) {
        std::vector<double> breaks;
        for (int j = 1; j <= n_; ++j) {
            const Marginal m = spec.marginal(j, 1);
            breaks.push_back(m.support_lo());
            breaks.push_back(m.support_hi());
        }
        std::sort(breaks.begin(), breaks.end());
        std::vector<double> uniq;
        for (double b : breaks) {
            if (uniq.empty() || b - uniq.back() > 1e-12 * (1.0 + std::abs(b))) uniq.push_back(b);
        }
        const double total_len = uniq.back() - uniq.front();
        const auto segments = uniq.size() - 1;

        // Blend equal-per-segment with length-proportional allocation so a
        // narrow support overlapping a wide one still gets resolution.
        for (std::size_t s = 0; s < segments; ++s) {
            const double len = uniq[s + 1] - uniq[s];
            const double share = 0.5 / static_cast<double>(segments) + 0.5 * len / total_len;
            const int cells = std::max(2, static_cast<int>(std::llround(share * total_cells)));
            const double h = len / cells;
            for (int t = 0; t < cells; ++t) {
                mid_.push_back(uniq[s] + (t + 0.5) * h);
                width_.push_back(h);
            }
        }

        pdf_.assign(static_cast<std::size_t>(n_), std::vector<double>(mid_.size()));
        cdf_.assign(static_cast<std::size_t>(n_), std::vector<double>(mid_.size()));
        for (int j = 1; j <= n_; ++j) {
            const Marginal m = spec.marginal(j, 1);
            if (m.cdf(uniq.front()) > 1e-9 || m.cdf(uniq.back()) < 1.0 - 1e-9) {
                throw InputError("unnormalized spec for index " + std::to_string(j) +
                                 ": CDF limits differ from 0/1 by more than 1e-9");
            }
            for (std::size_t i = 0; i < mid_.size(); ++i) {
                const double f = m.pdf(mid_[i]);
                if (!std::isfinite(f)) {
                    throw InputError("non-finite density for index " + std::to_string(j));
                }
                pdf_[static_cast<std::size_t>(j - 1)][i] = f;
                cdf_[static_cast<std::size_t>(j - 1)][i] = m.cdf(mid_[i]);
            }
        }
    }

    std::size_t cells() const { return mid_.size(); }

    // CDF product over the gap following record time t[level]: indices up to
    // the next record for inner levels, up to n for the last.
    double gap_product(const std::vector<int>& t, int level, std::size_t i) const {
        const int lo = t[static_cast<std::size_t>(level)] + 1;
        const int hi = level + 1 < static_cast<int>(t.size()) ? t[static_cast<std::size_t>(level) + 1] - 1 : n_;
        double prod = 1.0;
        for (int j = lo; j <= hi; ++j) prod *= cdf_[static_cast<std::size_t>(j - 1)][i];
        return prod;
    }

    // Density of max(X_1, ..., X_p) at cell i.
    double running_max_pdf(int p, std::size_t i) const {
        double total = 0.0;
        for (int u = 1; u <= p; ++u) {
            double term = pdf_[static_cast<std::size_t>(u - 1)][i];
            for (int v = 1; v <= p; ++v) {
                if (v != u) term *= cdf_[static_cast<std::size_t>(v - 1)][i];
            }
            total += term;
        }
        return total;
    }

    // Pattern-event probability by direct quadrature of the event region. t lists the record
    // times including the leading 1. Suffix sums evaluate each nested
    // integral over the strict region x > m, with a half-cell term for the
    // cell containing m.
    double pattern_prob(const std::vector<int>& t) const {
        const int k = static_cast<int>(t.size()) - 1;
        const std::size_t cells = mid_.size();
        std::vector<double> upper(cells, 1.0);
        std::vector<double> next(cells);
        for (int level = k; level >= 1; --level) {
            const auto& f = pdf_[static_cast<std::size_t>(t[static_cast<std::size_t>(level)] - 1)];
            double acc = 0.0;
            for (std::size_t i = cells; i-- > 0;) {
                const double e = f[i] * gap_product(t, level, i) * upper[i];
                next[i] = acc + 0.5 * e * width_[i];
                acc += e * width_[i];
            }
            upper.swap(next);
        }
        double p = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            p += pdf_[0][i] * gap_product(t, 0, i) * upper[i] * width_[i];
        }
        return p;
    }

    // The factored product: one factor per record block, each the
    // expectation of the block event with the conditioning record value
    // integrated against its law, i.e. the law of the running maximum at
    // the previous record time. The tail block closes the pattern; the
    // empty pattern is the single no-record factor.
    double factor_product(const std::vector<int>& t, std::vector<double>& factors) const {
        const int k = static_cast<int>(t.size()) - 1;
        const std::size_t cells = mid_.size();
        factors.clear();
        if (k == 0) {
            double v = 0.0;
            for (std::size_t i = 0; i < cells; ++i) {
                v += pdf_[0][i] * gap_product(t, 0, i) * width_[i];
            }
            factors.push_back(v);
            return v;
        }
        double prod = 1.0;
        for (int level = 1; level <= k; ++level) {
            const int prev = t[static_cast<std::size_t>(level) - 1];
            const auto& rec_cdf = cdf_[static_cast<std::size_t>(t[static_cast<std::size_t>(level)] - 1)];
            double v = 0.0;
            for (std::size_t i = 0; i < cells; ++i) {
                v += running_max_pdf(prev, i) * gap_product(t, level - 1, i) * (1.0 - rec_cdf[i]) *
                     width_[i];
            }
            factors.push_back(v);
            prod *= v;
        }
        if (t[static_cast<std::size_t>(k)] < n_) {
            double v = 0.0;
            for (std::size_t i = 0; i < cells; ++i) {
                v += running_max_pdf(t[static_cast<std::size_t>(k)], i) * gap_product(t, k, i) * width_[i];
            }
            factors.push_back(v);
            prod *= v;
        }
        return prod;
    }

private:
    int n_;
    std::vector<double> mid_;
    std::vector<double> width_;
    std::vector<std::vector<double>> pdf_;
    std::vector<std::vector<double>> cdf_;
};

inline std::vector<int> record_times(int n, std::uint64_t mask) {
    std::vector<int> t{1};
    for (int j = 2; j <= n; ++j) {
        if (mask >> (j - 2) & 1) t.push_back(j);
    }
    return t;
}

inline void check_quadrature_pre(const DistributionSpec& spec) {
    if (spec.d() != 1) throw InputError("quadrature oracle requires d = 1");
    if (spec.n() > 6) {
        throw CapError("quadrature joint law is capped at n <= 6; got n = " + std::to_string(spec.n()));
    }
}

inline constexpr std::size_t kMaxQuadratureCells = std::size_t{1} << 20;

}  // namespace detail

struct QuadraturePmf {
    JointPmf<double> pmf;
    std::vector<double> declared_errors;  // per outcome, from the two resolutions
    std::size_t cells = 0;
};

// Joint law of (zeta_2, ..., zeta_n) for independent 1-D data. Refines the
// grid (doubling from gridpoints) until every outcome moves by at most
// tolerance between consecutive resolutions.
inline QuadraturePmf joint_pmf_quadrature_1d(const DistributionSpec& spec, int gridpoints = 512,
                                             double tolerance = 1e-6) {
    detail::check_quadrature_pre(spec);
    const int n = spec.n();
    QuadraturePmf out;
    out.pmf.n = n;
    out.pmf.source = PmfSource::Quadrature;
    if (n == 1) {
        out.pmf.probs = {1.0};
        out.declared_errors = {0.0};
        return out;
    }

    const std::uint64_t masks = outcome_count(n);
    auto evaluate = [&](int cells) {
        const detail::QuadratureTables tables(spec, cells);
        std::vector<double> probs(masks);
        for (std::uint64_t mask = 0; mask < masks; ++mask) {
            probs[mask] = tables.pattern_prob(detail::record_times(n, mask));
        }
        return probs;
    };

    int cells = std::max(gridpoints, 64);
    std::vector<double> coarse = evaluate(cells);
    for (;;) {
        std::vector<double> fine = evaluate(2 * cells);
        double worst = 0.0;
        std::vector<double> errors(masks);
        for (std::uint64_t mask = 0; mask < masks; ++mask) {
            errors[mask] = std::abs(fine[mask] - coarse[mask]);
            worst = std::max(worst, errors[mask]);
        }
        if (worst <= tolerance) {
            out.pmf.probs = std::move(fine);
            out.declared_errors = std::move(errors);
            out.cells = static_cast<std::size_t>(2) * cells;
            return out;
        }
        if (static_cast<std::size_t>(cells) * 4 > detail::kMaxQuadratureCells) {
            throw CapError("quadrature did not reach the declared error of " + std::to_string(tolerance) +
                           " within the grid cap");
        }
        coarse = std::move(fine);
        cells *= 2;
    }
}

struct FactorizationCheck {
    double lhs = 0.0;  // pattern-event probability, direct quadrature
    double rhs = 0.0;  // product of the block factors
    std::vector<double> factors;
    double declared_error = 0.0;
    std::size_t cells = 0;
};

// Compares the direct event probability against the factored product for
// one pattern. The two sides agree (up to quadrature error) exactly when
// the block events are independent, which holds for iid specs; for non-iid
// specs the gap is reported, not asserted.
inline FactorizationCheck factorization_check(const DistributionSpec& spec, const RecordPattern& r,
                                                 int gridpoints = 512, double tolerance = 1e-6) {
    detail::check_quadrature_pre(spec);
    if (r.n() != spec.n()) {
        throw InputError("pattern is over n = " + std::to_string(r.n()) + " but spec has n = " +
                         std::to_string(spec.n()));
    }
    const int n = spec.n();
    FactorizationCheck out;
    if (n == 1) {
        out.lhs = out.rhs = 1.0;
        out.factors = {1.0};
        return out;
    }
    std::vector<int> times{1};
    for (int j : r.indices()) times.push_back(j);

    auto evaluate = [&](int cells, std::vector<double>& factors) {
        const detail::QuadratureTables tables(spec, cells);
        return std::pair{tables.pattern_prob(times), tables.factor_product(times, factors)};
    };

    int cells = std::max(gridpoints, 64);
    std::vector<double> factors;
    auto coarse = evaluate(cells, factors);
    for (;;) {
        auto fine = evaluate(2 * cells, factors);
        const double err =
            std::max(std::abs(fine.first - coarse.first), std::abs(fine.second - coarse.second));
        if (err <= tolerance) {
            out.lhs = fine.first;
            out.rhs = fine.second;
            out.factors = factors;
            out.declared_error = err;
            out.cells = static_cast<std::size_t>(2) * cells;
            return out;
        }
        if (static_cast<std::size_t>(cells) * 4 > detail::kMaxQuadratureCells) {
            throw CapError("quadrature did not reach the declared error of " + std::to_string(tolerance) +
                           " within the grid cap");
        }
        coarse = fine;
        cells *= 2;
    }
}

}  // namespace recind
