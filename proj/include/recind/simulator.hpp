#pragma once

// Reproducible Monte Carlo over independent multivariate paths. Replicate t
// draws from a stream keyed by (master seed, t) and all accumulators are
// integers, so any partition of the replicate range over threads produces
// bit-identical results.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "recind/core.hpp"
#include "recind/distributions.hpp"
#include "recind/errors.hpp"
#include "recind/joint_pmf.hpp"
#include "recind/rational.hpp"
#include "recind/rng.hpp"

namespace recind {

struct ExperimentConfig {
    int n;
    int d;
    DistributionSpec spec;
    std::uint64_t replicates = 1;
    std::uint64_t seed = 0;
    bool run_chain = true;
    bool run_dominance = true;
    std::uint64_t cap_states = std::uint64_t{1} << 20;  // max joint-table size
    int threads = 0;                                    // 0: RECIND_THREADS env, else 1

    ExperimentConfig(int n_, int d_) : n(n_), d(d_), spec(n_, d_) {}

    void validate() const {
        if (n < 1 || d < 1) throw InputError("experiment needs n >= 1 and d >= 1");
        if (spec.n() != n || spec.d() != d) throw InputError("spec shape does not match experiment");
        if (replicates < 1) throw InputError("experiment needs replicates >= 1");
        if (!run_chain && !run_dominance) throw InputError("no semantics mode requested");
        const double per_replicate = static_cast<double>(n) * static_cast<double>(d);
        if (per_replicate > 1e7) throw CapError("n * d exceeds the per-replicate budget of 1e7");
    }
};

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("RECIND_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) {
            throw InputError("RECIND_THREADS must be an integer >= 1");
        }
        return static_cast<int>(v);
    }
    return 1;
}

namespace detail {

// Row-major n x d draws; replicate streams never depend on scheduling.
inline void sample_coords(const DistributionSpec& spec, std::uint64_t seed, std::uint64_t replicate,
                          std::vector<double>& buffer) {
    const int n = spec.n();
    const int d = spec.d();
    buffer.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
    RngStream stream(seed, replicate);
    std::size_t at = 0;
    for (int j = 1; j <= n; ++j) {
        for (int i = 1; i <= d; ++i) {
            buffer[at++] = spec.marginal(j, i).quantile(stream.next_uniform());
        }
    }
}

}  // namespace detail

// Deterministic function of (seed, replicate_index).
inline Path sample_path(const DistributionSpec& spec, std::uint64_t seed, std::uint64_t replicate) {
    std::vector<double> buffer;
    detail::sample_coords(spec, seed, replicate, buffer);
    std::vector<Observation> obs;
    obs.reserve(static_cast<std::size_t>(spec.n()));
    for (int j = 0; j < spec.n(); ++j) {
        const auto* row = buffer.data() + static_cast<std::size_t>(j) * spec.d();
        obs.emplace_back(std::vector<double>(row, row + spec.d()));
    }
    return Path(std::move(obs));
}

struct LSummary {
    double mean = 0.0;
    double variance = 0.0;  // sample variance; 0 when replicates == 1
    std::uint64_t min_records = 0;
    std::uint64_t max_records = 0;
    std::uint64_t replicates = 0;
};

struct EmpiricalJointPmf {
    JointPmf<double> pmf;
    std::vector<std::uint64_t> counts;
    std::uint64_t replicates = 0;
    std::vector<double> std_errors;  // sqrt(phat (1 - phat) / R) per outcome
};

struct ModeResult {
    SemanticsMode mode = SemanticsMode::Chain;
    std::optional<EmpiricalJointPmf> joint;      // absent when 2^(n-1) > cap_states
    LSummary l_summary;
    std::vector<std::uint64_t> marginal_counts;  // [j - 2] = #{zeta_j = 1}, j in 2..n
};

struct ExperimentResult {
    std::uint64_t replicates = 0;
    std::vector<ModeResult> modes;
};

namespace detail {

struct ModeAccumulator {
    std::vector<std::uint64_t> counts;  // empty when the joint table is disabled
    std::vector<std::uint64_t> marg;
    std::uint64_t sum_l = 0;
    std::uint64_t sum_l2 = 0;
    std::uint64_t min_l = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t max_l = 0;

    void merge(const ModeAccumulator& other) {
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
        for (std::size_t i = 0; i < marg.size(); ++i) marg[i] += other.marg[i];
        sum_l += other.sum_l;
        sum_l2 += other.sum_l2;
        min_l = std::min(min_l, other.min_l);
        max_l = std::max(max_l, other.max_l);
    }
};

inline ModeAccumulator make_accumulator(int n, bool with_table) {
    ModeAccumulator acc;
    if (with_table) acc.counts.assign(outcome_count(n), 0);
    acc.marg.assign(static_cast<std::size_t>(n - 1), 0);
    return acc;
}

inline void run_replicates(const ExperimentConfig& cfg, bool with_table, std::uint64_t lo,
                           std::uint64_t hi, ModeAccumulator* chain, ModeAccumulator* dominance) {
    const int n = cfg.n;
    const int d = cfg.d;
    std::vector<double> buffer;
    for (std::uint64_t t = lo; t < hi; ++t) {
        sample_coords(cfg.spec, cfg.seed, t, buffer);
        for (ModeAccumulator* acc : {chain, dominance}) {
            if (!acc) continue;
            RecordDetector det(acc == chain ? SemanticsMode::Chain : SemanticsMode::Dominance);
            std::uint64_t mask = 0;
            std::uint64_t l = 0;
            for (int j = 1; j <= n; ++j) {
                const std::span<const double> row(buffer.data() + static_cast<std::size_t>(j - 1) * d,
                                                  static_cast<std::size_t>(d));
                const int bit = det.step(row);
                l += static_cast<std::uint64_t>(bit);
                if (j >= 2 && bit) {
                    acc->marg[static_cast<std::size_t>(j - 2)]++;
                    if (n - 1 < 63) mask |= std::uint64_t{1} << (j - 2);
                }
            }
            if (with_table) acc->counts[mask]++;
            acc->sum_l += l;
            acc->sum_l2 += l * l;
            acc->min_l = std::min(acc->min_l, l);
            acc->max_l = std::max(acc->max_l, l);
        }
    }
}

inline ModeResult finish_mode(SemanticsMode mode, const ModeAccumulator& acc, std::uint64_t replicates,
                              int n) {
    ModeResult out;
    out.mode = mode;
    out.marginal_counts = acc.marg;
    const long double r = static_cast<long double>(replicates);
    LSummary l;
    l.replicates = replicates;
    l.mean = static_cast<double>(static_cast<long double>(acc.sum_l) / r);
    if (replicates > 1) {
        const long double centered =
            static_cast<long double>(acc.sum_l2) -
            static_cast<long double>(acc.sum_l) * static_cast<long double>(acc.sum_l) / r;
        l.variance = static_cast<double>(centered / (r - 1.0L));
    }
    l.min_records = acc.min_l;
    l.max_records = acc.max_l;
    out.l_summary = l;
    if (!acc.counts.empty()) {
        EmpiricalJointPmf joint;
        joint.replicates = replicates;
        joint.counts = acc.counts;
        joint.pmf.n = n;
        joint.pmf.source = PmfSource::Empirical;
        joint.pmf.probs.reserve(acc.counts.size());
        joint.std_errors.reserve(acc.counts.size());
        for (std::uint64_t c : acc.counts) {
            const double p = static_cast<double>(c) / static_cast<double>(replicates);
            joint.pmf.probs.push_back(p);
            joint.std_errors.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(replicates)));
        }
        out.joint = std::move(joint);
    }
    return out;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const bool with_table = cfg.n - 1 < 63 && outcome_count(cfg.n) <= cfg.cap_states;
    const std::uint64_t r = cfg.replicates;
    const int threads = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(resolve_threads(cfg.threads)), r));

    std::vector<detail::ModeAccumulator> chain_parts;
    std::vector<detail::ModeAccumulator> dom_parts;
    for (int c = 0; c < threads; ++c) {
        if (cfg.run_chain) chain_parts.push_back(detail::make_accumulator(cfg.n, with_table));
        if (cfg.run_dominance) dom_parts.push_back(detail::make_accumulator(cfg.n, with_table));
    }

    const std::uint64_t chunk = (r + threads - 1) / threads;
    if (threads == 1) {
        detail::run_replicates(cfg, with_table, 0, r, cfg.run_chain ? &chain_parts[0] : nullptr,
                               cfg.run_dominance ? &dom_parts[0] : nullptr);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int c = 0; c < threads; ++c) {
            const std::uint64_t lo = chunk * static_cast<std::uint64_t>(c);
            const std::uint64_t hi = std::min(r, lo + chunk);
            pool.emplace_back([&, c, lo, hi] {
                detail::run_replicates(cfg, with_table, lo, hi,
                                       cfg.run_chain ? &chain_parts[static_cast<std::size_t>(c)] : nullptr,
                                       cfg.run_dominance ? &dom_parts[static_cast<std::size_t>(c)] : nullptr);
            });
        }
        for (auto& th : pool) th.join();
        for (int c = 1; c < threads; ++c) {
            if (cfg.run_chain) chain_parts[0].merge(chain_parts[static_cast<std::size_t>(c)]);
            if (cfg.run_dominance) dom_parts[0].merge(dom_parts[static_cast<std::size_t>(c)]);
        }
    }

    ExperimentResult out;
    out.replicates = r;
    if (cfg.run_chain) {
        out.modes.push_back(detail::finish_mode(SemanticsMode::Chain, chain_parts[0], r, cfg.n));
    }
    if (cfg.run_dominance) {
        out.modes.push_back(detail::finish_mode(SemanticsMode::Dominance, dom_parts[0], r, cfg.n));
    }
    return out;
}

struct TvReport {
    double tv = 0.0;
    std::vector<double> z_scores;
    double max_abs_z = 0.0;
};

// Per-outcome z uses the binomial standard error under the reference
// probability; a reference of exactly 0 or 1 yields z = 0 when the
// empirical cell agrees and infinity otherwise.
inline TvReport empirical_tv_report(const EmpiricalJointPmf& emp, const JointPmf<double>& reference) {
    if (emp.pmf.n != reference.n) {
        throw InputError("empirical pmf has n = " + std::to_string(emp.pmf.n) +
                         " but reference has n = " + std::to_string(reference.n));
    }
    TvReport out;
    out.z_scores.reserve(emp.pmf.probs.size());
    double l1 = 0.0;
    for (std::size_t i = 0; i < emp.pmf.probs.size(); ++i) {
        const double phat = emp.pmf.probs[i];
        const double p = reference.probs[i];
        const double diff = phat - p;
        l1 += std::abs(diff);
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(emp.replicates));
        double z = 0.0;
        if (se > 0.0) {
            z = diff / se;
        } else if (diff != 0.0) {
            z = diff > 0.0 ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
        }
        out.z_scores.push_back(z);
        out.max_abs_z = std::max(out.max_abs_z, std::abs(z));
    }
    out.tv = 0.5 * l1;
    return out;
}

inline TvReport empirical_tv_report(const EmpiricalJointPmf& emp, const JointPmf<Rational>& reference) {
    return empirical_tv_report(emp, to_double_pmf(reference));
}

}  // namespace recind
