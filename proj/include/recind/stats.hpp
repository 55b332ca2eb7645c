#pragma once

// Distance between a joint indicator law and the product of its marginals,
// plus the classical diagnostics: mutual-independence G-test and pairwise
// covariances.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "recind/errors.hpp"
#include "recind/joint_pmf.hpp"
#include "recind/rational.hpp"
#include "recind/simulator.hpp"

namespace recind {

template <typename S>
JointPmf<S> product_of_marginals(const JointPmf<S>& pmf, double tol = 1e-9) {
    require_normalized(pmf, tol);
    const std::vector<S> m = marginals(pmf);
    JointPmf<S> out;
    out.n = pmf.n;
    out.source = pmf.source;
    out.probs.assign(pmf.probs.size(), S{1});
    for (std::uint64_t mask = 0; mask < pmf.probs.size(); ++mask) {
        for (int j = 2; j <= pmf.n; ++j) {
            const S& mj = m[static_cast<std::size_t>(j - 2)];
            out.probs[mask] *= (mask >> (j - 2) & 1) ? mj : S{1} - mj;
        }
    }
    return out;
}

// (1/2) sum |p - q|; exact when both tables are rational.
template <typename S>
S tv_distance(const JointPmf<S>& p, const JointPmf<S>& q) {
    if (p.n != q.n) {
        throw InputError("pmfs are over different n: " + std::to_string(p.n) + " vs " +
                         std::to_string(q.n));
    }
    S l1{0};
    for (std::size_t i = 0; i < p.probs.size(); ++i) {
        const S diff = p.probs[i] - q.probs[i];
        l1 += diff < S{0} ? -diff : diff;
    }
    return l1 / S{2};
}

namespace detail {

// Regularized incomplete gamma, upper tail Q(a, x). Series for the lower
// tail when x < a + 1, Lentz continued fraction otherwise.
inline double gamma_q(double a, double x) {
    if (x <= 0.0) return 1.0;
    const double log_prefix = a * std::log(x) - x - std::lgamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(log_prefix);
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(log_prefix) * h;
}

}  // namespace detail

inline double chi_square_tail(double stat, long dof) {
    if (dof < 1) throw InputError("chi-square tail needs dof >= 1");
    return detail::gamma_q(static_cast<double>(dof) / 2.0, stat / 2.0);
}

struct GTestResult {
    bool applicable = false;  // false when dof = 0 (n = 2) or R = 0
    double gstat = 0.0;
    long dof = 0;
    double pvalue = std::numeric_limits<double>::quiet_NaN();
};

// Mutual-independence G-test against expected counts from the empirical
// marginals: G = 2 sum obs ln(obs/expected) over cells with obs > 0
// (zero-observed cells contribute 0), dof = 2^(n-1) - 1 - (n-1).
inline GTestResult g_test(const EmpiricalJointPmf& emp) {
    if (emp.replicates == 0) throw InputError("G-test needs at least one replicate");
    const int n = emp.pmf.n;
    GTestResult out;
    out.dof = static_cast<long>(outcome_count(n)) - 1 - (n - 1);
    if (out.dof < 1) return out;

    const std::vector<double> m = marginals(emp.pmf);
    const double r = static_cast<double>(emp.replicates);
    double g = 0.0;
    for (std::uint64_t mask = 0; mask < emp.counts.size(); ++mask) {
        const double obs = static_cast<double>(emp.counts[mask]);
        if (obs == 0.0) continue;
        double expected = r;
        for (int j = 2; j <= n; ++j) {
            const double mj = m[static_cast<std::size_t>(j - 2)];
            expected *= (mask >> (j - 2) & 1) ? mj : 1.0 - mj;
        }
        g += 2.0 * obs * std::log(obs / expected);
    }
    out.applicable = true;
    out.gstat = g;
    out.pvalue = chi_square_tail(g, out.dof);
    return out;
}

template <typename S>
struct CovarianceEntry {
    int j = 2;
    int jp = 3;
    S covariance{};
};

// Cov(zeta_j, zeta_j') = P(both = 1) - P(zeta_j = 1) P(zeta_j' = 1) for all
// 2 <= j < j' <= n.
template <typename S>
std::vector<CovarianceEntry<S>> pairwise_covariances(const JointPmf<S>& pmf, double tol = 1e-9) {
    require_normalized(pmf, tol);
    const std::vector<S> m = marginals(pmf);
    std::vector<CovarianceEntry<S>> out;
    for (int j = 2; j <= pmf.n; ++j) {
        for (int jp = j + 1; jp <= pmf.n; ++jp) {
            S both{0};
            for (std::uint64_t mask = 0; mask < pmf.probs.size(); ++mask) {
                if ((mask >> (j - 2) & 1) && (mask >> (jp - 2) & 1)) both += pmf.probs[mask];
            }
            out.push_back({j, jp,
                           both - m[static_cast<std::size_t>(j - 2)] * m[static_cast<std::size_t>(jp - 2)]});
        }
    }
    return out;
}

template <typename S>
double max_abs_correlation(const JointPmf<S>& pmf, double tol = 1e-9) {
    const std::vector<S> m = marginals(pmf);
    double best = 0.0;
    for (const auto& entry : pairwise_covariances(pmf, tol)) {
        const double vj = [&] {
            const double x = static_cast<double>(m[static_cast<std::size_t>(entry.j - 2)]);
            return x * (1.0 - x);
        }();
        const double vjp = [&] {
            const double x = static_cast<double>(m[static_cast<std::size_t>(entry.jp - 2)]);
            return x * (1.0 - x);
        }();
        const double denom = std::sqrt(vj * vjp);
        if (denom > 0.0) {
            best = std::max(best, std::abs(static_cast<double>(entry.covariance)) / denom);
        }
    }
    return best;
}

struct IndependenceReport {
    int n = 1;
    double tv = 0.0;  // joint vs product of its marginals
    GTestResult g;
    std::vector<CovarianceEntry<double>> covariances;
    double max_abs_corr = 0.0;
};

inline IndependenceReport make_independence_report(const JointPmf<double>& pmf,
                                                   const EmpiricalJointPmf* counts = nullptr) {
    IndependenceReport out;
    out.n = pmf.n;
    out.tv = tv_distance(pmf, product_of_marginals(pmf));
    out.covariances = pairwise_covariances(pmf);
    out.max_abs_corr = max_abs_correlation(pmf);
    if (counts != nullptr) out.g = g_test(*counts);
    return out;
}

}  // namespace recind
