#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gtakagi/beta.hpp"
#include "gtakagi/dynamics.hpp"
#include "gtakagi/errors.hpp"
#include "gtakagi/measure.hpp"
#include "gtakagi/parallel.hpp"
#include "gtakagi/rng.hpp"
#include "gtakagi/takagi.hpp"

namespace gtakagi {

// Standard normal CDF. std::erfc is correctly rounded to a few ulp, which
// keeps the absolute error far below the 1e-12 the KS comparisons need.
inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

// sup_i max(|i/m - Phi(s_i)|, |(i-1)/m - Phi(s_i)|) over the sorted samples.
inline double ks_statistic(std::vector<double> samples) {
    if (samples.empty()) throw empty_sample();
    std::sort(samples.begin(), samples.end());
    double m = static_cast<double>(samples.size());
    double d = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        double phi = normal_cdf(samples[i]);
        double hi = (static_cast<double>(i) + 1.0) / m - phi;
        double lo = phi - static_cast<double>(i) / m;
        d = std::max(d, std::max(hi, lo));
    }
    return std::min(1.0, std::max(0.0, d));
}

// Regularized upper incomplete gamma Q(a,x); chi-square tail probabilities.
inline double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw domain_error("gamma_q needs a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    double log_prefix = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        // series for P(a,x), then Q = 1 - P
        double ap = a;
        double del = 1.0 / a;
        double sum = del;
        for (int i = 0; i < 1000; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-17) break;
        }
        return 1.0 - sum * std::exp(log_prefix);
    }
    // Lentz continued fraction for Q(a,x)
    double b = x + 1.0 - a;
    double c = 1e300;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-17) break;
    }
    return std::exp(log_prefix) * h;
}

inline double chi_square_pvalue(double stat, int df) {
    if (df < 1) throw domain_error("chi-square needs df >= 1");
    return gamma_q(0.5 * static_cast<double>(df), 0.5 * stat);
}

// Pearson statistic + p-value for observed counts against cell probabilities.
inline double chi_square_gof_pvalue(const std::vector<long>& observed,
                                    const std::vector<double>& probs) {
    if (observed.size() != probs.size() || observed.empty())
        throw domain_error("chi-square needs matching nonempty cells");
    long m = 0;
    for (long o : observed) m += o;
    double stat = 0.0;
    int df = -1;
    for (size_t i = 0; i < observed.size(); ++i) {
        double e = probs[i] * static_cast<double>(m);
        if (e <= 0.0) {
            if (observed[i] != 0) return 0.0;
            continue;
        }
        double diff = static_cast<double>(observed[i]) - e;
        stat += diff * diff / e;
        ++df;
    }
    if (df < 1) throw domain_error("chi-square needs at least two live cells");
    return chi_square_pvalue(stat, df);
}

enum class OrbitMode { certified, fast };

inline const char* to_string(OrbitMode m) {
    return m == OrbitMode::certified ? "certified" : "fast";
}

// (1/n) sum_{i<=n} g_i(x) with certified digits.
inline double birkhoff_average(const BetaParam& base, const Enclosure& x, long n) {
    if (n < 1) throw domain_error("n must be >= 1");
    detail::DigitScan scan = detail::scan_digits(base, x, n);
    long ones = 0;
    for (int d : scan.digits) ones += d;
    return static_cast<double>(ones) / static_cast<double>(n);
}

namespace detail {

// One fast digit-sum orbit of length n started at x0 (double steps).
inline long fast_digit_sum(const BetaParam& base, double x0, long n, CounterRng& rng) {
    if (base.is_two()) {
        // tau_2 doubles the mantissa: float iteration would hit 0 after ~53
        // steps. Under m_2 (= Lebesgue) the digits are iid fair bits, so fast
        // mode samples them directly.
        long ones = 0;
        long full = n / 64;
        for (long w = 0; w < full; ++w)
            ones += __builtin_popcountll(rng.next_u64());
        long rest = n - 64 * full;
        if (rest > 0)
            ones += __builtin_popcountll(rng.next_u64() >> (64 - rest));
        return ones;
    }
    double beta = base.beta_double();
    double branch = 1.0 / beta;
    double x = x0;
    long ones = 0;
    for (long i = 0; i < n; ++i) {
        int g = x >= branch ? 1 : 0;
        ones += g;
        x = beta * x - static_cast<double>(g);
        if (x < 0.0) x = 0.0;
        if (x >= 1.0) x = std::nextafter(1.0, 0.0);
    }
    return ones;
}

} // namespace detail

// Fast-mode Birkhoff average from a seeded uniform start.
inline double birkhoff_average_fast(const BetaParam& base, std::uint64_t seed, long n) {
    if (n < 1) throw domain_error("n must be >= 1");
    CounterRng rng(seed, 0);
    double x0 = rng.next_unit();
    long ones = detail::fast_digit_sum(base, x0, n, rng);
    return static_cast<double>(ones) / static_cast<double>(n);
}

struct CltRun {
    std::string beta_label;
    long n = 0;
    long m = 0;
    std::uint64_t seed = 0;
    OrbitMode mode = OrbitMode::fast;
    double m_constant = 0.0;             // M used for centering
    std::vector<double> normalized_sums; // (S_n - n M)/sqrt(n), unscaled by v
    double mean = 0.0;
    double v_hat = 0.0;                  // empirical sd, estimates v0
    double ks_distance = 1.0;            // of normalized_sums / v_hat vs Phi
    std::vector<long> start_cell_counts; // rejection-sampler starts per density cell
    std::vector<double> start_cell_probs;
    struct Bin { double lo; double hi; long count; };
    std::vector<Bin> histogram;          // of normalized_sums / v_hat
};

namespace detail {

struct StartSampler {
    std::vector<double> bp;     // breakpoints as doubles
    std::vector<double> level;  // normalized density per cell
    std::vector<double> prob;   // cell probabilities
    double envelope;            // >= sup density

    explicit StartSampler(const PiecewiseDensity& d) {
        double f = d.F.to_double();
        for (const auto& b : d.breakpoints) bp.push_back(b.to_double());
        double sup = 0.0;
        for (const auto& l : d.levels) {
            double lv = l.to_double() / f;
            level.push_back(lv);
            sup = std::max(sup, lv);
        }
        envelope = sup * (1.0 + 1e-9);
        double total = 0.0;
        for (size_t j = 0; j + 1 < bp.size(); ++j) {
            double p = level[j] * (bp[j + 1] - bp[j]);
            prob.push_back(p);
            total += p;
        }
        for (double& p : prob) p /= total;
    }

    size_t cell_of(double u) const {
        size_t lo = 0, hi = bp.size() - 1;
        while (lo + 1 < hi) {
            size_t mid = (lo + hi) / 2;
            if (u < bp[mid]) hi = mid; else lo = mid;
        }
        return lo;
    }

    // rejection sampling against the piecewise density
    std::pair<double, size_t> draw(CounterRng& rng, std::uint64_t budget) const {
        for (std::uint64_t tries = 0; tries < budget; ++tries) {
            double u = rng.next_unit();
            double v = rng.next_unit();
            size_t cell = cell_of(u);
            if (v * envelope <= level[cell]) return {u, cell};
        }
        throw sample_budget_exceeded(budget);
    }
};

} // namespace detail

// Monte Carlo check of the central limit theorem for f = chi_[1/beta, 1]:
// samples x ~ m_beta, forms (S_n - n M)/sqrt(n) and compares the empirical
// law against the standard normal.
inline CltRun clt_run(const BetaParam& base, const PiecewiseDensity& density, long n,
                      long m, std::uint64_t seed, OrbitMode mode = OrbitMode::fast,
                      int workers = 1) {
    if (m < 100) throw domain_error("clt_run needs m >= 100 samples");
    if (n < 1) throw domain_error("clt_run needs n >= 1");

    CltRun run;
    run.beta_label = base.label();
    run.n = n;
    run.m = m;
    run.seed = seed;
    run.mode = mode;
    run.m_constant = density.M.to_double();

    detail::StartSampler sampler(density);
    run.start_cell_probs = sampler.prob;
    run.normalized_sums.assign(static_cast<size_t>(m), 0.0);
    std::vector<size_t> cells(static_cast<size_t>(m), 0);

    double sqrt_n = std::sqrt(static_cast<double>(n));
    double center = static_cast<double>(n) * run.m_constant;
    parallel_for(m, workers, [&](long i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        auto [x0, cell] = sampler.draw(rng, 100000);
        cells[static_cast<size_t>(i)] = cell;
        long ones;
        if (mode == OrbitMode::fast) {
            ones = detail::fast_digit_sum(base, x0, n, rng);
        } else {
            mpq_class q;
            mpq_set_d(q.get_mpq_t(), x0);
            q.canonicalize();
            detail::DigitScan scan =
                detail::scan_digits(base, Enclosure::from_rational(q, base.precision_bits()), n);
            ones = 0;
            for (int d : scan.digits) ones += d;
        }
        run.normalized_sums[static_cast<size_t>(i)] =
            (static_cast<double>(ones) - center) / sqrt_n;
    });

    run.start_cell_counts.assign(sampler.prob.size(), 0);
    for (size_t c : cells) ++run.start_cell_counts[c];

    double mean = 0.0;
    for (double z : run.normalized_sums) mean += z;
    mean /= static_cast<double>(m);
    run.mean = mean;
    double ss = 0.0;
    for (double z : run.normalized_sums) ss += (z - mean) * (z - mean);
    run.v_hat = std::sqrt(ss / static_cast<double>(m - 1));
    if (!(run.v_hat > 0.0)) throw internal_error("degenerate v_hat");

    std::vector<double> scaled(run.normalized_sums);
    for (double& z : scaled) z /= run.v_hat;
    run.ks_distance = ks_statistic(scaled);

    const int nbins = 40;
    const double zlo = -4.0, zhi = 4.0;
    run.histogram.assign(nbins, CltRun::Bin{0, 0, 0});
    double width = (zhi - zlo) / nbins;
    for (int b = 0; b < nbins; ++b) {
        run.histogram[static_cast<size_t>(b)].lo = zlo + b * width;
        run.histogram[static_cast<size_t>(b)].hi = zlo + (b + 1) * width;
    }
    for (double z : scaled) {
        int b = static_cast<int>(std::floor((z - zlo) / width));
        b = std::clamp(b, 0, nbins - 1);
        ++run.histogram[static_cast<size_t>(b)].count;
    }
    return run;
}

} // namespace gtakagi
