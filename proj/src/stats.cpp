#include "klepto/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>

#include "klepto/error.hpp"

namespace klepto {

double chi2_sf(double stat, unsigned dof)
{
    if (dof == 0)
        return 1.0;
    if (stat <= 0.0)
        return 1.0;
    return boost::math::gamma_q(dof / 2.0, stat / 2.0);
}

double ks_sf(double lambda)
{
    if (lambda <= 0.0)
        return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 200; ++j) {
        double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < 1e-12)
            break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

struct MergedBins {
    std::vector<double> observed1;
    std::vector<double> observed2; // empty for goodness-of-fit
    std::vector<double> expected1;
    std::vector<double> expected2;
};

// Merge adjacent bins until each expected count reaches min_expected.
MergedBins merge_bins(std::span<const double> obs1, std::span<const double> obs2,
                      std::span<const double> exp1, std::span<const double> exp2,
                      double min_expected)
{
    MergedBins out;
    double o1 = 0, o2 = 0, e1 = 0, e2 = 0;
    for (std::size_t i = 0; i < obs1.size(); ++i) {
        o1 += obs1[i];
        e1 += exp1[i];
        if (!obs2.empty()) {
            o2 += obs2[i];
            e2 += exp2[i];
        }
        bool full = e1 >= min_expected && (obs2.empty() || e2 >= min_expected);
        if (full) {
            out.observed1.push_back(o1);
            out.expected1.push_back(e1);
            if (!obs2.empty()) {
                out.observed2.push_back(o2);
                out.expected2.push_back(e2);
            }
            o1 = o2 = e1 = e2 = 0;
        }
    }
    // fold a short tail into the last bin
    if (e1 > 0 || o1 > 0) {
        if (out.observed1.empty()) {
            out.observed1.push_back(o1);
            out.expected1.push_back(e1);
            if (!obs2.empty()) {
                out.observed2.push_back(o2);
                out.expected2.push_back(e2);
            }
        } else {
            out.observed1.back() += o1;
            out.expected1.back() += e1;
            if (!obs2.empty()) {
                out.observed2.back() += o2;
                out.expected2.back() += e2;
            }
        }
    }
    return out;
}

} // namespace

Chi2Result chi2_two_sample(std::span<const std::uint64_t> h1, std::span<const std::uint64_t> h2)
{
    if (h1.size() != h2.size())
        throw ValidationError("histograms must have the same number of bins");
    double n1 = 0, n2 = 0;
    for (std::uint64_t v : h1) n1 += static_cast<double>(v);
    for (std::uint64_t v : h2) n2 += static_cast<double>(v);
    if (n1 == 0 || n2 == 0)
        throw ValidationError("histograms must be non-empty");

    // pooled expectation per bin, proportional to each sample size
    std::vector<double> obs1(h1.begin(), h1.end());
    std::vector<double> obs2(h2.begin(), h2.end());
    std::vector<double> exp1(h1.size()), exp2(h1.size());
    for (std::size_t i = 0; i < h1.size(); ++i) {
        double pooled = (obs1[i] + obs2[i]) / (n1 + n2);
        exp1[i] = pooled * n1;
        exp2[i] = pooled * n2;
    }
    MergedBins bins = merge_bins(obs1, obs2, exp1, exp2, 5.0);
    if (bins.observed1.size() < 2)
        return Chi2Result{0.0, 1.0, 0};

    double stat = 0.0;
    for (std::size_t i = 0; i < bins.observed1.size(); ++i) {
        if (bins.expected1[i] > 0)
            stat += (bins.observed1[i] - bins.expected1[i]) *
                    (bins.observed1[i] - bins.expected1[i]) / bins.expected1[i];
        if (bins.expected2[i] > 0)
            stat += (bins.observed2[i] - bins.expected2[i]) *
                    (bins.observed2[i] - bins.expected2[i]) / bins.expected2[i];
    }
    unsigned dof = static_cast<unsigned>(bins.observed1.size() - 1);
    return Chi2Result{stat, chi2_sf(stat, dof), dof};
}

Chi2Result chi2_goodness_of_fit(std::span<const std::uint64_t> observed,
                                std::span<const double> expected)
{
    if (observed.size() != expected.size())
        throw ValidationError("observed and expected must have the same number of bins");
    std::vector<double> obs(observed.begin(), observed.end());
    MergedBins bins = merge_bins(obs, {}, expected, {}, 5.0);
    if (bins.observed1.size() < 2)
        return Chi2Result{0.0, 1.0, 0};
    double stat = 0.0;
    for (std::size_t i = 0; i < bins.observed1.size(); ++i)
        stat += (bins.observed1[i] - bins.expected1[i]) * (bins.observed1[i] - bins.expected1[i]) /
                bins.expected1[i];
    unsigned dof = static_cast<unsigned>(bins.observed1.size() - 1);
    return Chi2Result{stat, chi2_sf(stat, dof), dof};
}

Chi2Result chi2_uniform(std::span<const std::uint64_t> observed)
{
    double total = 0;
    for (std::uint64_t v : observed) total += static_cast<double>(v);
    std::vector<double> expected(observed.size(), total / static_cast<double>(observed.size()));
    return chi2_goodness_of_fit(observed, expected);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty())
        throw ValidationError("KS test needs non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        double f1 = static_cast<double>(i) / static_cast<double>(a.size());
        double f2 = static_cast<double>(j) / static_cast<double>(b.size());
        d = std::max(d, std::abs(f1 - f2));
    }
    double ne = static_cast<double>(a.size()) * static_cast<double>(b.size()) /
                static_cast<double>(a.size() + b.size());
    double sqrt_ne = std::sqrt(ne);
    double lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;
    return KsResult{d, ks_sf(lambda)};
}

KsResult ks_uniform01(std::vector<double> samples)
{
    if (samples.empty())
        throw ValidationError("KS test needs non-empty samples");
    std::sort(samples.begin(), samples.end());
    double d = 0.0;
    std::size_t n = samples.size();
    for (std::size_t i = 0; i < n; ++i) {
        double cdf = std::clamp(samples[i], 0.0, 1.0);
        double above = static_cast<double>(i + 1) / static_cast<double>(n) - cdf;
        double below = cdf - static_cast<double>(i) / static_cast<double>(n);
        d = std::max({d, above, below});
    }
    double sqrt_n = std::sqrt(static_cast<double>(n));
    double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    return KsResult{d, ks_sf(lambda)};
}

} // namespace klepto
