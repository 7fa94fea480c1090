#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace klepto {

struct StatReport {
    std::string test_name;
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t sample_size = 0;
    double alpha = 0.001; // per-test threshold after any correction
    bool pass = true;     // p_value >= alpha
};

// Upper tail of the chi-square distribution with dof degrees of freedom.
double chi2_sf(double stat, unsigned dof);

// Q_KS(lambda) = 2 * sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double ks_sf(double lambda);

struct Chi2Result {
    double statistic = 0.0;
    double p_value = 1.0;
    unsigned dof = 0;
};

// Two-sample chi-square over aligned histograms. Adjacent bins are merged
// until every pooled expected count is >= 5, which keeps the approximation
// valid for sparse histograms (e.g. the toy curve's two-value leading byte).
Chi2Result chi2_two_sample(std::span<const std::uint64_t> h1, std::span<const std::uint64_t> h2);

// Goodness of fit against given expected counts, with the same bin merging.
Chi2Result chi2_goodness_of_fit(std::span<const std::uint64_t> observed,
                                std::span<const double> expected);

// Uniform special case: every bin expects total/bins.
Chi2Result chi2_uniform(std::span<const std::uint64_t> observed);

struct KsResult {
    double statistic = 0.0; // max |F1 - F2|
    double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov with the asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample KS against the uniform distribution on [0, 1).
KsResult ks_uniform01(std::vector<double> samples);

} // namespace klepto
