#pragma once

#include <cstdint>
#include <vector>

namespace rwls {

struct Interval {
    double lo = 0, hi = 0;
};

// Wilson score interval for k successes in n trials.
Interval wilson_interval(long long k, long long n, double z = 1.959963984540054);

struct MeanEstimate {
    double mean = 0, se = 0, lo = 0, hi = 0;
    long long n = 0;
};

// Student-t interval for the mean.
MeanEstimate mean_ci(const std::vector<double>& xs, double level = 0.95);
MeanEstimate mean_ci_from_sums(double sum, double sum_sq, long long n, double level = 0.95);

struct TestResult {
    double statistic = 0;
    int df = 0;
    double p_value = 1;
};

// Goodness of fit of observed counts to category probabilities; categories with
// small expectation are pooled with their right neighbour.
TestResult chi_square_gof(const std::vector<long long>& observed, const std::vector<double>& probs,
                          double min_expected = 5);
// Homogeneity of two histograms over the same categories.
TestResult chi_square_two_sample(const std::vector<long long>& a, const std::vector<long long>& b,
                                 double min_expected = 5);
// Poisson(lambda) fit of a sample of counts.
TestResult poisson_gof(const std::vector<long long>& counts, double lambda);
// Independence in an r x c contingency table.
TestResult chi_square_independence(const std::vector<std::vector<long long>>& table,
                                   double min_expected = 5);

double ks_uniform(std::vector<double> samples);
double total_variation(const std::vector<double>& p, const std::vector<double>& q);
double normal_quantile(double p);
double chi_square_sf(double x, int df);

}  // namespace rwls
