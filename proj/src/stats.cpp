#include "rwls/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rwls {

Interval wilson_interval(long long k, long long n, double z) {
    if (n <= 0) return {0, 1};
    double p = static_cast<double>(k) / n;
    double z2 = z * z;
    double den = 1 + z2 / n;
    double c = (p + z2 / (2.0 * n)) / den;
    double h = z * std::sqrt(p * (1 - p) / n + z2 / (4.0 * n * n)) / den;
    // the endpoints are exact at k = 0 and k = n; rounding would leave them off by an ulp
    return {k == 0 ? 0.0 : std::max(0.0, c - h), k == n ? 1.0 : std::min(1.0, c + h)};
}

MeanEstimate mean_ci_from_sums(double sum, double sum_sq, long long n, double level) {
    MeanEstimate m;
    m.n = n;
    if (n == 0) return m;
    m.mean = sum / n;
    double var = n > 1 ? std::max(0.0, (sum_sq - n * m.mean * m.mean) / (n - 1)) : 0.0;
    m.se = std::sqrt(var / n);
    double q = 1.959963984540054;
    if (n > 1) {
        boost::math::students_t t(static_cast<double>(n - 1));
        q = boost::math::quantile(t, 0.5 + level / 2);
    }
    m.lo = m.mean - q * m.se;
    m.hi = m.mean + q * m.se;
    return m;
}

MeanEstimate mean_ci(const std::vector<double>& xs, double level) {
    // two-pass for accuracy
    long long n = static_cast<long long>(xs.size());
    if (n == 0) return {};
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return mean_ci_from_sums(mean * n, ss + n * mean * mean, n, level);
}

double chi_square_sf(double x, int df) {
    if (df <= 0) return 1;
    if (x <= 0) return 1;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), x));
}

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

TestResult chi_square_gof(const std::vector<long long>& observed, const std::vector<double>& probs,
                          double min_expected) {
    if (observed.size() != probs.size()) throw std::invalid_argument("size mismatch");
    long long n = std::accumulate(observed.begin(), observed.end(), 0LL);
    std::vector<double> e;
    std::vector<double> o;
    double ce = 0, co = 0;
    for (size_t i = 0; i < observed.size(); ++i) {
        ce += probs[i] * n;
        co += observed[i];
        if (ce >= min_expected) {
            e.push_back(ce);
            o.push_back(co);
            ce = co = 0;
        }
    }
    if (ce > 0 || co > 0) {
        if (e.empty()) {
            e.push_back(ce);
            o.push_back(co);
        } else {
            e.back() += ce;
            o.back() += co;
        }
    }
    TestResult r;
    for (size_t i = 0; i < e.size(); ++i)
        if (e[i] > 0) r.statistic += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
    r.df = static_cast<int>(e.size()) - 1;
    r.p_value = chi_square_sf(r.statistic, r.df);
    return r;
}

TestResult chi_square_independence(const std::vector<std::vector<long long>>& table,
                                   double min_expected) {
    size_t rows = table.size();
    if (rows < 2) return {};
    size_t cols = table[0].size();
    // pool sparse columns left to right
    std::vector<std::vector<double>> t(rows);
    std::vector<double> acc(rows, 0);
    auto col_expect_ok = [&](const std::vector<double>& c) {
        double total = 0, grand = 0;
        for (size_t r = 0; r < rows; ++r) total += c[r];
        for (const auto& row : table) grand += std::accumulate(row.begin(), row.end(), 0.0);
        for (size_t r = 0; r < rows; ++r) {
            double rs = std::accumulate(table[r].begin(), table[r].end(), 0.0);
            if (grand > 0 && rs * total / grand < min_expected) return false;
        }
        return true;
    };
    for (size_t c = 0; c < cols; ++c) {
        for (size_t r = 0; r < rows; ++r) acc[r] += table[r][c];
        if (col_expect_ok(acc)) {
            for (size_t r = 0; r < rows; ++r) t[r].push_back(acc[r]);
            std::fill(acc.begin(), acc.end(), 0);
        }
    }
    if (std::any_of(acc.begin(), acc.end(), [](double x) { return x > 0; })) {
        if (t[0].empty())
            for (size_t r = 0; r < rows; ++r) t[r].push_back(acc[r]);
        else
            for (size_t r = 0; r < rows; ++r) t[r].back() += acc[r];
    }
    size_t k = t[0].size();
    std::vector<double> rs(rows, 0), cs(k, 0);
    double grand = 0;
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < k; ++c) {
            rs[r] += t[r][c];
            cs[c] += t[r][c];
            grand += t[r][c];
        }
    TestResult res;
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < k; ++c) {
            double e = rs[r] * cs[c] / grand;
            if (e > 0) res.statistic += (t[r][c] - e) * (t[r][c] - e) / e;
        }
    int nonzero_rows = static_cast<int>(std::count_if(rs.begin(), rs.end(), [](double x) { return x > 0; }));
    res.df = (nonzero_rows - 1) * (static_cast<int>(k) - 1);
    res.p_value = chi_square_sf(res.statistic, res.df);
    return res;
}

TestResult chi_square_two_sample(const std::vector<long long>& a, const std::vector<long long>& b,
                                 double min_expected) {
    return chi_square_independence({a, b}, min_expected);
}

TestResult poisson_gof(const std::vector<long long>& counts, double lambda) {
    long long mx = 0;
    for (auto c : counts) mx = std::max(mx, c);
    std::vector<long long> obs(mx + 2, 0);
    for (auto c : counts) ++obs[c];
    boost::math::poisson_distribution<> pd(lambda);
    std::vector<double> probs(mx + 2);
    double used = 0;
    for (long long k = 0; k <= mx; ++k) {
        probs[k] = boost::math::pdf(pd, static_cast<double>(k));
        used += probs[k];
    }
    probs[mx + 1] = std::max(0.0, 1 - used);
    return chi_square_gof(obs, probs);
}

double ks_uniform(std::vector<double> s) {
    std::sort(s.begin(), s.end());
    double n = static_cast<double>(s.size()), d = 0;
    for (size_t i = 0; i < s.size(); ++i)
        d = std::max({d, (i + 1) / n - s[i], s[i] - i / n});
    return d;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    size_t n = std::max(p.size(), q.size());
    double tv = 0;
    for (size_t i = 0; i < n; ++i) {
        double a = i < p.size() ? p[i] : 0, b = i < q.size() ? q[i] : 0;
        tv += std::abs(a - b);
    }
    return tv / 2;
}

}  // namespace rwls
