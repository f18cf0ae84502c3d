#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sirsim::oracles {

double bdp_extinction_cdf_uniformized(double beta, double mu, int64_t l0, double t,
                                      int64_t truncation, double tol) {
    if (l0 == 0) return 1.0;
    if (t <= 0.0) return 0.0;
    if (l0 > truncation) throw std::invalid_argument("uniformized oracle: l0 beyond truncation");

    const auto K = static_cast<size_t>(truncation);
    // Uniformisation rate: fastest total jump rate on the truncated space.
    const double rate = static_cast<double>(truncation) * (beta + mu) + 1.0;

    // One step of the uniformised discrete chain: v <- P v with
    // P = I + Q / rate, state 0 absorbing, births disabled at the cap.
    std::vector<double> v(K + 1, 0.0), next(K + 1, 0.0);
    v[static_cast<size_t>(l0)] = 1.0;

    const double a = rate * t;
    // Poisson(a) weights accumulated forward until the tail is below tol.
    double log_w = -a;  // log weight at n = 0
    double weight_sum = 0.0;
    double result = 0.0;

    for (int64_t n = 0;; ++n) {
        const double w = std::exp(log_w);
        result += w * v[0];
        weight_sum += w;
        if (weight_sum >= 1.0 - tol && n > a) break;
        if (n > 100 * (static_cast<int64_t>(a) + 10))
            throw std::runtime_error("uniformized oracle: weight accumulation failed");

        // v <- P v
        next[0] = v[0] + (mu * 1.0 / rate) * v[1];
        for (size_t x = 1; x <= K; ++x) {
            const double xd = static_cast<double>(x);
            const double up = x < K ? beta * xd : 0.0;
            const double down = mu * xd;
            double acc = (1.0 - (up + down) / rate) * v[x];
            if (x >= 2) acc += (beta * (xd - 1.0) / rate) * v[x - 1];
            if (x < K) acc += (mu * (xd + 1.0) / rate) * v[x + 1];
            next[x] = acc;
        }
        std::swap(v, next);
        log_w += std::log(a) - std::log(static_cast<double>(n + 1));
    }
    return result;
}

std::vector<double> hitting_probabilities_tridiagonal(
    const std::function<double(int64_t)>& up, const std::function<double(int64_t)>& down,
    int64_t barrier) {
    if (barrier < 1) throw std::invalid_argument("tridiagonal oracle: barrier must be >= 1");
    const auto k = static_cast<size_t>(barrier);

    // Unknowns h_1 .. h_{k-1}; h_0 = 0 and h_k = 1 fold into the RHS.
    const size_t m = k - 1;
    std::vector<double> h(k + 1, 0.0);
    h[k] = 1.0;
    if (m == 0) return h;

    std::vector<double> diag(m), lower(m), upper(m), rhs(m, 0.0);
    for (size_t idx = 0; idx < m; ++idx) {
        const auto i = static_cast<int64_t>(idx + 1);
        const double b = up(i);
        const double d = down(i);
        diag[idx] = -(b + d);
        lower[idx] = d;   // coefficient of h_{i-1}
        upper[idx] = b;   // coefficient of h_{i+1}
    }
    rhs[m - 1] = -up(static_cast<int64_t>(m)) * 1.0;  // h_k = 1 contribution

    // Thomas algorithm.
    for (size_t idx = 1; idx < m; ++idx) {
        const double w = lower[idx] / diag[idx - 1];
        diag[idx] -= w * upper[idx - 1];
        rhs[idx] -= w * rhs[idx - 1];
    }
    h[m] = rhs[m - 1] / diag[m - 1];
    for (size_t idx = m - 1; idx >= 1; --idx) {
        h[idx] = (rhs[idx - 1] - upper[idx - 1] * h[idx + 1]) / diag[idx - 1];
    }
    return h;
}

double law_inverse_cdf(const AsymptoticLaw& law, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("law_inverse_cdf: p must be in (0,1)");

    double lo = -1.0;
    double hi = 1.0;
    // Expand the bracket; all supported laws have unbounded support on at
    // least one side.
    while (law.cdf(hi) < p && hi < 1e18) hi *= 2.0;
    while (law.cdf(lo) > p && lo > -1e18) lo *= 2.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (law.cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("two_sample_ks: empty input");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double ks = 0.0;
    size_t ia = 0;
    size_t ib = 0;
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    while (ia < a.size() && ib < b.size()) {
        const double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        ks = std::max(ks, std::fabs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    return ks;
}

}  // namespace sirsim::oracles
