#include "latsnf/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace latsnf {

namespace {

// Regularized lower incomplete gamma P(a, x) by series expansion (x < a+1).
double gamma_p_series(double a, double x) {
    double sum = 1.0 / a, term = sum;
    for (int n = 1; n < 1000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by continued fraction (x >= a+1).
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
    for (int i = 1; i < 1000; ++i) {
        double an = -double(i) * (double(i) - a);
        b += 2;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi_square_sf(double x, double df) {
    if (x <= 0) return 1.0;
    double a = df / 2, half = x / 2;
    if (half < a + 1) return 1.0 - gamma_p_series(a, half);
    return gamma_q_cf(a, half);
}

double chi_square_stat(const std::vector<double>& observed,
                       const std::vector<double>& expected) {
    if (observed.size() != expected.size())
        throw std::invalid_argument("chi_square_stat: length mismatch");
    double s = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double d = observed[i] - expected[i];
        s += d * d / expected[i];
    }
    return s;
}

double tv_against(const std::vector<double>& counts,
                  const std::vector<double>& probs) {
    if (counts.size() != probs.size())
        throw std::invalid_argument("tv_against: length mismatch");
    double n = 0;
    for (double c : counts) n += c;
    double tv = 0;
    for (std::size_t i = 0; i < counts.size(); ++i)
        tv += std::fabs(counts[i] / n - probs[i]);
    return tv / 2;
}

double tv_confidence_radius(std::size_t cells, std::size_t samples) {
    return 3.0 * std::sqrt(double(cells) / (2.0 * double(samples)));
}

}  // namespace latsnf
