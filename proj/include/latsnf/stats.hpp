#pragma once

#include <cstddef>
#include <vector>

namespace latsnf {

// Survival function of the chi-square distribution with df degrees of
// freedom: P[X >= x].  Regularized incomplete gamma, series + continued
// fraction.
double chi_square_sf(double x, double df);

// Pearson chi-square statistic of observed counts against given expected
// counts (same length, expected > 0).
double chi_square_stat(const std::vector<double>& observed,
                       const std::vector<double>& expected);

// Total variation distance between an empirical distribution (counts over K
// cells, n total) and explicit probabilities.
double tv_against(const std::vector<double>& counts,
                  const std::vector<double>& probs);

// Confidence radius used with empirical TV estimates over K cells and n
// samples: 3 * sqrt(K / (2 n)).
double tv_confidence_radius(std::size_t cells, std::size_t samples);

}  // namespace latsnf
