#pragma once

#include <cstdint>
#include <span>

#include <json.hpp>

namespace twinenv {

// Student's t CDF via the regularized incomplete beta function; relative
// accuracy around 1e-8 over the ranges used here.
double student_t_cdf(double t, double df);

struct TostConfig {
    double margin_delta = 1.0;  // equivalence margin, return units; must be > 0
    double alpha = 0.05;        // significance level in (0, 0.5)
};

// Two one-sided tests with Welch (unequal-variance) statistics.
// d = mean_a - mean_b, SE = sqrt(s_a^2/n_a + s_b^2/n_b),
// t_lower = (d + delta)/SE, t_upper = (d - delta)/SE,
// p_lower = P(T_df >= t_lower), p_upper = P(T_df <= t_upper);
// equivalent iff both p-values are below alpha.
// SE == 0 sets the degenerate flag and decides by |d| < delta directly.
struct TostResult {
    double mean_a = 0.0, mean_b = 0.0;
    double std_a = 0.0, std_b = 0.0;
    int64_t n_a = 0, n_b = 0;
    double t_lower = 0.0, t_upper = 0.0;
    double df = 0.0;
    double p_lower = 1.0, p_upper = 1.0;
    bool equivalent = false;
    bool degenerate = false;

    nlohmann::json to_json() const;
};

TostResult tost_equivalence(std::span<const double> samples_a,
                            std::span<const double> samples_b, TostConfig config);

}  // namespace twinenv
