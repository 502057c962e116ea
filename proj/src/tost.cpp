#include "twinenv/tost.hpp"

#include <cmath>

#include "twinenv/types.hpp"

namespace twinenv {

using nlohmann::json;

namespace {

// Continued-fraction evaluation of the regularized incomplete beta function
// (Lentz's method).
double betacf(double a, double b, double x) {
    constexpr int MAX_ITER = 300;
    constexpr double EPS = 1e-15;
    constexpr double FPMIN = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < FPMIN) d = FPMIN;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= MAX_ITER; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < FPMIN) d = FPMIN;
        c = 1.0 + aa / c;
        if (std::fabs(c) < FPMIN) c = FPMIN;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < FPMIN) d = FPMIN;
        c = 1.0 + aa / c;
        if (std::fabs(c) < FPMIN) c = FPMIN;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < EPS) break;
    }
    return h;
}

double reg_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

struct SampleStats {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation (ddof = 1)
    int64_t n = 0;
};

SampleStats summarize(std::span<const double> xs) {
    SampleStats s;
    s.n = static_cast<int64_t>(xs.size());
    for (const double x : xs) {
        if (!std::isfinite(x)) {
            throw ConfigError("tost_equivalence: samples must be finite");
        }
        s.mean += x;
    }
    s.mean /= static_cast<double>(s.n);
    double ss = 0.0;
    for (const double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    return s;
}

}  // namespace

double student_t_cdf(double t, double df) {
    if (df <= 0.0) throw ConfigError("student_t_cdf: df must be positive");
    if (t == 0.0) return 0.5;
    const double x = df / (df + t * t);
    const double p = 0.5 * reg_incomplete_beta(0.5 * df, 0.5, x);
    return t > 0.0 ? 1.0 - p : p;
}

TostResult tost_equivalence(std::span<const double> samples_a,
                            std::span<const double> samples_b, TostConfig config) {
    if (config.margin_delta <= 0.0) {
        throw ConfigError("tost_equivalence: margin delta must be positive");
    }
    if (config.alpha <= 0.0 || config.alpha >= 0.5) {
        throw ConfigError("tost_equivalence: alpha must lie in (0, 0.5)");
    }
    if (samples_a.size() < 2 || samples_b.size() < 2) {
        throw ConfigError("tost_equivalence: each sample needs n >= 2");
    }

    const SampleStats a = summarize(samples_a);
    const SampleStats b = summarize(samples_b);

    TostResult r;
    r.mean_a = a.mean;
    r.mean_b = b.mean;
    r.std_a = a.sd;
    r.std_b = b.sd;
    r.n_a = a.n;
    r.n_b = b.n;

    const double d = a.mean - b.mean;
    const double va = a.sd * a.sd / static_cast<double>(a.n);
    const double vb = b.sd * b.sd / static_cast<double>(b.n);
    const double se = std::sqrt(va + vb);

    if (se == 0.0) {
        r.degenerate = true;
        r.equivalent = std::fabs(d) < config.margin_delta;
        r.p_lower = r.p_upper = r.equivalent ? 0.0 : 1.0;
        return r;
    }

    r.t_lower = (d + config.margin_delta) / se;
    r.t_upper = (d - config.margin_delta) / se;
    // Welch-Satterthwaite degrees of freedom
    r.df = (va + vb) * (va + vb) /
           (va * va / static_cast<double>(a.n - 1) + vb * vb / static_cast<double>(b.n - 1));
    r.p_lower = 1.0 - student_t_cdf(r.t_lower, r.df);
    r.p_upper = student_t_cdf(r.t_upper, r.df);
    r.equivalent = r.p_lower < config.alpha && r.p_upper < config.alpha;
    return r;
}

json TostResult::to_json() const {
    return json{{"mean_a", mean_a},     {"mean_b", mean_b},   {"std_a", std_a},
                {"std_b", std_b},       {"n_a", n_a},         {"n_b", n_b},
                {"t_lower", t_lower},   {"t_upper", t_upper}, {"df", df},
                {"p_lower", p_lower},   {"p_upper", p_upper}, {"equivalent", equivalent},
                {"degenerate", degenerate}};
}

}  // namespace twinenv
