#include "stackcast/preprocess/yeo_johnson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <limits>
#include <string>
#include <vector>

namespace stackcast::prep {

namespace {

constexpr double kLambdaEps = 1e-12;

}  // namespace

double yeo_johnson(double y, double lambda) {
    if (y >= 0.0) {
        const double l = std::log1p(y);
        return std::abs(lambda) < kLambdaEps ? l : std::expm1(lambda * l) / lambda;
    }
    const double l = std::log1p(-y);
    const double m = 2.0 - lambda;
    return std::abs(m) < kLambdaEps ? -l : -std::expm1(m * l) / m;
}

namespace {

// log1p(|y|) and the lambda-free jacobian term, computed once per fit.
struct LogCache {
    std::vector<double> l;
    std::vector<char> neg;
    double jac = 0.0;
    std::vector<double> z;

    explicit LogCache(std::span<const double> y) : l(y.size()), neg(y.size()), z(y.size()) {
        for (std::size_t i = 0; i < y.size(); ++i) {
            l[i] = std::log1p(std::abs(y[i]));
            neg[i] = y[i] < 0.0;
            jac += neg[i] ? -l[i] : l[i];
        }
    }

    double log_likelihood(double lambda) {
        const double n = double(l.size());
        const double m = 2.0 - lambda;
        const bool lam0 = std::abs(lambda) < kLambdaEps, m0 = std::abs(m) < kLambdaEps;
        double mean = 0.0;
        for (std::size_t i = 0; i < l.size(); ++i) {
            if (neg[i]) z[i] = m0 ? -l[i] : -std::expm1(m * l[i]) / m;
            else z[i] = lam0 ? l[i] : std::expm1(lambda * l[i]) / lambda;
            mean += z[i];
        }
        mean /= n;
        double var = 0.0;
        for (double v : z) var += (v - mean) * (v - mean);
        var /= n;
        if (!(var > 0.0) || !std::isfinite(var)) return -std::numeric_limits<double>::infinity();
        return -0.5 * n * std::log(var) + (lambda - 1.0) * jac;
    }
};

}  // namespace

double yj_log_likelihood(std::span<const double> y, double lambda) { return LogCache(y).log_likelihood(lambda); }

ColumnTransform fit_transform(std::span<const MaybeReal> values, const FitOptions& options) {
    std::vector<double> y;
    y.reserve(values.size());
    for (const auto& v : values) {
        if (v) y.push_back(*v);
    }
    if (y.size() < options.min_values) {
        throw std::invalid_argument("transform needs at least " + std::to_string(options.min_values) +
                                    " present values, got " + std::to_string(y.size()));
    }
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) {
        throw std::invalid_argument("zero variance");
    }

    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = options.lambda_lo, b = options.lambda_hi;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    LogCache cache(y);
    double fc = cache.log_likelihood(c), fd = cache.log_likelihood(d);
    while (b - a > options.tolerance) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = cache.log_likelihood(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = cache.log_likelihood(d);
        }
    }

    ColumnTransform t;
    t.lambda = 0.5 * (a + b);
    double mean = 0.0;
    std::vector<double> z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        z[i] = yeo_johnson(y[i], t.lambda);
        mean += z[i];
    }
    mean /= double(z.size());
    double var = 0.0;
    for (double v : z) var += (v - mean) * (v - mean);
    var /= double(z.size());
    if (!(var > 0.0) || !std::isfinite(var)) throw std::invalid_argument("zero variance");
    t.mean = mean;
    t.sd = std::sqrt(var);
    return t;
}

ColumnTransform fit_transform_or_constant(std::span<const MaybeReal> values, const FitOptions& options) {
    try {
        return fit_transform(values, options);
    } catch (const std::invalid_argument&) {
        ColumnTransform t;
        t.constant = true;
        return t;
    }
}

double apply(const MaybeReal& value, const ColumnTransform& t, bool is_test) {
    if (!value || t.constant) return 0.0;
    const double z = (yeo_johnson(*value, t.lambda) - t.mean) / t.sd;
    return is_test ? std::clamp(z, -t.cap, t.cap) : z;
}

std::vector<double> apply(std::span<const MaybeReal> values, const ColumnTransform& t, bool is_test) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = apply(values[i], t, is_test);
    return out;
}

}  // namespace stackcast::prep
