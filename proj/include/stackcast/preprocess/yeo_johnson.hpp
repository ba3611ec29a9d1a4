#pragma once

#include <span>
#include <vector>

#include "stackcast/common/csv.hpp"

namespace stackcast::prep {

inline constexpr double kDefaultCap = 4.5;
inline constexpr std::size_t kMinFitValues = 30;

struct ColumnTransform {
    double lambda = 1.0;
    double mean = 0.0;
    double sd = 1.0;
    double cap = kDefaultCap;
    // Fallback for columns too sparse or flat to fit: every output is 0.
    bool constant = false;

    bool operator==(const ColumnTransform&) const = default;
};

double yeo_johnson(double y, double lambda);

// Gaussian profile log-likelihood of lambda (constants dropped).
double yj_log_likelihood(std::span<const double> y, double lambda);

struct FitOptions {
    double lambda_lo = -5.0;
    double lambda_hi = 5.0;
    double tolerance = 1e-6;
    std::size_t min_values = kMinFitValues;
};

// Golden-section search for lambda, then mean / population sd of the
// transformed present values. Throws std::invalid_argument on too few present
// values or "zero variance".
ColumnTransform fit_transform(std::span<const MaybeReal> values, const FitOptions& options = {});

// As fit_transform but never throws: too few values or a flat column give the
// constant transform.
ColumnTransform fit_transform_or_constant(std::span<const MaybeReal> values, const FitOptions& options = {});

// Power transform and standardize; missing -> 0; test rows clamped to +-cap.
double apply(const MaybeReal& value, const ColumnTransform& t, bool is_test);
std::vector<double> apply(std::span<const MaybeReal> values, const ColumnTransform& t, bool is_test);

}  // namespace stackcast::prep
