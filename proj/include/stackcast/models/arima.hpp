#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace stackcast::models {

inline constexpr std::size_t kMaxArimaOrder = 4;
inline constexpr std::size_t kMaxDifferencing = 4;
inline constexpr std::size_t kMinArimaObservations = 50;

std::vector<double> difference(std::span<const double> x);

// KPSS level-stationarity statistic with a Bartlett long-run variance.
double kpss_statistic(std::span<const double> x, std::size_t lags);
std::size_t kpss_lags(std::size_t n);  // floor(12 (n/100)^(1/4))
inline constexpr double kKpssCritical5 = 0.463;

// t statistic on y[t-1] in dy = a + b y[t-1] + sum g_i dy[t-i].
double adf_statistic(std::span<const double> x, std::size_t lags);
std::size_t adf_lags(std::size_t n);   // floor(12 (n/100)^(1/4))
double adf_critical5(std::size_t n);   // constant, no trend

// Differencing count (<= max_d) at which each test first accepts stationarity.
std::size_t ndiffs_kpss(std::span<const double> x, std::size_t max_d = kMaxDifferencing);
std::size_t ndiffs_adf(std::span<const double> x, std::size_t max_d = kMaxDifferencing);

struct ArimaModel {
    std::size_t p = 0, d = 0, q = 0;
    bool has_mean = false;
    double mu = 0.0;
    Eigen::VectorXd phi, theta;
    double sigma2 = 0.0;
    double aic = 0.0;

    // One-step forecast of the next value of the undifferenced series.
    double forecast(std::span<const double> history) const;
};

// Conditional-sum-of-squares fit of ARMA(p, q) on an already differenced
// series, residuals summed from index `start` on. Returns false when the
// optimum is not finite.
bool fit_arma_css(std::span<const double> w, std::size_t p, std::size_t q, bool with_mean, std::size_t start,
                  ArimaModel& out);

// Largest eigenvalue modulus of the companion matrix of 1 - a1 z - ... - ak z^k.
double max_companion_modulus(const Eigen::VectorXd& a);
// Candidates with an AR or MA root this close to the unit circle are dropped.
inline constexpr double kMaxRootModulus = 0.999;
bool stationary_and_invertible(const ArimaModel& m);

struct ArimaCandidate {
    std::size_t p, q;
    double aic;  // +inf when the fit failed
};

// d = max(KPSS, ADF) capped at 4, then (p, q) in [0, 4]^2 by AIC on a common
// sample, skipping non-stationary or non-invertible fits. Falls back to
// (0, d, 0). Throws below 50 observations.
ArimaModel select_arima_order(std::span<const double> x, std::vector<ArimaCandidate>* candidates = nullptr);

}  // namespace stackcast::models
