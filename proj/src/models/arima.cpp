#include "stackcast/models/arima.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace stackcast::models {

std::vector<double> difference(std::span<const double> x) {
    std::vector<double> out;
    if (x.size() < 2) return out;
    out.reserve(x.size() - 1);
    for (std::size_t i = 1; i < x.size(); ++i) out.push_back(x[i] - x[i - 1]);
    return out;
}

std::size_t kpss_lags(std::size_t n) { return std::size_t(std::floor(12.0 * std::pow(double(n) / 100.0, 0.25))); }
std::size_t adf_lags(std::size_t n) { return std::size_t(std::floor(12.0 * std::pow(double(n) / 100.0, 0.25))); }

double adf_critical5(std::size_t n) {
    const double T = double(n);
    return -2.8621 - 2.738 / T - 8.36 / (T * T);
}

double kpss_statistic(std::span<const double> x, std::size_t lags) {
    const std::size_t n = x.size();
    if (n < 3) throw std::invalid_argument("kpss: series too short");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= double(n);
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = x[i] - mean;
    double s = 0.0, eta = 0.0;
    for (double v : e) {
        s += v;
        eta += s * s;
    }
    eta /= double(n) * double(n);
    double lrv = 0.0;
    for (double v : e) lrv += v * v;
    lrv /= double(n);
    lags = std::min(lags, n - 1);
    for (std::size_t k = 1; k <= lags; ++k) {
        double c = 0.0;
        for (std::size_t t = k; t < n; ++t) c += e[t] * e[t - k];
        lrv += 2.0 * (1.0 - double(k) / double(lags + 1)) * c / double(n);
    }
    if (!(lrv > 0.0)) return 0.0;  // flat series: nothing to reject
    return eta / lrv;
}

double adf_statistic(std::span<const double> x, std::size_t lags) {
    const auto dx = difference(x);
    // rows t = lags .. dx.size()-1; regressors 1, x[t], dx[t-1..t-lags]
    if (dx.size() <= 2 * lags + 3) throw std::invalid_argument("adf: series too short for the lag order");
    const std::size_t rows = dx.size() - lags, cols = 2 + lags;
    Eigen::MatrixXd A(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    Eigen::VectorXd b(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = r + lags;
        b(static_cast<Eigen::Index>(r)) = dx[t];
        A(static_cast<Eigen::Index>(r), 0) = 1.0;
        A(static_cast<Eigen::Index>(r), 1) = x[t];
        for (std::size_t i = 1; i <= lags; ++i) A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(1 + i)) = dx[t - i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < A.cols()) return -std::numeric_limits<double>::infinity();
    const Eigen::VectorXd beta = qr.solve(b);
    const Eigen::VectorXd resid = b - A * beta;
    const double s2 = resid.squaredNorm() / double(rows - cols);
    const Eigen::MatrixXd inv = (A.transpose() * A).inverse();
    const double se = std::sqrt(s2 * inv(1, 1));
    if (!(se > 0.0)) return -std::numeric_limits<double>::infinity();
    return beta(1) / se;
}

std::size_t ndiffs_kpss(std::span<const double> x, std::size_t max_d) {
    std::vector<double> cur(x.begin(), x.end());
    std::size_t d = 0;
    while (d < max_d && cur.size() > 3 && kpss_statistic(cur, kpss_lags(cur.size())) > kKpssCritical5) {
        cur = difference(cur);
        ++d;
    }
    return d;
}

std::size_t ndiffs_adf(std::span<const double> x, std::size_t max_d) {
    std::vector<double> cur(x.begin(), x.end());
    std::size_t d = 0;
    while (d < max_d) {
        const std::size_t k = adf_lags(cur.size());
        if (cur.size() <= 2 * k + 5) break;
        if (adf_statistic(cur, k) < adf_critical5(cur.size() - 1 - k)) break;
        cur = difference(cur);
        ++d;
    }
    return d;
}

namespace {

// beta = [mu?] phi theta
struct ArmaLayout {
    std::size_t p, q;
    bool mean;
    std::size_t size() const { return (mean ? 1 : 0) + p + q; }
};

// Residuals for t >= start (earlier residuals are 0) and optionally their Jacobian.
double css_residuals(std::span<const double> w, const ArmaLayout& L, const Eigen::VectorXd& beta, std::size_t start,
                     Eigen::VectorXd& r, Eigen::MatrixXd* J) {
    const std::size_t n = w.size();
    const std::size_t k = L.size();
    const std::size_t off = L.mean ? 1 : 0;
    const double mu = L.mean ? beta(0) : 0.0;
    std::vector<double> e(n, 0.0);
    Eigen::MatrixXd de = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    r.resize(static_cast<Eigen::Index>(n - start));
    if (J) J->resize(static_cast<Eigen::Index>(n - start), static_cast<Eigen::Index>(k));
    double ss = 0.0;
    for (std::size_t t = start; t < n; ++t) {
        double v = w[t] - mu;
        for (std::size_t i = 1; i <= L.p; ++i) v -= beta(static_cast<Eigen::Index>(off + i - 1)) * (w[t - i] - mu);
        for (std::size_t j = 1; j <= L.q; ++j) v -= beta(static_cast<Eigen::Index>(off + L.p + j - 1)) * e[t - j];
        e[t] = v;
        r(static_cast<Eigen::Index>(t - start)) = v;
        ss += v * v;
        if (!J) continue;
        // d e_t / d beta
        auto row = de.row(static_cast<Eigen::Index>(t));
        if (L.mean) {
            double s = -1.0;
            for (std::size_t i = 1; i <= L.p; ++i) s += beta(static_cast<Eigen::Index>(off + i - 1));
            row(0) = s;
        }
        for (std::size_t i = 1; i <= L.p; ++i) row(static_cast<Eigen::Index>(off + i - 1)) = -(w[t - i] - mu);
        for (std::size_t j = 1; j <= L.q; ++j) row(static_cast<Eigen::Index>(off + L.p + j - 1)) = -e[t - j];
        for (std::size_t j = 1; j <= L.q; ++j) {
            if (t - j >= start) row -= beta(static_cast<Eigen::Index>(off + L.p + j - 1)) * de.row(static_cast<Eigen::Index>(t - j));
        }
        J->row(static_cast<Eigen::Index>(t - start)) = row;
    }
    return ss;
}

// Hannan-Rissanen: long AR for innovations, then OLS on lags and lagged innovations.
Eigen::VectorXd initial_guess(std::span<const double> w, const ArmaLayout& L) {
    const std::size_t n = w.size();
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(L.size()));
    double mean = 0.0;
    for (double v : w) mean += v;
    mean /= double(n);
    if (L.mean) beta(0) = mean;
    if (L.p + L.q == 0) return beta;
    const double mu = L.mean ? mean : 0.0;

    std::vector<double> eps(n, 0.0);
    const std::size_t m = std::min<std::size_t>(std::max<std::size_t>(L.p + L.q + 4, 8), n / 4);
    if (L.q > 0 && m > 0 && n > 3 * m) {
        Eigen::MatrixXd A(static_cast<Eigen::Index>(n - m), static_cast<Eigen::Index>(m));
        Eigen::VectorXd b(static_cast<Eigen::Index>(n - m));
        for (std::size_t t = m; t < n; ++t) {
            b(static_cast<Eigen::Index>(t - m)) = w[t] - mu;
            for (std::size_t i = 1; i <= m; ++i) A(static_cast<Eigen::Index>(t - m), static_cast<Eigen::Index>(i - 1)) = w[t - i] - mu;
        }
        const Eigen::VectorXd a = A.colPivHouseholderQr().solve(b);
        const Eigen::VectorXd res = b - A * a;
        for (std::size_t t = m; t < n; ++t) eps[t] = res(static_cast<Eigen::Index>(t - m));
    }
    const std::size_t s = std::max(L.p, L.q) + (L.q > 0 ? m : 0);
    if (n <= s + L.p + L.q + 2) return beta;
    Eigen::MatrixXd A(static_cast<Eigen::Index>(n - s), static_cast<Eigen::Index>(L.p + L.q));
    Eigen::VectorXd b(static_cast<Eigen::Index>(n - s));
    for (std::size_t t = s; t < n; ++t) {
        b(static_cast<Eigen::Index>(t - s)) = w[t] - mu;
        for (std::size_t i = 1; i <= L.p; ++i) A(static_cast<Eigen::Index>(t - s), static_cast<Eigen::Index>(i - 1)) = w[t - i] - mu;
        for (std::size_t j = 1; j <= L.q; ++j) A(static_cast<Eigen::Index>(t - s), static_cast<Eigen::Index>(L.p + j - 1)) = eps[t - j];
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    if (c.allFinite()) beta.tail(static_cast<Eigen::Index>(L.p + L.q)) = c;
    // keep the MA part inside the unit circle region where CSS is well behaved
    for (std::size_t j = 0; j < L.q; ++j) {
        auto& v = beta(static_cast<Eigen::Index>((L.mean ? 1 : 0) + L.p + j));
        v = std::clamp(v, -0.9, 0.9);
    }
    return beta;
}

}  // namespace

double max_companion_modulus(const Eigen::VectorXd& a) {
    const Eigen::Index k = a.size();
    if (k == 0) return 0.0;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(k, k);
    C.row(0) = a.transpose();
    for (Eigen::Index i = 1; i < k; ++i) C(i, i - 1) = 1.0;
    if (!C.allFinite()) return std::numeric_limits<double>::infinity();
    return Eigen::EigenSolver<Eigen::MatrixXd>(C, false).eigenvalues().cwiseAbs().maxCoeff();
}

bool stationary_and_invertible(const ArimaModel& m) {
    return max_companion_modulus(m.phi) < kMaxRootModulus && max_companion_modulus(-m.theta) < kMaxRootModulus;
}

bool fit_arma_css(std::span<const double> w, std::size_t p, std::size_t q, bool with_mean, std::size_t start,
                  ArimaModel& out) {
    const ArmaLayout L{p, q, with_mean};
    if (start < std::max(p, q) || w.size() <= start + L.size() + 1) return false;
    Eigen::VectorXd beta = initial_guess(w, L);
    Eigen::VectorXd r;
    Eigen::MatrixXd J;
    double ss = css_residuals(w, L, beta, start, r, &J);
    if (!std::isfinite(ss)) {
        beta.tail(static_cast<Eigen::Index>(p + q)).setZero();
        ss = css_residuals(w, L, beta, start, r, &J);
    }
    if (!std::isfinite(ss)) return false;

    double lambda = 1e-3;
    for (int iter = 0; iter < 200 && L.size() > 0; ++iter) {
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        bool improved = false;
        for (int tries = 0; tries < 12; ++tries) {
            Eigen::MatrixXd M = JtJ;
            M.diagonal() += lambda * (JtJ.diagonal().array() + 1e-12).matrix();
            const Eigen::VectorXd step = M.ldlt().solve(-g);
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            const Eigen::VectorXd cand = beta + step;
            Eigen::VectorXd r2;
            Eigen::MatrixXd J2;
            const double ss2 = css_residuals(w, L, cand, start, r2, &J2);
            if (std::isfinite(ss2) && ss2 < ss) {
                const double rel = (ss - ss2) / std::max(ss, 1e-300);
                beta = cand;
                r = std::move(r2);
                J = std::move(J2);
                ss = ss2;
                lambda = std::max(lambda / 10.0, 1e-12);
                improved = true;
                if (rel < 1e-12 || step.norm() < 1e-12 * (1.0 + beta.norm())) iter = 1 << 20;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) break;
    }

    const double n_eff = double(w.size() - start);
    const double sigma2 = ss / n_eff;
    if (!std::isfinite(sigma2) || !(sigma2 > 0.0)) return false;
    const double loglik = -0.5 * n_eff * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0);
    out.p = p;
    out.q = q;
    out.has_mean = with_mean;
    const std::size_t off = with_mean ? 1 : 0;
    out.mu = with_mean ? beta(0) : 0.0;
    out.phi = beta.segment(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(p));
    out.theta = beta.segment(static_cast<Eigen::Index>(off + p), static_cast<Eigen::Index>(q));
    out.sigma2 = sigma2;
    out.aic = -2.0 * loglik + 2.0 * double(p + q + off + 1);
    return std::isfinite(out.aic);
}

ArimaModel select_arima_order(std::span<const double> x, std::vector<ArimaCandidate>* candidates) {
    if (x.size() < kMinArimaObservations) {
        throw std::invalid_argument("arima needs at least " + std::to_string(kMinArimaObservations) +
                                    " observations, got " + std::to_string(x.size()));
    }
    const std::size_t d = std::min(kMaxDifferencing, std::max(ndiffs_kpss(x), ndiffs_adf(x)));
    std::vector<double> w(x.begin(), x.end());
    for (std::size_t k = 0; k < d; ++k) w = difference(w);
    const bool mean = d == 0;
    const std::size_t start = kMaxArimaOrder;

    ArimaModel best;
    best.aic = std::numeric_limits<double>::infinity();
    if (candidates) candidates->clear();
    for (std::size_t p = 0; p <= kMaxArimaOrder; ++p) {
        for (std::size_t q = 0; q <= kMaxArimaOrder; ++q) {
            ArimaModel m;
            const bool ok = fit_arma_css(w, p, q, mean, start, m) && stationary_and_invertible(m);
            if (candidates) candidates->push_back({p, q, ok ? m.aic : std::numeric_limits<double>::infinity()});
            if (ok && m.aic < best.aic) best = m;
        }
    }
    if (!std::isfinite(best.aic)) {
        best = ArimaModel{};
        if (mean) {
            double s = 0.0;
            for (double v : w) s += v;
            best.mu = s / double(w.size());
            best.has_mean = true;
        }
        best.phi.resize(0);
        best.theta.resize(0);
    }
    best.d = d;
    return best;
}

double ArimaModel::forecast(std::span<const double> history) const {
    std::vector<double> y;
    y.reserve(history.size());
    for (double v : history) {
        if (std::isfinite(v)) y.push_back(v);
    }
    if (y.empty()) return has_mean ? mu : 0.0;
    if (y.size() <= d + std::max(p, q)) return d == 0 ? (has_mean ? mu : 0.0) : y.back();

    std::vector<double> w = y;
    for (std::size_t k = 0; k < d; ++k) w = difference(w);
    const std::size_t n = w.size();
    const std::size_t s = std::max(p, q);
    std::vector<double> e(n, 0.0);
    auto predict_at = [&](std::size_t t) {
        double v = mu;
        for (std::size_t i = 1; i <= p; ++i) v += phi(static_cast<Eigen::Index>(i - 1)) * (w[t - i] - mu);
        for (std::size_t j = 1; j <= q; ++j) v += theta(static_cast<Eigen::Index>(j - 1)) * e[t - j];
        return v;
    };
    for (std::size_t t = s; t < n; ++t) e[t] = w[t] - predict_at(t);
    w.push_back(0.0);
    e.push_back(0.0);
    const double w_next = predict_at(n);

    // undo differencing: y_T = w_T - sum_{k=1..d} C(d,k) (-1)^k y_{T-k}
    double y_next = w_next;
    double binom = 1.0;
    for (std::size_t k = 1; k <= d; ++k) {
        binom = binom * double(d - k + 1) / double(k);
        y_next -= binom * ((k % 2) ? -1.0 : 1.0) * y[y.size() - k];
    }
    return y_next;
}

}  // namespace stackcast::models
