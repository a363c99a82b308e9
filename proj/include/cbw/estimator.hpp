// Fisher information, Cramer-Rao bounds and maximum-likelihood frequency
// estimation for the Gaussian interferogram model.
//
// Under independent Gaussian intensity noise the MLE is least squares. The
// frequency estimator is two-stage: a dense quadrature-correlation scan with
// 8x oversampling relative to the 1/L Fourier resolution locates the global
// basin, then Gauss-Newton refines the 4-parameter objective
// (offset, amplitude, phase, frequency).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>

#include "cbw/fringes.hpp"
#include "cbw/mat2.hpp"

namespace cbw {

struct FisherReport {
    double info_exact = 0.0;   // (1/sigma^2) sum (dy/df)^2 at the given phase offset
    double info_closed = 0.0;  // b^2 mu^2 M^2 (2 pi)^2 / (2 sigma^2) * sum x^2
    double crlb_var_f = 0.0;   // 1 / info_closed
    double std_k = 0.0;        // sqrt(6) sigma / (2 pi b M mu sqrt(m))
    double frac_std_wavelength = 0.0;  // std_k-style bound / K_M
    double k_m = 0.0;          // fringe count M f L
    double sum_x_sq = 0.0;
};

// sigma = 0 is reported as infinite information with a zero CRLB; b = 0 gives
// zero information and an infinite CRLB.
inline FisherReport fisher_information(const InterferogramParams& p, std::span<const double> x) {
    p.validate();
    if (static_cast<int>(x.size()) != p.samples)
        throw std::invalid_argument("fisher_information: x size does not match params.m");
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const double two_pi = 2.0 * std::numbers::pi;

    FisherReport rep;
    rep.k_m = p.k_m();
    rep.sum_x_sq = second_moment(x);

    const double amp = p.b * p.mu;
    if (p.sigma == 0.0) {
        rep.info_exact = amp > 0.0 ? kInf : 0.0;
        rep.info_closed = amp > 0.0 ? kInf : 0.0;
        rep.crlb_var_f = amp > 0.0 ? 0.0 : kInf;
        rep.std_k = 0.0;
        rep.frac_std_wavelength = 0.0;
        return rep;
    }

    double sum_deriv_sq = 0.0;
    for (double xk : x) {
        const double d = -amp * (two_pi * p.m_order * xk) *
                         std::sin(two_pi * p.f_m() * xk + p.phase_offset);
        sum_deriv_sq += d * d;
    }
    rep.info_exact = sum_deriv_sq / (p.sigma * p.sigma);
    rep.info_closed = amp * amp * p.m_order * p.m_order * two_pi * two_pi /
                      (2.0 * p.sigma * p.sigma) * rep.sum_x_sq;
    rep.crlb_var_f = rep.info_closed > 0.0 ? 1.0 / rep.info_closed : kInf;
    rep.std_k = amp > 0.0
                    ? std::sqrt(6.0) * p.sigma / (two_pi * p.b * p.m_order * p.mu * std::sqrt(p.samples))
                    : kInf;
    rep.frac_std_wavelength = rep.std_k / rep.k_m;
    return rep;
}

// Closed CRLB for the base frequency, with sum x^2 ~ m L^2 / 3 substituted:
// var(f_hat) >= 6 sigma^2 / (b^2 M^2 mu^2 (2 pi)^2 m L^2).
inline double crlb(const InterferogramParams& p) {
    p.validate();
    const double amp = p.b * p.mu;
    if (p.sigma == 0.0) return 0.0;
    if (amp == 0.0) return std::numeric_limits<double>::infinity();
    const double two_pi = 2.0 * std::numbers::pi;
    const double denom = amp * amp * p.m_order * p.m_order * two_pi * two_pi * p.samples *
                         p.wedge_length * p.wedge_length;
    return 6.0 * p.sigma * p.sigma / denom;
}

struct FracWavelengthBound {
    double bound = 0.0;        // lower bound on std(lambda_hat / lambda)
    double snr_product = 0.0;  // effective enhancement diagnostic M * K_M
};

inline FracWavelengthBound fractional_wavelength_uncertainty(const InterferogramParams& p) {
    p.validate();
    const double km = p.k_m();
    if (!(km > 0.0)) throw std::invalid_argument("fractional_wavelength_uncertainty: K_M must be > 0");
    FracWavelengthBound out;
    out.snr_product = p.m_order * km;
    if (p.sigma == 0.0) { out.bound = 0.0; return out; }
    if (p.b == 0.0) { out.bound = std::numeric_limits<double>::infinity(); return out; }
    out.bound = std::sqrt(6.0) * p.sigma /
                (2.0 * std::numbers::pi * p.b * p.m_order * p.mu * std::sqrt(p.samples) * km);
    return out;
}

struct FrequencyWindow {
    double lo = 0.0;  // cycles per unit length, in f_M units
    double hi = 0.0;
};

struct FitResult {
    double f_hat = 0.0;          // estimated record frequency f_M, cycles per unit length
    double amplitude_hat = 0.0;  // estimated mu*b
    double offset_hat = 0.0;     // estimated mu*a
    double phase_hat = 0.0;      // radians, in (-pi, pi]
    double residual_rss = 0.0;
    bool converged = false;
    int iterations = 0;
    bool frequency_identifiable = true;
};

namespace detail {

struct Quadrature {
    double c = 0.0, s = 0.0;
};

// Correlation of the mean-removed record with cos/sin(2 pi f x) via a phasor
// recurrence; x must be a uniform grid (any phase drift is refined away by
// Gauss-Newton afterwards).
inline Quadrature quadrature_sums(std::span<const double> x, std::span<const double> yc, double f) {
    const double two_pi = 2.0 * std::numbers::pi;
    Quadrature q;
    if (x.size() < 2) return q;
    const double dx = x[1] - x[0];
    std::complex<double> z = std::polar(1.0, two_pi * f * x[0]);
    const std::complex<double> w = std::polar(1.0, two_pi * f * dx);
    for (std::size_t k = 0; k < x.size(); ++k) {
        q.c += yc[k] * z.real();
        q.s += yc[k] * z.imag();
        z *= w;
    }
    return q;
}

inline bool solve4(double a[4][5]) {
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) return false;
        if (piv != col)
            for (int c = col; c < 5; ++c) std::swap(a[piv][c], a[col][c]);
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double factor = a[r][col] / a[col][col];
            for (int c = col; c < 5; ++c) a[r][c] -= factor * a[col][c];
        }
    }
    for (int r = 0; r < 4; ++r) a[r][4] /= a[r][r];
    return true;
}

}  // namespace detail

// Two-stage MLE for the record frequency f_M. Non-convergence is reported in
// the result, not thrown; a degenerate window is rejected.
inline FitResult fit_frequency(const Interferogram& rec, FrequencyWindow window) {
    const std::size_t m = rec.x.size();
    if (m != rec.y.size() || m < 8)
        throw std::invalid_argument("fit_frequency: need at least 8 samples");
    if (!(window.lo > 0.0) || !(window.hi > window.lo))
        throw std::invalid_argument("fit_frequency: degenerate frequency window");
    const double length = rec.params.wedge_length;
    if (window.lo * length < 1.0)
        throw std::invalid_argument("fit_frequency: window must contain at least one cycle over L");

    const double two_pi = 2.0 * std::numbers::pi;

    double mean = 0.0;
    for (double v : rec.y) mean += v;
    mean /= static_cast<double>(m);
    std::vector<double> yc(m);
    double scale = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        yc[k] = rec.y[k] - mean;
        scale = std::max(scale, std::abs(yc[k]));
    }

    FitResult fit;
    fit.offset_hat = mean;
    if (scale == 0.0) {  // constant record: frequency unidentifiable
        fit.converged = false;
        fit.frequency_identifiable = false;
        return fit;
    }

    // Stage 1: periodogram-style scan, 8x oversampled vs the 1/L resolution.
    const double step = 1.0 / (8.0 * length);
    const int nsteps = std::max(2, static_cast<int>(std::ceil((window.hi - window.lo) / step)) + 1);
    double best_power = -1.0, best_f = window.lo;
    detail::Quadrature best_q;
    for (int i = 0; i < nsteps; ++i) {
        const double f = std::min(window.lo + i * step, window.hi);
        const detail::Quadrature q = detail::quadrature_sums(rec.x, yc, f);
        const double power = q.c * q.c + q.s * q.s;
        if (power > best_power) { best_power = power; best_f = f; best_q = q; }
    }

    // Stage 2: Gauss-Newton on theta = (offset, amplitude, phase, frequency).
    double offset = mean;
    double amp = 2.0 * std::sqrt(best_power) / static_cast<double>(m);
    double phase = std::atan2(-best_q.s, best_q.c);
    double freq = best_f;

    auto rss_at = [&](double c0, double a0, double p0, double f0) {
        double rss = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double r = rec.y[k] - (c0 + a0 * std::cos(two_pi * f0 * rec.x[k] + p0));
            rss += r * r;
        }
        return rss;
    };

    double rss = rss_at(offset, amp, phase, freq);
    int iter = 0;
    bool step_converged = false;
    for (; iter < 100; ++iter) {
        double jtj[4][5] = {};
        double g[4] = {};
        for (std::size_t k = 0; k < m; ++k) {
            const double u = two_pi * freq * rec.x[k] + phase;
            const double cu = std::cos(u), su = std::sin(u);
            const double j[4] = {1.0, cu, -amp * su, -amp * two_pi * rec.x[k] * su};
            const double r = rec.y[k] - (offset + amp * cu);
            for (int ri = 0; ri < 4; ++ri) {
                for (int ci = ri; ci < 4; ++ci) jtj[ri][ci] += j[ri] * j[ci];
                g[ri] += j[ri] * r;
            }
        }
        for (int ri = 1; ri < 4; ++ri)
            for (int ci = 0; ci < ri; ++ci) jtj[ri][ci] = jtj[ci][ri];
        double sys[4][5];
        for (int ri = 0; ri < 4; ++ri) {
            for (int ci = 0; ci < 4; ++ci) sys[ri][ci] = jtj[ri][ci];
            sys[ri][4] = g[ri];
        }
        if (!detail::solve4(sys)) break;
        double delta[4] = {sys[0][4], sys[1][4], sys[2][4], sys[3][4]};

        // Damped step: halve until the objective does not increase.
        double t = 1.0;
        double new_rss = 0.0;
        bool accepted = false;
        for (int h = 0; h < 25; ++h) {
            new_rss = rss_at(offset + t * delta[0], amp + t * delta[1], phase + t * delta[2],
                             freq + t * delta[3]);
            if (new_rss <= rss * (1.0 + 1e-15)) { accepted = true; break; }
            t *= 0.5;
        }
        if (!accepted) break;
        offset += t * delta[0];
        amp += t * delta[1];
        phase += t * delta[2];
        freq += t * delta[3];
        rss = new_rss;

        const double theta_norm = std::sqrt(offset * offset + amp * amp + phase * phase + freq * freq);
        const double step_norm = t * std::sqrt(delta[0] * delta[0] + delta[1] * delta[1] +
                                               delta[2] * delta[2] + delta[3] * delta[3]);
        if (step_norm < 1e-12 * (theta_norm + 1e-30)) { step_converged = true; ++iter; break; }
    }

    // Normalize: positive amplitude and frequency, phase in (-pi, pi].
    if (amp < 0.0) { amp = -amp; phase += std::numbers::pi; }
    phase = wrap_angle(phase);
    freq = std::abs(freq);

    fit.f_hat = freq;
    fit.amplitude_hat = amp;
    fit.offset_hat = offset;
    fit.phase_hat = phase;
    fit.residual_rss = rss;
    fit.iterations = iter;
    fit.frequency_identifiable = std::abs(amp) > 1e-12 * (scale + 1.0);

    // Declared gradient tolerance for the converged flag: each component of
    // J^T r must be below 1e-8 of its column-scale, or the residual must
    // vanish outright (noiseless records).
    double g[4] = {};
    double colsq[4] = {};
    double rnorm_sq = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double u = two_pi * freq * rec.x[k] + phase;
        const double cu = std::cos(u), su = std::sin(u);
        const double j[4] = {1.0, cu, -amp * su, -amp * two_pi * rec.x[k] * su};
        const double r = rec.y[k] - (offset + amp * cu);
        rnorm_sq += r * r;
        for (int i = 0; i < 4; ++i) {
            g[i] += j[i] * r;
            colsq[i] += j[i] * j[i];
        }
    }
    bool grad_ok = true;
    const double rnorm = std::sqrt(rnorm_sq);
    for (int i = 0; i < 4; ++i) {
        const double tolerance = 1e-8 * std::sqrt(colsq[i]) * rnorm + 1e-12 * (scale + 1.0);
        if (std::abs(g[i]) > tolerance) grad_ok = false;
    }
    if (rnorm <= 1e-10 * (scale + 1.0) * std::sqrt(static_cast<double>(m))) grad_ok = true;
    fit.converged = step_converged && grad_ok && fit.frequency_identifiable;
    return fit;
}

// Frequency-only MLE with offset, amplitude and phase fixed at their known
// values; matches the assumptions behind fisher_information / crlb.
inline FitResult fit_frequency_known_nuisance(const Interferogram& rec, FrequencyWindow window) {
    const std::size_t m = rec.x.size();
    if (m != rec.y.size() || m < 8)
        throw std::invalid_argument("fit_frequency_known_nuisance: need at least 8 samples");
    if (!(window.lo > 0.0) || !(window.hi > window.lo))
        throw std::invalid_argument("fit_frequency_known_nuisance: degenerate frequency window");
    const InterferogramParams& p = rec.params;
    const double two_pi = 2.0 * std::numbers::pi;
    const double amp = p.mu * p.b;
    const double offset = p.mu * p.a;

    FitResult fit;
    fit.amplitude_hat = amp;
    fit.offset_hat = offset;
    fit.phase_hat = wrap_angle(p.phase_offset);
    if (amp == 0.0) {
        fit.frequency_identifiable = false;
        return fit;
    }

    double mean = 0.0;
    for (double v : rec.y) mean += v;
    mean /= static_cast<double>(m);
    std::vector<double> yc(m);
    for (std::size_t k = 0; k < m; ++k) yc[k] = rec.y[k] - mean;

    const double step = 1.0 / (8.0 * p.wedge_length);
    const int nsteps = std::max(2, static_cast<int>(std::ceil((window.hi - window.lo) / step)) + 1);
    double best_power = -1.0, freq = window.lo;
    for (int i = 0; i < nsteps; ++i) {
        const double f = std::min(window.lo + i * step, window.hi);
        const detail::Quadrature q = detail::quadrature_sums(rec.x, yc, f);
        const double power = q.c * q.c + q.s * q.s;
        if (power > best_power) { best_power = power; freq = f; }
    }

    auto rss_at = [&](double f0) {
        double rss = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double r = rec.y[k] - (offset + amp * std::cos(two_pi * f0 * rec.x[k] + p.phase_offset));
            rss += r * r;
        }
        return rss;
    };
    double rss = rss_at(freq);
    int iter = 0;
    bool step_converged = false;
    for (; iter < 100; ++iter) {
        double jtj = 0.0, g = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double u = two_pi * freq * rec.x[k] + p.phase_offset;
            const double j = -amp * two_pi * rec.x[k] * std::sin(u);
            const double r = rec.y[k] - (offset + amp * std::cos(u));
            jtj += j * j;
            g += j * r;
        }
        if (jtj < 1e-300) break;
        double delta = g / jtj;
        double t = 1.0;
        bool accepted = false;
        double new_rss = 0.0;
        for (int h = 0; h < 25; ++h) {
            new_rss = rss_at(freq + t * delta);
            if (new_rss <= rss * (1.0 + 1e-15)) { accepted = true; break; }
            t *= 0.5;
        }
        if (!accepted) break;
        freq += t * delta;
        rss = new_rss;
        if (std::abs(t * delta) < 1e-12 * (std::abs(freq) + 1e-30)) { step_converged = true; ++iter; break; }
    }
    fit.f_hat = std::abs(freq);
    fit.residual_rss = rss;
    fit.iterations = iter;
    fit.converged = step_converged;
    return fit;
}

struct WavelengthEstimate {
    double k_m_hat = 0.0;    // f_hat * L
    double lambda_hat = 0.0; // L / k_m_hat = 1 / f_hat
    double frac_uncertainty = std::numeric_limits<double>::quiet_NaN();
};

inline WavelengthEstimate wavelength_from_fit(const FitResult& fit, double wedge_length) {
    if (!(fit.f_hat > 0.0)) throw std::invalid_argument("wavelength_from_fit: f_hat must be > 0");
    if (!(wedge_length > 0.0)) throw std::invalid_argument("wavelength_from_fit: L must be > 0");
    WavelengthEstimate est;
    est.k_m_hat = fit.f_hat * wedge_length;
    est.lambda_hat = wedge_length / est.k_m_hat;
    return est;
}

// Overload with noise information available: fills the fractional-uncertainty
// bound from the closed CRLB.
inline WavelengthEstimate wavelength_from_fit(const FitResult& fit, const InterferogramParams& p) {
    WavelengthEstimate est = wavelength_from_fit(fit, p.wedge_length);
    est.frac_uncertainty = fractional_wavelength_uncertainty(p).bound;
    return est;
}

}  // namespace cbw
