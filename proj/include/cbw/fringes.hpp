// Ideal M-fold interference curves and synthetic noisy Fizeau interferograms.
//
// The interferogram model is y_k = mu*(a + b*cos(2*pi*M*f*x_k + phase)) + n_k
// with n_k ~ N(0, sigma^2) from the counter-based generator in noise.hpp.
// Sample positions are the midpoint grid x_k = (k + 1/2) * L / m, which keeps
// sum x_k^2 -> m L^2 / 3 convergence clean and avoids a zero-information
// sample at x = 0. Negative y_k are kept; the Gaussian model is exactly what
// the Fisher analysis assumes.

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbw/noise.hpp"

namespace cbw {

struct FringeCurve {
    std::vector<double> phi_values;
    std::vector<double> i_a;  // i0 * cos^2(M*phi/2)
    std::vector<double> i_b;  // i0 * sin^2(M*phi/2)
    int m_order = 1;
    double i0 = 1.0;
};

inline FringeCurve ideal_fringes(int m_order, double i0, std::span<const double> phi_grid) {
    if (m_order < 1) throw std::invalid_argument("ideal_fringes: M must be >= 1");
    if (!(i0 > 0.0)) throw std::invalid_argument("ideal_fringes: i0 must be > 0");
    if (phi_grid.empty()) throw std::invalid_argument("ideal_fringes: empty grid");
    FringeCurve out;
    out.m_order = m_order;
    out.i0 = i0;
    out.phi_values.assign(phi_grid.begin(), phi_grid.end());
    out.i_a.reserve(phi_grid.size());
    out.i_b.reserve(phi_grid.size());
    for (double phi : phi_grid) {
        const double c = std::cos(0.5 * m_order * phi);
        const double s = std::sin(0.5 * m_order * phi);
        out.i_a.push_back(i0 * c * c);
        out.i_b.push_back(i0 * s * s);
    }
    return out;
}

struct InterferogramParams {
    double mu = 1.0;           // mean detected intensity, counts per sample
    double a = 1.0;            // dimensionless offset
    double b = 1.0;            // visibility, in [0, 1] and <= a
    double f = 0.0;            // base spatial frequency, cycles per unit length
    int m_order = 1;           // number of coupled MZIs (M)
    double phase_offset = 0.0; // radians
    double sigma = 0.0;        // Gaussian noise std, counts
    int samples = 0;           // m
    double wedge_length = 1.0; // L, length units

    double f_m() const { return m_order * f; }          // effective frequency M*f
    double k_m() const { return f_m() * wedge_length; } // fringe count K_M = M*f*L
    double lambda_m() const { return wedge_length / k_m(); } // effective wavelength L/K_M
    double snr_amp() const {
        return sigma > 0.0 ? b * mu / sigma : std::numeric_limits<double>::infinity();
    }

    void validate() const {
        if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("params: mu must be > 0");
        if (!std::isfinite(a)) throw std::invalid_argument("params: a must be finite");
        if (!(b >= 0.0) || !(b <= 1.0)) throw std::invalid_argument("params: b must be in [0, 1]");
        if (b > a) throw std::invalid_argument("params: b <= a required (nonnegative signal)");
        if (!(f > 0.0) || !std::isfinite(f)) throw std::invalid_argument("params: f must be > 0");
        if (m_order < 1) throw std::invalid_argument("params: M must be >= 1");
        if (!std::isfinite(phase_offset)) throw std::invalid_argument("params: non-finite phase");
        if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("params: sigma must be >= 0");
        if (samples < 1) throw std::invalid_argument("params: m must be >= 1");
        if (!(wedge_length > 0.0) || !std::isfinite(wedge_length))
            throw std::invalid_argument("params: L must be > 0");
    }
};

struct Interferogram {
    std::vector<double> x;
    std::vector<double> y;
    InterferogramParams params;
    std::uint64_t seed = 0;
};

inline std::vector<double> midpoint_grid(int m, double length) {
    std::vector<double> x(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) x[static_cast<std::size_t>(k)] = (k + 0.5) * length / m;
    return x;
}

inline double model_value(const InterferogramParams& p, double x) {
    return p.mu * (p.a + p.b * std::cos(2.0 * std::numbers::pi * p.f_m() * x + p.phase_offset));
}

inline Interferogram synthesize(const InterferogramParams& p, std::uint64_t seed) {
    p.validate();
    Interferogram rec;
    rec.params = p;
    rec.seed = seed;
    rec.x = midpoint_grid(p.samples, p.wedge_length);
    rec.y.resize(rec.x.size());
    for (std::size_t k = 0; k < rec.x.size(); ++k) {
        double y = model_value(p, rec.x[k]);
        if (p.sigma > 0.0) y += p.sigma * gaussian(seed, k);
        rec.y[k] = y;
    }
    return rec;
}

inline double second_moment(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("second_moment: empty input");
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

// --- fringe-record feature counting -----------------------------------------
//
// Local extrema of sampled curves, robust against plateaus: the sequence of
// nonzero forward-difference signs is scanned for -,+ (minimum) or +,-
// (maximum) transitions.

inline int count_local_minima_circular(std::span<const double> y) {
    const int n = static_cast<int>(y.size());
    if (n < 3) return 0;
    std::vector<int> signs;
    signs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double d = y[static_cast<std::size_t>((i + 1) % n)] - y[static_cast<std::size_t>(i)];
        if (d > 0.0) signs.push_back(1);
        else if (d < 0.0) signs.push_back(-1);
    }
    if (signs.size() < 2) return 0;
    int count = 0;
    for (std::size_t i = 0; i < signs.size(); ++i) {
        if (signs[i] == -1 && signs[(i + 1) % signs.size()] == 1) ++count;
    }
    return count;
}

// Interior extremum indices of a non-periodic record; plateau runs report
// their first index.
inline std::vector<int> local_extremum_indices(std::span<const double> y, bool maxima) {
    std::vector<int> out;
    const int n = static_cast<int>(y.size());
    int i = 1;
    while (i < n - 1) {
        const double dprev = y[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i - 1)];
        int j = i;
        while (j < n - 1 && y[static_cast<std::size_t>(j + 1)] == y[static_cast<std::size_t>(j)]) ++j;
        if (j >= n - 1) break;
        const double dnext = y[static_cast<std::size_t>(j + 1)] - y[static_cast<std::size_t>(j)];
        const bool hit = maxima ? (dprev > 0.0 && dnext < 0.0) : (dprev < 0.0 && dnext > 0.0);
        if (hit) out.push_back(i);
        i = j + 1;
    }
    return out;
}

inline std::vector<int> local_maxima_indices(std::span<const double> y) {
    return local_extremum_indices(y, true);
}

inline std::vector<int> local_minima_indices(std::span<const double> y) {
    return local_extremum_indices(y, false);
}

}  // namespace cbw
