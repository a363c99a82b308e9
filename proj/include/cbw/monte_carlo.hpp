// Monte Carlo estimator-efficiency and M-scaling studies.
//
// Trials are independent given per-trial derived seeds and are aggregated in
// trial-index order, so results are bit-identical whether trials run
// sequentially or across any number of threads.

#pragma once

#include <map>
#include <optional>
#include <thread>
#include <vector>

#include "cbw/estimator.hpp"

namespace cbw {

enum class NuisanceMode {
    FitAll,         // 4-parameter fit: offset, amplitude, phase, frequency
    KnownNuisance,  // frequency-only fit, nuisance parameters fixed at truth
};

inline const char* to_string(NuisanceMode m) {
    return m == NuisanceMode::FitAll ? "all" : "known";
}

struct McOptions {
    int threads = 1;
    NuisanceMode nuisance = NuisanceMode::FitAll;
    double window_lo_scale = 0.5;  // fit window as multiples of the true f_M
    double window_hi_scale = 1.5;
};

struct McPerM {
    int m_order = 1;
    int trials = 0;
    int nonconverged = 0;
    double k_m = 0.0;
    double snr_product = 0.0;  // M * K_M diagnostic
    double snr_amp = 0.0;
    double empirical_var_f = 0.0;  // variance of the base-frequency estimate f_hat_M / M
    double empirical_std_f = 0.0;
    double crlb_var_f = 0.0;  // closed bound for the base frequency
    double efficiency = 0.0;  // empirical_var_f / crlb_var_f
    double mean_bias = 0.0;
    // Fractional wavelength spreads: std(lambda_hat/lambda_M), the same
    // normalized by the base wavelength 1/f instead, and the closed bound.
    double frac_std_lambda = 0.0;
    double frac_std_lambda_base = 0.0;
    double frac_std_lambda_bound = 0.0;
};

struct McReport {
    int trials = 0;
    double empirical_var_f = 0.0;
    double crlb_var_f = 0.0;
    double efficiency = 0.0;
    double mean_bias = 0.0;
    double snr_amp = 0.0;
    int nonconverged = 0;
    bool excessive_nonconvergence = false;  // > 1% of trials failed to converge
    NuisanceMode nuisance = NuisanceMode::FitAll;
    std::map<int, McPerM> per_m_results;
};

namespace detail {

inline void run_trials(const InterferogramParams& p, std::uint64_t master_seed, int begin, int end,
                       const McOptions& opts, std::vector<double>& f_m_hat,
                       std::vector<char>& converged) {
    const FrequencyWindow window{opts.window_lo_scale * p.f_m(), opts.window_hi_scale * p.f_m()};
    for (int t = begin; t < end; ++t) {
        const std::uint64_t seed = derive_seed(master_seed, static_cast<std::uint64_t>(t));
        const Interferogram rec = synthesize(p, seed);
        const FitResult fit = opts.nuisance == NuisanceMode::KnownNuisance
                                  ? fit_frequency_known_nuisance(rec, window)
                                  : fit_frequency(rec, window);
        f_m_hat[static_cast<std::size_t>(t)] = fit.f_hat;
        converged[static_cast<std::size_t>(t)] = fit.converged ? 1 : 0;
    }
}

struct SampleStats {
    double mean = 0.0;
    double var = 0.0;  // unbiased (n-1)
    int n = 0;
};

inline SampleStats sample_stats(const std::vector<double>& v, const std::vector<char>& keep) {
    SampleStats s;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (keep[i]) { s.mean += v[i]; ++s.n; }
    if (s.n == 0) return s;
    s.mean /= s.n;
    if (s.n < 2) return s;
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (keep[i]) { const double d = v[i] - s.mean; acc += d * d; }
    s.var = acc / (s.n - 1);
    return s;
}

}  // namespace detail

inline McReport monte_carlo(const InterferogramParams& p, int trials, std::uint64_t master_seed,
                            const McOptions& opts = {}) {
    p.validate();
    if (trials < 2) throw std::invalid_argument("monte_carlo: trials must be >= 2");
    const int threads = std::max(1, opts.threads);

    std::vector<double> f_m_hat(static_cast<std::size_t>(trials), 0.0);
    std::vector<char> converged(static_cast<std::size_t>(trials), 0);
    if (threads == 1) {
        detail::run_trials(p, master_seed, 0, trials, opts, f_m_hat, converged);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (trials + threads - 1) / threads;
        for (int w = 0; w < threads; ++w) {
            const int begin = w * chunk;
            const int end = std::min(trials, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] {
                detail::run_trials(p, master_seed, begin, end, opts, f_m_hat, converged);
            });
        }
        for (std::thread& th : pool) th.join();
    }

    // Aggregate in trial-index order.
    std::vector<double> f_base(f_m_hat.size());
    std::vector<double> lambda_ratio(f_m_hat.size(), 0.0);
    std::vector<double> lambda_hat(f_m_hat.size(), 0.0);
    for (std::size_t i = 0; i < f_m_hat.size(); ++i) {
        f_base[i] = f_m_hat[i] / p.m_order;
        if (converged[i] && f_m_hat[i] > 0.0) {
            lambda_hat[i] = 1.0 / f_m_hat[i];
            lambda_ratio[i] = lambda_hat[i] / p.lambda_m();
        } else {
            converged[i] = 0;
        }
    }
    const detail::SampleStats fs = detail::sample_stats(f_base, converged);
    const detail::SampleStats ls = detail::sample_stats(lambda_ratio, converged);
    const detail::SampleStats lh = detail::sample_stats(lambda_hat, converged);

    McReport rep;
    rep.trials = trials;
    rep.nuisance = opts.nuisance;
    rep.nonconverged = trials - fs.n;
    rep.excessive_nonconvergence = rep.nonconverged > trials / 100;
    rep.empirical_var_f = fs.var;
    rep.crlb_var_f = crlb(p);
    rep.efficiency = rep.crlb_var_f > 0.0 ? rep.empirical_var_f / rep.crlb_var_f : 0.0;
    rep.mean_bias = fs.n > 0 ? fs.mean - p.f : 0.0;
    rep.snr_amp = p.snr_amp();

    McPerM row;
    row.m_order = p.m_order;
    row.trials = trials;
    row.nonconverged = rep.nonconverged;
    row.k_m = p.k_m();
    row.snr_product = p.m_order * p.k_m();
    row.snr_amp = rep.snr_amp;
    row.empirical_var_f = fs.var;
    row.empirical_std_f = std::sqrt(fs.var);
    row.crlb_var_f = rep.crlb_var_f;
    row.efficiency = rep.efficiency;
    row.mean_bias = rep.mean_bias;
    row.frac_std_lambda = std::sqrt(ls.var);
    // Same spread, but normalized by the base wavelength 1/f: multiplies in
    // the 1/M from the M-fold shorter effective wavelength.
    row.frac_std_lambda_base = std::sqrt(lh.var) * p.f;
    row.frac_std_lambda_bound = fractional_wavelength_uncertainty(p).bound;
    rep.per_m_results[p.m_order] = row;
    return rep;
}

struct ScalingReport {
    bool fixed_k_m = false;
    std::vector<McPerM> rows;
    // Log-log slopes vs M; absent when fewer than two usable points.
    std::optional<double> slope_frac_std_lambda;
    std::optional<double> slope_frac_std_lambda_base;
    std::optional<double> slope_bound;
};

namespace detail {

inline std::optional<double> loglog_slope(const std::vector<double>& m_values,
                                          const std::vector<double>& metric) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < m_values.size(); ++i) {
        if (metric[i] > 0.0 && std::isfinite(metric[i])) {
            lx.push_back(std::log(m_values[i]));
            ly.push_back(std::log(metric[i]));
        }
    }
    if (lx.size() < 2) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) { mx += lx[i]; my += ly[i]; }
    mx /= lx.size();
    my /= ly.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

}  // namespace detail

// Runs monte_carlo per M. fixed_k_m scales f as base.f / M so the fringe
// count K_M stays constant, isolating the explicit M factor in the bound.
inline ScalingReport scaling_sweep(const InterferogramParams& base, std::span<const int> ms,
                                   int trials, std::uint64_t master_seed, bool fixed_k_m,
                                   const McOptions& opts = {}) {
    if (ms.empty()) throw std::invalid_argument("scaling_sweep: empty M list");
    ScalingReport rep;
    rep.fixed_k_m = fixed_k_m;
    std::vector<double> m_values, frac, frac_base, bound;
    for (int m_order : ms) {
        if (m_order < 1) throw std::invalid_argument("scaling_sweep: M must be >= 1");
        InterferogramParams p = base;
        p.m_order = m_order;
        if (fixed_k_m) p.f = base.f / m_order;
        const std::uint64_t seed_m = derive_seed(master_seed, static_cast<std::uint64_t>(m_order));
        const McReport mc = monte_carlo(p, trials, seed_m, opts);
        const McPerM& row = mc.per_m_results.at(m_order);
        rep.rows.push_back(row);
        m_values.push_back(m_order);
        frac.push_back(row.frac_std_lambda);
        frac_base.push_back(row.frac_std_lambda_base);
        bound.push_back(row.frac_std_lambda_bound);
    }
    rep.slope_frac_std_lambda = detail::loglog_slope(m_values, frac);
    rep.slope_frac_std_lambda_base = detail::loglog_slope(m_values, frac_base);
    rep.slope_bound = detail::loglog_slope(m_values, bound);
    return rep;
}

}  // namespace cbw
