#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace carbuncle {

struct ErrorSample {
    double t = 0.0;
    double v_inf = 0.0;
};

enum class GrowthClass { Growing, Decaying, Neutral };

inline std::string to_string(GrowthClass c)
{
    switch (c) {
    case GrowthClass::Growing: return "growing";
    case GrowthClass::Decaying: return "decaying";
    case GrowthClass::Neutral: return "neutral";
    }
    return "?";
}

struct GrowthFitOptions {
    double slope_band = 0.10;        // local slopes must stay within this fraction of their median
    double min_growth_decades = 2.0;
    double min_decay_decades = 1.0;
    double slope_span = 2.0;         // time span of the centred local-slope stencil
    int resample_points = 400;
    double trend_skip = 0.2;         // fraction of the history skipped before the trend fallback
    double noise_floor = 1e-12;      // samples at or below this are round-off and ignored
};

/// Fitted law v(t) = v0 exp(lambda (t - t0)) over [t_begin, t_end].
struct GrowthFit {
    double lambda_num = 0.0;
    double t0 = 0.0;
    double v0 = 0.0;
    double t_begin = 0.0;
    double t_end = 0.0;
    double r2 = 0.0;
    GrowthClass classification = GrowthClass::Neutral;
    bool trend_fallback = false;     // no constant-slope window; fitted the overall trend instead
};

/// Time series of the transverse-velocity norm together with its fitted growth law.
struct ErrorHistory {
    std::vector<ErrorSample> samples;
    GrowthFit fitted;

    void write_csv(std::ostream& os) const
    {
        os << "t,v_inf\n";
        os.precision(17);
        for (const ErrorSample& s : samples) os << s.t << ',' << s.v_inf << '\n';
    }
};

namespace detail {

struct LineFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

// Least squares of y against x, with x centred on x[0] for conditioning.
inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y)
{
    const size_t n = x.size();
    LineFit out;
    if (n < 2) return out;
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i] - x[0];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = x[i] - x[0] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) return out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;   // value at x = x[0]
    out.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return out;
}

inline double median(std::vector<double> v)
{
    const size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    double m = v[n / 2];
    if (n % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + n / 2));
    return m;
}

} // namespace detail

/// Detects the exponential stage of an error history and fits its rate.
///
/// ln(v) is resampled on a uniform grid and differentiated with a centred stencil. The
/// window is the longest contiguous run whose local slopes all lie within `slope_band` of
/// the run's median slope and across which v changes by at least the required number of
/// decades. Growing windows are preferred; a decaying window is accepted otherwise. Failing
/// both, a least-squares trend over the history after the initial transient is used when it
/// spans the same decades; otherwise the history is classified neutral with lambda = 0.
inline GrowthFit fit_growth_rate(const std::vector<ErrorSample>& samples, const GrowthFitOptions& opt = {})
{
    std::vector<double> t, y;
    for (const ErrorSample& s : samples) {
        if (s.v_inf > opt.noise_floor && std::isfinite(s.v_inf)) {
            if (!t.empty() && s.t <= t.back()) continue;
            t.push_back(s.t);
            y.push_back(std::log(s.v_inf));
        }
    }
    GrowthFit fit;
    if (t.size() < 8) return fit;

    const int n = std::max(opt.resample_points, 16);
    const double h = (t.back() - t.front()) / (n - 1);
    std::vector<double> ty(n), yy(n);
    size_t k = 0;
    for (int i = 0; i < n; ++i) {
        const double ti = i + 1 == n ? t.back() : t.front() + i * h;
        while (k + 2 < t.size() && t[k + 1] < ti) ++k;
        const double w = std::clamp((ti - t[k]) / (t[k + 1] - t[k]), 0.0, 1.0);
        ty[i] = ti;
        yy[i] = (1.0 - w) * y[k] + w * y[k + 1];
    }
    const int half = std::max(1, static_cast<int>(std::lround(0.5 * opt.slope_span / h)));
    if (2 * half + 2 > n) return fit;
    // local slope at resampled index i (valid for half <= i < n - half)
    std::vector<double> slope(n, 0.0);
    for (int i = half; i < n - half; ++i) slope[i] = (yy[i + half] - yy[i - half]) / (ty[i + half] - ty[i - half]);

    struct Window {
        int a = -1, b = -1;
        double median = 0.0;
    };
    auto search = [&](double sign, double decades) {
        Window best;
        std::vector<double> refs;
        for (int i = half; i < n - half; ++i)
            if (sign * slope[i] > 0.0) refs.push_back(slope[i]);
        for (double ref : refs) {
            int i = half;
            while (i < n - half) {
                if (std::abs(slope[i] - ref) > opt.slope_band * std::abs(ref)) {
                    ++i;
                    continue;
                }
                int j = i;
                while (j + 1 < n - half && std::abs(slope[j + 1] - ref) <= opt.slope_band * std::abs(ref)) ++j;
                // validate the run against its own median
                const std::vector<double> run(slope.begin() + i, slope.begin() + j + 1);
                const double med = detail::median(run);
                bool ok = sign * med > 0.0;
                for (double s : run) ok = ok && std::abs(s - med) <= opt.slope_band * std::abs(med);
                // the slope stencil reaches half a span beyond the run on each side
                const int a = std::max(0, i - half), b = std::min(n - 1, j + half);
                ok = ok && std::abs(yy[b] - yy[a]) >= decades * std::log(10.0);
                if (ok && (best.a < 0 || b - a > best.b - best.a)) best = {a, b, med};
                i = j + 1;
            }
        }
        return best;
    };

    Window w = search(1.0, opt.min_growth_decades);
    fit.classification = GrowthClass::Growing;
    if (w.a < 0) {
        w = search(-1.0, opt.min_decay_decades);
        fit.classification = GrowthClass::Decaying;
    }
    if (w.a < 0) {
        // modulated histories (complex pairs, mode mixing): fall back to the overall trend
        // after the initial transient when it still spans the required decades
        fit.classification = GrowthClass::Neutral;
        const double t_skip = t.front() + opt.trend_skip * (t.back() - t.front());
        std::vector<double> wt, wy;
        for (size_t i = 0; i < t.size(); ++i)
            if (t[i] >= t_skip) {
                wt.push_back(t[i]);
                wy.push_back(y[i]);
            }
        const detail::LineFit lf = detail::least_squares(wt, wy);
        const double decades = std::abs(lf.slope) * (wt.back() - wt.front()) / std::log(10.0);
        const bool grows = lf.slope > 0.0 && decades >= opt.min_growth_decades;
        const bool decays = lf.slope < 0.0 && decades >= opt.min_decay_decades;
        if (wt.size() < 2 || !(grows || decays)) return fit;
        fit.classification = grows ? GrowthClass::Growing : GrowthClass::Decaying;
        fit.trend_fallback = true;
        fit.lambda_num = lf.slope;
        fit.t0 = wt.front();
        fit.v0 = std::exp(lf.intercept);
        fit.t_begin = wt.front();
        fit.t_end = wt.back();
        fit.r2 = lf.r2;
        return fit;
    }

    std::vector<double> wt, wy;
    for (size_t i = 0; i < t.size(); ++i)
        if (t[i] >= ty[w.a] && t[i] <= ty[w.b]) {
            wt.push_back(t[i]);
            wy.push_back(y[i]);
        }
    const detail::LineFit lf = detail::least_squares(wt, wy);
    fit.lambda_num = lf.slope;
    fit.t0 = wt.front();
    fit.v0 = std::exp(lf.intercept);
    fit.t_begin = ty[w.a];
    fit.t_end = ty[w.b];
    fit.r2 = lf.r2;
    return fit;
}

} // namespace carbuncle
