#include "coclab/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace coclab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln || Lambda^k A_n(x) || for each requested level k, one pass over the
// orbit. Exterior factors are formed per step from the evaluated d x d
// matrix; every level is then a top-norm computation, which stays accurate
// where the lower singular values of the full product would not.
std::vector<double> orbit_log_norms(const TrigMatrixPoly& map, double alpha,
                                    std::span<const int> levels, long long n, double x) {
    const int d = map.dim();
    std::vector<CMatrix> prod(levels.size());
    std::vector<double> scale(levels.size(), 0.0);
    for (size_t i = 0; i < levels.size(); ++i) {
        const auto m = static_cast<Eigen::Index>(binomial(d, levels[i]));
        prod[i] = CMatrix::Identity(m, m);
    }
    for (long long j = 0; j < n; ++j) {
        const CMatrix step = map(Complex(x + static_cast<double>(j) * alpha, 0.0));
        for (size_t i = 0; i < levels.size(); ++i) {
            CMatrix& v = prod[i];
            v = (levels[i] == 1 ? step : exterior_power(step, levels[i])) * v;
            const double nrm = v.norm();
            if (nrm == 0.0) {
                scale[i] = kNegInf;
            } else if (nrm > 1e100 || nrm < 1e-100) {
                v /= nrm;
                scale[i] += std::log(nrm);
            }
        }
    }
    std::vector<double> out(levels.size());
    for (size_t i = 0; i < levels.size(); ++i) {
        if (scale[i] == kNegInf) {
            out[i] = kNegInf;
            continue;
        }
        const double top = prod[i].operatorNorm();
        out[i] = top == 0.0 ? kNegInf : scale[i] + std::log(top);
    }
    return out;
}

LogValue reduce_samples(std::vector<double>& samples, long long n) {
    for (double s : samples)
        if (!(s >= kUnderflowFloorPerStep * static_cast<double>(n))) return LogValue::minus_inf();
    const double total = pairwise_sum(samples);
    return LogValue(total / (static_cast<double>(n) * static_cast<double>(samples.size())));
}

}  // namespace

LogValue finite_scale_exponent(const Cocycle& c, int k, long long n, int grid,
                               double x_offset) {
    const int d = c.dim();
    if (k < 1 || k > d) throw DimensionError("finite_scale_exponent: k out of range");
    if (n < 1 || grid < 1) throw DimensionError("finite_scale_exponent: need n, grid >= 1");

    const double alpha = c.freq.value();
    const int level[1] = {k};
    std::vector<double> samples(grid);
#pragma omp parallel for schedule(static)
    for (int m = 0; m < grid; ++m) {
        const double x = x_offset + static_cast<double>(m) / grid;
        samples[m] = orbit_log_norms(c.map, alpha, level, n, x)[0];
    }
    return reduce_samples(samples, n);
}

namespace {

// (1/q) ln rho(B_q(x)) for a cocycle already reduced to its compound level.
double log_radius_per_step(const Cocycle& reduced, long long q, double x) {
    const ScaledMatrix m = iterate_scaled(reduced, q, Complex(x, 0.0));
    const double r = spectral_radius(m.m);
    if (r == 0.0) return kNegInf;
    return (m.log_scale + std::log(r)) / static_cast<double>(q);
}

}  // namespace

LogValue rational_exponent_at_phase(const Cocycle& c, int k, double x) {
    if (!c.freq.is_rational())
        throw DimensionError("rational_exponent_at_phase: frequency must be rational");
    if (k < 1 || k > c.dim()) throw DimensionError("rational_exponent_at_phase: k out of range");
    const Cocycle reduced = exterior_cocycle(c, k);
    const double v = log_radius_per_step(reduced, c.freq.rational_value().q, x);
    return v == kNegInf ? LogValue::minus_inf() : LogValue(v);
}

LogValue rational_mean_exponent(const Cocycle& c, int k, int grid, QuadratureStats* stats) {
    if (!c.freq.is_rational())
        throw DimensionError("rational_mean_exponent: frequency must be rational");
    if (k < 1 || k > c.dim()) throw DimensionError("rational_mean_exponent: k out of range");
    if (grid < 1) throw DimensionError("rational_mean_exponent: grid must be >= 1");

    const long long q = c.freq.rational_value().q;
    const Cocycle reduced = exterior_cocycle(c, k);
    std::vector<double> samples(grid);
#pragma omp parallel for schedule(static)
    for (int m = 0; m < grid; ++m) {
        const double x = static_cast<double>(m) / (static_cast<double>(grid) * q);
        samples[m] = log_radius_per_step(reduced, q, x);
    }

    int clamped = 0;
    for (double& s : samples) {
        if (!(s >= kUnderflowFloorPerStep)) {
            s = kUnderflowFloorPerStep;
            ++clamped;
        }
    }
    if (stats) {
        stats->clamped_samples = clamped;
        stats->refine_warning = clamped > 0;
    }
    if (2 * clamped > grid) return LogValue::minus_inf();
    return LogValue(pairwise_sum(samples) / grid);
}

int LyapunovProfile::t_index(double t) const {
    for (size_t i = 0; i < t_samples.size(); ++i)
        if (std::abs(t_samples[i] - t) < 1e-12) return static_cast<int>(i);
    throw DimensionError("LyapunovProfile: t not sampled");
}

LyapunovProfile profile(const Cocycle& c, std::vector<double> t_list, long long n, int grid) {
    if (t_list.empty()) throw DimensionError("profile: empty t list");
    if (n < 1 || grid < 1) throw DimensionError("profile: need n, grid >= 1");
    std::sort(t_list.begin(), t_list.end());

    const int d = c.dim();
    LyapunovProfile prof;
    prof.dim = d;
    prof.n_used = n;
    prof.grid_size = grid;
    prof.t_samples = t_list;
    prof.values.assign(d, std::vector<LogValue>(t_list.size()));
    prof.quad_error.assign(d, std::vector<double>(t_list.size(), 0.0));

    const double alpha = c.freq.value();
    std::vector<int> levels(d);
    for (int k = 1; k <= d; ++k) levels[k - 1] = k;
    for (size_t ti = 0; ti < t_list.size(); ++ti) {
        const TrigMatrixPoly shifted = c.map.shift_imag(t_list[ti]);
        std::vector<std::vector<double>> samples(d, std::vector<double>(grid));
#pragma omp parallel for schedule(static)
        for (int m = 0; m < grid; ++m) {
            const double x = static_cast<double>(m) / grid;
            const std::vector<double> logs = orbit_log_norms(shifted, alpha, levels, n, x);
            for (int k = 1; k <= d; ++k) samples[k - 1][m] = logs[k - 1];
        }
        for (int k = 1; k <= d; ++k) {
            prof.values[k - 1][ti] = reduce_samples(samples[k - 1], n);
            if (prof.values[k - 1][ti].finite() && grid >= 2) {
                std::vector<double> half;
                half.reserve(grid / 2);
                for (int m = 0; m < grid; m += 2) half.push_back(samples[k - 1][m]);
                const double mean_half =
                    pairwise_sum(half) / (static_cast<double>(n) * half.size());
                prof.quad_error[k - 1][ti] =
                    std::abs(mean_half - prof.values[k - 1][ti].value());
            }
        }
    }
    return prof;
}

std::vector<LogValue> spectrum_from_profile(const LyapunovProfile& prof, int ti) {
    std::vector<LogValue> out(prof.dim);
    LogValue prev(0.0);
    bool dead = false;
    for (int k = 1; k <= prof.dim; ++k) {
        const LogValue lk = prof.values[k - 1][ti];
        if (dead || !lk.finite()) {
            out[k - 1] = LogValue::minus_inf();
            dead = true;
        } else {
            out[k - 1] = LogValue(lk.value() - prev.value());
            prev = lk;
        }
    }
    return out;
}

std::vector<double> geometric_ladder(double t0, int levels, int sign) {
    if (t0 <= 0 || levels < 1) throw DimensionError("geometric_ladder: bad parameters");
    std::vector<double> out(levels);
    for (int m = 0; m < levels; ++m) out[m] = sign * t0 * std::pow(2.0, -m);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct AffineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_dev = 0.0;
};

AffineFit affine_fit(const std::vector<double>& ts, const std::vector<double>& ys) {
    const size_t m = ts.size();
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (size_t i = 0; i < m; ++i) {
        st += ts[i];
        sy += ys[i];
        stt += ts[i] * ts[i];
        sty += ts[i] * ys[i];
    }
    AffineFit fit;
    const double denom = m * stt - st * st;
    fit.slope = (m * sty - st * sy) / denom;
    fit.intercept = (sy - fit.slope * st) / m;
    for (size_t i = 0; i < m; ++i)
        fit.max_dev = std::max(fit.max_dev, std::abs(ys[i] - fit.slope * ts[i] - fit.intercept));
    return fit;
}

}  // namespace

AccelerationReport acceleration(const LyapunovProfile& prof, int side, double residual_tol,
                                double snap_tol, bool unimodular) {
    if (side != +1 && side != -1) throw DimensionError("acceleration: side must be +1 or -1");
    AccelerationReport rep;
    rep.dim = prof.dim;
    rep.side = side;
    rep.residual_tol = residual_tol;
    rep.snap_tol = snap_tol;

    // ladder points of the chosen sign, from the largest |t| down
    std::vector<int> ladder;
    for (size_t i = 0; i < prof.t_samples.size(); ++i)
        if (side * prof.t_samples[i] > 0) ladder.push_back(static_cast<int>(i));
    std::sort(ladder.begin(), ladder.end(), [&](int a, int b) {
        return std::abs(prof.t_samples[a]) > std::abs(prof.t_samples[b]);
    });
    if (ladder.size() < 2) throw DimensionError("acceleration: need at least 2 ladder samples");

    const int lmax = unimodular ? std::max(1, prof.dim - 1) : prof.dim;
    double prev_omega = 0.0;  // omega^0 = 0
    for (int k = 1; k <= prof.dim; ++k) {
        AccelerationEntry e;
        e.k = k;
        bool all_finite = true;
        for (int idx : ladder) all_finite = all_finite && prof.values[k - 1][idx].finite();
        if (!all_finite) {
            e.defined = false;
            rep.entries.push_back(e);
            continue;
        }
        e.defined = true;

        std::vector<double> ts, ys;
        for (int idx : ladder) {
            ts.push_back(prof.t_samples[idx]);
            ys.push_back(prof.values[k - 1][idx].value());
        }
        // largest suffix window (toward t -> 0) whose affine fit is tight
        size_t start = 0;
        AffineFit chosen;
        bool found = false;
        for (; ts.size() - start >= 3; ++start) {
            std::vector<double> wt(ts.begin() + start, ts.end());
            std::vector<double> wy(ys.begin() + start, ys.end());
            chosen = affine_fit(wt, wy);
            if (chosen.max_dev < residual_tol) {
                found = true;
                break;
            }
        }
        if (!found) {
            // secant over the two samples closest to 0 as a fallback estimate
            const size_t m = ts.size();
            chosen.slope = (ys[m - 1] - ys[m - 2]) / (ts[m - 1] - ts[m - 2]);
            chosen.max_dev = std::numeric_limits<double>::quiet_NaN();
            start = m - 2;
        }
        e.regular = found;
        e.omega_upper = chosen.slope / (2 * M_PI);
        e.window_lo = std::min(std::abs(ts[start]), std::abs(ts.back()));
        e.window_hi = std::max(std::abs(ts[start]), std::abs(ts.back()));
        e.fit_residual = chosen.max_dev;

        int best_l = 1;
        double best_dist = std::numeric_limits<double>::max();
        for (int l = 1; l <= lmax; ++l) {
            const double snapped = std::round(e.omega_upper * l) / l;
            const double dist = std::abs(e.omega_upper - snapped);
            if (dist <= snap_tol) {
                best_l = l;
                best_dist = dist;
                break;  // minimal l achieving the snap
            }
            if (dist < best_dist) {
                best_l = l;
                best_dist = dist;
            }
        }
        e.snap_l = best_l;
        e.snapped = std::round(e.omega_upper * best_l) / best_l;
        e.snap_distance = std::abs(e.omega_upper - e.snapped);

        e.omega_level = e.omega_upper - prev_omega;
        prev_omega = e.omega_upper;
        rep.entries.push_back(e);
    }
    return rep;
}

RegularityResult regularity_check(const LyapunovProfile& prof, int k, double window_lo,
                                  double window_hi, double tol) {
    if (k < 1 || k > prof.dim) throw DimensionError("regularity_check: k out of range");
    if (!(window_hi > window_lo)) throw DimensionError("regularity_check: empty window");
    if (tol < 0) tol = 1e-3 * (window_hi - window_lo);

    std::vector<double> ts, ys;
    for (size_t i = 0; i < prof.t_samples.size(); ++i) {
        const double t = prof.t_samples[i];
        if (t < window_lo - 1e-12 || t > window_hi + 1e-12) continue;
        if (!prof.values[k - 1][i].finite())
            throw RangeLimitError("regularity_check: L^k is -inf inside the window");
        ts.push_back(t);
        ys.push_back(prof.values[k - 1][i].value());
    }
    if (ts.size() < 2) throw DimensionError("regularity_check: window holds fewer than 2 samples");

    RegularityResult res;
    res.tol = tol;
    res.slope = (ys.back() - ys.front()) / (ts.back() - ts.front());
    for (size_t i = 0; i < ts.size(); ++i) {
        const double secant = ys.front() + res.slope * (ts[i] - ts.front());
        res.max_deviation = std::max(res.max_deviation, std::abs(ys[i] - secant));
    }
    res.affine = res.max_deviation < tol;
    return res;
}

ConvexityResult convexity_check(const LyapunovProfile& prof, int k, double tol) {
    if (k < 1 || k > prof.dim) throw DimensionError("convexity_check: k out of range");
    const auto& ts = prof.t_samples;
    if (ts.size() < 3) throw DimensionError("convexity_check: need at least 3 samples");
    const double h = ts[1] - ts[0];
    for (size_t i = 2; i < ts.size(); ++i)
        if (std::abs((ts[i] - ts[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw DimensionError("convexity_check: t grid must be uniform");

    ConvexityResult res;
    res.min_second_difference = std::numeric_limits<double>::max();
    bool any_finite = false, any_inf = false;
    for (size_t i = 0; i + 2 < ts.size(); ++i) {
        const LogValue a = prof.values[k - 1][i];
        const LogValue b = prof.values[k - 1][i + 1];
        const LogValue c = prof.values[k - 1][i + 2];
        if (!a.finite() || !b.finite() || !c.finite()) {
            any_inf = true;
            continue;
        }
        any_finite = true;
        res.min_second_difference =
            std::min(res.min_second_difference, a.value() - 2 * b.value() + c.value());
    }
    if (!any_finite) {
        // identically -inf branch: convex by convention
        res.min_second_difference = 0.0;
        res.pass = true;
        return res;
    }
    res.pass = !any_inf && res.min_second_difference >= -tol;
    return res;
}

RationalBoundReport rational_upper_bound_check(const Cocycle& c, int k, int approx_index,
                                               const std::vector<double>& t_list, int x_grid,
                                               long long n_irrational, int grid_irrational) {
    if (c.freq.is_rational())
        throw DimensionError("rational_upper_bound_check: frequency must be irrational");
    const ApproximantRun run = c.freq.approximants(approx_index + 1);
    if (static_cast<int>(run.terms.size()) <= approx_index)
        throw RangeLimitError("rational_upper_bound_check: approximant ladder truncated early");
    const Approximant appr = run.terms[approx_index];

    RationalBoundReport rep;
    rep.approximant = appr;
    rep.max_excess = -std::numeric_limits<double>::infinity();
    for (double t : t_list) {
        const TrigMatrixPoly shifted = c.map.shift_imag(t);
        const Cocycle rat{Frequency::rational(appr.p, appr.q), shifted};
        const Cocycle reduced = exterior_cocycle(rat, k);

        double sup = kNegInf;
        for (int m = 0; m < x_grid; ++m) {
            const double x = static_cast<double>(m) / (static_cast<double>(x_grid) * appr.q);
            sup = std::max(sup, log_radius_per_step(reduced, appr.q, x));
        }
        const Cocycle irr{c.freq, shifted};
        const LogValue est = finite_scale_exponent(irr, k, n_irrational, grid_irrational);

        RationalBoundRow row;
        row.t = t;
        row.sup_rational = sup == kNegInf ? LogValue::minus_inf() : LogValue(sup);
        row.irrational_estimate = est;
        if (row.sup_rational.finite() && est.finite())
            row.excess = row.sup_rational.value() - est.value();
        else if (!row.sup_rational.finite())
            row.excess = -std::numeric_limits<double>::infinity();
        else
            row.excess = std::numeric_limits<double>::infinity();
        rep.max_excess = std::max(rep.max_excess, row.excess);
        rep.rows.push_back(row);
    }
    return rep;
}

TraceFourierReport trace_fourier_analysis(const Cocycle& c, int k_power,
                                          const std::vector<double>& t_values) {
    if (!c.freq.is_rational())
        throw DimensionError("trace_fourier_analysis: frequency must be rational");
    if (k_power < 1) throw DimensionError("trace_fourier_analysis: k_power must be >= 1");
    if (t_values.size() < 2)
        throw DimensionError("trace_fourier_analysis: need at least 2 t values");

    const long long q = c.freq.rational_value().q;
    const int n_modes = k_power * c.map.degree();  // trace modes at j*q, |j| <= k N
    const int grid = 2 * n_modes * static_cast<int>(q) + 2;

    TraceFourierReport rep;
    rep.k_power = k_power;
    rep.q = q;

    // normalized trace samples tr(A_q(x_m)^k) * e^{-S}
    std::vector<Complex> tr(grid);
    std::vector<double> log_mag(grid);
    for (int m = 0; m < grid; ++m) {
        const ScaledMatrix p = iterate_scaled(c, q, Complex(static_cast<double>(m) / grid, 0.0));
        CMatrix power = CMatrix::Identity(c.dim(), c.dim());
        for (int i = 0; i < k_power; ++i) power = power * p.m;
        tr[m] = power.trace();
        log_mag[m] = tr[m] == Complex(0.0) ? kNegInf
                                           : k_power * p.log_scale + std::log(std::abs(tr[m]));
    }
    double big = kNegInf;
    for (double lm : log_mag) big = std::max(big, lm);
    if (big == kNegInf) {
        rep.zero_trace = true;
        return rep;
    }
    std::vector<Complex> norm(grid);
    for (int m = 0; m < grid; ++m)
        norm[m] = log_mag[m] == kNegInf
                      ? Complex(0.0)
                      : tr[m] / std::abs(tr[m]) * std::exp(log_mag[m] - big);

    double max_coeff = 0.0;
    for (int j = -n_modes; j <= n_modes; ++j) {
        Complex acc = 0.0;
        for (int m = 0; m < grid; ++m) {
            const double phase = -2 * M_PI * static_cast<double>(j * q) * m / grid;
            acc += norm[m] * Complex(std::cos(phase), std::sin(phase));
        }
        acc /= static_cast<double>(grid);
        rep.mode_index.push_back(j);
        const double mag = std::abs(acc);
        max_coeff = std::max(max_coeff, mag);
        rep.log_coeff.push_back(mag < 1e-290 ? LogValue::minus_inf()
                                             : LogValue(std::log(mag) + big));
    }
    if (max_coeff < 1e-14) {
        rep.zero_trace = true;
        return rep;
    }

    std::vector<double> ts(t_values);
    std::sort(ts.begin(), ts.end());
    const double kq = static_cast<double>(k_power) * static_cast<double>(q);
    for (double t : ts) {
        double best = kNegInf;
        int best_j = 0;
        for (size_t i = 0; i < rep.mode_index.size(); ++i) {
            if (!rep.log_coeff[i].finite()) continue;
            const int j = rep.mode_index[i];
            const double v = (rep.log_coeff[i].value() - 2 * M_PI * j * q * t) / kq;
            if (v > best) {
                best = v;
                best_j = j;
            }
        }
        rep.t.push_back(t);
        rep.dominant_mode.push_back(best_j);
        rep.phi_fourier.push_back(best);

        // direct route: evaluate the shifted product and take the max over x
        const TrigMatrixPoly shifted = c.map.shift_imag(t);
        const Cocycle sc{c.freq, shifted};
        double direct = kNegInf;
        for (int m = 0; m < grid; ++m) {
            const ScaledMatrix p =
                iterate_scaled(sc, q, Complex(static_cast<double>(m) / grid, 0.0));
            CMatrix power = CMatrix::Identity(c.dim(), c.dim());
            for (int i = 0; i < k_power; ++i) power = power * p.m;
            const Complex trv = power.trace();
            if (trv == Complex(0.0)) continue;
            direct = std::max(direct,
                              (k_power * p.log_scale + std::log(std::abs(trv))) / kq);
        }
        rep.phi_direct.push_back(direct);
        if (direct != kNegInf)
            rep.max_mismatch = std::max(rep.max_mismatch, std::abs(best - direct));
    }

    const int mid_mode = rep.dominant_mode[rep.dominant_mode.size() / 2];
    rep.dominant_slope = -2 * M_PI * mid_mode / static_cast<double>(k_power);
    rep.measured_slope =
        (rep.phi_direct.back() - rep.phi_direct.front()) / (rep.t.back() - rep.t.front());
    return rep;
}

long long birkhoff_steps(const Frequency& freq, long long target) {
    if (freq.is_rational()) return target;
    const ApproximantRun run = freq.approximants(64);
    long long best = 0;
    for (const auto& a : run.terms)
        if (a.q <= target) best = std::max(best, a.q);
    return best > 0 ? best : target;
}

}  // namespace coclab
