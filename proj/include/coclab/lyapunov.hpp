#pragma once

#include <optional>
#include <vector>

#include "coclab/cocycle.hpp"

namespace coclab {

// A Lyapunov-type value in [-inf, inf). The -inf branch is meaningful (it is
// where the exponent genuinely diverges), so it is a tagged state and never a
// float sentinel inside arithmetic.
class LogValue {
  public:
    LogValue() : finite_(false), v_(0.0) {}
    LogValue(double v) : finite_(true), v_(v) {}
    static LogValue minus_inf() { return LogValue(); }

    bool finite() const { return finite_; }
    double value() const {
        if (!finite_) throw RangeLimitError("LogValue: -inf has no finite value");
        return v_;
    }
    double value_or(double floor) const { return finite_ ? v_ : floor; }

    friend LogValue operator+(LogValue a, LogValue b) {
        if (!a.finite_ || !b.finite_) return minus_inf();
        return LogValue(a.v_ + b.v_);
    }
    friend bool operator==(const LogValue& a, const LogValue& b) {
        if (a.finite_ != b.finite_) return false;
        return !a.finite_ || a.v_ == b.v_;
    }

  private:
    bool finite_;
    double v_;
};

// Per-sample log-norms below this floor (per step) mark the -inf branch.
inline constexpr double kUnderflowFloorPerStep = -300.0;

// (1/n) (1/M) sum_m ln || Lambda^k A_n(x_m + x_offset) || over x_m = m/M.
// Returns -inf when any sample underflows below e^{-300 n}.
LogValue finite_scale_exponent(const Cocycle& c, int k, long long n, int grid,
                               double x_offset = 0.0);

// L^k(p/q, A, x) = (1/q) ln rho(Lambda^k A_q(x)); -inf when the radius is 0.
LogValue rational_exponent_at_phase(const Cocycle& c, int k, double x);

struct QuadratureStats {
    int clamped_samples = 0;  // -inf integrand samples clamped at the floor
    double floor = kUnderflowFloorPerStep;
    bool refine_warning = false;
};

// Mean of rational_exponent_at_phase over x in [0, 1/q); the spectrum of
// x -> A_q(x) is 1/q-periodic so this equals the full-circle mean.
LogValue rational_mean_exponent(const Cocycle& c, int k, int grid,
                                QuadratureStats* stats = nullptr);

struct LyapunovProfile {
    int dim = 0;
    long long n_used = 0;
    int grid_size = 0;
    std::vector<double> t_samples;                // sorted ascending
    std::vector<std::vector<LogValue>> values;    // values[k-1][ti] = L^k(t_i)
    std::vector<std::vector<double>> quad_error;  // grid-halving estimate, same shape

    const LogValue& at(int k, int ti) const { return values.at(k - 1).at(ti); }
    int t_index(double t) const;
};

LyapunovProfile profile(const Cocycle& c, std::vector<double> t_list, long long n, int grid);

// L_1..L_d at one t-column: first differences of L^k; -inf propagates.
std::vector<LogValue> spectrum_from_profile(const LyapunovProfile& prof, int ti);

// Geometric ladder t = sign * t0 * 2^{-m}, m = 0..levels-1, sorted ascending.
std::vector<double> geometric_ladder(double t0, int levels, int sign = +1);

struct AccelerationEntry {
    int k = 0;
    bool defined = false;     // false when L^k is -inf on the ladder
    bool regular = false;     // a stable affine suffix window was found
    double omega_upper = 0.0; // omega^k (slope / 2 pi)
    double omega_level = 0.0; // omega_k = omega^k - omega^{k-1}
    double window_lo = 0.0, window_hi = 0.0;
    double fit_residual = 0.0;
    int snap_l = 0;           // minimal 1 <= l <= d with a snap within tolerance
    double snapped = 0.0;     // nearest multiple of 1/snap_l
    double snap_distance = 0.0;
};

struct AccelerationReport {
    int dim = 0;
    int side = +1;
    double residual_tol = 0.0;
    double snap_tol = 0.0;
    std::vector<AccelerationEntry> entries;  // k = 1..d
};

// Slope-fit accelerations on a profile sampled on a geometric ladder (one
// sign). Snap denominators run over 1..d, or 1..d-1 when unimodular is set.
AccelerationReport acceleration(const LyapunovProfile& prof, int side = +1,
                                double residual_tol = 1e-3, double snap_tol = 0.05,
                                bool unimodular = false);

struct RegularityResult {
    bool affine = false;
    double slope = 0.0;          // secant slope over the window
    double max_deviation = 0.0;  // max |L^k - secant|
    double tol = 0.0;
};

// Affinity of t -> L^k over [window_lo, window_hi] against the secant.
// Default tolerance is 1e-3 times the window width.
RegularityResult regularity_check(const LyapunovProfile& prof, int k, double window_lo,
                                  double window_hi, double tol = -1.0);

struct ConvexityResult {
    double min_second_difference = 0.0;  // over uniformly spaced triples
    bool pass = false;
};

// Second differences of t -> L^k on a uniform t-grid; convexity of the
// complexified exponent says these stay >= -tolerance.
ConvexityResult convexity_check(const LyapunovProfile& prof, int k, double tol = 1e-6);

struct RationalBoundRow {
    double t = 0.0;
    double sup_rational = 0.0;    // sup_x L^k(p/q, shifted, x)
    LogValue irrational_estimate; // finite-scale estimate at the same t
    double excess = 0.0;
};

struct RationalBoundReport {
    Approximant approximant;
    std::vector<RationalBoundRow> rows;
    double max_excess = 0.0;
};

// Excess of the rational per-phase exponent over the irrational estimate,
// sup over phases and the given t values; expected o(1) in the approximant.
RationalBoundReport rational_upper_bound_check(const Cocycle& c, int k, int approx_index,
                                               const std::vector<double>& t_list, int x_grid,
                                               long long n_irrational, int grid_irrational);

struct TraceFourierReport {
    int k_power = 0;
    long long q = 1;
    bool zero_trace = false;
    std::vector<int> mode_index;     // j, trace modes live at frequency j*q
    std::vector<LogValue> log_coeff; // ln |a_j|
    std::vector<double> t;
    std::vector<int> dominant_mode;        // argmax_j of the extrapolated mode
    std::vector<double> phi_fourier;       // (1/(k q)) max_j (ln|a_j| - 2 pi j q t)
    std::vector<double> phi_direct;        // (1/(k q)) max_x ln |tr A_q(x+it)^k|
    double max_mismatch = 0.0;             // max |phi_fourier - phi_direct|
    double dominant_slope = 0.0;           // -2 pi j* / k at the mid-window mode
    double measured_slope = 0.0;           // secant slope of phi_direct
};

// Fourier-mode analysis of x -> tr A_q(x)^k at a rational frequency; the modes
// sit at multiples of q and the dominant one reproduces the profile slope.
TraceFourierReport trace_fourier_analysis(const Cocycle& c, int k_power,
                                          const std::vector<double>& t_values);

// Largest approximant denominator <= target (target itself for rational or
// truncated frequencies); Birkhoff sums at denominators reduce boundary error.
long long birkhoff_steps(const Frequency& freq, long long target);

}  // namespace coclab
