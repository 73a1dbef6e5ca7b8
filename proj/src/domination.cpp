#include "coclab/domination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace coclab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kRoundoffSlack = 1e-12;

double log_add(double a, double b) {  // ln(e^a + e^b)
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

struct SigmaPair {
    double log_s1;
    double log_s2;  // -inf when sigma_2 = 0
};

SigmaPair leading_sigmas(const ScaledMatrix& m) {
    Eigen::JacobiSVD<CMatrix> svd(m.m);
    const auto& s = svd.singularValues();
    SigmaPair out{kNegInf, kNegInf};
    if (s(0) > 0) out.log_s1 = m.log_scale + std::log(s(0));
    if (s.size() > 1 && s(1) > 0) out.log_s2 = m.log_scale + std::log(s(1));
    return out;
}

}  // namespace

DominationCertificate singular_gap_certificate(const Cocycle& c, int k, long long n, int grid,
                                               double rho) {
    const int d = c.dim();
    if (k < 1 || k > d - 1)
        throw DimensionError("singular_gap_certificate: need 1 <= k <= d-1");
    if (!(rho > 0 && rho <= 0.25))
        throw DimensionError("singular_gap_certificate: rho must be in (0, 1/4]");
    if (n < 1 || grid < 1) throw DimensionError("singular_gap_certificate: bad n or grid");

    const Cocycle b = exterior_cocycle(c, k);
    const double alpha = b.freq.value();
    const double log_rho2 = 2 * std::log(rho);
    const double log_4rho = std::log(4 * rho);

    DominationCertificate cert;
    cert.k = k;
    cert.n = n;
    cert.rho = rho;
    cert.grid = grid;

    struct PhaseSlack {
        double i1, i2, i3;  // log slacks of the three inequalities
        double log_s1, log_s1s, log_s2, log_s2s, log_sp;
    };
    std::vector<PhaseSlack> slack(grid);

#pragma omp parallel for schedule(static)
    for (int m = 0; m < grid; ++m) {
        const double x = static_cast<double>(m) / grid;
        const ScaledMatrix w1 = iterate_scaled(b, n, Complex(x, 0.0));
        const ScaledMatrix w2 =
            iterate_scaled(b, n, Complex(x + static_cast<double>(n) * alpha, 0.0));
        const ScaledMatrix w21 = scaled_product(w2, w1);
        const SigmaPair s1 = leading_sigmas(w1);
        const SigmaPair s2 = leading_sigmas(w2);
        const SigmaPair sp = leading_sigmas(w21);
        PhaseSlack ps;
        ps.log_s1 = s1.log_s1;
        ps.log_s1s = s2.log_s1;
        ps.log_s2 = s1.log_s2;
        ps.log_s2s = s2.log_s2;
        ps.log_sp = sp.log_s1;
        ps.i1 = log_rho2 + s1.log_s1 - s1.log_s2;
        ps.i2 = log_rho2 + s2.log_s1 - s2.log_s2;
        // sigma_2 = 0 satisfies the gap inequality with infinite margin;
        // sigma_1 = 0 (dead product) fails everything.
        if (s1.log_s2 == kNegInf)
            ps.i1 = s1.log_s1 == kNegInf ? kNegInf : std::numeric_limits<double>::infinity();
        if (s2.log_s2 == kNegInf)
            ps.i2 = s2.log_s1 == kNegInf ? kNegInf : std::numeric_limits<double>::infinity();
        ps.i3 = sp.log_s1 - (log_4rho + s1.log_s1 + s2.log_s1);
        if (s1.log_s1 == kNegInf || s2.log_s1 == kNegInf || sp.log_s1 == kNegInf)
            ps.i3 = kNegInf;
        slack[m] = ps;
    }

    double worst_ratio = 0.0, worst_prod = std::numeric_limits<double>::infinity();
    double min_i12 = std::numeric_limits<double>::infinity();
    double min_i3 = std::numeric_limits<double>::infinity();
    double min_s1 = std::numeric_limits<double>::infinity();
    double min_s2 = std::numeric_limits<double>::infinity();
    double min_sp = std::numeric_limits<double>::infinity();
    for (int m = 0; m < grid; ++m) {
        const PhaseSlack& ps = slack[m];
        worst_ratio = std::max({worst_ratio, std::exp(-ps.i1), std::exp(-ps.i2)});
        worst_prod = std::min(worst_prod, std::exp(ps.i3));
        min_i12 = std::min({min_i12, ps.i1, ps.i2});
        min_i3 = std::min(min_i3, ps.i3);
        min_s1 = std::min({min_s1, ps.log_s1, ps.log_s1s});
        min_s2 = std::min({min_s2, ps.log_s2, ps.log_s2s});
        min_sp = std::min(min_sp, ps.log_sp);
        if (ps.i1 < -kRoundoffSlack || ps.i2 < -kRoundoffSlack || ps.i3 < -kRoundoffSlack)
            cert.violations.push_back(static_cast<double>(m) / grid);
    }
    cert.worst_sigma_ratio = worst_ratio;
    cert.worst_product_ratio = worst_prod;
    cert.pass = cert.violations.empty();

    // Grid-to-continuum promotion. x -> B_n(x) is Lipschitz with constant at
    // most n S^{n-1} L (S, L from coefficient norms) and by Weyl so is each
    // sigma_j. A log slack survives the half-cell modulus when it exceeds
    // Lip * h/2 divided by the smallest sigma the term can reach in the cell.
    const double h = 1.0 / grid;
    const double log_S = std::log(std::max(b.map.sup_norm_bound(), 1e-300));
    const double deriv = b.map.derivative_norm_bound();
    const double log_L = deriv == 0.0 ? kNegInf : std::log(deriv);
    const double log_lip_n = std::log(static_cast<double>(n)) + (n - 1) * log_S + log_L;
    const double log_lip_2n =
        std::log(static_cast<double>(2 * n)) + (2 * n - 1) * log_S + log_L;

    // log of max(0, e^{log_sigma_min} - Lip * h/2); -inf when the cell floor dies
    auto cell_floor = [&](double log_sigma_min, double log_lip) -> double {
        const double drop = log_lip + std::log(h / 2);
        if (!(drop < log_sigma_min)) return kNegInf;
        return log_sigma_min + std::log1p(-std::exp(drop - log_sigma_min));
    };
    const double f_s1 = cell_floor(min_s1, log_lip_n);
    const double f_s2 = cell_floor(min_s2, log_lip_n);
    const double f_sp = cell_floor(min_sp, log_lip_2n);
    const double bound12 = std::log(h / 2) + log_add(log_lip_n - f_s1, log_lip_n - f_s2);
    const double bound3 = std::log(h / 2) +
                          log_add(log_lip_2n - f_sp,
                                  log_add(log_lip_n - f_s1, log_lip_n - f_s1));
    cert.modulus_bound = std::max(bound12, bound3);
    auto margin = [](double slack_log, double bound) {
        if (slack_log == std::numeric_limits<double>::infinity()) return slack_log;
        return slack_log - bound;
    };
    cert.min_log_slack = std::min(margin(min_i12, bound12), margin(min_i3, bound3));
    cert.certified = cert.pass && cert.min_log_slack > 0;
    return cert;
}

ConefieldResult conefield_test(const Cocycle& c, int k, long long n, double rho, int grid,
                               int boundary_samples, std::uint64_t seed) {
    const int d = c.dim();
    if (k < 1 || k > d - 1) throw DimensionError("conefield_test: need 1 <= k <= d-1");
    if (!(rho > 0 && rho <= 0.25))
        throw DimensionError("conefield_test: rho must be in (0, 1/4]");

    const Cocycle b = exterior_cocycle(c, k);
    const double alpha = b.freq.value();
    const Eigen::Index dim_ext = static_cast<Eigen::Index>(binomial(d, k));

    ConefieldResult res;
    res.min_margin = std::numeric_limits<double>::infinity();
    for (int m = 0; m < grid; ++m) {
        const double x = static_cast<double>(m) / grid;
        const ScaledMatrix w1 = iterate_scaled(b, n, Complex(x, 0.0));
        const ScaledMatrix w2 =
            iterate_scaled(b, n, Complex(x + static_cast<double>(n) * alpha, 0.0));
        CVector e_src, e_dst;
        try {
            e_src = top_singular_subspace(w1.m, 1).basis().col(0);
            e_dst = top_singular_subspace(w2.m, 1).basis().col(0);
        } catch (const DegenerateGapError&) {
            res.degenerate_gap = true;
            res.violations.push_back(x);
            res.pass = false;
            return res;
        }

        std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ull * (m + 1)));
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int r = 0; r < boundary_samples; ++r) {
            CVector u(dim_ext);
            for (Eigen::Index i = 0; i < dim_ext; ++i) u(i) = Complex(gauss(rng), gauss(rng));
            u -= e_src * (e_src.dot(u));  // orthogonal to the cone axis
            const double un = u.norm();
            if (un < 1e-12) continue;
            u /= un;
            const CVector w = rho * e_src + std::sqrt(1.0 - rho * rho) * u;
            const CVector y = w1.m * w;
            const double yn = y.norm();
            if (yn == 0.0) {
                res.violations.push_back(x);
                continue;
            }
            const double margin = std::abs(e_dst.dot(y)) / yn - rho;
            res.min_margin = std::min(res.min_margin, margin);
            if (margin <= 0) res.violations.push_back(x);
        }
    }
    res.pass = res.violations.empty() && res.min_margin > 0;
    return res;
}

namespace {

// Deterministic generic initial frame; a coordinate frame can be invariant
// without being dominant, which would stall the power iteration.
CMatrix generic_frame(int d, int k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix m(d, k);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < k; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<CMatrix> qr(m);
    return qr.householderQ() * CMatrix::Identity(d, k);
}

CMatrix orth(const CMatrix& v) {
    Eigen::HouseholderQR<CMatrix> qr(v);
    return qr.householderQ() * CMatrix::Identity(v.rows(), v.cols());
}

struct SectionState {
    std::vector<CMatrix> frames;  // per phase, current orthonormal d x k frame
    bool converged = false;
    int iterations_used = 0;
    double last_increment = 0.0;
};

// Push a fixed frame along backward orbits; frames at block j span
// A(x-a)...A(x-jba) U0, recomputed per block over cached factor evaluations.
SectionState forward_section(const TrigMatrixPoly& map, double alpha,
                             const std::vector<double>& phases, int k, int iterations,
                             long long block, double tol) {
    const int d = map.dim();
    const size_t np = phases.size();
    const CMatrix u0 = generic_frame(d, k, 0x5ec710f5u);

    SectionState st;
    st.frames.assign(np, u0);
    std::vector<std::vector<CMatrix>> factors(np);  // factors[p][i-1] = A(x_p - i alpha)

    int consecutive = 0;
    for (int j = 1; j <= iterations; ++j) {
        const long long len = static_cast<long long>(j) * block;
        double max_inc = 0.0;
#pragma omp parallel for schedule(static) reduction(max : max_inc)
        for (size_t p = 0; p < np; ++p) {
            auto& fac = factors[p];
            while (static_cast<long long>(fac.size()) < len) {
                const double y =
                    phases[p] - static_cast<double>(fac.size() + 1) * alpha;
                fac.push_back(map(Complex(y, 0.0)));
            }
            CMatrix v = u0;
            for (long long i = len; i >= 1; --i) {
                v = fac[i - 1] * v;
                v = orth(v);
            }
            const CMatrix prev = st.frames[p];
            st.frames[p] = v;
            const CMatrix diff = v * v.adjoint() - prev * prev.adjoint();
            Eigen::JacobiSVD<CMatrix> svd(diff);
            max_inc = std::max(max_inc, svd.singularValues()(0));
        }
        st.last_increment = max_inc;
        st.iterations_used = j;
        consecutive = max_inc < tol ? consecutive + 1 : 0;
        if (consecutive >= 10) {
            st.converged = true;
            break;
        }
    }
    return st;
}

// Pull a frame back through inverses along forward orbits (stable directions).
SectionState backward_section(const TrigMatrixPoly& map, double alpha,
                              const std::vector<double>& phases, int k, int iterations,
                              long long block, double tol) {
    const int d = map.dim();
    const size_t np = phases.size();
    const CMatrix w0 = generic_frame(d, k, 0x7a57ab1eu);

    SectionState st;
    st.frames.assign(np, w0);
    std::vector<std::vector<CMatrix>> factors(np);  // factors[p][i] = A(x_p + i alpha)^{-1}

    int consecutive = 0;
    for (int j = 1; j <= iterations; ++j) {
        const long long len = static_cast<long long>(j) * block;
        double max_inc = 0.0;
#pragma omp parallel for schedule(static) reduction(max : max_inc)
        for (size_t p = 0; p < np; ++p) {
            auto& fac = factors[p];
            while (static_cast<long long>(fac.size()) < len) {
                const double y = phases[p] + static_cast<double>(fac.size()) * alpha;
                fac.push_back(map(Complex(y, 0.0)).inverse());
            }
            CMatrix v = w0;
            for (long long i = len; i >= 1; --i) {
                v = fac[i - 1] * v;
                v = orth(v);
            }
            const CMatrix prev = st.frames[p];
            st.frames[p] = v;
            const CMatrix diff = v * v.adjoint() - prev * prev.adjoint();
            Eigen::JacobiSVD<CMatrix> svd(diff);
            max_inc = std::max(max_inc, svd.singularValues()(0));
        }
        st.last_increment = max_inc;
        st.iterations_used = j;
        consecutive = max_inc < tol ? consecutive + 1 : 0;
        if (consecutive >= 10) {
            st.converged = true;
            break;
        }
    }
    return st;
}

}  // namespace

Splitting unstable_section(const Cocycle& c, int k, int grid, int iterations, long long block,
                           double tol) {
    const int d = c.dim();
    if (k < 1 || k > d) throw DimensionError("unstable_section: k out of range");
    if (grid < 1 || iterations < 1 || block < 1)
        throw DimensionError("unstable_section: bad grid/iterations/block");

    Splitting sp;
    sp.k = k;
    sp.push_block = block;
    sp.phases.resize(grid);
    for (int m = 0; m < grid; ++m) sp.phases[m] = static_cast<double>(m) / grid;

    const SectionState st =
        forward_section(c.map, c.freq.value(), sp.phases, k, iterations, block, tol);
    if (!st.converged)
        throw RangeLimitError(
            "unstable_section: no convergence within budget; no domination evidence at this "
            "scale");
    sp.converged = st.converged;
    sp.iterations_used = st.iterations_used;
    sp.last_increment = st.last_increment;
    sp.unstable.reserve(grid);
    for (const auto& f : st.frames) sp.unstable.emplace_back(f);
    return sp;
}

void complete_splitting(const Cocycle& c, Splitting& split, int iterations, long long q_budget,
                        double tol) {
    const int d = c.dim();
    const int kc = d - split.k;
    if (kc < 1) throw DimensionError("complete_splitting: nothing to complete for k = d");

    // invertibility over the grid decides the route
    double min_abs_det = std::numeric_limits<double>::infinity();
    for (double x : split.phases)
        min_abs_det = std::min(min_abs_det, std::abs(c.map(Complex(x, 0.0)).determinant()));
    const double scale = std::pow(std::max(c.map.sup_norm_bound(), 1e-300), d);

    split.stable.clear();
    split.stable.reserve(split.phases.size());
    if (min_abs_det > 1e-12 * scale) {
        const SectionState st = backward_section(c.map, c.freq.value(), split.phases, kc,
                                                 iterations, split.push_block, tol);
        if (!st.converged)
            throw RangeLimitError("complete_splitting: stable pull-back did not converge");
        for (const auto& f : st.frames) split.stable.emplace_back(f);
    } else {
        // singular map: eigenspace splitting of A_q at the last approximant
        long long p = 0, q = 1;
        if (c.freq.is_rational()) {
            const Rational r = c.freq.rational_value();
            p = r.p;
            q = r.q;
        } else {
            for (const auto& a : c.freq.approximants(64).terms)
                if (a.q <= q_budget) {
                    p = a.p;
                    q = a.q;
                }
        }
        const Cocycle rat{Frequency::rational(p, q), c.map};
        for (double x : split.phases) {
            const ScaledMatrix m = iterate_scaled(rat, q, Complex(x, 0.0));
            Eigen::ComplexEigenSolver<CMatrix> es(m.m);
            std::vector<int> order(d);
            for (int i = 0; i < d; ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](int a, int bj) {
                return std::abs(es.eigenvalues()(a)) < std::abs(es.eigenvalues()(bj));
            });
            CMatrix frame(d, kc);
            for (int i = 0; i < kc; ++i) frame.col(i) = es.eigenvectors().col(order[i]);
            split.stable.emplace_back(Subspace::span_of(frame));
        }
    }

    split.min_angle = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < split.phases.size(); ++i)
        split.min_angle =
            std::min(split.min_angle, min_principal_angle(split.unstable[i], split.stable[i]));
}

double invariance_residual(const Cocycle& c, const Splitting& split, int iterations) {
    const double alpha = c.freq.value();
    std::vector<double> shifted(split.phases);
    for (double& x : shifted) x += alpha;
    const SectionState st = forward_section(c.map, alpha, shifted, split.k, iterations,
                                            split.push_block, 1e-10);
    double worst = 0.0;
    for (size_t i = 0; i < split.phases.size(); ++i) {
        const CMatrix pushed =
            orth(c.map(Complex(split.phases[i], 0.0)) * split.unstable[i].basis());
        const CMatrix diff = pushed * pushed.adjoint() - st.frames[i] * st.frames[i].adjoint();
        Eigen::JacobiSVD<CMatrix> svd(diff);
        worst = std::max(worst, svd.singularValues()(0));
    }
    return worst;
}

WindingReport scalar_multiplier_and_winding(const Cocycle& c, const Splitting& split,
                                            std::uint64_t seed) {
    if (split.k != 1)
        throw DimensionError(
            "scalar_multiplier_and_winding: k must be 1 (reduce with exterior powers)");
    const int d = c.dim();
    const size_t np = split.phases.size();

    // global chart vector: v^* u(x) must stay away from zero on the grid
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CVector v = split.unstable[0].basis().col(0);
    int retries = 0;
    for (;; ++retries) {
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& u : split.unstable)
            worst = std::min(worst, std::abs(v.dot(u.basis().col(0))));
        if (worst > 1e-3) break;
        if (retries >= 32)
            throw LiftError("scalar_multiplier_and_winding: no global lift after 32 retries");
        for (int i = 0; i < d; ++i) v(i) = Complex(gauss(rng), gauss(rng));
        v /= v.norm();
    }

    std::vector<Complex> lambda(np);
    for (size_t m = 0; m < np; ++m) {
        const CVector u = split.unstable[m].basis().col(0);
        const CMatrix a = c.map(Complex(split.phases[m], 0.0));
        lambda[m] = v.dot(a * u) / v.dot(u);
    }
    const Winding w = winding_number(lambda);
    return WindingReport{w.turns, w.total_arg, w.residual, -w.turns, retries};
}

AngleBandReport splitting_angle_profile(const std::vector<std::pair<double, Splitting>>& band,
                                        double tol) {
    if (band.size() < 2)
        throw DimensionError("splitting_angle_profile: need at least 2 band levels");
    AngleBandReport rep;
    rep.tol = tol;
    std::vector<std::pair<double, Splitting>> sorted(band);
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [t, sp] : sorted) {
        if (sp.stable.empty())
            throw DimensionError("splitting_angle_profile: splittings need stable sections");
        double mn = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < sp.phases.size(); ++i)
            mn = std::min(mn, min_principal_angle(sp.unstable[i], sp.stable[i]));
        rep.t.push_back(t);
        rep.min_angle.push_back(mn);
    }
    rep.boundary_min = std::min(rep.min_angle.front(), rep.min_angle.back());
    rep.interior_min = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i + 1 < rep.min_angle.size(); ++i)
        rep.interior_min = std::min(rep.interior_min, rep.min_angle[i]);
    if (!std::isfinite(rep.interior_min)) rep.interior_min = rep.boundary_min;
    rep.pass = rep.interior_min >= rep.boundary_min - tol;
    return rep;
}

double cauchy_riemann_residual(const Cocycle& c, double t_lo, double t_hi, int t_steps,
                               int x_grid, int iterations) {
    if (t_steps < 3) throw DimensionError("cauchy_riemann_residual: need t_steps >= 3");
    const int d = c.dim();
    const double ht = (t_hi - t_lo) / (t_steps - 1);
    const double hx = 1.0 / x_grid;

    // sections for every t level
    std::vector<Splitting> levels;
    levels.reserve(t_steps);
    for (int i = 0; i < t_steps; ++i) {
        const Cocycle shifted{c.freq, c.map.shift_imag(t_lo + i * ht)};
        levels.push_back(unstable_section(shifted, 1, x_grid, iterations));
    }

    // one chart for the whole patch, anchored mid-band
    const CVector v = levels[t_steps / 2].unstable[0].basis().col(0);
    auto chart = [&](const Subspace& u) -> CVector {
        const CVector b = u.basis().col(0);
        const Complex pivot = v.dot(b);
        if (std::abs(pivot) < 1e-6)
            throw LiftError("cauchy_riemann_residual: chart degenerates inside the patch");
        return b / pivot;
    };

    double worst = 0.0;
    for (int i = 1; i + 1 < t_steps; ++i) {
        for (int m = 0; m < x_grid; ++m) {
            const int mp = (m + 1) % x_grid;
            const int mm = (m + x_grid - 1) % x_grid;
            const CVector fx =
                (chart(levels[i].unstable[mp]) - chart(levels[i].unstable[mm])) / (2 * hx);
            const CVector ft =
                (chart(levels[i + 1].unstable[m]) - chart(levels[i - 1].unstable[m])) / (2 * ht);
            const double resid = (ft - Complex(0, 1) * fx).norm() / (1.0 + fx.norm());
            worst = std::max(worst, resid);
        }
    }
    (void)d;
    return worst;
}

const char* to_string(OseledetsVerdict v) {
    switch (v) {
        case OseledetsVerdict::trivial: return "trivial";
        case OseledetsVerdict::dominated: return "dominated";
        default: return "undetermined";
    }
}

ClassificationReport oseledets_classification(const Cocycle& c, long long budget, double gap_tol,
                                              int grid, int spectrum_grid) {
    const int d = c.dim();
    ClassificationReport rep;
    rep.gap_tol = gap_tol;
    rep.budget = budget;

    const long long n_spec = birkhoff_steps(c.freq, std::min<long long>(budget, 128));
    std::vector<LogValue> upper(d);
    for (int k = 1; k <= d; ++k)
        upper[k - 1] = finite_scale_exponent(c, k, n_spec, spectrum_grid);
    rep.spectrum.resize(d);
    LogValue prev(0.0);
    bool dead = false;
    for (int k = 1; k <= d; ++k) {
        if (dead || !upper[k - 1].finite()) {
            rep.spectrum[k - 1] = LogValue::minus_inf();
            dead = true;
        } else {
            rep.spectrum[k - 1] = LogValue(upper[k - 1].value() - prev.value());
            prev = upper[k - 1];
        }
    }

    for (int k = 1; k <= d - 1; ++k) {
        const LogValue& a = rep.spectrum[k - 1];
        const LogValue& b = rep.spectrum[k];
        if (!a.finite()) continue;  // -inf above -inf: no usable gap
        if (!b.finite() || a.value() - b.value() > gap_tol) rep.gap_indices.push_back(k);
    }
    if (rep.gap_indices.empty()) {
        rep.verdict = OseledetsVerdict::trivial;
        return rep;
    }

    // n schedule: approximant denominators, else doubling from 1
    std::vector<long long> ns;
    if (c.freq.is_rational()) {
        for (long long n = 1; n <= budget; n *= 2) ns.push_back(n);
    } else {
        for (const auto& a : c.freq.approximants(64).terms)
            if (a.q <= budget) ns.push_back(a.q);
        if (ns.empty()) ns.push_back(1);
        while (ns.back() * 2 <= budget) ns.push_back(ns.back() * 2);
    }
    const double rhos[] = {0.25, 0.125, 0.0625, 0.03125};

    for (int k : rep.gap_indices) {
        bool done = false;
        for (long long n : ns) {
            for (double rho : rhos) {
                DominationCertificate cert = singular_gap_certificate(c, k, n, grid, rho);
                if (cert.pass) {
                    rep.certificates.push_back(std::move(cert));
                    done = true;
                    break;
                }
            }
            if (done) break;
        }
        if (!done) rep.undetermined_gaps.push_back(k);
    }
    rep.verdict = rep.undetermined_gaps.empty() ? OseledetsVerdict::dominated
                                                : OseledetsVerdict::undetermined;
    return rep;
}

}  // namespace coclab
