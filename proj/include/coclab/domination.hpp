#pragma once

#include <cstdint>
#include <vector>

#include "coclab/cocycle.hpp"
#include "coclab/lyapunov.hpp"

namespace coclab {

// Singular-value-gap evidence for k-domination. Reduced to the compound
// cocycle B = Lambda^k A; a pass means, at every grid phase x,
//   sigma_2(B_n(x))      <= rho^2 sigma_1(B_n(x)),
//   sigma_2(B_n(x+n a))  <= rho^2 sigma_1(B_n(x+n a)),
//   sigma_1(B_2n(x))     >= 4 rho sigma_1(B_n(x+n a)) sigma_1(B_n(x)).
// `certified` additionally requires the slack to exceed the grid modulus
// bound, promoting the grid pass to an all-phases statement.
struct DominationCertificate {
    int k = 0;
    long long n = 0;
    double rho = 0.0;
    int grid = 0;
    bool pass = false;
    bool certified = false;
    double worst_sigma_ratio = 0.0;    // max sigma_2 / (rho^2 sigma_1); pass needs <= 1
    double worst_product_ratio = 0.0;  // min sigma_1(B_2n) / (4 rho s1 s1'); pass needs >= 1
    double min_log_slack = 0.0;        // smallest log slack across inequalities and phases
    double modulus_bound = 0.0;        // Lipschitz-in-x bound x grid spacing, log units
    std::vector<double> violations;    // phases where some inequality fails
};

DominationCertificate singular_gap_certificate(const Cocycle& c, int k, long long n, int grid,
                                               double rho);

struct ConefieldResult {
    bool pass = false;
    bool degenerate_gap = false;
    double min_margin = 0.0;  // min over samples of ||P w'|| - rho (projective)
    std::vector<double> violations;
};

// Cone re-entry test: directions on the cone boundary
// { w : ||P_{E_1^+(B_n(x))} w|| = rho } are pushed by B_n(x) and must land
// strictly inside the cone at x + n alpha. Independent of the sigma route.
ConefieldResult conefield_test(const Cocycle& c, int k, long long n, double rho, int grid,
                               int boundary_samples = 8, std::uint64_t seed = 1);

struct Splitting {
    int k = 0;
    long long push_block = 1;  // steps per iteration block
    std::vector<double> phases;
    std::vector<Subspace> unstable;  // u(x), rank k
    std::vector<Subspace> stable;    // s(x), rank d-k; empty until completed
    bool converged = false;
    int iterations_used = 0;
    double last_increment = 0.0;  // max gap-metric Cauchy increment at stop
    double min_angle = 0.0;       // min principal angle u vs s over the grid
};

// u(x): push a fixed initial k-frame forward along the backward orbit of x,
// re-orthonormalizing each step; converged when the gap-metric increment
// stays below `tol` for 10 consecutive blocks.
Splitting unstable_section(const Cocycle& c, int k, int grid, int iterations,
                           long long block = 1, double tol = 1e-8);

// Fill s(x): pull a (d-k)-frame back through A(x)^{-1} where A is invertible
// on the grid; otherwise split eigenspaces of A_q at the last approximant
// denominator q within `q_budget`. Also fills min_angle.
void complete_splitting(const Cocycle& c, Splitting& split, int iterations,
                        long long q_budget = 256, double tol = 1e-8);

// Max over the grid of the gap between A(x) u(x) and a freshly converged
// u(x + alpha); measures invariance of the section.
double invariance_residual(const Cocycle& c, const Splitting& split, int iterations);

struct WindingReport {
    int winding = 0;
    double total_arg = 0.0;
    double residual = 0.0;
    int implied_omega1 = 0;  // -winding
    int lift_retries = 0;
};

// lambda(x) from A(x) u(x) = lambda(x) u(x+alpha), read in a global chart
// v^* u = 1 (v found by retries); winding of lambda gives omega^1 = -winding.
WindingReport scalar_multiplier_and_winding(const Cocycle& c, const Splitting& split,
                                            std::uint64_t seed = 7);

struct AngleBandReport {
    std::vector<double> t;
    std::vector<double> min_angle;  // per t, min over the phase grid
    double interior_min = 0.0;
    double boundary_min = 0.0;
    bool pass = false;  // interior_min >= boundary_min - tol
    double tol = 0.0;
};

// Maximum-principle check: over a band of splittings the smallest angle
// should occur at the boundary t values (up to tolerance).
AngleBandReport splitting_angle_profile(const std::vector<std::pair<double, Splitting>>& band,
                                        double tol = 1e-3);

// Discrete Cauchy-Riemann residual of z -> u(z) in chart coordinates over a
// 2D (x, t) grid; small residuals witness holomorphy of the section. k = 1.
double cauchy_riemann_residual(const Cocycle& c, double t_lo, double t_hi, int t_steps,
                               int x_grid, int iterations);

enum class OseledetsVerdict { trivial, dominated, undetermined };

struct ClassificationReport {
    OseledetsVerdict verdict = OseledetsVerdict::undetermined;
    std::vector<LogValue> spectrum;       // L_1..L_d estimates at t = 0
    std::vector<int> gap_indices;         // k with L_k - L_{k+1} > gap_tol
    std::vector<DominationCertificate> certificates;  // one per certified gap
    std::vector<int> undetermined_gaps;   // gaps with no certificate in budget
    double gap_tol = 0.0;
    long long budget = 0;
};

// Estimate the spectrum, then hunt certificates for every spectral gap over
// n in the approximant-denominator schedule and rho in {1/4,...,1/32}.
// trivial = no gaps at all; dominated = every gap certified.
ClassificationReport oseledets_classification(const Cocycle& c, long long budget = 256,
                                              double gap_tol = 1e-3, int grid = 256,
                                              int spectrum_grid = 512);

const char* to_string(OseledetsVerdict v);

}  // namespace coclab
