#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "coclab/errors.hpp"

namespace coclab {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

bool is_finite(const CMatrix& b);

// Largest binomial we materialize; compound matrices beyond that are out of scope.
long long binomial(int n, int k);

// All k-subsets of {0,..,d-1} in lexicographic order. This fixes the row/column
// basis of compound matrices once and for all.
std::vector<std::vector<int>> k_subsets(int d, int k);

// Singular values of a square matrix, decreasing.
std::vector<double> singular_values(const CMatrix& b);

// k-th compound matrix: entry (I,J) is the minor of rows I, columns J, with
// I, J running over lexicographic k-subsets. Multiplicative by Cauchy-Binet.
CMatrix exterior_power(const CMatrix& b, int k);

// Max eigenvalue modulus. The matrix is balanced (Parlett-Reinsch) and scaled
// to unit norm before the Schur pass; long cocycle products are badly
// non-normal and raw eigensolves lose accuracy on them.
double spectral_radius(const CMatrix& b);

// A k-dimensional subspace of C^d held as an orthonormal basis.
class Subspace {
  public:
    // basis columns must already be orthonormal (checked to 1e-10).
    explicit Subspace(CMatrix orthonormal_basis);

    // Orthonormalize the column span of an arbitrary full-rank d x k matrix.
    static Subspace span_of(const CMatrix& vectors);

    int ambient_dim() const { return static_cast<int>(basis_.rows()); }
    int rank() const { return static_cast<int>(basis_.cols()); }
    const CMatrix& basis() const { return basis_; }
    CMatrix projector() const { return basis_ * basis_.adjoint(); }

  private:
    CMatrix basis_;
};

// Span of the right singular vectors of the top k singular values, E_k^+(b).
// Requires a relative gap sigma_k - sigma_{k+1} >= margin * sigma_k.
Subspace top_singular_subspace(const CMatrix& b, int k, double gap_margin = 1e-8);

// ||P_S w|| for a unit vector w; in [0,1].
double projection_restriction_norm(const Subspace& s, const CVector& w);

// Gap metric between equal-rank subspaces: ||P_a - P_b||_2.
double subspace_gap(const Subspace& a, const Subspace& b);

// Smallest principal angle between u and s, in (0, pi/2].
double min_principal_angle(const Subspace& u, const Subspace& s);

struct ObliqueProjector {
    CMatrix p;     // ker p = s, p restricted to u is the identity
    double norm;   // ||p||_2
    double angle;  // smallest principal angle between u and s
};

// Projection onto u along s for complementary subspaces. ||p|| * sin(angle) = 1.
ObliqueProjector oblique_projector(const Subspace& u, const Subspace& s);

struct TracePowerBound {
    int k;         // achieving power, 1 <= k <= d
    double value;  // max_k |tr b^k|^{1/k}
};

// max_{1<=k<=d} |tr b^k|^{1/k}; bounded below by c_d * spectral_radius(b) for
// a dimension-dependent positive constant that we only measure, never assume.
TracePowerBound trace_power_lower_bound(const CMatrix& b);

struct Winding {
    int turns;          // accumulated argument / 2 pi, rounded
    double total_arg;   // sum of principal-branch increments around the loop
    double residual;    // |total_arg / 2pi - turns|
};

// Winding number of a closed discrete loop of nonzero complex values.
// Every increment must stay below pi/2 or the grid is deemed too coarse.
Winding winding_number(std::span<const Complex> loop);

// Deterministic pairwise (cascade) summation; the reduction order is fixed so
// results do not depend on thread count.
double pairwise_sum(std::span<const double> xs);

}  // namespace coclab
