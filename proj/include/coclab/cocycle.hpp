#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "coclab/linalg.hpp"

namespace coclab {

// Matrix-valued trigonometric polynomial A(z) = sum_{|j|<=N} C_j e^{2 pi i j z}.
// Evaluation at real x is 1-periodic; complex z reaches the analytic extension.
class TrigMatrixPoly {
  public:
    TrigMatrixPoly(int dim, int degree);
    static TrigMatrixPoly constant(CMatrix c);

    int dim() const { return dim_; }
    int degree() const { return degree_; }

    const CMatrix& coeff(int j) const { return coeffs_.at(j + degree_); }
    void set_coeff(int j, CMatrix c);

    CMatrix operator()(Complex z) const;

    // Same function shifted in the imaginary direction: coefficients pick up
    // e^{-2 pi j t}, so evaluate(shift_imag(t), x) == evaluate(*this, x + it).
    TrigMatrixPoly shift_imag(double t) const;

    // sup_x ||A(x)||_2 bound and a bound on ||dA/dx||_2, from coefficient norms.
    double sup_norm_bound() const;
    double derivative_norm_bound() const;

  private:
    int dim_;
    int degree_;
    std::vector<CMatrix> coeffs_;  // index j + degree_
};

struct Rational {
    long long p = 0;
    long long q = 1;  // reduced, q >= 1
};

struct Approximant {
    long long p = 0;
    long long q = 1;
    long long q_prev = 0;  // denominator of the previous approximant
};

struct ApproximantRun {
    std::vector<Approximant> terms;
    bool truncated = false;  // remainder fell below float resolution
};

// Continued-fraction best approximants of alpha (taken mod 1), by the Euclid
// recursion on the double. Stops after `count` terms or when the remainder
// drops below 1e-12, in which case `truncated` is set.
ApproximantRun continued_fraction_approximants(double alpha, int count);

class Frequency {
  public:
    static Frequency irrational(double alpha);
    static Frequency rational(long long p, long long q);

    double value() const { return value_; }
    bool is_rational() const { return rational_; }
    Rational rational_value() const;  // throws DimensionError if irrational

    // Irrational only; rational frequencies have no approximant ladder.
    ApproximantRun approximants(int count) const;

  private:
    double value_ = 0.0;
    bool rational_ = false;
    Rational ratio_;
};

struct Cocycle {
    Frequency freq;
    TrigMatrixPoly map;

    int dim() const { return map.dim(); }
};

// A_n(z) = A(z+(n-1)alpha) ... A(z); n = 0 gives the identity.
CMatrix iterate(const Cocycle& c, long long n, Complex z);

// e^{log_scale} * m; keeps long products inside double range.
struct ScaledMatrix {
    CMatrix m;
    double log_scale = 0.0;
};

ScaledMatrix iterate_scaled(const Cocycle& c, long long n, Complex z);
ScaledMatrix scaled_product(const ScaledMatrix& left, const ScaledMatrix& right);

// Cocycle with the same frequency mapping z to the k-th compound of A(z),
// rebuilt as a trig polynomial of degree k*N from samples on a Fourier grid.
Cocycle exterior_cocycle(const Cocycle& c, int k);

// --- built-in families ------------------------------------------------------

// [[E - lambda cos 2 pi x, -1], [1, 0]]
Cocycle almost_mathieu(double energy, double coupling, Frequency freq);
// Constant diagonal matrix.
Cocycle diagonal_constant(const std::vector<Complex>& entries, Frequency freq);
// Scalar e^{2 pi i w z} (dimension 1).
Cocycle scalar_winding(int w, Frequency freq);
// Random trig polynomial with coefficient decay 1/(1+|j|)^2, fixed seed.
Cocycle random_trig(int dim, int degree, double scale, std::uint64_t seed, Frequency freq);

// Family by name with key=value parameters, as accepted by the CLI.
Cocycle make_family(const std::string& name,
                    const std::map<std::string, std::string>& params, Frequency freq);

// --- JSON cocycle spec ------------------------------------------------------
// { "dim": d, "freq": {"kind":"irrational","value":...}|{"kind":"rational","p":..,"q":..},
//   "coeffs": [ {"j": j, "re": [[..]], "im": [[..]]}, ... ] }

Cocycle load_cocycle(std::istream& in);
Cocycle load_cocycle_file(const std::string& path);
void save_cocycle(const Cocycle& c, std::ostream& out);

}  // namespace coclab
