#include "coclab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace coclab {

bool is_finite(const CMatrix& b) {
    return b.allFinite();
}

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::vector<std::vector<int>> k_subsets(int d, int k) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > d) return out;
    std::vector<int> cur(k);
    for (int i = 0; i < k; ++i) cur[i] = i;
    while (true) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[i] == d - k + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

static void require_square(const CMatrix& b, const char* who) {
    if (b.rows() != b.cols())
        throw DimensionError(std::string(who) + ": matrix must be square");
}

std::vector<double> singular_values(const CMatrix& b) {
    require_square(b, "singular_values");
    Eigen::JacobiSVD<CMatrix> svd(b);
    const auto& s = svd.singularValues();
    return std::vector<double>(s.data(), s.data() + s.size());
}

CMatrix exterior_power(const CMatrix& b, int k) {
    require_square(b, "exterior_power");
    const int d = static_cast<int>(b.rows());
    if (k < 1 || k > d)
        throw DimensionError("exterior_power: k must satisfy 1 <= k <= d");
    if (k == 1) return b;

    const auto subsets = k_subsets(d, k);
    const int m = static_cast<int>(subsets.size());
    CMatrix out(m, m);
    CMatrix minor(k, k);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) {
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j)
                    minor(i, j) = b(subsets[r][i], subsets[c][j]);
            out(r, c) = minor.determinant();
        }
    }
    return out;
}

// Parlett-Reinsch balancing with powers of two; exact on the entries.
static CMatrix balanced(CMatrix a) {
    const int n = static_cast<int>(a.rows());
    bool again = true;
    int sweeps = 0;
    while (again && sweeps++ < 32) {
        again = false;
        for (int i = 0; i < n; ++i) {
            double c = 0, r = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0 || r == 0) continue;
            double f = 1.0;
            const double s = c + r;
            while (c < r / 2) { c *= 2; r /= 2; f *= 2; }
            while (c > r * 2) { c /= 2; r *= 2; f /= 2; }
            if (c + r < 0.95 * s && f != 1.0) {
                again = true;
                a.col(i) *= f;
                a.row(i) /= f;
            }
        }
    }
    return a;
}

double spectral_radius(const CMatrix& b) {
    require_square(b, "spectral_radius");
    if (b.rows() == 0) return 0.0;
    const double scale = b.cwiseAbs().maxCoeff();
    if (scale == 0.0 || !std::isfinite(scale)) return scale == 0.0 ? 0.0 : scale;
    const CMatrix a = balanced(b / scale);
    Eigen::ComplexEigenSolver<CMatrix> es(a, /*computeEigenvectors=*/false);
    return scale * es.eigenvalues().cwiseAbs().maxCoeff();
}

Subspace::Subspace(CMatrix orthonormal_basis) : basis_(std::move(orthonormal_basis)) {
    if (basis_.cols() < 1 || basis_.rows() < basis_.cols())
        throw DimensionError("Subspace: need d x k basis with 1 <= k <= d");
    CMatrix gram = basis_.adjoint() * basis_;
    gram -= CMatrix::Identity(basis_.cols(), basis_.cols());
    if (gram.cwiseAbs().maxCoeff() > 1e-10)
        throw NormalizationError("Subspace: basis columns are not orthonormal");
}

Subspace Subspace::span_of(const CMatrix& vectors) {
    Eigen::HouseholderQR<CMatrix> qr(vectors);
    CMatrix q = qr.householderQ() * CMatrix::Identity(vectors.rows(), vectors.cols());
    return Subspace(std::move(q));
}

Subspace top_singular_subspace(const CMatrix& b, int k, double gap_margin) {
    require_square(b, "top_singular_subspace");
    const int d = static_cast<int>(b.rows());
    if (k < 1 || k > d)
        throw DimensionError("top_singular_subspace: k out of range");
    Eigen::JacobiSVD<CMatrix> svd(b, Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double sk = s(k - 1);
    const double sk1 = (k < d) ? s(k) : 0.0;
    if (!(sk > 0) || sk - sk1 < gap_margin * sk)
        throw DegenerateGapError("top_singular_subspace: sigma_k ~ sigma_{k+1}");
    return Subspace(svd.matrixV().leftCols(k));
}

double projection_restriction_norm(const Subspace& s, const CVector& w) {
    if (w.size() != s.ambient_dim())
        throw DimensionError("projection_restriction_norm: dimension mismatch");
    if (std::abs(w.norm() - 1.0) > 1e-8)
        throw NormalizationError("projection_restriction_norm: w must be a unit vector");
    return (s.basis().adjoint() * w).norm();
}

double subspace_gap(const Subspace& a, const Subspace& b) {
    if (a.ambient_dim() != b.ambient_dim())
        throw DimensionError("subspace_gap: ambient dimensions differ");
    CMatrix diff = a.projector() - b.projector();
    Eigen::JacobiSVD<CMatrix> svd(diff);
    return svd.singularValues()(0);
}

double min_principal_angle(const Subspace& u, const Subspace& s) {
    if (u.ambient_dim() != s.ambient_dim())
        throw DimensionError("min_principal_angle: ambient dimensions differ");
    CMatrix overlap = u.basis().adjoint() * s.basis();
    Eigen::JacobiSVD<CMatrix> svd(overlap);
    double c = svd.singularValues()(0);
    c = std::min(c, 1.0);
    return std::acos(c);
}

ObliqueProjector oblique_projector(const Subspace& u, const Subspace& s) {
    const int d = u.ambient_dim();
    if (s.ambient_dim() != d || u.rank() + s.rank() != d)
        throw DimensionError("oblique_projector: u and s must be complementary in C^d");
    const double theta = min_principal_angle(u, s);
    if (theta < 1e-12)
        throw TransversalityError("oblique_projector: subspaces are not transverse");

    CMatrix frame(d, d);
    frame.leftCols(u.rank()) = u.basis();
    frame.rightCols(s.rank()) = s.basis();
    CMatrix selector = CMatrix::Zero(d, d);
    selector.topLeftCorner(u.rank(), u.rank()) = CMatrix::Identity(u.rank(), u.rank());
    CMatrix p = frame * selector * frame.inverse();

    Eigen::JacobiSVD<CMatrix> svd(p);
    return ObliqueProjector{std::move(p), svd.singularValues()(0), theta};
}

TracePowerBound trace_power_lower_bound(const CMatrix& b) {
    require_square(b, "trace_power_lower_bound");
    const int d = static_cast<int>(b.rows());
    const double scale = b.cwiseAbs().maxCoeff();
    if (scale == 0.0) return TracePowerBound{1, 0.0};

    const CMatrix a = b / scale;
    CMatrix power = CMatrix::Identity(d, d);
    int best_k = 1;
    double best = -1.0;
    for (int k = 1; k <= d; ++k) {
        power = power * a;
        const double v = std::pow(std::abs(power.trace()), 1.0 / k);
        if (v > best) {
            best = v;
            best_k = k;
        }
    }
    return TracePowerBound{best_k, best * scale};
}

Winding winding_number(std::span<const Complex> loop) {
    if (loop.size() < 3)
        throw DimensionError("winding_number: need at least 3 samples");
    double total = 0.0;
    const size_t m = loop.size();
    for (size_t i = 0; i < m; ++i) {
        const Complex a = loop[i];
        const Complex b = loop[(i + 1) % m];
        if (std::abs(a) == 0.0 || std::abs(b) == 0.0)
            throw RefineGridError("winding_number: loop passes through zero");
        const double inc = std::arg(b / a);
        if (std::abs(inc) >= M_PI / 2)
            throw RefineGridError("winding_number: argument increment >= pi/2, refine the grid");
        total += inc;
    }
    const double t = total / (2 * M_PI);
    const int turns = static_cast<int>(std::lround(t));
    return Winding{turns, total, std::abs(t - turns)};
}

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace coclab
