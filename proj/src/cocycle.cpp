#include "coclab/cocycle.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace coclab {

TrigMatrixPoly::TrigMatrixPoly(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 1 || degree < 0)
        throw DimensionError("TrigMatrixPoly: need dim >= 1, degree >= 0");
    coeffs_.assign(2 * degree + 1, CMatrix::Zero(dim, dim));
}

TrigMatrixPoly TrigMatrixPoly::constant(CMatrix c) {
    if (c.rows() != c.cols())
        throw DimensionError("TrigMatrixPoly::constant: matrix must be square");
    TrigMatrixPoly p(static_cast<int>(c.rows()), 0);
    p.coeffs_[0] = std::move(c);
    return p;
}

void TrigMatrixPoly::set_coeff(int j, CMatrix c) {
    if (j < -degree_ || j > degree_)
        throw DimensionError("TrigMatrixPoly::set_coeff: |j| exceeds degree");
    if (c.rows() != dim_ || c.cols() != dim_)
        throw DimensionError("TrigMatrixPoly::set_coeff: coefficient has wrong shape");
    if (!is_finite(c))
        throw RangeLimitError("TrigMatrixPoly::set_coeff: non-finite coefficient");
    coeffs_[j + degree_] = std::move(c);
}

CMatrix TrigMatrixPoly::operator()(Complex z) const {
    CMatrix out = coeffs_[degree_];
    if (degree_ == 0) return out;
    const Complex w = std::exp(Complex(0, 2 * M_PI) * z);
    const Complex winv = std::exp(Complex(0, -2 * M_PI) * z);
    Complex pos = 1.0, neg = 1.0;
    for (int j = 1; j <= degree_; ++j) {
        pos *= w;
        neg *= winv;
        out += coeffs_[degree_ + j] * pos + coeffs_[degree_ - j] * neg;
    }
    return out;
}

TrigMatrixPoly TrigMatrixPoly::shift_imag(double t) const {
    // Guard e^{2 pi N |t|} against overflow before touching coefficients.
    if (2 * M_PI * degree_ * std::abs(t) > 600.0)
        throw RangeLimitError(
            "shift_imag: e^{2 pi N t} out of double range; reduce t or the degree");
    TrigMatrixPoly out(dim_, degree_);
    for (int j = -degree_; j <= degree_; ++j)
        out.coeffs_[j + degree_] = coeffs_[j + degree_] * std::exp(-2 * M_PI * j * t);
    return out;
}

double TrigMatrixPoly::sup_norm_bound() const {
    double s = 0.0;
    for (const auto& c : coeffs_) s += c.norm();
    return s;
}

double TrigMatrixPoly::derivative_norm_bound() const {
    double s = 0.0;
    for (int j = -degree_; j <= degree_; ++j)
        s += 2 * M_PI * std::abs(j) * coeffs_[j + degree_].norm();
    return s;
}

ApproximantRun continued_fraction_approximants(double alpha, int count) {
    alpha -= std::floor(alpha);
    ApproximantRun run;
    long long p_prev = 1, q_prev = 0;  // conventions p_{-1}/q_{-1} = 1/0
    long long p = 0, q = 1;            // p_0/q_0 = 0/1
    double x = alpha;
    for (int i = 0; i < count; ++i) {
        if (x < 1e-12) {
            run.truncated = true;
            break;
        }
        const double inv = 1.0 / x;
        const double a_real = std::floor(inv);
        if (a_real > 9e17) {  // denominator would overflow long long
            run.truncated = true;
            break;
        }
        const long long a = static_cast<long long>(a_real);
        const long long pn = a * p + p_prev;
        const long long qn = a * q + q_prev;
        run.terms.push_back(Approximant{pn, qn, q});
        p_prev = p; q_prev = q;
        p = pn; q = qn;
        x = inv - a_real;
    }
    return run;
}

Frequency Frequency::irrational(double alpha) {
    Frequency f;
    f.value_ = alpha - std::floor(alpha);
    f.rational_ = false;
    return f;
}

Frequency Frequency::rational(long long p, long long q) {
    if (q < 1) throw DimensionError("Frequency::rational: q must be >= 1");
    p = ((p % q) + q) % q;
    const long long g = std::gcd(p, q);
    Frequency f;
    f.ratio_ = Rational{p / g, q / g};
    f.value_ = static_cast<double>(f.ratio_.p) / static_cast<double>(f.ratio_.q);
    f.rational_ = true;
    return f;
}

Rational Frequency::rational_value() const {
    if (!rational_) throw DimensionError("Frequency: not rational");
    return ratio_;
}

ApproximantRun Frequency::approximants(int count) const {
    if (rational_)
        throw DimensionError("Frequency::approximants: frequency is rational");
    return continued_fraction_approximants(value_, count);
}

CMatrix iterate(const Cocycle& c, long long n, Complex z) {
    if (n < 0) throw DimensionError("iterate: n must be nonnegative");
    CMatrix out = CMatrix::Identity(c.dim(), c.dim());
    const double alpha = c.freq.value();
    for (long long j = 0; j < n; ++j)
        out = c.map(z + static_cast<double>(j) * alpha) * out;
    return out;
}

ScaledMatrix iterate_scaled(const Cocycle& c, long long n, Complex z) {
    if (n < 0) throw DimensionError("iterate_scaled: n must be nonnegative");
    ScaledMatrix out{CMatrix::Identity(c.dim(), c.dim()), 0.0};
    const double alpha = c.freq.value();
    for (long long j = 0; j < n; ++j) {
        out.m = c.map(z + static_cast<double>(j) * alpha) * out.m;
        const double nrm = out.m.norm();
        if (nrm == 0.0) return out;  // product died; log_scale retains history
        if (nrm > 1e100 || nrm < 1e-100) {
            out.m /= nrm;
            out.log_scale += std::log(nrm);
        }
    }
    return out;
}

ScaledMatrix scaled_product(const ScaledMatrix& left, const ScaledMatrix& right) {
    ScaledMatrix out{left.m * right.m, left.log_scale + right.log_scale};
    const double nrm = out.m.norm();
    if (nrm > 0 && (nrm > 1e100 || nrm < 1e-100)) {
        out.m /= nrm;
        out.log_scale += std::log(nrm);
    }
    return out;
}

Cocycle exterior_cocycle(const Cocycle& c, int k) {
    const int d = c.dim();
    if (k < 1 || k > d)
        throw DimensionError("exterior_cocycle: k must satisfy 1 <= k <= d");
    if (k == 1) return c;

    const int deg = k * c.map.degree();
    const int dim_ext = static_cast<int>(binomial(d, k));
    TrigMatrixPoly ext(dim_ext, deg);
    const int grid = 2 * deg + 1;

    std::vector<CMatrix> samples(grid);
    for (int m = 0; m < grid; ++m)
        samples[m] = exterior_power(c.map(Complex(static_cast<double>(m) / grid, 0.0)), k);

    // Direct DFT; exact for trig polynomials of degree <= deg on this grid.
    for (int j = -deg; j <= deg; ++j) {
        CMatrix acc = CMatrix::Zero(dim_ext, dim_ext);
        for (int m = 0; m < grid; ++m) {
            const double phase = -2 * M_PI * j * m / static_cast<double>(grid);
            acc += samples[m] * Complex(std::cos(phase), std::sin(phase));
        }
        ext.set_coeff(j, acc / static_cast<double>(grid));
    }
    return Cocycle{c.freq, std::move(ext)};
}

Cocycle almost_mathieu(double energy, double coupling, Frequency freq) {
    TrigMatrixPoly map(2, 1);
    CMatrix c0(2, 2), c1(2, 2);
    c0 << Complex(energy), Complex(-1.0), Complex(1.0), Complex(0.0);
    c1 << Complex(-coupling / 2), Complex(0.0), Complex(0.0), Complex(0.0);
    map.set_coeff(0, c0);
    map.set_coeff(1, c1);
    map.set_coeff(-1, c1);
    return Cocycle{freq, std::move(map)};
}

Cocycle diagonal_constant(const std::vector<Complex>& entries, Frequency freq) {
    if (entries.empty()) throw DimensionError("diagonal_constant: empty entry list");
    const int d = static_cast<int>(entries.size());
    CMatrix m = CMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) m(i, i) = entries[i];
    return Cocycle{freq, TrigMatrixPoly::constant(std::move(m))};
}

Cocycle scalar_winding(int w, Frequency freq) {
    TrigMatrixPoly map(1, std::abs(w) == 0 ? 0 : std::abs(w));
    CMatrix one(1, 1);
    one << Complex(1.0);
    map.set_coeff(w, one);
    return Cocycle{freq, std::move(map)};
}

Cocycle random_trig(int dim, int degree, double scale, std::uint64_t seed, Frequency freq) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    TrigMatrixPoly map(dim, degree);
    for (int j = -degree; j <= degree; ++j) {
        CMatrix c(dim, dim);
        const double decay = scale / ((1.0 + std::abs(j)) * (1.0 + std::abs(j)));
        for (int r = 0; r < dim; ++r)
            for (int s = 0; s < dim; ++s)
                c(r, s) = decay * Complex(gauss(rng), gauss(rng));
        map.set_coeff(j, std::move(c));
    }
    return Cocycle{freq, std::move(map)};
}

static double param_double(const std::map<std::string, std::string>& params,
                           const std::string& key, double fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw DimensionError("family parameter '" + key + "' is not a number: " + it->second);
    }
}

Cocycle make_family(const std::string& name,
                    const std::map<std::string, std::string>& params, Frequency freq) {
    if (name == "almost_mathieu") {
        return almost_mathieu(param_double(params, "E", 0.0),
                              param_double(params, "lambda", 1.0), freq);
    }
    if (name == "diag") {
        std::vector<Complex> entries;
        auto it = params.find("entries");
        if (it != params.end()) {
            std::stringstream ss(it->second);
            std::string tok;
            while (std::getline(ss, tok, ','))
                entries.emplace_back(std::stod(tok));
        } else {
            entries = {Complex(2.0), Complex(1.0)};
        }
        return diagonal_constant(entries, freq);
    }
    if (name == "scalar_winding") {
        return scalar_winding(static_cast<int>(param_double(params, "w", 1.0)), freq);
    }
    if (name == "random_trig") {
        return random_trig(static_cast<int>(param_double(params, "d", 2.0)),
                           static_cast<int>(param_double(params, "N", 1.0)),
                           param_double(params, "scale", 1.0),
                           static_cast<std::uint64_t>(param_double(params, "seed", 1.0)), freq);
    }
    throw DimensionError("unknown cocycle family: " + name);
}

using nlohmann::json;

static Frequency freq_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "rational")
        return Frequency::rational(j.at("p").get<long long>(), j.at("q").get<long long>());
    if (kind == "irrational")
        return Frequency::irrational(j.at("value").get<double>());
    throw DimensionError("cocycle spec: freq.kind must be rational or irrational");
}

Cocycle load_cocycle(std::istream& in) {
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DimensionError(std::string("cocycle spec: invalid JSON: ") + e.what());
    }
    try {
        const int d = j.at("dim").get<int>();
        Frequency freq = freq_from_json(j.at("freq"));
        int degree = 0;
        for (const auto& entry : j.at("coeffs"))
            degree = std::max(degree, std::abs(entry.at("j").get<int>()));
        TrigMatrixPoly map(d, degree);
        for (const auto& entry : j.at("coeffs")) {
            const auto& re = entry.at("re");
            const auto& im = entry.at("im");
            CMatrix c(d, d);
            for (int r = 0; r < d; ++r)
                for (int s = 0; s < d; ++s)
                    c(r, s) = Complex(re.at(r).at(s).get<double>(), im.at(r).at(s).get<double>());
            map.set_coeff(entry.at("j").get<int>(), std::move(c));
        }
        return Cocycle{freq, std::move(map)};
    } catch (const json::exception& e) {
        throw DimensionError(std::string("cocycle spec: ") + e.what());
    }
}

Cocycle load_cocycle_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DimensionError("cannot open cocycle spec file: " + path);
    return load_cocycle(in);
}

void save_cocycle(const Cocycle& c, std::ostream& out) {
    json j;
    j["dim"] = c.dim();
    if (c.freq.is_rational()) {
        const Rational r = c.freq.rational_value();
        j["freq"] = {{"kind", "rational"}, {"p", r.p}, {"q", r.q}};
    } else {
        j["freq"] = {{"kind", "irrational"}, {"value", c.freq.value()}};
    }
    j["coeffs"] = json::array();
    for (int jj = -c.map.degree(); jj <= c.map.degree(); ++jj) {
        const CMatrix& coeff = c.map.coeff(jj);
        if (coeff.cwiseAbs().maxCoeff() == 0.0 && jj != 0) continue;
        json re = json::array(), im = json::array();
        for (int r = 0; r < c.dim(); ++r) {
            json re_row = json::array(), im_row = json::array();
            for (int s = 0; s < c.dim(); ++s) {
                re_row.push_back(coeff(r, s).real());
                im_row.push_back(coeff(r, s).imag());
            }
            re.push_back(re_row);
            im.push_back(im_row);
        }
        j["coeffs"].push_back({{"j", jj}, {"re", re}, {"im", im}});
    }
    out << j.dump(2) << "\n";
}

}  // namespace coclab
