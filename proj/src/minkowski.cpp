#include "hglw/minkowski.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace hglw {

namespace {

bool finite(double x) { return std::isfinite(x); }

} // namespace

MinkVector::MinkVector(double time, std::span<const double> spatial)
    : n_(static_cast<int>(spatial.size())) {
    if (n_ < 1 || n_ > 3)
        throw UsageError("MinkVector: spatial dimension must be 1, 2 or 3");
    if (!finite(time))
        throw UsageError("MinkVector: non-finite time component");
    a_[0] = time;
    for (int i = 0; i < n_; ++i) {
        if (!finite(spatial[i]))
            throw UsageError("MinkVector: non-finite spatial component");
        a_[1 + i] = spatial[i];
    }
}

double MinkVector::euclidean_norm2() const {
    double s = 0;
    for (int a = 0; a <= n_; ++a) s += a_[a] * a_[a];
    return s;
}

double mink_inner(const MinkVector& a, const MinkVector& b) {
    if (a.spatial_dim() != b.spatial_dim())
        throw UsageError("mink_inner: dimension mismatch");
    double s = -a[0] * b[0];
    for (int i = 1; i <= a.spatial_dim(); ++i) s += a[i] * b[i];
    return s;
}

double mink_norm(const MinkVector& a) {
    const double q = mink_inner(a, a);
    if (causal_classify(a) == CausalClass::Null)
        throw DomainError("mink_norm: undefined on null vectors");
    return q / std::sqrt(std::abs(q));
}

CausalClass causal_classify(const MinkVector& a, double tol_null) {
    if (tol_null < 0) throw UsageError("causal_classify: tol_null must be >= 0");
    const double q = mink_inner(a, a);
    const double scale = a.euclidean_norm2();
    if (std::abs(q) <= tol_null * scale) return CausalClass::Null;
    return q > 0 ? CausalClass::SpaceLike : CausalClass::TimeLike;
}

LorentzBoost boost(std::span<const double> velocity) {
    const int n = static_cast<int>(velocity.size());
    if (n < 1 || n > 3) throw UsageError("boost: velocity dimension must be 1, 2 or 3");
    double v2 = 0;
    for (double vi : velocity) {
        if (!finite(vi)) throw UsageError("boost: non-finite velocity");
        v2 += vi * vi;
    }
    if (v2 >= 1.0) throw CausalityError("boost: |v| must be < 1");

    LorentzBoost L;
    L.n = n;
    for (int i = 0; i < n; ++i) L.velocity[i] = velocity[i];
    L.gamma = 1.0 / std::sqrt(1.0 - v2);

    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b) L.matrix[a][b] = (a == b) ? 1.0 : 0.0;
    if (v2 > 0) {
        L.matrix[0][0] = L.gamma;
        for (int i = 0; i < n; ++i) {
            L.matrix[0][1 + i] = -L.gamma * velocity[i];
            L.matrix[1 + i][0] = -L.gamma * velocity[i];
            for (int j = 0; j < n; ++j)
                L.matrix[1 + i][1 + j] =
                    (i == j ? 1.0 : 0.0) + (L.gamma - 1.0) * velocity[i] * velocity[j] / v2;
        }
    }
    return L;
}

MinkVector LorentzBoost::apply(const MinkVector& x) const {
    if (x.spatial_dim() != n) throw UsageError("LorentzBoost::apply: dimension mismatch");
    std::array<double, 4> y{};
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b) y[a] += matrix[a][b] * x[b];
    return MinkVector(y[0], std::span<const double>(y.data() + 1, static_cast<size_t>(n)));
}

SymTensor::SymTensor(int spatial_dim) : n_(spatial_dim) {
    if (n_ < 1 || n_ > 3) throw UsageError("SymTensor: spatial dimension must be 1, 2 or 3");
}

int SymTensor::pack(int a, int b) const {
    if (a > b) std::swap(a, b);
    // row-major upper triangle of a dim x dim matrix
    return a * dim() - a * (a - 1) / 2 + (b - a);
}

double SymTensor::trace_eta() const {
    double s = 0;
    for (int a = 0; a < dim(); ++a) s += metric_sign(a) * (*this)(a, a);
    return s;
}

double SymTensor::max_abs() const {
    double m = 0;
    for (int a = 0; a < dim(); ++a)
        for (int b = a; b < dim(); ++b) m = std::max(m, std::abs((*this)(a, b)));
    return m;
}

SymTensor SymTensor::eta(int spatial_dim) {
    SymTensor t(spatial_dim);
    for (int a = 0; a <= spatial_dim; ++a) t.set(a, a, metric_sign(a));
    return t;
}

namespace {

using cplx = std::complex<double>;

// char poly of M (m x m, m <= 4) via Faddeev-LeVerrier:
// p(lambda) = lambda^m + a[m-1] lambda^{m-1} + ... + a[0]
void char_poly(const double M[4][4], int m, double a[4]) {
    double Nk[4][4];  // running matrix
    double Mk[4][4];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) Nk[i][j] = M[i][j];
    double coeff = 0;
    for (int k = 1; k <= m; ++k) {
        double tr = 0;
        for (int i = 0; i < m; ++i) tr += Nk[i][i];
        coeff = -tr / k;
        a[m - k] = coeff;
        if (k == m) break;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) Nk[i][i * 0 + j] += (i == j) ? coeff : 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double s = 0;
                for (int l = 0; l < m; ++l) s += M[i][l] * Nk[l][j];
                Mk[i][j] = s;
            }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) Nk[i][j] = Mk[i][j];
    }
}

cplx poly_eval(std::span<const double> a, int m, cplx z) {
    cplx p = 1.0;
    for (int k = m - 1; k >= 0; --k) p = p * z + a[k];
    return p;
}

cplx poly_deriv(std::span<const double> a, int m, cplx z) {
    cplx p = static_cast<double>(m);
    for (int k = m - 1; k >= 1; --k) p = p * z + static_cast<double>(k) * a[k];
    return p;
}

void solve_quadratic(double b, double c, cplx r[2]) {
    const cplx disc = std::sqrt(cplx(b * b - 4 * c, 0.0));
    // Citardauq branch to avoid cancellation
    const cplx q = -0.5 * (b >= 0 ? (b + disc) : (b - disc));
    r[0] = q;
    r[1] = (std::abs(q) > 0) ? c / q : -q - b;
}

// roots of z^3 + a2 z^2 + a1 z + a0
void solve_cubic(double a2, double a1, double a0, cplx r[3]) {
    // depressed: t^3 + p t + q, z = t - a2/3
    const double p = a1 - a2 * a2 / 3.0;
    const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    const cplx sh = -a2 / 3.0;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    const cplx s = std::sqrt(cplx(disc, 0.0));
    cplx u3 = -q / 2.0 + s;
    if (std::abs(u3) < 1e-300) u3 = -q / 2.0 - s;
    if (std::abs(u3) < 1e-300) { r[0] = r[1] = r[2] = sh; return; }
    const cplx u = std::pow(u3, 1.0 / 3.0);
    const cplx w(-0.5, std::sqrt(3.0) / 2.0);
    const cplx us[3] = {u, u * w, u * std::conj(w)};
    for (int i = 0; i < 3; ++i) r[i] = us[i] - p / (3.0 * us[i]) + sh;
}

// roots of z^4 + a3 z^3 + a2 z^2 + a1 z + a0 (Ferrari)
void solve_quartic(double a3, double a2, double a1, double a0, cplx r[4]) {
    // depressed: y^4 + p y^2 + q y + s, z = y - a3/4
    const double b = a3 / 4.0;
    const double p = a2 - 6.0 * b * b;
    const double q = a1 - 2.0 * a2 * b + 8.0 * b * b * b;
    const double s = a0 - a1 * b + a2 * b * b - 3.0 * b * b * b * b;

    if (std::abs(q) < 1e-14 * (1.0 + std::abs(p) + std::abs(s))) {
        // biquadratic
        cplx z2[2];
        solve_quadratic(p, s, z2);
        const cplx r0 = std::sqrt(z2[0]), r1 = std::sqrt(z2[1]);
        r[0] = r0 - b; r[1] = -r0 - b; r[2] = r1 - b; r[3] = -r1 - b;
        return;
    }
    // resolvent cubic in w: 8w^3 + 8pw^2 + (2p^2-8s)w - q^2 = 0
    cplx w3[3];
    solve_cubic(p, p * p / 4.0 - s, -q * q / 8.0, w3);
    // pick the root with largest |w| for a stable square root
    cplx w = w3[0];
    for (int i = 1; i < 3; ++i)
        if (std::abs(w3[i]) > std::abs(w)) w = w3[i];
    const cplx A = std::sqrt(2.0 * w);
    const cplx B = q / (2.0 * A);
    // y^4 + p y^2 + q y + s = (y^2 + A y + p/2 + w - B)(y^2 - A y + p/2 + w + B)
    cplx q1[2], q2[2];
    {
        const cplx bq = A, cq = p / 2.0 + w - B;
        const cplx disc = std::sqrt(bq * bq - 4.0 * cq);
        q1[0] = (-bq + disc) / 2.0; q1[1] = (-bq - disc) / 2.0;
    }
    {
        const cplx bq = -A, cq = p / 2.0 + w + B;
        const cplx disc = std::sqrt(bq * bq - 4.0 * cq);
        q2[0] = (-bq + disc) / 2.0; q2[1] = (-bq - disc) / 2.0;
    }
    r[0] = q1[0] - b; r[1] = q1[1] - b; r[2] = q2[0] - b; r[3] = q2[1] - b;
}

} // namespace

EtaSpectrum eig_eta_selfadjoint(const SymTensor& A) {
    const int m = A.dim();
    const double scale = std::max(1.0, A.max_abs());

    // M = eta * A (row 0 flips sign)
    double M[4][4] = {};
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) M[a][b] = metric_sign(a) * A(a, b);

    double coef[4] = {};
    char_poly(M, m, coef);

    cplx roots[4];
    switch (m) {
        case 2: solve_quadratic(coef[1], coef[0], roots); break;
        case 3: solve_cubic(coef[2], coef[1], coef[0], roots); break;
        case 4: solve_quartic(coef[3], coef[2], coef[1], coef[0], roots); break;
        default: throw UsageError("eig_eta_selfadjoint: dim out of range");
    }

    // Newton polish on the monic characteristic polynomial
    for (int i = 0; i < m; ++i) {
        cplx z = roots[i];
        for (int it = 0; it < 3; ++it) {
            const cplx p = poly_eval(std::span<const double>(coef, 4), m, z);
            const cplx d = poly_deriv(std::span<const double>(coef, 4), m, z);
            if (std::abs(d) < 1e-30) break;
            const cplx step = p / d;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
            if (std::abs(step) > 0.5 * (1.0 + std::abs(z))) break;
            z -= step;
        }
        roots[i] = z;
    }

    // Cluster roots closer than 1e-6*scale and replace by the cluster mean:
    // sums of clustered roots are well conditioned even when the individual
    // multiple roots are not.
    bool used[4] = {};
    for (int i = 0; i < m; ++i) {
        if (used[i]) continue;
        cplx sum = roots[i];
        int cnt = 1;
        for (int j = i + 1; j < m; ++j) {
            if (!used[j] && std::abs(roots[j] - roots[i]) < 1e-6 * scale) {
                sum += roots[j];
                used[j] = true;
                ++cnt;
            }
        }
        if (cnt > 1) {
            const cplx mean = sum / static_cast<double>(cnt);
            roots[i] = mean;
            for (int j = i + 1; j < m; ++j)
                if (used[j] && std::abs(roots[j] - mean) < 1e-5 * scale) roots[j] = mean;
        }
    }

    EtaSpectrum out;
    out.count = m;
    const double imag_tol = 1e-8 * scale;
    for (int i = 0; i < m; ++i) {
        if (std::abs(roots[i].imag()) > imag_tol) out.real_spectrum = false;
        out.values[i] = roots[i].real();
    }
    std::sort(out.values.begin(), out.values.begin() + m, std::greater<double>());
    return out;
}

std::array<double, 4> eta_eigenvector(const SymTensor& A, double lambda) {
    const int m = A.dim();
    // B = eta*A - lambda I; find an approximate null vector by Gaussian
    // elimination with full pivoting, solving for the most-degenerate column.
    double B[4][4] = {};
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) B[a][b] = metric_sign(a) * A(a, b) - (a == b ? lambda : 0.0);

    int col_of[4];
    for (int i = 0; i < m; ++i) col_of[i] = i;
    int rank = 0;
    for (int step = 0; step < m; ++step) {
        // full pivot search in the remaining block
        int pi = -1, pj = -1;
        double best = 0;
        for (int i = step; i < m; ++i)
            for (int j = step; j < m; ++j)
                if (std::abs(B[i][j]) > best) { best = std::abs(B[i][j]); pi = i; pj = j; }
        if (best < 1e-10 * (1.0 + std::abs(lambda))) break;
        // swap rows/cols
        for (int j = 0; j < m; ++j) std::swap(B[step][j], B[pi][j]);
        for (int i = 0; i < m; ++i) std::swap(B[i][step], B[i][pj]);
        std::swap(col_of[step], col_of[pj]);
        for (int i = step + 1; i < m; ++i) {
            const double f = B[i][step] / B[step][step];
            for (int j = step; j < m; ++j) B[i][j] -= f * B[step][j];
        }
        ++rank;
    }
    std::array<double, 4> y{};
    if (rank == m) rank = m - 1; // fall back: treat the smallest pivot as null
    y[rank] = 1.0;
    for (int i = rank - 1; i >= 0; --i) {
        double s = 0;
        for (int j = i + 1; j <= rank; ++j) s += B[i][j] * y[j];
        y[i] = -s / B[i][i];
    }
    std::array<double, 4> v{};
    double norm = 0;
    for (int i = 0; i < m; ++i) {
        v[col_of[i]] = y[i];
        norm += y[i] * y[i];
    }
    norm = std::sqrt(norm);
    for (int i = 0; i < m; ++i) v[i] /= norm;
    return v;
}

} // namespace hglw
