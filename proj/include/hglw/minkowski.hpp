#pragma once

#include <array>
#include <span>

#include "hglw/common.hpp"

// Flat Minkowski-signature linear algebra on R^{1+n}, n <= 3.
// Metric convention fixed project-wide: eta = diag(-1, +1, ..., +1),
// <xi,xi>_m = -xi_0^2 + |xi_hat|^2.  Every other module imports the
// signature from here.

namespace hglw {

inline constexpr double kDefaultNullTol = 1e-12; // relative to euclidean norm^2

// eta_{aa} as a sign factor (diagonal metric).
inline constexpr double metric_sign(int alpha) { return alpha == 0 ? -1.0 : 1.0; }

class MinkVector {
public:
    // Rejects non-finite entries and spatial dimension outside {1,2,3}.
    MinkVector(double time, std::span<const double> spatial);

    int spatial_dim() const { return n_; }
    double time() const { return a_[0]; }
    double spatial(int i) const { return a_[1 + i]; }
    // alpha in [0, n]; 0 is the time component.
    double operator[](int alpha) const { return a_[alpha]; }
    double& operator[](int alpha) { return a_[alpha]; }

    double euclidean_norm2() const;

private:
    int n_;
    std::array<double, 4> a_{};
};

double mink_inner(const MinkVector& a, const MinkVector& b);

// |xi|_m = <xi,xi>_m / |<xi,xi>_m|^{1/2}; undefined on null vectors (throws).
double mink_norm(const MinkVector& a);

enum class CausalClass { SpaceLike, TimeLike, Null };

// Classification with a scale-aware tolerance: |<xi,xi>_m| <= tol_null * |xi|_e^2
// counts as Null.
CausalClass causal_classify(const MinkVector& a, double tol_null = kDefaultNullTol);

struct LorentzBoost {
    int n = 1;
    std::array<double, 3> velocity{};
    double gamma = 1.0;
    double matrix[4][4] = {}; // (n+1)x(n+1) block is valid

    MinkVector apply(const MinkVector& x) const;
};

// Standard boost with velocity v (|v| < 1): identity on the euclidean
// orthogonal complement of v, the usual (gamma, -gamma v) mixing in the
// (t, v_hat) plane.
LorentzBoost boost(std::span<const double> velocity);

// Symmetric (n+1)x(n+1) tensor, triangular storage so symmetry is exact
// by construction.
class SymTensor {
public:
    explicit SymTensor(int spatial_dim);

    int spatial_dim() const { return n_; }
    int dim() const { return n_ + 1; }

    double operator()(int a, int b) const { return tri_[pack(a, b)]; }
    void set(int a, int b, double v) { tri_[pack(a, b)] = v; }
    void add(int a, int b, double v) { tri_[pack(a, b)] += v; }

    double trace_eta() const; // tr(eta A) = sum_a eta_aa A_aa
    double max_abs() const;

    static SymTensor eta(int spatial_dim); // diag(-1, 1, ..., 1)

    // number of packed entries for dim d
    static constexpr int packed_size(int dim) { return dim * (dim + 1) / 2; }
    int pack(int a, int b) const; // triangular index, order (0,0),(0,1),..,(1,1),..

private:
    int n_;
    std::array<double, 10> tri_{};
};

struct EtaSpectrum {
    std::array<double, 4> values{}; // sorted descending; first `count` valid
    int count = 0;
    // false when some characteristic root kept an imaginary part above the
    // truncation threshold; consumers treat that as an (A3)-style violation.
    bool real_spectrum = true;
};

// Eigenvalues of eta*A for symmetric A, via the characteristic polynomial
// (closed-form roots for degree <= 4).  Imaginary parts below
// 1e-8 * max(1, |A|_inf) are truncated; larger ones flag the result.
EtaSpectrum eig_eta_selfadjoint(const SymTensor& A);

// A unit null vector of (eta*A - lambda I), for eigenvector-direction checks.
// Returns a euclidean-normalized vector; valid when lambda is (close to) an
// eigenvalue.
std::array<double, 4> eta_eigenvector(const SymTensor& A, double lambda);

} // namespace hglw
