#pragma once

// Closed forms for the zero cell of an isotropic Poisson hyperplane process
// with distance exponent r and intensity gamma. Most quantities come in a
// log_ flavour; the linear one is exp() of it, and is fine as long as the
// value fits in a double.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"

namespace zerocell {

inline constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------- parameters

struct ModelParams {
    int n = 2;
    double r = 1.0;
    double gamma = 1.0;

    ModelParams() = default;
    ModelParams(int n_, double r_, double gamma_) : n(n_), r(r_), gamma(gamma_) { validate(); }

    // r = b * n^alpha
    static ModelParams from_slope(double alpha, double b, int n, double gamma)
    {
        if (!(b > 0.0)) throw std::invalid_argument("slope b must be positive");
        return ModelParams(n, b * std::pow(static_cast<double>(n), alpha), gamma);
    }

    void validate() const
    {
        if (n < 2) throw std::invalid_argument("dimension n must be >= 2, got " + std::to_string(n));
        if (!(r > 0.0) || !std::isfinite(r))
            throw std::invalid_argument("distance exponent r must be positive and finite");
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            throw std::invalid_argument("intensity gamma must be positive and finite");
    }

    ModelParams with_gamma(double g) const { return ModelParams(n, r, g); }
    ModelParams with_dim(int m) const { return ModelParams(m, r, gamma); }
};

struct BoundsInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool up_to_constants = false; // unknown universal constants were set to 1

    bool contains(double x) const { return lo <= x && x <= hi; }
};

// ---------------------------------------------------------------- omega/kappa

// surface area of the unit sphere in R^x, extended to real x > 0
inline double log_omega(double x)
{
    if (!(x > 0.0)) throw std::domain_error("omega(x) needs x > 0");
    return std::log(2.0) + 0.5 * x * std::log(pi) - std::lgamma(0.5 * x);
}

// volume of the unit ball in R^x, real x >= 0
inline double log_kappa(double x)
{
    if (!(x >= 0.0)) throw std::domain_error("kappa(x) needs x >= 0");
    return 0.5 * x * std::log(pi) - std::lgamma(0.5 * x + 1.0);
}

inline double omega(double x) { return std::exp(log_omega(x)); }
inline double kappa(double x) { return std::exp(log_kappa(x)); }

inline double log_binom(double n, double k)
{
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

inline double binom(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    return std::round(std::exp(log_binom(n, k)));
}

// int_0^{pi/2} sin^alpha(t) cos^beta(t) dt
inline double log_wallis(double alpha, double beta)
{
    if (!(alpha > -1.0) || !(beta > -1.0)) throw std::domain_error("wallis needs alpha, beta > -1");
    return log_omega(alpha + beta + 2.0) - log_omega(alpha + 1.0) - log_omega(beta + 1.0);
}
inline double wallis(double alpha, double beta) { return std::exp(log_wallis(alpha, beta)); }

// ---------------------------------------------------------------- basic model

namespace detail {

// log of r * omega_n * omega_{r+1} / (2 gamma omega_{n+r}); the length scale
// of the cell raised to the power r
inline double log_scale(const ModelParams& p)
{
    const double n = p.n, r = p.r;
    return std::log(r) + log_omega(n) + log_omega(r + 1.0) - std::log(2.0 * p.gamma) - log_omega(n + r);
}

inline void check_range(int v, int lo, int hi, const char* what)
{
    if (v < lo || v > hi)
        throw std::out_of_range(std::string(what) + " = " + std::to_string(v) + " outside [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

} // namespace detail

// Theta of the hyperplanes meeting the segment [0, z], ||z|| = s
inline double segment_measure(const ModelParams& p, double s)
{
    if (!(s >= 0.0)) throw std::domain_error("segment_measure needs s >= 0");
    if (s == 0.0) return 0.0;
    const double n = p.n, r = p.r;
    return std::exp(std::log(2.0 * p.gamma / r) + log_omega(r + n) - log_omega(n) - log_omega(r + 1.0) +
                    r * std::log(s));
}

// P(rho_{Z0}(u) > s)
inline double radial_survival(const ModelParams& p, double s) { return std::exp(-segment_measure(p, s)); }

inline double log_mean_volume(const ModelParams& p)
{
    const double n = p.n, r = p.r;
    return std::lgamma(n / r + 1.0) + log_kappa(n) + (n / r) * detail::log_scale(p);
}
inline double mean_volume(const ModelParams& p) { return std::exp(log_mean_volume(p)); }

// E V_m(Z0 cap L) for L of dimension m; m = n is the full cell
inline double log_sectional_mean(const ModelParams& p, int m)
{
    detail::check_range(m, 1, p.n, "m");
    const double r = p.r;
    return std::lgamma(m / r + 1.0) + log_kappa(m) + (m / r) * detail::log_scale(p);
}

// same with gamma given by its logarithm; gamma_hat overflows a double for
// large n = r
inline double log_sectional_mean(int n, double r, double log_gamma, int m)
{
    detail::check_range(m, 1, n, "m");
    const double N = n;
    const double ls = std::log(r) + log_omega(N) + log_omega(r + 1.0) - std::log(2.0) - log_gamma - log_omega(N + r);
    return std::lgamma(m / r + 1.0) + log_kappa(m) + (m / r) * ls;
}
inline double sectional_mean(const ModelParams& p, int m) { return std::exp(log_sectional_mean(p, m)); }

// two-sided bounds on E V_m^k(Z0 cap L); exact for k = 1
inline BoundsInterval volume_moment_bounds(const ModelParams& p, int m, int k)
{
    detail::check_range(m, 1, p.n, "m");
    if (k < 1) throw std::out_of_range("moment order k must be >= 1");
    const double r = p.r, X = detail::log_scale(p);
    const double lo = k * std::lgamma(m / r + 1.0) + k * log_kappa(m) + (k * m / r) * X;
    const double hi = std::lgamma(k * m / r + 1.0) + k * log_kappa(m) + (k * m / r) * X;
    if (k == 1) return {std::exp(lo), std::exp(lo)};
    return {std::exp(lo), std::exp(hi)};
}

// intensity making E V_n(Z0) = 1
inline double log_gamma_hat(double r, int n)
{
    if (!(r > 0.0) || n < 2) throw std::invalid_argument("gamma_hat needs r > 0, n >= 2");
    const double nn = n;
    return std::log(r / 2.0) + log_omega(nn) + log_omega(r + 1.0) - log_omega(nn + r) +
           (r / nn) * (std::lgamma(nn / r + 1.0) + log_kappa(nn));
}
inline double gamma_hat(double r, int n) { return std::exp(log_gamma_hat(r, n)); }

// intensity of the sectional process X cap L, dim L = m
inline double gamma_section(const ModelParams& p, int m)
{
    detail::check_range(m, 1, p.n - 1, "m");
    const double n = p.n, r = p.r;
    return p.gamma * std::exp(log_omega(m) + log_omega(n + r) - log_omega(n) - log_omega(m + r));
}

// ---------------------------------------------------------------- c_r(n, l)

inline double log_A_const(int n, int l, double r)
{
    detail::check_range(l, 1, n, "l");
    const double N = n, L = l;
    return L * std::log(2.0) - std::log(r) - std::lgamma(L + 1.0) + log_omega(r) + log_omega(N - L + 1.0) -
           log_omega(L) - log_omega(N - L + r + 1.0) + L * (log_omega(N + r) - log_omega(r) - log_omega(N));
}
inline double A_const(int n, int l, double r) { return std::exp(log_A_const(n, l, r)); }

inline BoundsInterval c_bounds(int n, int l, double r)
{
    const double a = A_const(n, l, r);
    if (l == 1) return {1.0 / r, 1.0 / r};
    return {a, std::pow(static_cast<double>(l), n - l + 1) * a};
}

// the prefactor (1/(r l!)) omega_n^{-l} b in front of the sphere integral
// defining c_r(n, l), with b = omega_{n-l+1} ... omega_n / (omega_1 ... omega_l)
inline double log_c_prefactor(int n, int l, double r)
{
    detail::check_range(l, 1, n, "l");
    double s = -std::log(r) - std::lgamma(l + 1.0) - l * log_omega(n);
    for (int i = n - l + 1; i <= n; ++i) s += log_omega(i);
    for (int i = 1; i <= l; ++i) s -= log_omega(i);
    return s;
}

// c_1(m) = m! kappa_{m-1}^m kappa_m
inline double c1_vertex_const(int m)
{
    return std::exp(std::lgamma(m + 1.0) + m * log_kappa(m - 1.0) + log_kappa(m));
}

// c_r(n) = r n! omega_n^n c_r(n, n)
inline double c_vertex_from_cnn(int n, double r, double cnn)
{
    return r * std::exp(std::lgamma(n + 1.0) + n * log_omega(n)) * cnn;
}

// E f_0(Z0) in terms of c_r(n)
inline double vertex_mean(int n, double r, double c_rn)
{
    const double N = n;
    return std::exp(log_kappa(N) - std::log(r) +
                    N * (std::log(r / 2.0) + log_omega(r + 1.0) - log_omega(r + N))) *
           c_rn;
}

// ---------------------------------------------------------------- f-vector

// bounds for E f_{n-l}(Z0); l = n are the vertex bounds
inline BoundsInterval f_vector_bounds(int n, int l, double r)
{
    detail::check_range(l, 1, n, "l");
    const double N = n, L = l;
    const double q = log_omega(r + 1.0) - log_kappa(r);
    const double lo = log_kappa(r) - std::log(L) + log_omega(N - L + 1.0) - log_omega(N - L + 1.0 + r) + L * q;
    const double hi = std::log(2.0) + log_binom(N, L) + (N - 1.0) * q;
    return {std::exp(lo), std::exp(hi)};
}

// same in log space, for large n
inline BoundsInterval log_f_vector_bounds(int n, int l, double r)
{
    detail::check_range(l, 1, n, "l");
    const double N = n, L = l;
    const double q = log_omega(r + 1.0) - log_kappa(r);
    return {log_kappa(r) - std::log(L) + log_omega(N - L + 1.0) - log_omega(N - L + 1.0 + r) + L * q,
            std::log(2.0) + log_binom(N, L) + (N - 1.0) * q};
}

// lower bound for E f_{n-l}(Z0), 1 <= l <= n-1, from a value of c_r(n, l)
inline double f_lower_from_c(int n, int l, double r, double c)
{
    detail::check_range(l, 1, n - 1, "l");
    const double N = n, L = l;
    return c * std::exp(std::lgamma(L) + log_omega(L) +
                        L * (std::log(r / 2.0) + log_omega(N) + log_omega(r + 1.0) - log_omega(r + N)));
}

// ---------------------------------------------------------------- skeleton

// E H^{n-l}(skel_{n-l}(Z0)) given c = c_r(n, l); l = 1 is the surface area
inline double log_skeleton_mean(const ModelParams& p, int l, double c_value)
{
    detail::check_range(l, 1, p.n, "l");
    const double n = p.n, r = p.r, L = l;
    const double e = L + (n - L) / r;
    return std::log(2.0 * c_value) - ((n - L) / r) * std::log(p.gamma) + log_omega(L) +
           log_omega(L * r + n - L) - log_omega(L * r) - log_omega(2.0 * e) +
           e * (std::log(r * pi / 2.0) + log_omega(n) + log_omega(r + 1.0) - log_omega(r + n));
}
inline double skeleton_mean(const ModelParams& p, int l, double c_value)
{
    return std::exp(log_skeleton_mean(p, l, c_value));
}

inline double mean_surface_area(const ModelParams& p) { return skeleton_mean(p, 1, 1.0 / p.r); }
inline double log_mean_surface_area(const ModelParams& p) { return log_skeleton_mean(p, 1, 1.0 / p.r); }

// ---------------------------------------------------------------- r = 1

namespace detail {
inline double log_k_ratio(int n) { return log_kappa(n - 1.0) - log_omega(n); }
} // namespace detail

// E f_{n-l}(Z0) from E V_l(Z0)
inline double mean_f_r1(int n, int l, double gamma, double EV_l)
{
    detail::check_range(l, 0, n, "l");
    return std::exp(l * (std::log(gamma) + detail::log_k_ratio(n)) + log_kappa(l)) * EV_l;
}

// E F_{n-l;j}(Z0) from E V_{l+j}(Z0)
inline double F_mean_r1(int n, int l, int j, double gamma, double EV)
{
    detail::check_range(l, 0, n, "l");
    detail::check_range(j, 0, n - l, "j");
    return std::exp(l * (std::log(gamma) + detail::log_k_ratio(n)) + log_binom(l + j, l) + log_kappa(l + j) -
                    log_kappa(j)) *
           EV;
}

// E f_{n-l-j}(Z0) from E F_{n-l;j}(Z0)
inline double f_from_F_r1(int n, int l, int j, double gamma, double EF)
{
    detail::check_range(l, 0, n, "l");
    detail::check_range(j, 0, n - l, "j");
    return std::exp(j * (std::log(gamma) + detail::log_k_ratio(n)) - log_binom(l + j, l) + log_kappa(j)) * EF;
}

// E F_{m-j;i}(Z_m) from E V_{i+j}(Z_m), Z_m the weighted typical m-face in R^n
inline double section_F_r1(int n, int m, int j, int i, double gamma, double EV)
{
    detail::check_range(m, 1, n, "m");
    detail::check_range(j, 0, m, "j");
    detail::check_range(i, 0, m - j, "i");
    return std::exp(log_binom(i + j, j) + j * (detail::log_k_ratio(n) + std::log(gamma)) + log_kappa(i + j) -
                    log_kappa(i)) *
           EV;
}

// E f_0(Z0) for r = 1
inline double mean_f0_r1(int n) { return std::exp(std::lgamma(n + 1.0) - n * std::log(2.0) + 2.0 * log_kappa(n)); }

// ---------------------------------------------------------------- Stirling

// unsigned Stirling numbers of the first kind, exact while they fit in 128 bits
inline unsigned __int128 stirling_first(int k, int q)
{
    if (k < 1) throw std::out_of_range("stirling_first needs k >= 1");
    detail::check_range(q, 1, k, "q");
    if (k > 33) throw UnsupportedRange("stirling_first: exact values only up to k = 33; use stirling_first_real");
    std::vector<unsigned __int128> row{1}; // k = 0: [0;0] = 1
    for (int kk = 1; kk <= k; ++kk) {
        std::vector<unsigned __int128> next(kk + 1, 0);
        for (int qq = 1; qq <= kk; ++qq) {
            unsigned __int128 v = row[qq - 1];
            if (qq < kk) v += static_cast<unsigned __int128>(kk - 1) * row[qq];
            next[qq] = v;
        }
        row = std::move(next);
    }
    return row[q];
}

inline double stirling_first_real(int k, int q)
{
    if (k < 1) throw std::out_of_range("stirling_first_real needs k >= 1");
    detail::check_range(q, 1, k, "q");
    std::vector<double> row{1.0};
    for (int kk = 1; kk <= k; ++kk) {
        std::vector<double> next(kk + 1, 0.0);
        for (int qq = 1; qq <= kk; ++qq) next[qq] = row[qq - 1] + (qq < kk ? (kk - 1) * row[qq] : 0.0);
        row = std::move(next);
    }
    return row[q];
}

// E V_1^k(Z_m) from the facet-count moments moments_f[q-1] = E f_{m-1}^q(Z_m)
inline double moment_identity_V1(int n, int k, double gamma, std::span<const double> moments_f)
{
    if (k < 1 || static_cast<int>(moments_f.size()) < k)
        throw std::invalid_argument("moment_identity_V1 needs k >= 1 and k facet moments");
    double s = 0.0;
    for (int q = 1; q <= k; ++q) s += stirling_first_real(k, q) * moments_f[q - 1];
    return std::pow(omega(n) / (2.0 * gamma * kappa(n - 1.0)), k) * s;
}

// ---------------------------------------------------------------- variance

inline double log_D_const(int n, int m, double r, double gamma)
{
    detail::check_range(m, 1, n - 1, "m");
    const double N = n, M = m;
    return std::log(M) + 2.0 * log_kappa(M) - std::log(r) + std::lgamma(2.0 * M / r + 1.0) +
           (2.0 * M / r) * (std::log(r / (4.0 * gamma)) + log_omega(N) + log_omega(r + 1.0) - log_omega(N + r));
}
inline double D_const(int n, int m, double r, double gamma) { return std::exp(log_D_const(n, m, r, gamma)); }

// envelope for E(m, r); the universal constants c, C are taken as 1
inline BoundsInterval E_bounds(int m, double r)
{
    if (m < 3) throw UnsupportedRange("E_bounds is stated for m >= 3");
    const double M = m;
    const double core = 0.5 * M * std::log(2.0) - 0.5 * M * std::log1p(r / (2.0 * M)) -
                        0.5 * (M + r) * std::log1p(M / (M + r)) - 0.5 * std::log(r + 1.0);
    const double lo = std::exp(core - 0.5 * std::log1p(r / M));
    const double hi = std::exp(core + std::log1p(r / M));
    return {lo, hi, true};
}

// bounds on var V_m(Z0 cap L)
inline BoundsInterval variance_bounds(const ModelParams& p, int m)
{
    const auto e = E_bounds(m, p.r);
    const double d = D_const(p.n, m, p.r, p.gamma);
    return {d * e.lo, std::pow(4.0, 2.0 * m / p.r + 1.0) * d * e.hi, true};
}

// ---------------------------------------------------------------- asymptotics

inline double gauge(double alpha, double b, int n)
{
    if (!(b > 0.0)) throw std::invalid_argument("gauge needs b > 0");
    const double N = n;
    if (alpha < 0.0)
        return b / (2.0 * std::sqrt(std::numbers::e)) * std::pow(N, alpha - 1.0) *
               std::exp(-std::pow(N, 1.0 - alpha) * std::log1p(-1.0 / N));
    if (alpha == 0.0) return std::exp(1.0 / b - 0.5 + log_omega(b) - log_omega(b + 1.0)) / N;
    if (alpha < 1.0) return std::sqrt(b / (2.0 * pi * std::numbers::e)) * std::pow(N, -(1.0 - alpha / 2.0));
    if (alpha == 1.0) return std::sqrt(b / ((b + 1.0) * 2.0 * std::numbers::e * pi)) / std::sqrt(N);
    return 1.0 / std::sqrt(2.0 * pi * std::numbers::e * N);
}

// (E S)^{n/(n-1)} / E V_n with S the surface area; gamma cancels
inline double iso_ratio(const ModelParams& p)
{
    const double n = p.n;
    return std::exp(log_mean_surface_area(p) * n / (n - 1.0) - log_mean_volume(p));
}

inline double ball_iso_ratio(int n)
{
    const double N = n;
    return std::exp(log_omega(N) * N / (N - 1.0) - log_kappa(N));
}

enum class RateTheorem { vertices, fixed_codim, proportional };

struct RateRecord {
    int n = 0;
    double r = 0.0;
    int l = 0; // index l' of the bounded quantity E f_{n-l'}
    // n-th roots of the bounds, multiplied by their normalisations
    double lower = 0.0;
    double upper = 0.0;
    double lower_norm_exponent = 0.0; // normalisation is n^{exponent}
    double upper_norm_exponent = 0.0;
    std::optional<double> lower_limit;
    std::optional<double> upper_limit;
};

// Finite-n bound sequences behind the high-dimensional face-number limits.
// vertices: E f_k with fixed k = k_or_a; fixed_codim: E f_{n-l} with fixed
// l = k_or_a; proportional: E f_k with k = floor(a n), a = k_or_a.
inline RateRecord asymptotic_rate(RateTheorem thm, double alpha, double b, double k_or_a, int n)
{
    if (!(b > 0.0)) throw std::invalid_argument("asymptotic_rate needs b > 0");
    const double N = n;
    const double r = b * std::pow(N, alpha);
    const double root2pib = std::sqrt(2.0 * pi * b);
    const double ratio_b = std::exp(log_omega(b + 1.0) - log_kappa(b));
    RateRecord rec;
    rec.n = n;
    rec.r = r;
    int lp = 0;
    switch (thm) {
    case RateTheorem::vertices: {
        const int k = static_cast<int>(k_or_a);
        if (k < 0 || k >= n) throw UnsupportedRange("face dimension out of range");
        lp = n - k;
        const double ex = alpha > 0.0 ? -alpha / 2.0 : 0.0;
        rec.lower_norm_exponent = rec.upper_norm_exponent = ex;
        const double lim = alpha < 0.0 ? 2.0 : alpha == 0.0 ? ratio_b : root2pib;
        rec.lower_limit = rec.upper_limit = lim;
        break;
    }
    case RateTheorem::fixed_codim: {
        lp = static_cast<int>(k_or_a);
        if (lp < 1 || lp > n) throw UnsupportedRange("codimension out of range");
        rec.upper_norm_exponent = alpha > 0.0 ? -alpha / 2.0 : 0.0;
        rec.upper_limit = alpha < 0.0 ? 2.0 : alpha == 0.0 ? ratio_b : root2pib;
        if (alpha == 1.0) {
            rec.lower_limit = std::sqrt(1.0 + b) * std::pow(1.0 + 1.0 / b, b / 2.0);
        } else if (alpha > 1.0) {
            rec.lower_norm_exponent = (1.0 - alpha) / 2.0;
            rec.lower_limit = std::sqrt(std::numbers::e * b);
        }
        break;
    }
    case RateTheorem::proportional: {
        const double a = k_or_a;
        if (!(a > 0.0 && a < 1.0)) throw UnsupportedRange("proportion a must lie in (0, 1)");
        const int k = static_cast<int>(std::floor(a * N));
        lp = n - k;
        const double ca = 1.0 / (std::pow(a, a) * std::pow(1.0 - a, 1.0 - a));
        if (alpha < 0.0) {
            rec.lower_limit = std::pow(2.0, 1.0 - a);
            rec.upper_limit = 2.0 * ca;
        } else if (alpha == 0.0) {
            rec.lower_limit = std::pow(ratio_b, 1.0 - a);
            rec.upper_limit = ca * ratio_b;
        } else {
            rec.upper_norm_exponent = -alpha / 2.0;
            rec.upper_limit = ca * root2pib;
            const double base = std::pow(root2pib, 1.0 - a);
            if (alpha < 1.0) {
                rec.lower_norm_exponent = -alpha * (1.0 - a) / 2.0;
                rec.lower_limit = base;
            } else if (alpha == 1.0) {
                rec.lower_norm_exponent = -alpha * (1.0 - a) / 2.0;
                rec.lower_limit = base * std::pow(1.0 + b / a, a / 2.0) * std::pow(1.0 + a / b, b / 2.0);
            } else {
                rec.lower_norm_exponent = -(alpha - a) / 2.0;
                rec.lower_limit = base * std::pow(std::numbers::e * b / a, a / 2.0);
            }
        }
        break;
    }
    }
    if (lp < 1 || lp > n) throw UnsupportedRange("bounded face index out of range");
    rec.l = lp;
    const auto lb = log_f_vector_bounds(n, lp, r);
    rec.lower = std::exp(lb.lo / N + rec.lower_norm_exponent * std::log(N));
    rec.upper = std::exp(lb.hi / N + rec.upper_norm_exponent * std::log(N));
    return rec;
}

// rate H(alpha, b, n) in the probability bound for sections of the normalised
// cell; the unknown constant of the alpha > 1 branch is taken as 1
inline double H_rate(double alpha, double b, int n)
{
    const double N = n;
    if (alpha == 0.5) {
        if (!(b > std::sqrt(8.0))) throw UnsupportedRange("H_rate at alpha = 1/2 needs b > sqrt(8)");
        return std::pow(2.0, (2.0 / b - b / 4.0) * std::sqrt(N));
    }
    if (alpha < 0.5) throw UnsupportedRange("H_rate needs alpha >= 1/2");
    if (alpha < 1.0) return std::pow(2.0, -b / 4.0 * std::pow(N, alpha));
    if (alpha == 1.0)
        return std::exp(0.5 * N * (std::log(4.0) + (b + 1.0) * std::log(b + 1.0) - (b + 2.0) * std::log(b + 2.0))) /
               std::sqrt(N);
    return std::exp(0.5 * N * (1.0 - alpha) * std::log(N));
}

// lim E V_{n-l}(Z0 cap L) at intensity gamma_hat
inline double sectional_mean_limit(double alpha, double b, int l)
{
    if (l < 0) throw std::out_of_range("l must be >= 0");
    if (alpha < 0.0) return l > 0 ? 0.0 : 1.0;
    if (alpha == 0.0) return std::exp(-l / b + l / 2.0);
    return std::exp(l / 2.0);
}

} // namespace zerocell
