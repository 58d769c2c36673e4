#pragma once

// Small dense linear algebra on std::vector / std::span. Dimensions here are
// tiny (ambient dimension of a polytope, rarely above 10), so everything is
// written for clarity rather than blocking.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace zerocell::linalg {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Vec sub(std::span<const double> a, std::span<const double> b)
{
    Vec d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

inline void scale(std::span<double> a, double s)
{
    for (auto& x : a) x *= s;
}

// y += s * x
inline void axpy(std::span<double> y, double s, std::span<const double> x)
{
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
}

/// Orthonormal basis of span{vs}, built by modified Gram-Schmidt with one
/// reorthogonalisation pass. Vectors whose residual falls below
/// `rel_tol * max_norm` are treated as dependent and skipped.
inline std::vector<Vec> orthonormal_basis(const std::vector<Vec>& vs, double rel_tol = 1e-10)
{
    double max_norm = 0.0;
    for (const auto& v : vs) max_norm = std::max(max_norm, norm(v));
    std::vector<Vec> basis;
    if (max_norm == 0.0) return basis;
    for (const auto& v : vs) {
        Vec w = v;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) axpy(w, -dot(w, b), b);
        const double nw = norm(w);
        if (nw > rel_tol * max_norm) {
            scale(w, 1.0 / nw);
            basis.push_back(std::move(w));
        }
    }
    return basis;
}

/// Removes from v its component in span(basis); basis must be orthonormal.
inline Vec reject(std::span<const double> v, const std::vector<Vec>& basis)
{
    Vec w(v.begin(), v.end());
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) axpy(w, -dot(w, b), b);
    return w;
}

/// Unit vector orthogonal to the (dim-1) given directions, or nullopt when
/// they do not span a hyperplane. `rel_tol` is relative to the largest input.
inline std::optional<Vec> normal_to(const std::vector<Vec>& directions, std::size_t dim,
                                    double rel_tol = 1e-10)
{
    auto basis = orthonormal_basis(directions, rel_tol);
    if (basis.size() + 1 != dim) return std::nullopt;
    Vec best;
    double best_norm = -1.0;
    for (std::size_t k = 0; k < dim; ++k) {
        Vec e(dim, 0.0);
        e[k] = 1.0;
        Vec w = reject(e, basis);
        const double nw = norm(w);
        if (nw > best_norm) {
            best_norm = nw;
            best = std::move(w);
        }
    }
    scale(best, 1.0 / best_norm);
    return best;
}

/// Solves the dense system a x = b (a is row-major n x n) by Gaussian
/// elimination with partial pivoting. Returns nullopt if a pivot vanishes.
inline std::optional<Vec> solve(std::vector<double> a, Vec b)
{
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        if (a[piv * n + c] == 0.0) return std::nullopt;
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
            std::swap(b[c], b[piv]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            if (f == 0.0) continue;
            for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
            b[r] -= f * b[c];
        }
    }
    Vec x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i * n + k] * x[k];
        x[i] = s / a[i * n + i];
    }
    return x;
}

/// Determinant of a row-major n x n matrix.
inline double determinant(std::vector<double> a, std::size_t n)
{
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        if (a[piv * n + c] == 0.0) return 0.0;
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
            det = -det;
        }
        det *= a[c * n + c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
        }
    }
    return det;
}

/// Volume of the parallelepiped spanned by `vs` (k vectors of any length),
/// i.e. sqrt(det(Gram matrix)).
inline double parallelepiped_volume(const std::vector<Vec>& vs)
{
    const std::size_t k = vs.size();
    std::vector<double> g(k * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) g[i * k + j] = g[j * k + i] = dot(vs[i], vs[j]);
    return std::sqrt(std::max(0.0, determinant(std::move(g), k)));
}

} // namespace zerocell::linalg
