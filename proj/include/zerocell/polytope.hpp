#pragma once

// Bounded convex polytopes containing the origin in their interior, stored
// both as an H-description (supporting halfspaces) and a V-description with
// vertex/facet incidences.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "estimate.hpp"
#include "hull.hpp"
#include "linalg.hpp"
#include "quadrature.hpp"
#include "random.hpp"
#include "specfun.hpp"

namespace zerocell {

// default cap on the ambient dimension
inline constexpr int default_max_dim = 10;

struct HalfSpace {
    linalg::Vec u; // outward unit normal
    double t = 0.0; // {x : <x, u> <= t}, t > 0
};

struct Polytope {
    int dim = 0;
    std::vector<HalfSpace> halfspaces;            // one per facet
    std::vector<double> coords;                   // vertex coordinates, row-major
    std::vector<std::vector<int>> facet_incidence; // facet -> sorted vertex ids
    std::vector<std::vector<int>> vertex_facets;   // vertex -> sorted facet ids
    // orthonormal vectors of the ambient space spanning the subspace the
    // polytope lives in; local coordinates are with respect to these
    std::optional<std::vector<linalg::Vec>> basis;
    bool simple = true;

    int num_vertices() const { return dim > 0 ? static_cast<int>(coords.size()) / dim : 0; }
    int num_facets() const { return static_cast<int>(halfspaces.size()); }
    std::span<const double> vertex(int i) const
    {
        return {coords.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
    }
};

// Fills vertex_facets and the simplicity flag from the other fields.
inline void finalize(Polytope& p)
{
    p.vertex_facets.assign(p.num_vertices(), {});
    for (int f = 0; f < p.num_facets(); ++f) {
        std::sort(p.facet_incidence[f].begin(), p.facet_incidence[f].end());
        for (int v : p.facet_incidence[f]) p.vertex_facets[v].push_back(f);
    }
    p.simple = true;
    for (const auto& vf : p.vertex_facets)
        if (static_cast<int>(vf.size()) != p.dim) p.simple = false;
}

// ---------------------------------------------------------------- construction

namespace detail {

inline std::optional<Polytope> interval(const std::vector<HalfSpace>& hs)
{
    double hi = std::numeric_limits<double>::infinity(), lo = -hi;
    int ih = -1, il = -1;
    for (int i = 0; i < static_cast<int>(hs.size()); ++i) {
        const double u = hs[i].u[0];
        if (u > 0 && hs[i].t / u < hi) hi = hs[i].t / u, ih = i;
        if (u < 0 && hs[i].t / u > lo) lo = hs[i].t / u, il = i;
    }
    if (ih < 0 || il < 0) return std::nullopt;
    Polytope p;
    p.dim = 1;
    p.halfspaces = {{{1.0}, hi}, {{-1.0}, -lo}};
    p.coords = {hi, lo};
    p.facet_incidence = {{0}, {1}};
    finalize(p);
    return p;
}

} // namespace detail

/// Intersection of the halfspaces {<x,u_i> <= t_i}, t_i > 0. Returns nullopt
/// if the intersection is unbounded. Non-supporting halfspaces are dropped.
/// Throws DegenerateInput if the result is not simple or a halfspace touches
/// the polytope only in a lower-dimensional face.
inline std::optional<Polytope> intersect_halfspaces(std::vector<HalfSpace> hs, int dim, double rel_tol = 1e-9,
                                                    int max_dim = default_max_dim)
{
    if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
    if (dim > max_dim) throw ResourceLimit("dimension " + std::to_string(dim) + " above the configured cap");
    for (auto& h : hs) {
        if (static_cast<int>(h.u.size()) != dim) throw std::invalid_argument("halfspace normal has wrong dimension");
        const double nu = linalg::norm(h.u);
        if (!(nu > 0.0) || !(h.t > 0.0)) throw std::invalid_argument("halfspaces need u != 0 and t > 0");
        linalg::scale(h.u, 1.0 / nu);
        h.t /= nu;
    }
    if (dim == 1) return detail::interval(hs);
    if (static_cast<int>(hs.size()) < dim + 1) return std::nullopt;
    std::vector<double> duals;
    duals.reserve(hs.size() * dim);
    for (const auto& h : hs)
        for (double x : h.u) duals.push_back(x / h.t);
    Hull hull;
    try {
        hull = convex_hull(duals, dim, rel_tol);
    } catch (const DegenerateInput&) {
        return std::nullopt; // dual points in a lower-dimensional flat
    }
    for (const auto& f : hull.facets)
        if (f.offset <= hull.tolerance) return std::nullopt;
    for (const auto& f : hull.facets)
        if (static_cast<int>(f.vertices.size()) != dim) throw DegenerateInput("non-simple halfspace intersection");
    // dual points close to the boundary without being extreme
    std::vector<char> extreme(hs.size(), 0);
    for (int v : hull.vertices) extreme[v] = 1;
    for (int i = 0; i < static_cast<int>(hs.size()); ++i) {
        if (extreme[i]) continue;
        std::span<const double> y(duals.data() + static_cast<std::size_t>(i) * dim, dim);
        for (const auto& f : hull.facets)
            if (linalg::dot(f.normal, y) - f.offset > -hull.tolerance)
                throw DegenerateInput("redundant halfspace touches the polytope");
    }
    Polytope p;
    p.dim = dim;
    std::vector<int> facet_of(hs.size(), -1);
    for (int v : hull.vertices) {
        facet_of[v] = static_cast<int>(p.halfspaces.size());
        p.halfspaces.push_back(hs[v]);
    }
    p.facet_incidence.assign(p.halfspaces.size(), {});
    for (int j = 0; j < static_cast<int>(hull.facets.size()); ++j) {
        const auto& f = hull.facets[j];
        for (double x : f.normal) p.coords.push_back(x / f.offset);
        for (int v : f.vertices) p.facet_incidence[facet_of[v]].push_back(j);
    }
    finalize(p);
    return p;
}

/// Polytope from a hull of points containing the origin in the interior.
inline Polytope polytope_from_hull(const std::vector<double>& pts, int dim, const Hull& hull)
{
    Polytope p;
    p.dim = dim;
    std::vector<int> id(pts.size() / dim, -1);
    for (int v : hull.vertices) {
        id[v] = p.num_vertices();
        for (int k = 0; k < dim; ++k) p.coords.push_back(pts[static_cast<std::size_t>(v) * dim + k]);
    }
    for (const auto& f : hull.facets) {
        if (!(f.offset > hull.tolerance)) throw DegenerateInput("origin not interior to hull");
        p.halfspaces.push_back({f.normal, f.offset});
        std::vector<int> inc;
        for (int v : f.vertices) inc.push_back(id[v]);
        p.facet_incidence.push_back(std::move(inc));
    }
    finalize(p);
    return p;
}

// ---------------------------------------------------------------- face lattice

struct FaceLattice {
    int dim = 0;
    // faces[k][i]: sorted vertex ids of the i-th k-face; faces[dim] holds the
    // polytope itself, faces[dim-1] the facets in facet order, faces[0][v] = {v}
    std::vector<std::vector<std::vector<int>>> faces;
    // sub[k][i]: indices into faces[k-1] of the facets of that k-face
    std::vector<std::vector<std::vector<int>>> sub;
};

inline FaceLattice face_lattice_generic(const Polytope& p)
{
    const int d = p.dim;
    FaceLattice L;
    L.dim = d;
    L.faces.assign(d + 1, {});
    L.sub.assign(d + 1, {});
    std::vector<int> all(p.num_vertices());
    std::iota(all.begin(), all.end(), 0);
    L.faces[d] = {all};
    L.sub[d] = {std::vector<int>(p.num_facets())};
    std::iota(L.sub[d][0].begin(), L.sub[d][0].end(), 0);
    L.faces[d - 1] = p.facet_incidence;
    if (d > 1)
        for (int v = 0; v < p.num_vertices(); ++v) L.faces[0].push_back({v});
    for (int k = d - 1; k >= 1; --k) {
        std::map<std::vector<int>, int> index;
        if (k - 1 == 0) {
            for (int v = 0; v < p.num_vertices(); ++v) index[{v}] = v;
        }
        L.sub[k].resize(L.faces[k].size());
        for (std::size_t i = 0; i < L.faces[k].size(); ++i) {
            const auto& F = L.faces[k][i];
            std::set<int> cand;
            for (int v : F)
                for (int g : p.vertex_facets[v]) cand.insert(g);
            std::vector<std::vector<int>> parts;
            for (int g : cand) {
                std::vector<int> I;
                std::set_intersection(F.begin(), F.end(), p.facet_incidence[g].begin(), p.facet_incidence[g].end(),
                                      std::back_inserter(I));
                if (!I.empty() && I.size() < F.size()) parts.push_back(std::move(I));
            }
            std::sort(parts.begin(), parts.end());
            parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
            for (std::size_t a = 0; a < parts.size(); ++a) {
                bool maximal = true;
                for (std::size_t b = 0; b < parts.size() && maximal; ++b)
                    if (a != b && parts[b].size() > parts[a].size() &&
                        std::includes(parts[b].begin(), parts[b].end(), parts[a].begin(), parts[a].end()))
                        maximal = false;
                if (!maximal) continue;
                auto it = index.find(parts[a]);
                int id;
                if (it == index.end()) {
                    if (k - 1 == 0) throw DegenerateInput("face lattice: inconsistent incidences");
                    id = static_cast<int>(L.faces[k - 1].size());
                    L.faces[k - 1].push_back(parts[a]);
                    index.emplace(parts[a], id);
                } else {
                    id = it->second;
                }
                L.sub[k][i].push_back(id);
            }
        }
    }
    return L;
}

// Simple polytopes: the k-faces through a vertex are exactly the sets of
// dim-k of its facets, so every face is named by a facet subset.
inline FaceLattice face_lattice_simple(const Polytope& p)
{
    const int d = p.dim;
    FaceLattice L;
    L.dim = d;
    L.faces.assign(d + 1, {});
    L.sub.assign(d + 1, {});
    std::vector<int> all(p.num_vertices());
    std::iota(all.begin(), all.end(), 0);
    L.faces[d] = {all};
    L.sub[d] = {std::vector<int>(p.num_facets())};
    std::iota(L.sub[d][0].begin(), L.sub[d][0].end(), 0);
    if (d == 1) {
        L.faces[0] = p.facet_incidence;
        return L;
    }
    // names[k]: facet subset of every k-face, index[k]: subset -> face id
    std::vector<std::map<std::vector<int>, int>> index(d);
    std::vector<std::vector<std::vector<int>>> names(d);
    for (int f = 0; f < p.num_facets(); ++f) {
        index[d - 1].emplace(std::vector<int>{f}, f);
        names[d - 1].push_back({f});
    }
    L.faces[d - 1] = p.facet_incidence;
    for (int v = 0; v < p.num_vertices(); ++v) {
        L.faces[0].push_back({v});
        index[0].emplace(p.vertex_facets[v], v);
        names[0].push_back(p.vertex_facets[v]);
    }
    for (int k = d - 2; k >= 1; --k) {
        const int size = d - k;
        for (int v = 0; v < p.num_vertices(); ++v) {
            const auto& vf = p.vertex_facets[v];
            // subsets of vf of the given size, by bitmask
            for (unsigned mask = 0; mask < (1u << d); ++mask) {
                if (std::popcount(mask) != size) continue;
                std::vector<int> S;
                for (int j = 0; j < d; ++j)
                    if (mask >> j & 1) S.push_back(vf[j]);
                auto [it, fresh] = index[k].try_emplace(S, static_cast<int>(L.faces[k].size()));
                if (fresh) {
                    L.faces[k].push_back({});
                    names[k].push_back(std::move(S));
                }
                L.faces[k][it->second].push_back(v);
            }
        }
    }
    // facets of a k-face: add one more facet from a vertex of the face
    for (int k = d - 1; k >= 1; --k) {
        L.sub[k].resize(L.faces[k].size());
        for (std::size_t i = 0; i < L.faces[k].size(); ++i) {
            const auto& S = names[k][i];
            std::set<int> subs;
            for (int v : L.faces[k][i])
                for (int g : p.vertex_facets[v]) {
                    if (std::binary_search(S.begin(), S.end(), g)) continue;
                    std::vector<int> T = S;
                    T.insert(std::upper_bound(T.begin(), T.end(), g), g);
                    subs.insert(index[k - 1].at(T));
                }
            L.sub[k][i].assign(subs.begin(), subs.end());
        }
    }
    return L;
}

inline FaceLattice face_lattice(const Polytope& p)
{
    if (p.simple && p.dim <= 16) {
        for (const auto& vf : p.vertex_facets)
            if (static_cast<int>(vf.size()) != p.dim) return face_lattice_generic(p);
        return face_lattice_simple(p);
    }
    return face_lattice_generic(p);
}

using FVector = std::vector<long long>;

inline FVector f_vector(const FaceLattice& L)
{
    FVector f(L.dim);
    for (int k = 0; k < L.dim; ++k) f[k] = static_cast<long long>(L.faces[k].size());
    return f;
}
inline FVector f_vector(const Polytope& p) { return f_vector(face_lattice(p)); }

struct Face {
    std::vector<int> vertices;
    std::vector<linalg::Vec> basis; // orthonormal directions of the affine hull
};

namespace detail {

inline std::vector<linalg::Vec> affine_basis(const Polytope& p, const std::vector<int>& vs)
{
    std::vector<linalg::Vec> dirs;
    for (std::size_t i = 1; i < vs.size(); ++i) dirs.push_back(linalg::sub(p.vertex(vs[i]), p.vertex(vs[0])));
    return linalg::orthonormal_basis(dirs, 1e-9);
}

} // namespace detail

inline std::vector<Face> faces(const Polytope& p, int k, const FaceLattice& L)
{
    if (k < 0 || k > p.dim) throw std::out_of_range("face dimension out of range");
    std::vector<Face> out;
    for (const auto& vs : L.faces[k]) out.push_back({vs, detail::affine_basis(p, vs)});
    return out;
}
inline std::vector<Face> faces(const Polytope& p, int k) { return faces(p, k, face_lattice(p)); }

// ---------------------------------------------------------------- measures

// k-dimensional content of every face, level by level (meas[k][i])
struct FaceMeasures {
    std::vector<std::vector<double>> meas;
};

inline FaceMeasures face_measures(const Polytope& p, const FaceLattice& L, int max_level)
{
    FaceMeasures M;
    M.meas.assign(max_level + 1, {});
    M.meas[0].assign(L.faces[0].size(), 1.0);
    if (max_level >= 1) {
        for (const auto& e : L.faces[1])
            M.meas[1].push_back(linalg::norm(linalg::sub(p.vertex(e[0]), p.vertex(e[1]))));
    }
    for (int k = 2; k <= max_level; ++k) {
        std::vector<std::vector<linalg::Vec>> bases(L.faces[k - 1].size());
        std::vector<char> have(L.faces[k - 1].size(), 0);
        for (std::size_t i = 0; i < L.faces[k].size(); ++i) {
            const auto& F = L.faces[k][i];
            const int v = F[0];
            double s = 0.0;
            for (int g : L.sub[k][i]) {
                const auto& G = L.faces[k - 1][g];
                if (std::binary_search(G.begin(), G.end(), v)) continue;
                if (!have[g]) {
                    bases[g] = detail::affine_basis(p, G);
                    have[g] = 1;
                }
                const double h = linalg::norm(linalg::reject(linalg::sub(p.vertex(v), p.vertex(G[0])), bases[g]));
                s += h * M.meas[k - 1][g];
            }
            M.meas[k].push_back(s / k);
        }
    }
    return M;
}

// total k-dimensional content of the k-skeleton
inline double face_measure(const Polytope& p, int k, const FaceLattice& L)
{
    if (k < 0 || k > p.dim) throw std::out_of_range("face dimension out of range");
    const auto M = face_measures(p, L, k);
    double s = 0.0;
    for (double x : M.meas[k]) s += x;
    return s;
}
inline double face_measure(const Polytope& p, int k) { return face_measure(p, k, face_lattice(p)); }

inline double volume(const Polytope& p, const FaceLattice& L)
{
    if (p.dim == 1) return p.coords[0] - p.coords[1];
    const auto M = face_measures(p, L, p.dim - 1);
    double s = 0.0;
    for (int f = 0; f < p.num_facets(); ++f) s += p.halfspaces[f].t * M.meas[p.dim - 1][f];
    return s / p.dim;
}
inline double volume(const Polytope& p) { return volume(p, face_lattice(p)); }

inline double surface_area(const Polytope& p, const FaceLattice& L) { return face_measure(p, p.dim - 1, L); }
inline double surface_area(const Polytope& p) { return surface_area(p, face_lattice(p)); }

// ---------------------------------------------------------------- radial/support

inline double radial(const Polytope& p, std::span<const double> u)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& h : p.halfspaces) {
        const double c = linalg::dot(u, h.u);
        if (c > 0.0) best = std::min(best, h.t / c);
    }
    return best;
}

inline double support(const Polytope& p, std::span<const double> u)
{
    double best = -std::numeric_limits<double>::infinity();
    for (int v = 0; v < p.num_vertices(); ++v) best = std::max(best, linalg::dot(u, p.vertex(v)));
    return best;
}

// ---------------------------------------------------------------- dual volumes

/// Monte Carlo estimate of the dual intrinsic volume
/// (1/d) int_{S^{d-1}} rho^{d-s} from n_dirs uniform directions.
inline Estimate dual_intrinsic_volume(const Polytope& p, double s, int n_dirs, std::uint64_t seed)
{
    if (n_dirs < 2) throw std::invalid_argument("need at least two directions");
    Rng rng(seed);
    Estimate e;
    e.seed = seed;
    const double scale = omega(p.dim) / p.dim;
    std::vector<double> u(p.dim);
    for (int i = 0; i < n_dirs; ++i) {
        random_direction(rng, u);
        e.add(scale * std::pow(radial(p, u), p.dim - s));
    }
    return e;
}

namespace detail {

// simplices (vertex id lists) triangulating the k-face i
inline void triangulate(const FaceLattice& L, int k, int i, std::vector<std::vector<int>>& out)
{
    if (k == 1) {
        out.push_back(L.faces[1][i]);
        return;
    }
    const int v = L.faces[k][i][0];
    for (int g : L.sub[k][i]) {
        const auto& G = L.faces[k - 1][g];
        if (std::binary_search(G.begin(), G.end(), v)) continue;
        std::vector<std::vector<int>> part;
        triangulate(L, k - 1, g, part);
        for (auto& s : part) {
            s.push_back(v);
            out.push_back(std::move(s));
        }
    }
}

// int over the simplex of f, collapsed Gauss-Legendre product rule
template <class F>
double simplex_integral(const Polytope& p, const std::vector<int>& s, F&& f, int q)
{
    const int k = static_cast<int>(s.size()) - 1;
    const int d = p.dim;
    std::vector<linalg::Vec> edges;
    for (int j = 1; j <= k; ++j) edges.push_back(linalg::sub(p.vertex(s[j]), p.vertex(s[0])));
    const double pvol = linalg::parallelepiped_volume(edges);
    static thread_local std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    auto it = cache.find(q);
    if (it == cache.end()) it = cache.emplace(q, gauss_legendre01(q)).first;
    const auto& [xs, ws] = it->second;
    std::vector<int> idx(k, 0);
    std::vector<double> x(d);
    double total = 0.0;
    for (;;) {
        // collapsed coordinates: lambda_j = rest_j u_j, jacobian prod rest_j
        double rest = 1.0, jac = 1.0, w = 1.0;
        std::copy(p.vertex(s[0]).begin(), p.vertex(s[0]).end(), x.begin());
        for (int j = 0; j < k; ++j) {
            const double lam = rest * xs[idx[j]];
            w *= ws[idx[j]];
            jac *= rest;
            linalg::axpy(x, lam, edges[j]);
            rest -= lam;
        }
        total += w * jac * f(x);
        int j = k - 1;
        while (j >= 0 && ++idx[j] == q) idx[j--] = 0;
        if (j < 0) break;
    }
    return pvol * total;
}

} // namespace detail

/// Dual intrinsic volume (1/d) int rho^{d-s} by exact boundary decomposition:
/// int_{S^{d-1}} rho^p = sum_F t_F int_F |x|^{p-d} dx, with each facet
/// triangulated and integrated by a product Gauss rule of order q.
inline double dual_volume_quadrature(const Polytope& p, double s, const FaceLattice& L, int q = 12)
{
    const int d = p.dim;
    const double pw = d - s; // exponent of rho
    if (d == 1) return std::pow(p.coords[0], pw) + std::pow(-p.coords[1], pw);
    double total = 0.0;
    for (int f = 0; f < p.num_facets(); ++f) {
        std::vector<std::vector<int>> simp;
        if (d - 1 == 0) continue;
        if (d - 1 == 1)
            simp.push_back(L.faces[1][f]);
        else
            detail::triangulate(L, d - 1, f, simp);
        double acc = 0.0;
        for (const auto& sx : simp)
            acc += detail::simplex_integral(
                p, sx, [&](const std::vector<double>& x) { return std::pow(linalg::dot(x, x), 0.5 * (pw - d)); }, q);
        total += p.halfspaces[f].t * acc;
    }
    return total / d;
}
inline double dual_volume_quadrature(const Polytope& p, double s, int q = 12)
{
    return dual_volume_quadrature(p, s, face_lattice(p), q);
}

// ---------------------------------------------------------------- projection/section

/// Orthogonal projection onto span{e_1..e_l} of the local coordinates.
inline Polytope project(const Polytope& p, int l)
{
    if (l < 1 || l >= p.dim) throw std::out_of_range("projection dimension out of range");
    std::vector<double> pts;
    for (int v = 0; v < p.num_vertices(); ++v)
        for (int k = 0; k < l; ++k) pts.push_back(p.vertex(v)[k]);
    Polytope q;
    if (l == 1) {
        const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end());
        q.dim = 1;
        q.halfspaces = {{{1.0}, *hi}, {{-1.0}, -*lo}};
        q.coords = {*hi, *lo};
        q.facet_incidence = {{0}, {1}};
        finalize(q);
    } else {
        q = polytope_from_hull(pts, l, convex_hull(pts, l));
    }
    std::vector<linalg::Vec> b;
    for (int k = 0; k < l; ++k) {
        linalg::Vec e(p.dim, 0.0);
        e[k] = 1.0;
        b.push_back(std::move(e));
    }
    if (p.basis) {
        std::vector<linalg::Vec> amb;
        for (const auto& e : b) {
            linalg::Vec w((*p.basis)[0].size(), 0.0);
            for (int k = 0; k < p.dim; ++k) linalg::axpy(w, e[k], (*p.basis)[k]);
            amb.push_back(std::move(w));
        }
        b = std::move(amb);
    }
    q.basis = std::move(b);
    return q;
}

/// Section with the linear subspace spanned by the orthonormal vectors `lb`
/// (given in the polytope's local coordinates); the result uses coordinates
/// with respect to lb.
inline Polytope section(const Polytope& p, const std::vector<linalg::Vec>& lb, double rel_tol = 1e-9)
{
    const int m = static_cast<int>(lb.size());
    if (m < 1 || m >= p.dim) throw std::out_of_range("section dimension out of range");
    std::vector<HalfSpace> hs;
    for (const auto& h : p.halfspaces) {
        linalg::Vec w(m);
        for (int k = 0; k < m; ++k) w[k] = linalg::dot(h.u, lb[k]);
        const double nw = linalg::norm(w);
        if (nw < 1e-12) continue;
        linalg::scale(w, 1.0 / nw);
        hs.push_back({std::move(w), h.t / nw});
    }
    auto q = intersect_halfspaces(std::move(hs), m, rel_tol);
    if (!q) throw DegenerateInput("section of a bounded polytope came out unbounded");
    std::vector<linalg::Vec> b = lb;
    if (p.basis) {
        for (auto& e : b) {
            linalg::Vec w((*p.basis)[0].size(), 0.0);
            for (int k = 0; k < p.dim; ++k) linalg::axpy(w, e[k], (*p.basis)[k]);
            e = std::move(w);
        }
    }
    q->basis = std::move(b);
    return *q;
}

inline std::vector<linalg::Vec> coordinate_subspace(int n, int m)
{
    std::vector<linalg::Vec> b;
    for (int k = 0; k < m; ++k) {
        linalg::Vec e(n, 0.0);
        e[k] = 1.0;
        b.push_back(std::move(e));
    }
    return b;
}

// ---------------------------------------------------------------- V_1 and F

namespace detail {

// V_1 of the k-face i for k <= 3, in its own affine hull
inline double face_V1(const Polytope& p, const FaceLattice& L, const FaceMeasures& M, int k, int i)
{
    if (k == 0) return 0.0;
    if (k == 1) return M.meas[1][i];
    if (k == 2) {
        double per = 0.0;
        for (int e : L.sub[2][i]) per += M.meas[1][e];
        return per / 2.0;
    }
    if (k != 3) throw UnsupportedRange("V_1 of faces is implemented up to dimension 3");
    const auto& F = L.faces[3][i];
    linalg::Vec c(p.dim, 0.0);
    for (int v : F) linalg::axpy(c, 1.0 / F.size(), p.vertex(v));
    // outward normals of the 2-faces inside aff F
    std::map<int, linalg::Vec> nu;
    for (int g : L.sub[3][i]) {
        const auto& G = L.faces[2][g];
        auto b = affine_basis(p, G);
        auto w = linalg::reject(linalg::sub(p.vertex(G[0]), c), b);
        linalg::scale(w, 1.0 / linalg::norm(w));
        nu[g] = std::move(w);
    }
    // edges of F with the two 2-faces through them
    std::map<int, std::vector<int>> by_edge;
    for (int g : L.sub[3][i])
        for (int e : L.sub[2][g]) by_edge[e].push_back(g);
    double s = 0.0;
    for (const auto& [e, gs] : by_edge) {
        if (gs.size() != 2) throw DegenerateInput("edge of a 3-face not shared by two 2-faces");
        const double cs = std::clamp(linalg::dot(nu[gs[0]], nu[gs[1]]), -1.0, 1.0);
        s += M.meas[1][e] * std::acos(cs);
    }
    return s / (2.0 * std::numbers::pi);
}

} // namespace detail

inline double intrinsic_V1(const Polytope& p)
{
    if (p.dim != 2 && p.dim != 3) throw UnsupportedRange("intrinsic_V1 supports dimensions 2 and 3");
    const auto L = face_lattice(p);
    const auto M = face_measures(p, L, std::min(p.dim, 2));
    return detail::face_V1(p, L, M, p.dim, 0);
}

/// F_{l;j}(P) = sum of V_j over the l-faces, for j in {0, 1, l}
inline double F_functional(const Polytope& p, int l, int j, const FaceLattice& L)
{
    if (l < 0 || l > p.dim) throw std::out_of_range("face dimension out of range");
    if (j == 0) return static_cast<double>(L.faces[l].size());
    if (j == l) return face_measure(p, l, L);
    if (j == 1) {
        if (l > 3) throw UnsupportedRange("F_{l;1} needs l <= 3");
        const auto M = face_measures(p, L, std::min(l, 2));
        double s = 0.0;
        for (std::size_t i = 0; i < L.faces[l].size(); ++i) s += detail::face_V1(p, L, M, l, static_cast<int>(i));
        return s;
    }
    throw UnsupportedRange("F_{l;j} is available for j in {0, 1, l}");
}
inline double F_functional(const Polytope& p, int l, int j) { return F_functional(p, l, j, face_lattice(p)); }

// ---------------------------------------------------------------- checks

struct PolytopeCheck {
    bool constraints = true; // every vertex satisfies every halfspace
    bool incidences = true;  // incidences are tight and every vertex on >= dim facets
    bool origin_interior = true;
    bool euler = true;
    bool simple = true;
    std::string message;
    bool ok() const { return constraints && incidences && origin_interior && euler; }
};

inline PolytopeCheck check_polytope(const Polytope& p, const FaceLattice& L, double rel_tol = 1e-9)
{
    PolytopeCheck c;
    double scale = 0.0;
    for (int v = 0; v < p.num_vertices(); ++v) scale = std::max(scale, linalg::norm(p.vertex(v)));
    const double tol = rel_tol * std::max(scale, 1.0);
    for (int f = 0; f < p.num_facets(); ++f) {
        const auto& h = p.halfspaces[f];
        if (!(h.t > 0.0)) c.origin_interior = false;
        for (int v = 0; v < p.num_vertices(); ++v) {
            const double dv = linalg::dot(h.u, p.vertex(v)) - h.t;
            const bool inc = std::binary_search(p.facet_incidence[f].begin(), p.facet_incidence[f].end(), v);
            if (dv > tol) c.constraints = false;
            if (inc && std::abs(dv) > tol) c.incidences = false;
        }
    }
    for (const auto& vf : p.vertex_facets) {
        if (static_cast<int>(vf.size()) < p.dim) c.incidences = false;
        if (static_cast<int>(vf.size()) != p.dim) c.simple = false;
    }
    long long chi = 0;
    for (int k = 0; k < p.dim; ++k) chi += (k % 2 == 0 ? 1 : -1) * static_cast<long long>(L.faces[k].size());
    c.euler = chi == 1 - (p.dim % 2 == 0 ? 1 : -1);
    if (!c.ok()) c.message = "polytope invariants violated";
    return c;
}
inline PolytopeCheck check_polytope(const Polytope& p) { return check_polytope(p, face_lattice(p)); }

// ---------------------------------------------------------------- JSON

inline nlohmann::json to_json(const Polytope& p)
{
    nlohmann::json j;
    j["dim"] = p.dim;
    j["halfspaces"] = nlohmann::json::array();
    for (const auto& h : p.halfspaces) j["halfspaces"].push_back({{"u", h.u}, {"t", h.t}});
    j["vertices"] = nlohmann::json::array();
    for (int v = 0; v < p.num_vertices(); ++v)
        j["vertices"].push_back(std::vector<double>(p.vertex(v).begin(), p.vertex(v).end()));
    j["facet_incidence"] = p.facet_incidence;
    if (p.basis) j["basis"] = *p.basis;
    return j;
}

inline Polytope polytope_from_json(const nlohmann::json& j)
{
    Polytope p;
    p.dim = j.at("dim").get<int>();
    for (const auto& h : j.at("halfspaces")) p.halfspaces.push_back({h.at("u").get<linalg::Vec>(), h.at("t").get<double>()});
    for (const auto& v : j.at("vertices")) {
        auto x = v.get<std::vector<double>>();
        if (static_cast<int>(x.size()) != p.dim) throw std::invalid_argument("vertex of wrong dimension");
        p.coords.insert(p.coords.end(), x.begin(), x.end());
    }
    p.facet_incidence = j.at("facet_incidence").get<std::vector<std::vector<int>>>();
    if (j.contains("basis")) p.basis = j.at("basis").get<std::vector<linalg::Vec>>();
    finalize(p);
    return p;
}

} // namespace zerocell
