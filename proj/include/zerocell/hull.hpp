#pragma once

// Incremental beneath-beyond convex hull in R^d, d >= 2.
//
// The triangulated boundary is kept as simplicial facets with neighbour
// links. Points that are not strictly beyond some facet are never inserted,
// so duplicates and points on the boundary are skipped. At the end coplanar
// simplices are merged into the true facets.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace zerocell {

struct HullFacet {
    std::vector<int> vertices; // sorted point indices
    linalg::Vec normal;        // outward unit normal
    double offset = 0.0;       // <normal, x> <= offset on the hull
    std::vector<int> neighbors; // merged facets sharing a ridge
};

struct Hull {
    int dim = 0;
    std::vector<int> vertices;               // extreme points, sorted
    std::vector<HullFacet> facets;           // merged facets
    std::vector<std::vector<int>> simplices; // simplicial boundary, d points each
    double tolerance = 0.0;                  // absolute distance tolerance used
    linalg::Vec interior;                    // a point strictly inside
};

namespace detail {

struct Simplex {
    std::vector<int> v;   // d point indices
    std::vector<int> nb;  // nb[i] = simplex opposite v[i]
    linalg::Vec normal;
    double offset = 0.0;
    bool alive = true;
    int visit = -1;
};

class HullBuilder {
public:
    HullBuilder(const std::vector<double>& pts, int dim, double rel_tol)
        : p_(pts), d_(dim), m_(static_cast<int>(pts.size()) / dim)
    {
        double ext = 0.0;
        for (int k = 0; k < d_; ++k) {
            double lo = 1e300, hi = -1e300;
            for (int i = 0; i < m_; ++i) {
                lo = std::min(lo, at(i)[k]);
                hi = std::max(hi, at(i)[k]);
            }
            ext = std::max(ext, hi - lo);
        }
        eps_ = rel_tol * std::max(ext, 1e-300);
    }

    Hull build()
    {
        if (m_ < d_ + 1) throw DegenerateInput("convex hull needs at least d+1 points");
        auto simplex = initial_simplex();
        centre_.assign(d_, 0.0);
        for (int i : simplex) linalg::axpy(centre_, 1.0 / (d_ + 1), at(i));
        // the d+1 facets of the starting simplex
        for (int skip = 0; skip <= d_; ++skip) {
            Simplex s;
            for (int j = 0; j <= d_; ++j)
                if (j != skip) s.v.push_back(simplex[j]);
            s.nb.assign(d_, -1);
            orient(s);
            facets_.push_back(std::move(s));
        }
        link_all();
        std::vector<char> used(m_, 0);
        for (int i : simplex) used[i] = 1;
        for (int i = 0; i < m_; ++i)
            if (!used[i]) insert(i);
        return finish();
    }

private:
    std::span<const double> at(int i) const { return {p_.data() + static_cast<std::size_t>(i) * d_, static_cast<std::size_t>(d_)}; }

    std::vector<int> initial_simplex()
    {
        std::vector<int> s;
        int first = 0;
        for (int i = 1; i < m_; ++i)
            if (at(i)[0] < at(first)[0]) first = i;
        s.push_back(first);
        std::vector<linalg::Vec> basis;
        while (static_cast<int>(s.size()) < d_ + 1) {
            int best = -1;
            double best_d = -1.0;
            for (int i = 0; i < m_; ++i) {
                auto w = linalg::reject(linalg::sub(at(i), at(first)), basis);
                const double dd = linalg::norm(w);
                if (dd > best_d) {
                    best_d = dd;
                    best = i;
                }
            }
            if (best_d <= eps_) throw DegenerateInput("points do not span the ambient space");
            auto w = linalg::reject(linalg::sub(at(best), at(first)), basis);
            linalg::scale(w, 1.0 / linalg::norm(w));
            basis.push_back(std::move(w));
            s.push_back(best);
        }
        return s;
    }

    void orient(Simplex& s) const
    {
        std::vector<linalg::Vec> dirs;
        for (int j = 1; j < d_; ++j) dirs.push_back(linalg::sub(at(s.v[j]), at(s.v[0])));
        auto nrm = linalg::normal_to(dirs, d_, 1e-13);
        if (!nrm) throw DegenerateInput("degenerate simplicial facet");
        s.normal = std::move(*nrm);
        s.offset = linalg::dot(s.normal, at(s.v[0]));
        if (linalg::dot(s.normal, centre_) > s.offset) {
            linalg::scale(s.normal, -1.0);
            s.offset = -s.offset;
        }
    }

    double dist(const Simplex& s, int i) const { return linalg::dot(s.normal, at(i)) - s.offset; }

    // ridge key: the facet's vertices without position `skip`, sorted
    std::vector<int> ridge(const Simplex& s, int skip) const
    {
        std::vector<int> r;
        r.reserve(d_ - 1);
        for (int j = 0; j < d_; ++j)
            if (j != skip) r.push_back(s.v[j]);
        std::sort(r.begin(), r.end());
        return r;
    }

    void link_all()
    {
        std::map<std::vector<int>, std::pair<int, int>> open;
        for (int f = 0; f < static_cast<int>(facets_.size()); ++f) {
            if (!facets_[f].alive) continue;
            for (int j = 0; j < d_; ++j) {
                auto key = ridge(facets_[f], j);
                auto it = open.find(key);
                if (it == open.end()) {
                    open.emplace(std::move(key), std::make_pair(f, j));
                } else {
                    facets_[f].nb[j] = it->second.first;
                    facets_[it->second.first].nb[it->second.second] = f;
                    open.erase(it);
                }
            }
        }
    }

    void insert(int pi)
    {
        // find one visible facet, then flood-fill the visible region
        int start = -1;
        for (int f = 0; f < static_cast<int>(facets_.size()); ++f)
            if (facets_[f].alive && dist(facets_[f], pi) > eps_) {
                start = f;
                break;
            }
        if (start < 0) return; // inside or on the boundary
        ++stamp_;
        std::vector<int> visible{start}, stack{start};
        facets_[start].visit = stamp_;
        while (!stack.empty()) {
            const int f = stack.back();
            stack.pop_back();
            for (int nb : facets_[f].nb) {
                if (facets_[nb].visit == stamp_) continue;
                if (dist(facets_[nb], pi) > eps_) {
                    facets_[nb].visit = stamp_;
                    visible.push_back(nb);
                    stack.push_back(nb);
                }
            }
        }
        // horizon ridges -> new facets
        std::vector<int> created;
        for (int f : visible) {
            for (int j = 0; j < d_; ++j) {
                const int g = facets_[f].nb[j];
                if (facets_[g].visit == stamp_) continue;
                Simplex s;
                s.v = facets_[f].v;
                s.v[j] = pi;
                s.nb.assign(d_, -1);
                s.nb[j] = g;
                orient(s);
                const int id = static_cast<int>(facets_.size());
                for (int k = 0; k < d_; ++k)
                    if (facets_[g].nb[k] == f) facets_[g].nb[k] = id;
                facets_.push_back(std::move(s));
                created.push_back(id);
            }
        }
        for (int f : visible) facets_[f].alive = false;
        // link the new facets among themselves across ridges through pi
        std::map<std::vector<int>, std::pair<int, int>> open;
        for (int id : created) {
            for (int j = 0; j < d_; ++j) {
                if (facets_[id].v[j] == pi) continue;
                auto key = ridge(facets_[id], j);
                auto it = open.find(key);
                if (it == open.end()) {
                    open.emplace(std::move(key), std::make_pair(id, j));
                } else {
                    facets_[id].nb[j] = it->second.first;
                    facets_[it->second.first].nb[it->second.second] = id;
                    open.erase(it);
                }
            }
        }
        if (!open.empty()) throw DegenerateInput("hull update left unmatched ridges");
    }

    Hull finish()
    {
        Hull h;
        h.dim = d_;
        h.tolerance = eps_;
        h.interior = centre_;
        std::vector<int> alive;
        std::vector<int> index(facets_.size(), -1);
        for (int f = 0; f < static_cast<int>(facets_.size()); ++f)
            if (facets_[f].alive) {
                index[f] = static_cast<int>(alive.size());
                alive.push_back(f);
            }
        // union coplanar neighbours
        std::vector<int> parent(alive.size());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (std::size_t a = 0; a < alive.size(); ++a) {
            const auto& s = facets_[alive[a]];
            for (int j = 0; j < d_; ++j) {
                const auto& t = facets_[s.nb[j]];
                // the vertex of t across the ridge lies in s's hyperplane?
                int opp = -1;
                for (int k = 0; k < d_; ++k)
                    if (t.nb[k] == alive[a]) opp = t.v[k];
                if (opp >= 0 && std::abs(dist(s, opp)) <= eps_) {
                    const int x = find(static_cast<int>(a)), y = find(index[s.nb[j]]);
                    if (x != y) parent[x] = y;
                }
            }
        }
        std::map<int, int> group;
        for (std::size_t a = 0; a < alive.size(); ++a) {
            const int g = find(static_cast<int>(a));
            auto [it, inserted] = group.emplace(g, static_cast<int>(h.facets.size()));
            if (inserted) {
                HullFacet hf;
                hf.normal = facets_[alive[a]].normal;
                hf.offset = facets_[alive[a]].offset;
                h.facets.push_back(std::move(hf));
            }
            auto& hf = h.facets[it->second];
            for (int v : facets_[alive[a]].v) hf.vertices.push_back(v);
            h.simplices.push_back(facets_[alive[a]].v);
        }
        for (std::size_t a = 0; a < alive.size(); ++a) {
            const int fa = group[find(static_cast<int>(a))];
            for (int nb : facets_[alive[a]].nb) {
                const int fb = group[find(index[nb])];
                if (fa != fb) h.facets[fa].neighbors.push_back(fb);
            }
        }
        std::vector<char> is_vertex(m_, 0);
        for (auto& hf : h.facets) {
            std::sort(hf.vertices.begin(), hf.vertices.end());
            hf.vertices.erase(std::unique(hf.vertices.begin(), hf.vertices.end()), hf.vertices.end());
            std::sort(hf.neighbors.begin(), hf.neighbors.end());
            hf.neighbors.erase(std::unique(hf.neighbors.begin(), hf.neighbors.end()), hf.neighbors.end());
            // refit the plane through all merged points
            if (hf.vertices.size() > static_cast<std::size_t>(d_)) refit(hf);
            for (int v : hf.vertices) is_vertex[v] = 1;
        }
        // a point on the boundary is extreme only if its facet normals span R^d
        std::vector<std::vector<int>> vf(m_);
        for (int f = 0; f < static_cast<int>(h.facets.size()); ++f)
            for (int v : h.facets[f].vertices) vf[v].push_back(f);
        for (int v = 0; v < m_; ++v) {
            if (!is_vertex[v]) continue;
            if (static_cast<int>(vf[v].size()) < d_) {
                is_vertex[v] = 0;
                continue;
            }
            std::vector<linalg::Vec> ns;
            for (int f : vf[v]) ns.push_back(h.facets[f].normal);
            if (static_cast<int>(linalg::orthonormal_basis(ns, 1e-9).size()) < d_) is_vertex[v] = 0;
        }
        for (auto& hf : h.facets)
            hf.vertices.erase(std::remove_if(hf.vertices.begin(), hf.vertices.end(), [&](int v) { return !is_vertex[v]; }),
                              hf.vertices.end());
        for (int v = 0; v < m_; ++v)
            if (is_vertex[v]) h.vertices.push_back(v);
        return h;
    }

    void refit(HullFacet& hf) const
    {
        linalg::Vec c(d_, 0.0);
        for (int v : hf.vertices) linalg::axpy(c, 1.0 / hf.vertices.size(), at(v));
        hf.offset = linalg::dot(hf.normal, c);
    }

    const std::vector<double>& p_;
    int d_;
    int m_;
    double eps_ = 0.0;
    int stamp_ = 0;
    linalg::Vec centre_;
    std::vector<Simplex> facets_;
};

} // namespace detail

/// Convex hull of `points` (flat, row-major, `dim` coordinates per point).
/// Throws DegenerateInput when the points do not span R^dim.
inline Hull convex_hull(const std::vector<double>& points, int dim, double rel_tol = 1e-9)
{
    if (dim < 2) throw std::invalid_argument("convex_hull needs dim >= 2");
    if (points.size() % static_cast<std::size_t>(dim) != 0) throw std::invalid_argument("point buffer size mismatch");
    detail::HullBuilder b(points, dim, rel_tol);
    return b.build();
}

} // namespace zerocell
