#pragma once

// Exact sampling of the zero cell: hyperplanes arrive by increasing distance
// from the origin, the current cell is clipped incrementally, and sampling
// stops once the next distance exceeds the circumradius.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "estimate.hpp"
#include "linalg.hpp"
#include "polytope.hpp"
#include "random.hpp"
#include "specfun.hpp"

namespace zerocell {

inline constexpr std::int64_t default_hyperplane_cap = 1000000;

// ---------------------------------------------------------------- stream

class HyperplaneStream {
public:
    HyperplaneStream(const ModelParams& p, std::uint64_t seed) : p_(p), rng_(seed) {}

    // next hyperplane as the origin-side halfspace, t = distance
    HalfSpace next()
    {
        s_ += exp_(rng_);
        ++count_;
        return {random_direction(rng_, p_.n), std::pow(p_.r * s_ / (2.0 * p_.gamma), 1.0 / p_.r)};
    }

    // fresh direction for a hyperplane whose position led to a degenerate cut
    void redraw(HalfSpace& h) { h.u = random_direction(rng_, p_.n); }

    std::int64_t count() const { return count_; }

private:
    ModelParams p_;
    Rng rng_;
    std::exponential_distribution<double> exp_{1.0};
    double s_ = 0.0;
    std::int64_t count_ = 0;
};

// ---------------------------------------------------------------- clipping

namespace detail {

// Simple polytope held as vertices with their sorted facet sets and, per
// facet slot, the neighbouring vertex along the edge that leaves that facet.
// Cut by one halfspace at a time.
class CellClipper {
public:
    CellClipper(int dim, double half_width) : d_(dim)
    {
        for (int k = 0; k < d_; ++k)
            for (double s : {1.0, -1.0}) {
                linalg::Vec u(d_, 0.0);
                u[k] = s;
                facets_.push_back({u, half_width});
                artificial_.push_back(1);
            }
        for (int m = 0; m < (1 << d_); ++m) {
            std::vector<int> fs, nb;
            for (int k = 0; k < d_; ++k) {
                const bool neg = (m >> k) & 1;
                coords_.push_back(neg ? -half_width : half_width);
                fs.push_back(2 * k + (neg ? 1 : 0));
                nb.push_back(m ^ (1 << k));
            }
            vf_.push_back(std::move(fs));
            nb_.push_back(std::move(nb));
        }
        n_artificial_ = 2 * d_;
    }

    // Returns true if the halfspace cut something off. Throws DegenerateInput
    // when a vertex lies within tolerance of the cutting hyperplane; the cell
    // is left unchanged in that case.
    bool cut(const HalfSpace& h, double rel_tol = 1e-10)
    {
        const int nv = num_vertices();
        std::vector<double> s(nv);
        double scale = h.t;
        bool any_out = false;
        for (int v = 0; v < nv; ++v) {
            s[v] = linalg::dot(h.u, vertex(v)) - h.t;
            scale = std::max(scale, std::abs(s[v]));
        }
        const double tol = rel_tol * scale;
        for (int v = 0; v < nv; ++v) {
            if (std::abs(s[v]) <= tol) throw DegenerateInput("vertex on the cutting hyperplane");
            if (s[v] > 0) any_out = true;
        }
        if (!any_out) return false;
        const int f = static_cast<int>(facets_.size());
        // new vertices on the edges leaving the cut-off region
        struct Fresh {
            int out, in;
            std::vector<int> fs;
        };
        std::vector<Fresh> fresh;
        for (int v = 0; v < nv; ++v) {
            if (s[v] < 0) continue;
            for (int j = 0; j < d_; ++j) {
                const int w = nb_[v][j];
                if (s[w] > 0) continue;
                std::vector<int> fs;
                for (int q = 0; q < d_; ++q)
                    if (q != j) fs.push_back(vf_[v][q]);
                fs.push_back(f);
                fresh.push_back({v, w, std::move(fs)});
            }
        }
        // renumber: kept vertices first, then the fresh ones
        std::vector<int> id(nv, -1);
        int next = 0;
        for (int v = 0; v < nv; ++v)
            if (s[v] < 0) id[v] = next++;
        std::vector<double> nc;
        nc.reserve(static_cast<std::size_t>(next + fresh.size()) * d_);
        std::vector<std::vector<int>> nvf, nnb;
        nvf.reserve(next + fresh.size());
        nnb.reserve(next + fresh.size());
        for (int v = 0; v < nv; ++v) {
            if (s[v] >= 0) continue;
            nc.insert(nc.end(), vertex(v).begin(), vertex(v).end());
            nvf.push_back(std::move(vf_[v]));
            std::vector<int> nb(d_);
            for (int j = 0; j < d_; ++j) nb[j] = id[nb_[v][j]]; // -1 for a removed neighbour, fixed below
            nnb.push_back(std::move(nb));
        }
        std::map<std::vector<int>, int> ridge;
        std::vector<int> key(d_ - 1);
        for (std::size_t i = 0; i < fresh.size(); ++i) {
            const auto& fr = fresh[i];
            const int x = next + static_cast<int>(i);
            const double lam = s[fr.out] / (s[fr.out] - s[fr.in]);
            for (int k = 0; k < d_; ++k)
                nc.push_back(vertex(fr.out)[k] + lam * (vertex(fr.in)[k] - vertex(fr.out)[k]));
            std::vector<int> nb(d_, -1);
            nb[d_ - 1] = id[fr.in];
            auto& back = nnb[id[fr.in]];
            for (int j = 0; j < d_; ++j)
                if (nb_[fr.in][j] == fr.out) back[j] = x;
            // neighbours inside the new facet share all but one old facet
            for (int q = 0; q < d_ - 1; ++q) {
                int c = 0;
                for (int g = 0; g < d_ - 1; ++g)
                    if (g != q) key[c++] = fr.fs[g];
                key[d_ - 2] = f;
                auto [it, inserted] = ridge.try_emplace(key, x * d_ + q);
                if (!inserted) {
                    const int y = it->second / d_, qy = it->second % d_;
                    nb[q] = y;
                    nnb[y][qy] = x;
                    ridge.erase(it);
                }
            }
            nvf.push_back(fr.fs);
            nnb.push_back(std::move(nb));
        }
        if (!ridge.empty()) throw DegenerateInput("clipped cell is not simple");
        for (const auto& nb : nnb)
            for (int w : nb)
                if (w < 0) throw DegenerateInput("clipped cell is not simple");
        coords_ = std::move(nc);
        vf_ = std::move(nvf);
        nb_ = std::move(nnb);
        facets_.push_back(h);
        artificial_.push_back(0);
        prune();
        return true;
    }

    int num_vertices() const { return static_cast<int>(vf_.size()); }
    std::span<const double> vertex(int v) const
    {
        return {coords_.data() + static_cast<std::size_t>(v) * d_, static_cast<std::size_t>(d_)};
    }
    int artificial_facets() const { return n_artificial_; }

    double circumradius() const
    {
        double r = 0.0;
        for (int v = 0; v < num_vertices(); ++v) r = std::max(r, linalg::dot(vertex(v), vertex(v)));
        return std::sqrt(r);
    }

    Polytope polytope() const
    {
        Polytope p;
        p.dim = d_;
        p.halfspaces = facets_;
        p.coords = coords_;
        p.facet_incidence.assign(facets_.size(), {});
        for (int v = 0; v < num_vertices(); ++v)
            for (int f : vf_[v]) p.facet_incidence[f].push_back(v);
        finalize(p);
        return p;
    }

private:
    // drop facets without vertices and renumber the rest in order
    void prune()
    {
        std::vector<int> used(facets_.size(), 0);
        for (const auto& fs : vf_)
            for (int f : fs) used[f] = 1;
        if (std::find(used.begin(), used.end(), 0) == used.end()) return;
        std::vector<int> id(facets_.size(), -1);
        std::vector<HalfSpace> nf;
        std::vector<char> na;
        n_artificial_ = 0;
        for (std::size_t f = 0; f < facets_.size(); ++f)
            if (used[f]) {
                id[f] = static_cast<int>(nf.size());
                nf.push_back(std::move(facets_[f]));
                na.push_back(artificial_[f]);
                n_artificial_ += artificial_[f];
            }
        facets_ = std::move(nf);
        artificial_ = std::move(na);
        for (auto& fs : vf_)
            for (auto& f : fs) f = id[f];
    }

    int d_;
    std::vector<double> coords_;
    std::vector<std::vector<int>> vf_;
    std::vector<std::vector<int>> nb_;
    std::vector<HalfSpace> facets_;
    std::vector<char> artificial_;
    int n_artificial_ = 0;
};

// box half-width M with segment_measure(M) = 50 n, so that the box is
// relevant with probability below exp(-50 n)
inline double initial_box(const ModelParams& p)
{
    const double unit = segment_measure(p, 1.0);
    return std::pow(50.0 * p.n / unit, 1.0 / p.r);
}

} // namespace detail

// ---------------------------------------------------------------- zero cell

struct ZeroCellSample {
    Polytope cell;
    std::int64_t n_hyperplanes_generated = 0;
    int n_facets = 0;
    double stop_radius = 0.0;
    std::uint64_t seed = 0;
    int resample_count = 0;
};

struct SamplerOptions {
    std::int64_t hyperplane_cap = default_hyperplane_cap;
    // keep consuming the stream up to extend_factor * stop radius; 1 = stop
    // at the first distance beyond the circumradius
    double extend_factor = 1.0;
};

inline ZeroCellSample sample_zero_cell(const ModelParams& p, std::uint64_t seed, const SamplerOptions& opt = {})
{
    if (p.n > default_max_dim) throw ResourceLimit("dimension above the configured cap");
    HyperplaneStream stream(p, seed);
    detail::CellClipper cell(p.n, detail::initial_box(p));
    ZeroCellSample out;
    out.seed = seed;
    double stop = -1.0;
    for (;;) {
        if (stream.count() >= opt.hyperplane_cap) throw ResourceLimit("hyperplane cap reached before the stopping rule fired");
        HalfSpace h = stream.next();
        if (stop < 0.0 && cell.artificial_facets() == 0 && h.t > cell.circumradius()) {
            stop = cell.circumradius();
            out.n_hyperplanes_generated = stream.count() - 1;
        }
        if (stop >= 0.0 && h.t > opt.extend_factor * stop) break;
        for (;;) {
            try {
                cell.cut(h);
                break;
            } catch (const DegenerateInput&) {
                stream.redraw(h);
                ++out.resample_count;
            }
        }
    }
    out.cell = cell.polytope();
    out.n_facets = out.cell.num_facets();
    out.stop_radius = stop;
    return out;
}

// Stopping certificate: the cell at the stop and the cell after consuming the
// same stream to twice the stop radius have identical vertex sets.
inline bool extension_invariant(const ModelParams& p, std::uint64_t seed, double factor = 2.0, double tol = 1e-12)
{
    const auto a = sample_zero_cell(p, seed);
    SamplerOptions o;
    o.extend_factor = factor;
    const auto b = sample_zero_cell(p, seed, o);
    if (a.cell.num_vertices() != b.cell.num_vertices() || a.n_facets != b.n_facets) return false;
    std::vector<std::vector<double>> va, vb;
    for (int v = 0; v < a.cell.num_vertices(); ++v) {
        va.emplace_back(a.cell.vertex(v).begin(), a.cell.vertex(v).end());
        vb.emplace_back(b.cell.vertex(v).begin(), b.cell.vertex(v).end());
    }
    std::sort(va.begin(), va.end());
    std::sort(vb.begin(), vb.end());
    for (std::size_t i = 0; i < va.size(); ++i)
        for (int k = 0; k < p.n; ++k)
            if (std::abs(va[i][k] - vb[i][k]) > tol * std::max(1.0, a.stop_radius)) return false;
    return true;
}

// ---------------------------------------------------------------- radial law

/// Radial function of the zero cell in the given unit directions, computed
/// from the hyperplane stream alone: a hyperplane at distance t cannot reach a
/// ray before distance t, so the stream stops once t exceeds every current
/// ray length.
inline std::vector<double> sample_radial(const ModelParams& p, std::uint64_t seed,
                                         const std::vector<linalg::Vec>& dirs,
                                         std::int64_t cap = default_hyperplane_cap)
{
    HyperplaneStream stream(p, seed);
    std::vector<double> rho(dirs.size(), std::numeric_limits<double>::infinity());
    double top = rho.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    for (;;) {
        if (stream.count() >= cap) throw ResourceLimit("hyperplane cap reached while tracing rays");
        const HalfSpace h = stream.next();
        if (h.t > top) break;
        top = 0.0;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            const double c = linalg::dot(dirs[i], h.u);
            if (c > 0.0) rho[i] = std::min(rho[i], h.t / c);
            top = std::max(top, rho[i]);
        }
    }
    return rho;
}

/// Fraction of samples with rho(Z_0, u) > s, u = e_1.
inline Estimate empirical_survival(const ModelParams& p, double s, std::int64_t n_samples, std::uint64_t seed)
{
    linalg::Vec e(p.n, 0.0);
    e[0] = 1.0;
    Estimate est;
    est.seed = seed;
    for (std::int64_t k = 0; k < n_samples; ++k)
        est.add(sample_radial(p, derive_seed(seed, k), {e})[0] > s ? 1.0 : 0.0);
    return est;
}

// ---------------------------------------------------------------- sections

/// Zero cell of the sectional process in R^m, sampled directly with the
/// section intensity and the same r.
inline ZeroCellSample sample_section_direct(const ModelParams& p, int m, std::uint64_t seed,
                                            const SamplerOptions& opt = {})
{
    if (m < 1 || m >= p.n) throw std::out_of_range("section dimension must satisfy 1 <= m <= n-1");
    const double g = gamma_section(p, m);
    if (m == 1) {
        // on a line the cell is [-left, right]: the first point on either side
        Rng rng(seed);
        std::exponential_distribution<double> ex(1.0);
        std::bernoulli_distribution side(0.5);
        double s = 0.0, lo = -1.0, hi = -1.0;
        ZeroCellSample out;
        out.seed = seed;
        while (lo < 0.0 || hi < 0.0) {
            s += ex(rng);
            if (++out.n_hyperplanes_generated > opt.hyperplane_cap) throw ResourceLimit("hyperplane cap reached");
            double& end = side(rng) ? hi : lo;
            if (end < 0.0) end = std::pow(p.r * s / (2.0 * g), 1.0 / p.r);
        }
        out.cell = *intersect_halfspaces({{{1.0}, hi}, {{-1.0}, lo}}, 1);
        out.n_facets = 2;
        out.stop_radius = std::max(lo, hi);
        return out;
    }
    return sample_zero_cell(p.with_dim(m).with_gamma(g), seed, opt);
}

inline Polytope sample_section_slice(const ModelParams& p, int m, std::uint64_t seed)
{
    if (m < 1 || m >= p.n) throw std::out_of_range("section dimension must satisfy 1 <= m <= n-1");
    return section(sample_zero_cell(p, seed).cell, coordinate_subspace(p.n, m));
}

// ---------------------------------------------------------------- batches

struct NamedFunctional {
    std::string name;
    std::function<double(const ZeroCellSample&)> f;
};

struct SampleRecord {
    std::int64_t index = 0;
    std::uint64_t seed = 0;
    std::int64_t n_hyperplanes = 0;
    double stop_radius = 0.0;
    FVector f_vector;
    double volume = 0.0;
    double surface = 0.0;
    std::vector<std::pair<std::string, double>> functionals;
    bool ok = true;
    std::string error;
};

struct BatchReport {
    std::int64_t samples = 0;
    std::int64_t degenerate_resamples = 0;
    std::int64_t resource_limits = 0;
    std::int64_t degenerate_failures = 0;
};

struct BatchResult {
    std::vector<SampleRecord> records; // index order
    BatchReport report;
};

inline int default_threads()
{
    const unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1 : static_cast<int>(h);
}

/// Runs body(k) for k in [0, n) on `threads` workers.
inline void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& body)
{
    threads = static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(threads, n)));
    if (threads == 1) {
        for (std::int64_t k = 0; k < n; ++k) body(k);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const std::int64_t k = next.fetch_add(1);
                if (k >= n) return;
                try {
                    body(k);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!err) err = std::current_exception();
                    next = n;
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

inline BatchResult batch(const ModelParams& p, std::int64_t n, std::uint64_t seed,
                         const std::vector<NamedFunctional>& functionals, int threads = 1,
                         const SamplerOptions& opt = {}, bool geometry = true)
{
    if (n < 1) throw std::invalid_argument("batch size N must be >= 1");
    BatchResult res;
    res.records.resize(n);
    parallel_for(n, threads, [&](std::int64_t k) {
        auto& rec = res.records[k];
        rec.index = k;
        rec.seed = derive_seed(seed, static_cast<std::uint64_t>(k));
        try {
            const auto s = sample_zero_cell(p, rec.seed, opt);
            rec.n_hyperplanes = s.n_hyperplanes_generated;
            rec.stop_radius = s.stop_radius;
            if (geometry) {
                const auto L = face_lattice(s.cell);
                rec.f_vector = f_vector(L);
                rec.volume = volume(s.cell, L);
                rec.surface = surface_area(s.cell, L);
            }
            for (const auto& nf : functionals) rec.functionals.emplace_back(nf.name, nf.f(s));
            rec.functionals.emplace_back("__resamples", s.resample_count);
        } catch (const ResourceLimit& e) {
            rec.ok = false;
            rec.error = std::string("resource_limit: ") + e.what();
        } catch (const DegenerateInput& e) {
            rec.ok = false;
            rec.error = std::string("degenerate: ") + e.what();
        }
    });
    res.report.samples = n;
    for (auto& rec : res.records) {
        if (!rec.ok) {
            (rec.error.rfind("resource", 0) == 0 ? res.report.resource_limits : res.report.degenerate_failures)++;
            continue;
        }
        res.report.degenerate_resamples += static_cast<std::int64_t>(rec.functionals.back().second);
        rec.functionals.pop_back();
    }
    return res;
}

inline nlohmann::json to_json(const SampleRecord& r)
{
    nlohmann::json j;
    j["index"] = r.index;
    j["seed"] = r.seed;
    if (!r.ok) {
        j["error"] = r.error;
        return j;
    }
    j["n_hyperplanes"] = r.n_hyperplanes;
    j["stop_radius"] = r.stop_radius;
    j["f_vector"] = r.f_vector;
    j["volume"] = r.volume;
    j["surface"] = r.surface;
    nlohmann::json fs = nlohmann::json::object();
    for (const auto& [k, v] : r.functionals) fs[k] = v;
    j["functionals"] = fs;
    return j;
}

inline void write_jsonl(std::ostream& os, const BatchResult& b)
{
    for (const auto& r : b.records) os << to_json(r).dump() << '\n';
}

// ---------------------------------------------------------------- volume variance

/// Unbiased estimate of Var V_n(Z_0) without building the cell: each sample
/// gives two independent radial-function volume estimates from disjoint
/// direction sets, and their covariance across samples is Var V_n.
struct RadialVolumeStats {
    Estimate mean;          // mean volume
    double variance = 0.0;  // unbiased estimate of Var V_n
    double variance_se = 0.0;
    std::int64_t count = 0;
};

inline RadialVolumeStats radial_volume_variance(const ModelParams& p, std::int64_t n_samples, int n_dirs,
                                                std::uint64_t seed, int threads = 1)
{
    if (n_samples < 3) throw std::invalid_argument("need at least three samples");
    if (n_dirs < 2) throw std::invalid_argument("need at least two directions per half");
    std::vector<double> a(n_samples), b(n_samples);
    const double scale = omega(p.n) / p.n;
    parallel_for(n_samples, threads, [&](std::int64_t k) {
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(k));
        Rng rng(splitmix64(s ^ 0xa5a5a5a5a5a5a5a5ULL));
        std::vector<linalg::Vec> dirs;
        for (int i = 0; i < 2 * n_dirs; ++i) dirs.push_back(random_direction(rng, p.n));
        const auto rho = sample_radial(p, s, dirs);
        double x = 0.0, y = 0.0;
        for (int i = 0; i < n_dirs; ++i) {
            x += std::pow(rho[i], p.n);
            y += std::pow(rho[n_dirs + i], p.n);
        }
        a[k] = scale * x / n_dirs;
        b[k] = scale * y / n_dirs;
    });
    RadialVolumeStats st;
    st.count = n_samples;
    st.mean.seed = seed;
    double ma = 0.0, mb = 0.0;
    for (std::int64_t k = 0; k < n_samples; ++k) {
        st.mean.add(0.5 * (a[k] + b[k]));
        ma += a[k];
        mb += b[k];
    }
    ma /= n_samples;
    mb /= n_samples;
    // sample covariance and the standard error of its per-sample terms
    Estimate terms;
    for (std::int64_t k = 0; k < n_samples; ++k) terms.add((a[k] - ma) * (b[k] - mb));
    const double nn = static_cast<double>(n_samples);
    st.variance = terms.mean * nn / (nn - 1.0);
    st.variance_se = terms.std_error() * nn / (nn - 1.0);
    return st;
}

} // namespace zerocell
