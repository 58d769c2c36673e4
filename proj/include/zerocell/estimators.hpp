#pragma once

// Monte Carlo estimation on top of the zero-cell sampler: per-sample
// functionals, the sphere-integral constants c_r(n, l), two-sided identity
// checks and trend tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "estimate.hpp"
#include "polytope.hpp"
#include "process.hpp"
#include "random.hpp"
#include "specfun.hpp"

namespace zerocell {

inline constexpr double z_threshold = 3.0;

// ---------------------------------------------------------------- functionals
//
// Functional ids, evaluated on the zero cell in R^n:
//   f<k>          number of k-faces, 0 <= k < n
//   V<j>          intrinsic volume: j = n volume, j = n-1 half the surface
//                 area, j = 1 for n <= 3
//   skel<k>       k-dimensional content of the k-skeleton, 1 <= k < n
//   F<k>_<j>      sum of V_j over the k-faces, j in {0, 1, k}
//   dualproj<l>   dual intrinsic volume of order l(1-r) of the projection
//                 onto span{e_1..e_l}, i.e. (1/l) int rho^{l r}
//   radial        rho(Z_0, e_1)
//   sec<m>:<id>   any of the above evaluated on Z_0 cap span{e_1..e_m}

using CellFunctional = std::function<double(const Polytope&, const FaceLattice&)>;

namespace detail {

inline int parse_int(const std::string& s, const std::string& id)
{
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("malformed functional id '" + id + "'");
}

inline double intrinsic_volume(const Polytope& p, const FaceLattice& L, int j)
{
    const int n = p.dim;
    if (j == 0) return 1.0;
    if (j == n) return volume(p, L);
    if (j == n - 1) return 0.5 * surface_area(p, L);
    if (j == 1 && n <= 3) return intrinsic_V1(p);
    throw UnsupportedRange("intrinsic volume V_" + std::to_string(j) + " is not available in dimension " +
                           std::to_string(n));
}

inline double dual_projection(const Polytope& p, int l, double r)
{
    const double order = l * (1.0 - r);
    if (l == p.dim) return order == 0.0 ? volume(p) : dual_volume_quadrature(p, order);
    const auto q = project(p, l);
    return order == 0.0 ? volume(q) : dual_volume_quadrature(q, order);
}

} // namespace detail

/// Resolves a functional id for cells of dimension n. Throws
/// std::invalid_argument for unknown ids and UnsupportedRange for ids that
/// exist but are not available at this dimension.
inline CellFunctional resolve_functional(const std::string& id, int n, double r)
{
    static const std::regex re_sec(R"(sec(\d+):(.+))"), re_f(R"(f(\d+))"), re_v(R"(V(\d+))"),
        re_skel(R"(skel(\d+))"), re_F(R"(F(\d+)_(\d+))"), re_dp(R"(dualproj(\d+))");
    std::smatch m;
    if (std::regex_match(id, m, re_sec)) {
        const int dim = detail::parse_int(m[1], id);
        if (dim < 1 || dim >= n) throw UnsupportedRange("section dimension out of range in '" + id + "'");
        auto inner = resolve_functional(m[2], dim, r);
        return [dim, inner](const Polytope& p, const FaceLattice&) {
            const auto s = section(p, coordinate_subspace(p.dim, dim));
            return inner(s, face_lattice(s));
        };
    }
    if (std::regex_match(id, m, re_f)) {
        const int k = detail::parse_int(m[1], id);
        if (k < 0 || k >= n) throw UnsupportedRange("face dimension out of range in '" + id + "'");
        return [k](const Polytope&, const FaceLattice& L) { return static_cast<double>(L.faces[k].size()); };
    }
    if (std::regex_match(id, m, re_v)) {
        const int j = detail::parse_int(m[1], id);
        if (j < 0 || j > n || (j < n - 1 && !(j == 1 && n <= 3) && j != 0))
            throw UnsupportedRange("intrinsic volume '" + id + "' is not available for n = " + std::to_string(n));
        return [j](const Polytope& p, const FaceLattice& L) { return detail::intrinsic_volume(p, L, j); };
    }
    if (std::regex_match(id, m, re_skel)) {
        const int k = detail::parse_int(m[1], id);
        if (k < 1 || k >= n) throw UnsupportedRange("skeleton dimension out of range in '" + id + "'");
        return [k](const Polytope& p, const FaceLattice& L) { return face_measure(p, k, L); };
    }
    if (std::regex_match(id, m, re_F)) {
        const int k = detail::parse_int(m[1], id), j = detail::parse_int(m[2], id);
        if (k < 0 || k > n) throw UnsupportedRange("face dimension out of range in '" + id + "'");
        if (!(j == 0 || j == k || (j == 1 && k <= 3)))
            throw UnsupportedRange("F_{k;j} is available for j in {0, 1, k} (j = 1 needs k <= 3): '" + id + "'");
        return [k, j](const Polytope& p, const FaceLattice& L) { return F_functional(p, k, j, L); };
    }
    if (std::regex_match(id, m, re_dp)) {
        const int l = detail::parse_int(m[1], id);
        if (l < 1 || l > n) throw UnsupportedRange("projection dimension out of range in '" + id + "'");
        return [l, r](const Polytope& p, const FaceLattice&) { return detail::dual_projection(p, l, r); };
    }
    if (id == "radial") {
        return [](const Polytope& p, const FaceLattice&) {
            linalg::Vec e(p.dim, 0.0);
            e[0] = 1.0;
            return radial(p, e);
        };
    }
    throw std::invalid_argument("unknown functional id '" + id + "'");
}

/// Per-sample values of several functionals over one batch, columns in the
/// order of `ids`.
struct SampleTable {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> columns;
    BatchReport report;

    const std::vector<double>& column(const std::string& id) const
    {
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (ids[i] == id) return columns[i];
        throw std::out_of_range("functional '" + id + "' not in the table");
    }
    Estimate estimate(const std::string& id, std::uint64_t seed = 0) const
    {
        Estimate e;
        e.seed = seed;
        for (double x : column(id)) e.add(x);
        return e;
    }
};

/// Evaluates the functionals on N zero cells; sample k uses derive_seed(seed, k),
/// the same cells as batch(). Failed samples are counted, not silently dropped:
/// any failure makes the table unusable and throws.
inline SampleTable sample_table(const ModelParams& p, const std::vector<std::string>& ids, std::int64_t N,
                                std::uint64_t seed, int threads = 1, const SamplerOptions& opt = {})
{
    if (N < 2) throw std::invalid_argument("N must be at least 2");
    std::vector<CellFunctional> fs;
    for (const auto& id : ids) fs.push_back(resolve_functional(id, p.n, p.r));
    SampleTable t;
    t.ids = ids;
    t.columns.assign(ids.size(), std::vector<double>(N));
    std::vector<int> resamples(N, 0);
    std::vector<char> failed(N, 0);
    parallel_for(N, threads, [&](std::int64_t k) {
        try {
            const auto s = sample_zero_cell(p, derive_seed(seed, static_cast<std::uint64_t>(k)), opt);
            resamples[k] = s.resample_count;
            const auto L = face_lattice(s.cell);
            for (std::size_t i = 0; i < fs.size(); ++i) t.columns[i][k] = fs[i](s.cell, L);
        } catch (const ResourceLimit&) {
            failed[k] = 1;
        } catch (const DegenerateInput&) {
            failed[k] = 2;
        }
    });
    t.report.samples = N;
    for (std::int64_t k = 0; k < N; ++k) {
        t.report.degenerate_resamples += resamples[k];
        t.report.resource_limits += failed[k] == 1;
        t.report.degenerate_failures += failed[k] == 2;
    }
    if (t.report.resource_limits + t.report.degenerate_failures > 0)
        throw ResourceLimit(std::to_string(t.report.resource_limits) + " samples hit the hyperplane cap and " +
                            std::to_string(t.report.degenerate_failures) + " failed as degenerate");
    return t;
}

inline Estimate estimate_functional(const ModelParams& p, const std::string& id, std::int64_t N, std::uint64_t seed,
                                    int threads = 1)
{
    return sample_table(p, {id}, N, seed, threads).estimate(id, seed);
}

// ---------------------------------------------------------------- c_r(n, l)

/// Monte Carlo value of c_r(n, l). The factor prod |<u_j, e_l>|^{r-1} is
/// absorbed into the sampling law: <u, e_l>^2 ~ Beta(r/2, (l-1)/2) with a
/// random sign and the remaining coordinates uniform on the orthogonal sphere,
/// which leaves the bounded weight nabla_l(u_1..u_l)^{n-l+1}.
inline Estimate estimate_c(int n, int l, double r, std::int64_t N, std::uint64_t seed)
{
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("estimate_c needs r > 0");
    if (l < 1 || l > n) throw std::out_of_range("estimate_c needs 1 <= l <= n");
    if (N < 2) throw std::invalid_argument("estimate_c needs N >= 2");
    Estimate e;
    e.seed = seed;
    if (l == 1) {
        // the sphere S^0 has two points, both with weight 1
        for (std::int64_t k = 0; k < N; ++k) e.add(1.0 / r);
        return e;
    }
    const double L = l;
    // omega_l^l (B(r/2,(l-1)/2) / B(1/2,(l-1)/2))^l times the prefactor
    const double log_beta_ratio = std::lgamma(r / 2) - std::lgamma((r + L - 1) / 2) - std::lgamma(0.5) +
                                  std::lgamma(L / 2);
    const double scale = std::exp(L * log_omega(L) + L * log_beta_ratio + log_c_prefactor(n, l, r));
    Rng rng(seed);
    std::gamma_distribution<double> ga(r / 2, 1.0), gb((L - 1) / 2, 1.0);
    std::bernoulli_distribution sign(0.5);
    std::vector<double> m(static_cast<std::size_t>(l) * l), rest(l - 1);
    for (std::int64_t k = 0; k < N; ++k) {
        for (int j = 0; j < l; ++j) {
            const double a = ga(rng), b = gb(rng);
            const double B = a / (a + b);
            random_direction(rng, rest);
            const double w = std::sqrt(1.0 - B);
            for (int q = 0; q < l - 1; ++q) m[j * l + q] = w * rest[q];
            m[j * l + l - 1] = (sign(rng) ? 1.0 : -1.0) * std::sqrt(B);
        }
        e.add(scale * std::pow(std::abs(linalg::determinant(m, l)), n - l + 1));
    }
    return e;
}

// ---------------------------------------------------------------- identities

struct IdentityReport {
    std::string id;
    std::string label; // identity id with its indices, e.g. main_2
    Estimate lhs;
    Estimate rhs;
    bool rhs_exact = false;
    double z = 0.0;
    bool pass = false;
    bool bound = false; // containment verdict instead of a two-sided z
    double lo = 0.0, hi = 0.0;
    ModelParams params;
    std::int64_t N = 0;
    std::uint64_t seed = 0;
    std::string note;
};

struct IdentityRequest {
    std::string id;
    std::map<std::string, double> args; // l, j, m, i, k, s
    int arg(const std::string& k) const
    {
        auto it = args.find(k);
        if (it == args.end()) throw std::invalid_argument("identity " + id + " needs argument '" + k + "'");
        return static_cast<int>(it->second);
    }
    double real_arg(const std::string& k) const
    {
        auto it = args.find(k);
        if (it == args.end()) throw std::invalid_argument("identity " + id + " needs argument '" + k + "'");
        return it->second;
    }
};

struct CatalogueEntry {
    std::string id;
    std::string anchor;
    std::string requires_params;
    std::vector<std::string> args;
    std::int64_t default_N;
};

inline const std::vector<CatalogueEntry>& identity_catalogue()
{
    static const std::vector<CatalogueEntry> cat{
        {"main", "E f_{n-l}(Z0) = c_r(n,l) gamma^l E dual V^E_{l(1-r)}(Z0|E), E = span{e_1..e_l}", "any", {"l"}, 100000},
        {"vertices", "mean number of vertices of Z0 in terms of c_r(n)", "any", {}, 100000},
        {"skel_ratio", "skeleton measure and face number share c_r(n,l); their quotient is free of it", "any", {"l"},
         50000},
        {"r1_F", "E F_{n-l;j}(Z0) in terms of E V_{l+j}(Z0)", "r = 1", {"l", "j"}, 100000},
        {"r1_fF", "E f_{n-l-j}(Z0) in terms of E F_{n-l;j}(Z0)", "r = 1", {"l", "j"}, 100000},
        {"r1_section", "E F_{m-j;i}(Z_m) in terms of E V_{i+j}(Z_m), Z_m realised as Z0 cap L", "r = 1",
         {"m", "j", "i"}, 100000},
        {"V1_moments", "E V_1^k(Z_m) through Stirling numbers of the first kind and facet-count moments", "r = 1",
         {"m", "k"}, 100000},
        {"survival", "P(rho_{Z0}(u) > s) = exp(-Theta(segment [0, s u]))", "any", {"s"}, 100000},
        {"section_transfer", "X cap L is the process in L with the same r and intensity gamma_m", "m < n", {"m"},
         50000},
        {"moment_bounds", "two-sided bounds on E V_m^k(Z0 cap L), exact for k = 1", "m < n", {"m", "k"}, 50000},
        {"fvec_bounds", "bounds on E f_{n-l}(Z0), and f_{n-l} <= binom(n, l) f_0", "any", {"l"}, 50000},
        {"c_bounds", "A(n,l,r) <= c_r(n,l) <= l^{n-l+1} A(n,l,r)", "any", {"l"}, 1000000},
        {"c1", "c_1(n) = n! kappa_{n-1}^n kappa_n", "r = 1", {}, 1000000},
        {"mean_volume", "closed form for E V_n(Z0)", "any", {}, 20000},
        {"f0_r1", "E f_0(Z0) = n! 2^{-n} kappa_n^2 for r = 1", "r = 1", {}, 200000},
    };
    return cat;
}

inline nlohmann::json catalogue_json()
{
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : identity_catalogue())
        j.push_back({{"id", e.id}, {"anchor", e.anchor}, {"requires", e.requires_params}, {"args", e.args},
                     {"default_N", e.default_N}});
    return j;
}

namespace detail {

inline void two_sided(IdentityReport& rep)
{
    rep.z = z_score(rep.lhs.mean, rep.lhs.std_error(), rep.rhs.mean, rep.rhs_exact ? 0.0 : rep.rhs.std_error());
    rep.pass = rep.z < z_threshold;
}

// estimate in [lo - 3 se, hi + 3 se]
inline void containment(IdentityReport& rep, double lo, double hi)
{
    rep.bound = true;
    rep.lo = lo;
    rep.hi = hi;
    const double se = rep.lhs.std_error();
    rep.pass = rep.lhs.mean >= lo - z_threshold * se && rep.lhs.mean <= hi + z_threshold * se;
    const double gap = rep.lhs.mean < lo ? lo - rep.lhs.mean : (rep.lhs.mean > hi ? rep.lhs.mean - hi : 0.0);
    rep.z = se > 0 ? gap / se : (gap > 0 ? std::numeric_limits<double>::infinity() : 0.0);
}

inline Estimate scaled(const Estimate& e, double a)
{
    Estimate s = e;
    s.mean *= a;
    s.m2 *= a * a;
    return s;
}

// estimate with a prescribed mean and standard error
inline Estimate with_error(double mean, double se, std::int64_t count, std::uint64_t seed)
{
    Estimate e;
    e.mean = mean;
    e.count = std::max<std::int64_t>(count, 2);
    e.m2 = se * se * static_cast<double>(e.count) * static_cast<double>(e.count - 1);
    e.seed = seed;
    return e;
}

inline void require_r1(const ModelParams& p, const std::string& id)
{
    if (p.r != 1.0) throw std::invalid_argument("identity " + id + " applies to r = 1 only");
}

inline std::string label(const IdentityRequest& q)
{
    std::string s = q.id;
    for (const auto& [k, v] : q.args) {
        std::ostringstream os;
        os << v;
        s += "_" + k + os.str();
    }
    return s;
}

} // namespace detail

/// Functionals an identity needs on its two independent sample tables.
inline std::pair<std::vector<std::string>, std::vector<std::string>> identity_functionals(const IdentityRequest& q,
                                                                                          const ModelParams& p)
{
    const int n = p.n;
    auto S = [](int k) { return std::to_string(k); };
    if (q.id == "main") return {{"f" + S(n - q.arg("l"))}, {"dualproj" + S(q.arg("l"))}};
    if (q.id == "vertices" || q.id == "f0_r1") return {{"f0"}, {}};
    if (q.id == "skel_ratio") {
        const int l = q.arg("l");
        return {{"f" + S(n - l), "skel" + S(n - l), "dualproj" + S(l)}, {}};
    }
    if (q.id == "r1_F") {
        const int l = q.arg("l"), j = q.arg("j");
        return {{"F" + S(n - l) + "_" + S(j)}, {"V" + S(l + j)}};
    }
    if (q.id == "r1_fF") {
        const int l = q.arg("l"), j = q.arg("j");
        return {{"f" + S(n - l - j)}, {"F" + S(n - l) + "_" + S(j)}};
    }
    if (q.id == "r1_section") {
        const int m = q.arg("m"), j = q.arg("j"), i = q.arg("i");
        const std::string pre = m == n ? "" : "sec" + S(m) + ":";
        return {{pre + "F" + S(m - j) + "_" + S(i)}, {pre + "V" + S(i + j)}};
    }
    if (q.id == "V1_moments") {
        const int m = q.arg("m");
        const std::string pre = m == n ? "" : "sec" + S(m) + ":";
        return {{pre + "V1"}, {pre + "f" + S(m - 1)}};
    }
    if (q.id == "section_transfer") {
        const int m = q.arg("m");
        return {{"sec" + S(m) + ":f0", "sec" + S(m) + ":V" + S(m)}, {}};
    }
    if (q.id == "moment_bounds") return {{"sec" + S(q.arg("m")) + ":V" + S(q.arg("m"))}, {}};
    if (q.id == "fvec_bounds") return {{"f" + S(n - q.arg("l")), "f0"}, {}};
    if (q.id == "mean_volume") return {{"V" + S(n)}, {}};
    if (q.id == "survival" || q.id == "c_bounds" || q.id == "c1") return {{}, {}};
    throw std::invalid_argument("unknown identity '" + q.id + "'");
}

struct VerifyOptions {
    int threads = 1;
    std::int64_t c_samples = 1000000; // samples for estimate_c
};

/// Evaluates a list of identities at one parameter set. All identities share
/// two independent sample tables (seeds derived from `seed`), so the left and
/// right sides of a two-sided check are independent.
inline std::vector<IdentityReport> verify_identities(const std::vector<IdentityRequest>& reqs, const ModelParams& p,
                                                     std::int64_t N, std::uint64_t seed,
                                                     const VerifyOptions& opt = {})
{
    if (N < 2) throw std::invalid_argument("N must be at least 2");
    std::vector<std::string> lhs_ids, rhs_ids;
    auto add = [](std::vector<std::string>& v, const std::vector<std::string>& w) {
        for (const auto& x : w)
            if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
    };
    for (const auto& q : reqs) {
        auto [a, b] = identity_functionals(q, p);
        add(lhs_ids, a);
        add(rhs_ids, b);
    }
    const std::uint64_t s_lhs = derive_seed(seed, 1), s_rhs = derive_seed(seed, 2), s_c = derive_seed(seed, 3);
    std::optional<SampleTable> tl, tr;
    if (!lhs_ids.empty()) tl = sample_table(p, lhs_ids, N, s_lhs, opt.threads);
    if (!rhs_ids.empty()) tr = sample_table(p, rhs_ids, N, s_rhs, opt.threads);
    const int n = p.n;
    const double g = p.gamma;
    std::vector<IdentityReport> out;
    for (const auto& q : reqs) {
        auto [la, ra] = identity_functionals(q, p);
        IdentityReport rep;
        rep.id = q.id;
        rep.label = detail::label(q);
        rep.params = p;
        rep.N = N;
        rep.seed = seed;
        if (q.id == "main") {
            const int l = q.arg("l");
            rep.lhs = tl->estimate(la[0], s_lhs);
            const auto v = tr->estimate(ra[0], s_rhs);
            const double gl = std::pow(g, l);
            if (l == 1) {
                rep.rhs = detail::scaled(v, gl / p.r);
                rep.note = "c = 1/r exact";
            } else {
                const auto c = estimate_c(n, l, p.r, opt.c_samples, s_c);
                const double se = gl * std::hypot(c.mean * v.std_error(), v.mean * c.std_error());
                rep.rhs = detail::with_error(gl * c.mean * v.mean, se, v.count, s_rhs);
                rep.note = "c estimated: " + std::to_string(c.mean) + " +- " + std::to_string(c.std_error());
            }
            detail::two_sided(rep);
        } else if (q.id == "vertices") {
            rep.lhs = tl->estimate("f0", s_lhs);
            if (p.r == 1.0) {
                rep.rhs = Estimate::exact(vertex_mean(n, 1.0, c1_vertex_const(n)));
                rep.rhs_exact = true;
            } else {
                const auto c = estimate_c(n, n, p.r, opt.c_samples, s_c);
                const double k = vertex_mean(n, p.r, c_vertex_from_cnn(n, p.r, 1.0));
                rep.rhs = detail::with_error(k * c.mean, k * c.std_error(), c.count, s_c);
            }
            detail::two_sided(rep);
        } else if (q.id == "skel_ratio") {
            // R = E f * skeleton_mean(c = 1) / (gamma^l E V E H) equals 1; delta
            // method on the per-sample triples
            const int l = q.arg("l");
            const auto& f = tl->column(la[0]);
            const auto& h = tl->column(la[1]);
            const auto& v = tl->column(la[2]);
            Estimate ef, eh, ev;
            for (std::int64_t k = 0; k < N; ++k) {
                ef.add(f[k]);
                eh.add(h[k]);
                ev.add(v[k]);
            }
            double cfh = 0, cfv = 0, chv = 0;
            for (std::int64_t k = 0; k < N; ++k) {
                cfh += (f[k] - ef.mean) * (h[k] - eh.mean);
                cfv += (f[k] - ef.mean) * (v[k] - ev.mean);
                chv += (h[k] - eh.mean) * (v[k] - ev.mean);
            }
            const double nn = static_cast<double>(N);
            cfh /= nn - 1;
            cfv /= nn - 1;
            chv /= nn - 1;
            const double a = 1 / ef.mean, b = -1 / eh.mean, c = -1 / ev.mean;
            const double var_log = (a * a * ef.variance() + b * b * eh.variance() + c * c * ev.variance() +
                                    2 * (a * b * cfh + a * c * cfv + b * c * chv)) /
                                   nn;
            const double R = ef.mean * skeleton_mean(p, l, 1.0) / (std::pow(g, l) * ev.mean * eh.mean);
            rep.lhs = detail::with_error(R, R * std::sqrt(std::max(var_log, 0.0)), N, s_lhs);
            rep.rhs = Estimate::exact(1.0);
            rep.rhs_exact = true;
            rep.note = "E f / E H = " + std::to_string(ef.mean / eh.mean);
            detail::two_sided(rep);
        } else if (q.id == "r1_F" || q.id == "r1_fF" || q.id == "r1_section") {
            detail::require_r1(p, q.id);
            rep.lhs = tl->estimate(la[0], s_lhs);
            const auto v = tr->estimate(ra[0], s_rhs);
            double k = 0;
            if (q.id == "r1_F") k = F_mean_r1(n, q.arg("l"), q.arg("j"), g, 1.0);
            if (q.id == "r1_fF") k = f_from_F_r1(n, q.arg("l"), q.arg("j"), g, 1.0);
            if (q.id == "r1_section") k = section_F_r1(n, q.arg("m"), q.arg("j"), q.arg("i"), g, 1.0);
            rep.rhs = detail::scaled(v, k);
            detail::two_sided(rep);
        } else if (q.id == "V1_moments") {
            detail::require_r1(p, q.id);
            const int kk = q.arg("k"), m = q.arg("m");
            if (m != n || n > 3) throw UnsupportedRange("V1_moments is available for m = n <= 3");
            Estimate lhs, rhs;
            for (double x : tl->column(la[0])) lhs.add(std::pow(x, kk));
            const double scale = std::pow(omega(n) / (2.0 * g * kappa(n - 1.0)), kk);
            for (double f : tr->column(ra[0])) {
                double s = 0;
                for (int qq = 1; qq <= kk; ++qq) s += stirling_first_real(kk, qq) * std::pow(f, qq);
                rhs.add(scale * s);
            }
            lhs.seed = s_lhs;
            rhs.seed = s_rhs;
            rep.lhs = lhs;
            rep.rhs = rhs;
            detail::two_sided(rep);
        } else if (q.id == "survival") {
            const double s = q.real_arg("s");
            rep.lhs = empirical_survival(p, s, N, s_lhs);
            rep.rhs = Estimate::exact(radial_survival(p, s));
            rep.rhs_exact = true;
            // binomial standard error from the exact probability
            const double pr = rep.rhs.mean;
            rep.z = std::abs(rep.lhs.mean - pr) / std::sqrt(pr * (1 - pr) / static_cast<double>(N));
            rep.pass = rep.z < z_threshold;
        } else if (q.id == "section_transfer") {
            const int m = q.arg("m");
            const auto fs = tl->estimate(la[0], s_lhs), vs = tl->estimate(la[1], s_lhs);
            Estimate fd, vd;
            std::vector<double> fdv(N), vdv(N);
            parallel_for(N, opt.threads, [&](std::int64_t k) {
                const auto d = sample_section_direct(p, m, derive_seed(s_rhs, static_cast<std::uint64_t>(k)));
                fdv[k] = m == 1 ? 2.0 : static_cast<double>(d.cell.num_vertices());
                vdv[k] = volume(d.cell);
            });
            for (std::int64_t k = 0; k < N; ++k) {
                fd.add(fdv[k]);
                vd.add(vdv[k]);
            }
            const double z_f = z_score(fs.mean, fs.std_error(), fd.mean, fd.std_error());
            const double z_v = z_score(vs.mean, vs.std_error(), vd.mean, vd.std_error());
            const double exact = sectional_mean(p, m);
            const double z_e = z_score(vs.mean, vs.std_error(), exact, 0.0);
            rep.lhs = vs;
            rep.rhs = vd;
            rep.z = std::max({z_f, z_v, z_e});
            rep.pass = rep.z < z_threshold;
            std::ostringstream os;
            os << "f0 slice " << fs.mean << " direct " << fd.mean << " (z " << z_f << "); V_m slice " << vs.mean
               << " direct " << vd.mean << " (z " << z_v << "); exact " << exact << " (z " << z_e << ")";
            rep.note = os.str();
        } else if (q.id == "moment_bounds") {
            const int m = q.arg("m"), kk = q.arg("k");
            Estimate e;
            for (double x : tl->column(la[0])) e.add(std::pow(x, kk));
            e.seed = s_lhs;
            rep.lhs = e;
            const auto b = volume_moment_bounds(p, m, kk);
            if (kk == 1) {
                rep.rhs = Estimate::exact(b.lo);
                rep.rhs_exact = true;
                detail::two_sided(rep);
            } else {
                detail::containment(rep, b.lo, b.hi);
            }
        } else if (q.id == "fvec_bounds") {
            const int l = q.arg("l");
            rep.lhs = tl->estimate(la[0], s_lhs);
            const auto b = f_vector_bounds(n, l, p.r);
            detail::containment(rep, b.lo, b.hi);
            // per-sample: f_{n-l} <= binom(n, l) f_0
            const auto& fl = tl->column(la[0]);
            const auto& f0 = tl->column("f0");
            bool ok = true;
            for (std::int64_t k = 0; k < N; ++k) ok = ok && fl[k] <= binom(n, l) * f0[k];
            rep.pass = rep.pass && ok;
            rep.note = ok ? "f_{n-l} <= binom(n,l) f_0 on every sample" : "binomial bound violated";
        } else if (q.id == "c_bounds") {
            const int l = q.arg("l");
            rep.lhs = estimate_c(n, l, p.r, opt.c_samples, s_c);
            const auto b = c_bounds(n, l, p.r);
            detail::containment(rep, b.lo, b.hi);
        } else if (q.id == "c1") {
            detail::require_r1(p, q.id);
            const auto c = estimate_c(n, n, 1.0, opt.c_samples, s_c);
            const double k = c_vertex_from_cnn(n, 1.0, 1.0);
            rep.lhs = detail::scaled(c, k);
            rep.rhs = Estimate::exact(c1_vertex_const(n));
            rep.rhs_exact = true;
            detail::two_sided(rep);
        } else if (q.id == "mean_volume") {
            rep.lhs = tl->estimate(la[0], s_lhs);
            rep.rhs = Estimate::exact(mean_volume(p));
            rep.rhs_exact = true;
            detail::two_sided(rep);
        } else if (q.id == "f0_r1") {
            detail::require_r1(p, q.id);
            rep.lhs = tl->estimate("f0", s_lhs);
            rep.rhs = Estimate::exact(mean_f0_r1(n));
            rep.rhs_exact = true;
            detail::two_sided(rep);
        }
        out.push_back(std::move(rep));
    }
    return out;
}

inline IdentityReport verify_identity(const IdentityRequest& q, const ModelParams& p, std::int64_t N,
                                      std::uint64_t seed, const VerifyOptions& opt = {})
{
    return verify_identities({q}, p, N, seed, opt).front();
}

// ---------------------------------------------------------------- trends

enum class TrendTarget { gauge, sectional_variance, H_rate, nthroot_f, sectional_limit };

struct TrendRow {
    int n = 0;
    std::vector<double> values;
};

struct TrendTable {
    std::string target;
    std::vector<std::string> columns; // names of TrendRow::values
    std::vector<TrendRow> rows;
    bool pass = false;
    std::string verdict;
};

struct TrendOptions {
    double alpha = 1.0;
    double b = 1.0;
    double k_or_a = 0.0;
    RateTheorem theorem = RateTheorem::vertices;
    std::int64_t N = 20000;
    int n_dirs = 16;
    std::uint64_t seed = 1;
    int threads = 1;
    double tolerance = 0.05;
};

namespace detail {

inline bool strictly_decreasing(const std::vector<double>& v)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

inline bool strictly_increasing(const std::vector<double>& v)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

} // namespace detail

inline TrendTable trend_check(TrendTarget target, const std::vector<int>& grid, const TrendOptions& o = {})
{
    if (grid.empty()) throw std::invalid_argument("trend grid is empty");
    TrendTable t;
    std::ostringstream verdict;
    switch (target) {
    case TrendTarget::gauge: {
        t.target = "gauge";
        t.columns = {"r", "iso_ratio", "gauge", "product", "abs_dev"};
        std::vector<double> dev;
        for (int n : grid) {
            const auto p = ModelParams::from_slope(o.alpha, o.b, n, 1.0);
            const double I = iso_ratio(p), phi = gauge(o.alpha, o.b, n);
            dev.push_back(std::abs(phi * I - 1.0));
            t.rows.push_back({n, {p.r, I, phi, phi * I, dev.back()}});
        }
        const bool mono = detail::strictly_decreasing(dev);
        const bool close = dev.back() < o.tolerance;
        t.pass = mono && close;
        verdict << (mono ? "decreasing" : "not monotone") << "; final deviation " << dev.back()
                << (close ? " below " : " not below ") << o.tolerance;
        break;
    }
    case TrendTarget::nthroot_f: {
        t.target = "nthroot_f";
        t.columns = {"r", "l", "lower", "upper", "lower_limit", "upper_limit"};
        const double nan = std::numeric_limits<double>::quiet_NaN();
        bool ok = true;
        std::vector<double> width;
        for (int n : grid) {
            const auto rec = asymptotic_rate(o.theorem, o.alpha, o.b, o.k_or_a, n);
            t.rows.push_back({n, {rec.r, static_cast<double>(rec.l), rec.lower, rec.upper,
                                  rec.lower_limit.value_or(nan), rec.upper_limit.value_or(nan)}});
            ok = ok && rec.lower <= rec.upper * (1 + 1e-12);
            width.push_back(rec.upper - rec.lower);
        }
        const auto& last = t.rows.back().values;
        const double lo_lim = last[4], up_lim = last[5];
        bool lo_ok = true, up_ok = true;
        if (!std::isnan(lo_lim)) lo_ok = std::abs(last[2] / lo_lim - 1) < o.tolerance;
        if (!std::isnan(up_lim)) up_ok = std::abs(last[3] / up_lim - 1) < o.tolerance;
        t.pass = ok && lo_ok && up_ok;
        verdict << (ok ? "lower <= upper" : "lower > upper somewhere") << "; final lower " << last[2] << " vs "
                << lo_lim << ", upper " << last[3] << " vs " << up_lim;
        break;
    }
    case TrendTarget::H_rate: {
        t.target = "H_rate";
        t.columns = {"H"};
        std::vector<double> h;
        for (int n : grid) {
            h.push_back(H_rate(o.alpha, o.b, n));
            t.rows.push_back({n, {h.back()}});
        }
        // the probability bound 1 - C H(n) tends to 1: H decreases
        t.pass = detail::strictly_decreasing(h);
        verdict << (t.pass ? "H decreasing" : "H not monotone");
        break;
    }
    case TrendTarget::sectional_limit: {
        t.target = "sectional_limit";
        t.columns = {"r", "mean", "limit"};
        std::vector<double> v;
        const double lim = sectional_mean_limit(o.alpha, o.b, 1);
        for (int n : grid) {
            const double r = o.b * std::pow(static_cast<double>(n), o.alpha);
            v.push_back(std::exp(log_sectional_mean(n, r, log_gamma_hat(r, n), n - 1)));
            t.rows.push_back({n, {r, v.back(), lim}});
        }
        const bool mono = detail::strictly_increasing(v);
        const bool below = v.back() < lim;
        t.pass = mono && below;
        verdict << (mono ? "increasing" : "not monotone") << (below ? ", below the limit " : ", exceeds the limit ")
                << lim;
        break;
    }
    case TrendTarget::sectional_variance: {
        t.target = "sectional_variance";
        t.columns = {"r", "gamma", "mean_volume", "mean_se", "variance", "variance_se"};
        std::vector<double> v;
        for (int n : grid) {
            const double r = o.b * std::pow(static_cast<double>(n), o.alpha);
            const ModelParams p(n, r, gamma_hat(r, n));
            const auto st = radial_volume_variance(p, o.N, o.n_dirs, derive_seed(o.seed, n), o.threads);
            v.push_back(st.variance);
            t.rows.push_back({n, {r, p.gamma, st.mean.mean, st.mean.std_error(), st.variance, st.variance_se}});
        }
        t.pass = detail::strictly_decreasing(v);
        verdict << (t.pass ? "variance strictly decreasing" : "variance not strictly decreasing");
        break;
    }
    }
    t.verdict = verdict.str();
    return t;
}

} // namespace zerocell
