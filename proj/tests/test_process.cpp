#include <gtest/gtest.h>

#include <sstream>

#include "zerocell/process.hpp"

using namespace zerocell;

namespace {

std::vector<std::vector<double>> sorted_vertices(const Polytope& p)
{
    std::vector<std::vector<double>> v;
    for (int i = 0; i < p.num_vertices(); ++i) v.emplace_back(p.vertex(i).begin(), p.vertex(i).end());
    std::sort(v.begin(), v.end());
    return v;
}

double max_vertex_gap(const Polytope& a, const Polytope& b)
{
    auto va = sorted_vertices(a), vb = sorted_vertices(b);
    if (va.size() != vb.size()) return std::numeric_limits<double>::infinity();
    double g = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i)
        for (std::size_t k = 0; k < va[i].size(); ++k) g = std::max(g, std::abs(va[i][k] - vb[i][k]));
    return g;
}

} // namespace

TEST(Process, HyperplaneCountIsPoisson)
{
    // number of hyperplanes within distance 1 at (n, r, gamma) = (3, 2, 1) is
    // Poisson with mean 2 gamma / r = 1; chi-square over 0..4 and 5+
    const ModelParams p(3, 2.0, 1.0);
    const int draws = 10000;
    std::vector<int> bins(6, 0);
    for (int k = 0; k < draws; ++k) {
        HyperplaneStream st(p, derive_seed(3, k));
        int c = 0;
        while (st.next().t <= 1.0) ++c;
        ++bins[std::min(c, 5)];
    }
    double chi = 0.0, tail = 1.0;
    for (int c = 0; c < 6; ++c) {
        double pc = std::exp(-1.0) / std::tgamma(c + 1.0);
        if (c == 5) pc = tail;
        tail -= pc;
        const double e = draws * pc;
        chi += (bins[c] - e) * (bins[c] - e) / e;
    }
    EXPECT_LT(chi, 15.086); // 1% point of chi-square with 5 degrees of freedom
}

TEST(Process, FirstDistanceLaw)
{
    // r = 1, gamma = 1: T_1 ~ Exp(2), mean 1/2
    const int N = 100000;
    Estimate t1;
    for (int k = 0; k < N; ++k) t1.add(HyperplaneStream(ModelParams(2, 1.0, 1.0), derive_seed(4, k)).next().t);
    EXPECT_LT(std::abs(t1.mean - 0.5), 3 * t1.std_error());
    // Kolmogorov-Smirnov against 1 - exp(-2 gamma s^r / r) at r = 2.5, gamma = 1.5
    const ModelParams q(3, 2.5, 1.5);
    std::vector<double> xs;
    for (int k = 0; k < N; ++k) xs.push_back(HyperplaneStream(q, derive_seed(5, k)).next().t);
    std::sort(xs.begin(), xs.end());
    double D = 0.0;
    for (int i = 0; i < N; ++i) {
        const double F = 1.0 - std::exp(-2.0 * q.gamma * std::pow(xs[i], q.r) / q.r);
        D = std::max({D, std::abs(F - static_cast<double>(i) / N), std::abs(F - static_cast<double>(i + 1) / N)});
    }
    EXPECT_LT(D, 1.628 / std::sqrt(static_cast<double>(N)));
}

TEST(Process, DirectionsUniform)
{
    const int N = 100000;
    HyperplaneStream st(ModelParams(4, 1.0, 1.0), 17);
    linalg::Vec m(4, 0.0);
    double prev = 0.0;
    for (int i = 0; i < N; ++i) {
        auto h = st.next();
        EXPECT_GT(h.t, prev);
        prev = h.t;
        linalg::axpy(m, 1.0 / N, h.u);
        ASSERT_NEAR(linalg::norm(h.u), 1.0, 1e-12);
    }
    EXPECT_LT(linalg::norm(m), 4.0 / std::sqrt(static_cast<double>(N)));
}

TEST(Process, ClippedCellMatchesPolarHull)
{
    // the incremental cell equals the halfspace intersection of the consumed
    // stream computed through the dual hull
    for (int n = 2; n <= 5; ++n)
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const ModelParams p(n, n == 5 ? 2.0 : 1.0 + 0.5 * n, 1.0);
            const auto s = sample_zero_cell(p, seed);
            ASSERT_EQ(s.resample_count, 0);
            HyperplaneStream st(p, seed);
            std::vector<HalfSpace> hs;
            for (std::int64_t k = 0; k < s.n_hyperplanes_generated; ++k) hs.push_back(st.next());
            auto q = intersect_halfspaces(hs, n);
            ASSERT_TRUE(q);
            EXPECT_EQ(q->num_facets(), s.n_facets);
            EXPECT_LT(max_vertex_gap(*q, s.cell), 1e-9 * std::max(1.0, s.stop_radius)) << n << " " << seed;
        }
}

TEST(Process, PerSampleInvariants)
{
    for (int n = 2; n <= 5; ++n)
        for (std::uint64_t k = 0; k < 30; ++k) {
            const ModelParams p(n, 1.0 + (k % 3), 0.5 + k % 2);
            const auto s = sample_zero_cell(p, derive_seed(6, k));
            const auto L = face_lattice(s.cell);
            const auto chk = check_polytope(s.cell, L);
            EXPECT_TRUE(chk.ok());
            EXPECT_TRUE(chk.simple);
            const auto f = f_vector(L);
            EXPECT_EQ(2 * f[1], n * f[0]);
            EXPECT_EQ(f[n - 1], s.n_facets);
            for (int v = 0; v < s.cell.num_vertices(); ++v)
                EXPECT_LE(linalg::norm(s.cell.vertex(v)), s.stop_radius * (1 + 1e-12));
            EXPECT_GT(s.n_hyperplanes_generated, n);
        }
}

TEST(Process, ExtensionInvariance)
{
    for (std::uint64_t k = 0; k < 100; ++k) {
        EXPECT_TRUE(extension_invariant(ModelParams(3, 1.0, 1.0), derive_seed(8, k))) << k;
        EXPECT_TRUE(extension_invariant(ModelParams(4, 2.0, 1.0), derive_seed(9, k))) << k;
    }
}

TEST(Process, StreamRadialMatchesCell)
{
    const ModelParams p(3, 2.0, 1.0);
    Rng rng(3);
    for (std::uint64_t k = 0; k < 20; ++k) {
        const auto s = sample_zero_cell(p, k);
        ASSERT_EQ(s.resample_count, 0);
        std::vector<linalg::Vec> dirs;
        for (int i = 0; i < 10; ++i) dirs.push_back(random_direction(rng, 3));
        const auto rho = sample_radial(p, k, dirs);
        for (int i = 0; i < 10; ++i) EXPECT_NEAR(rho[i], radial(s.cell, dirs[i]), 1e-12 * rho[i]);
    }
}

TEST(Process, MeanVertexCountPlane)
{
    // r = 1, n = 2: E f_0 = n! 2^{-n} kappa_n^2 = pi^2 / 2
    auto b = batch(ModelParams(2, 1.0, 1.0), 20000, 12, {});
    Estimate f0;
    for (const auto& r : b.records) f0.add(static_cast<double>(r.f_vector[0]));
    EXPECT_LT(std::abs(f0.mean - pi * pi / 2), 3 * f0.std_error());
}

TEST(Process, MeanVolumeClosedForm)
{
    for (auto [n, r, g] : {std::tuple{2, 1.0, 1.0}, {2, 2.0, 1.0}, {3, 3.0, 1.0}, {3, 1.5, 0.7}}) {
        const ModelParams p(n, r, g);
        auto b = batch(p, 5000, 21, {});
        Estimate v;
        for (const auto& rec : b.records) v.add(rec.volume);
        EXPECT_LT(std::abs(v.mean - mean_volume(p)), 3 * v.std_error()) << n << " " << r;
    }
}

TEST(Process, GammaScaling)
{
    // (2 gamma / r)^{1/r} Z_0 has a gamma-free law: compare scaled volumes
    const int n = 3;
    const double r = 2.0;
    Estimate a, b;
    for (double g : {1.0, 4.0}) {
        auto res = batch(ModelParams(n, r, g), 4000, g == 1.0 ? 30 : 31, {});
        const double lam = std::pow(2 * g / r, 1.0 / r);
        for (const auto& rec : res.records) (g == 1.0 ? a : b).add(std::pow(lam, n) * rec.volume);
    }
    EXPECT_LT(z_score(a.mean, a.std_error(), b.mean, b.std_error()), 3.0);
}

TEST(Process, Survival)
{
    const ModelParams p(2, 1.0, 1.0);
    EXPECT_EQ(radial_survival(p, 0.0), 1.0);
    EXPECT_NEAR(radial_survival(p, 1.0), std::exp(-2.0 / pi), 1e-15);
    for (double s : {0.25, 0.5, 1.0, 2.0}) {
        auto e = empirical_survival(p, s, 20000, 44);
        const double q = radial_survival(p, s);
        EXPECT_LT(std::abs(e.mean - q), 3 * std::sqrt(q * (1 - q) / 20000)) << s;
    }
}

TEST(Process, SectionSamplersAgree)
{
    const ModelParams p(3, 1.0, 1.0);
    Estimate fd, fs, vd, vs;
    for (std::int64_t k = 0; k < 8000; ++k) {
        const auto d = sample_section_direct(p, 2, derive_seed(50, k));
        const auto s = sample_section_slice(p, 2, derive_seed(51, k));
        fd.add(d.cell.num_vertices());
        fs.add(s.num_vertices());
        vd.add(volume(d.cell));
        vs.add(volume(s));
    }
    EXPECT_LT(z_score(fd.mean, fd.std_error(), fs.mean, fs.std_error()), 3.0);
    EXPECT_LT(z_score(vd.mean, vd.std_error(), vs.mean, vs.std_error()), 3.0);
    EXPECT_LT(std::abs(fd.mean - pi * pi / 2), 3 * fd.std_error());
    const double exact = sectional_mean(p, 2);
    EXPECT_LT(std::abs(vs.mean - exact), 3 * vs.std_error());
}

TEST(Process, LineSection)
{
    const ModelParams p(2, 2.0, 1.0);
    Estimate a, b;
    for (std::int64_t k = 0; k < 20000; ++k) {
        const auto d = sample_section_direct(p, 1, derive_seed(60, k));
        EXPECT_EQ(d.cell.dim, 1);
        a.add(volume(d.cell));
        b.add(volume(sample_section_slice(p, 1, derive_seed(61, k))));
    }
    EXPECT_LT(z_score(a.mean, a.std_error(), b.mean, b.std_error()), 3.0);
    EXPECT_LT(std::abs(a.mean - sectional_mean(p, 1)), 3 * a.std_error());
}

TEST(Process, SectionLawDoesNotDependOnSubspace)
{
    const ModelParams p(3, 2.0, 1.0);
    Rng rng(70);
    Estimate a, b;
    for (std::int64_t k = 0; k < 6000; ++k) {
        auto cell = sample_zero_cell(p, derive_seed(71, k)).cell;
        a.add(volume(section(cell, coordinate_subspace(3, 2))));
        std::normal_distribution<double> g;
        std::vector<linalg::Vec> m(2, linalg::Vec(3));
        for (auto& row : m)
            for (auto& x : row) x = g(rng);
        auto cell2 = sample_zero_cell(p, derive_seed(72, k)).cell;
        b.add(volume(section(cell2, linalg::orthonormal_basis(m))));
    }
    EXPECT_LT(z_score(a.mean, a.std_error(), b.mean, b.std_error()), 3.0);
}

TEST(Process, BatchDeterministicAcrossThreads)
{
    const ModelParams p(3, 2.0, 1.0);
    std::vector<NamedFunctional> fs{{"facets", [](const ZeroCellSample& s) { return double(s.n_facets); }}};
    std::ostringstream a, b, c;
    write_jsonl(a, batch(p, 200, 9, fs, 1));
    write_jsonl(b, batch(p, 200, 9, fs, 4));
    write_jsonl(c, batch(p, 200, 9, fs, 1));
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str(), c.str());
    EXPECT_THROW(batch(p, 0, 9, fs), std::invalid_argument);
    auto first = nlohmann::json::parse(a.str().substr(0, a.str().find('\n')));
    for (const char* key : {"index", "seed", "n_hyperplanes", "stop_radius", "f_vector", "volume", "surface", "functionals"})
        EXPECT_TRUE(first.contains(key)) << key;
}

TEST(Process, ResourceLimit)
{
    SamplerOptions o;
    o.hyperplane_cap = 5;
    EXPECT_THROW(sample_zero_cell(ModelParams(3, 1.0, 1.0), 1, o), ResourceLimit);
    auto b = batch(ModelParams(3, 1.0, 1.0), 10, 1, {}, 1, o);
    EXPECT_EQ(b.report.resource_limits, 10);
}

TEST(Process, RadialVolumeVariance)
{
    // the covariance estimator against the plain variance of exact volumes
    const ModelParams p(3, 3.0, 1.0);
    auto st = radial_volume_variance(p, 20000, 16, 5);
    EXPECT_LT(std::abs(st.mean.mean - mean_volume(p)), 3 * st.mean.std_error());
    auto b = batch(p, 20000, 6, {});
    Estimate v;
    for (const auto& r : b.records) v.add(r.volume);
    // standard error of a sample variance from the fourth central moment
    double m4 = 0.0;
    for (const auto& r : b.records) m4 += std::pow(r.volume - v.mean, 4) / 20000.0;
    const double se_var = std::sqrt((m4 - v.variance() * v.variance()) / 20000.0);
    EXPECT_LT(z_score(st.variance, st.variance_se, v.variance(), se_var), 3.0);
}
