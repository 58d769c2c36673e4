#include <gtest/gtest.h>

#include "zerocell/polytope.hpp"

using namespace zerocell;

namespace {

std::vector<HalfSpace> cube_halfspaces(int d, double a = 1.0)
{
    std::vector<HalfSpace> hs;
    for (int k = 0; k < d; ++k)
        for (double s : {1.0, -1.0}) {
            linalg::Vec u(d, 0.0);
            u[k] = s;
            hs.push_back({u, a});
        }
    return hs;
}

Polytope cube(int d, double a = 1.0) { return *intersect_halfspaces(cube_halfspaces(d, a), d); }

// regular simplex with inradius 1 around the origin
Polytope simplex(int d)
{
    // vertices of the standard simplex in R^{d+1} centred and expressed in an
    // orthonormal basis of the hyperplane sum x = 0
    std::vector<linalg::Vec> dirs;
    for (int k = 0; k < d; ++k) {
        linalg::Vec v(d + 1, 0.0);
        v[k] = 1.0;
        v[k + 1] = -1.0;
        dirs.push_back(v);
    }
    auto b = linalg::orthonormal_basis(dirs);
    std::vector<HalfSpace> hs;
    for (int i = 0; i <= d; ++i) {
        linalg::Vec e(d + 1, -1.0 / (d + 1));
        e[i] += 1.0;
        linalg::Vec u(d);
        for (int k = 0; k < d; ++k) u[k] = -linalg::dot(e, b[k]);
        linalg::scale(u, 1.0 / linalg::norm(u));
        hs.push_back({u, 1.0});
    }
    return *intersect_halfspaces(hs, d);
}

std::vector<HalfSpace> random_halfspaces(Rng& rng, int d, int m)
{
    std::uniform_real_distribution<double> t(0.5, 1.5);
    std::vector<HalfSpace> hs;
    for (int i = 0; i < m; ++i) hs.push_back({random_direction(rng, d), t(rng)});
    return hs;
}

Polytope random_cell(std::uint64_t seed, int d, int m)
{
    Rng rng(seed);
    for (;;) {
        auto p = intersect_halfspaces(random_halfspaces(rng, d, m), d);
        if (p) return *p;
    }
}

// random rotation by Gram-Schmidt on a Gaussian matrix
std::vector<linalg::Vec> random_rotation(Rng& rng, int d)
{
    std::normal_distribution<double> g;
    std::vector<linalg::Vec> m(d, linalg::Vec(d));
    for (auto& row : m)
        for (auto& x : row) x = g(rng);
    return linalg::orthonormal_basis(m);
}

linalg::Vec rotate_vec(const std::vector<linalg::Vec>& q, std::span<const double> x)
{
    linalg::Vec y(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) y[i] = linalg::dot(q[i], x);
    return y;
}

bool inside(const std::vector<HalfSpace>& hs, std::span<const double> x)
{
    for (const auto& h : hs)
        if (linalg::dot(h.u, x) > h.t) return false;
    return true;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

TEST(Polytope, CubeBasics)
{
    auto c = cube(3);
    EXPECT_EQ(c.num_vertices(), 8);
    EXPECT_EQ(c.num_facets(), 6);
    EXPECT_TRUE(c.simple);
    EXPECT_EQ(f_vector(c), (FVector{8, 12, 6}));
    for (int v = 0; v < 8; ++v)
        for (double x : c.vertex(v)) EXPECT_NEAR(std::abs(x), 1.0, 1e-14);
    EXPECT_NEAR(volume(c), 8.0, 1e-12);
    EXPECT_NEAR(surface_area(c), 24.0, 1e-12);
    EXPECT_NEAR(face_measure(c, 1), 24.0, 1e-12);
    auto edges = faces(c, 1);
    EXPECT_EQ(edges.size(), 12u);
    for (const auto& e : edges) {
        EXPECT_EQ(e.vertices.size(), 2u);
        EXPECT_EQ(e.basis.size(), 1u);
    }
    EXPECT_TRUE(check_polytope(c).ok());
}

TEST(Polytope, HypercubeAndSimplexFVectors)
{
    for (int d = 2; d <= 6; ++d) {
        auto f = f_vector(cube(d));
        for (int k = 0; k < d; ++k) {
            // 2^{d-k} C(d,k) k-faces
            const double want = std::ldexp(binom(d, k), d - k);
            EXPECT_EQ(static_cast<double>(f[k]), want) << d << " " << k;
        }
        auto s = f_vector(simplex(d));
        for (int k = 0; k < d; ++k) EXPECT_EQ(static_cast<double>(s[k]), binom(d + 1, k + 1));
    }
    EXPECT_EQ(f_vector(simplex(4)), (FVector{5, 10, 10, 5}));
    EXPECT_NEAR(volume(cube(5, 0.5)), 1.0, 1e-12);
}

TEST(Polytope, SimplexVolume)
{
    // regular simplex with inradius 1: volume = d^{d/2} (d+1)^{(d+1)/2} / d!
    for (int d = 2; d <= 6; ++d) {
        const double want = std::pow(d, d / 2.0) * std::pow(d + 1, (d + 1) / 2.0) / std::tgamma(d + 1.0);
        EXPECT_LT(rel(volume(simplex(d)), want), 1e-10) << d;
    }
}

TEST(Polytope, UnboundedTriplesMatchAngularOracle)
{
    // three halfspaces in the plane bound a triangle iff the normals are not
    // contained in any closed half-plane, i.e. every angular gap is < pi
    Rng rng(5);
    int bounded = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto hs = random_halfspaces(rng, 2, 3);
        std::vector<double> ang;
        for (const auto& h : hs) ang.push_back(std::atan2(h.u[1], h.u[0]));
        std::sort(ang.begin(), ang.end());
        double gap = ang[0] + 2 * pi - ang[2];
        for (int i = 1; i < 3; ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
        auto p = intersect_halfspaces(hs, 2);
        EXPECT_EQ(p.has_value(), gap < pi) << trial;
        bounded += p.has_value();
    }
    EXPECT_GT(bounded, 5);
    EXPECT_LT(bounded, 95);
}

TEST(Polytope, TooFewHalfspacesUnbounded)
{
    auto hs = cube_halfspaces(3);
    hs.pop_back();
    EXPECT_FALSE(intersect_halfspaces(hs, 3).has_value());
}

TEST(Polytope, RedundantHalfspaces)
{
    auto hs = cube_halfspaces(3);
    hs.push_back({{1.0, 1.0, 1.0}, 5.0}); // far away, dropped
    auto p = intersect_halfspaces(hs, 3);
    ASSERT_TRUE(p);
    EXPECT_EQ(p->num_facets(), 6);
    hs.back().t = std::sqrt(3.0) * std::sqrt(3.0); // touches the vertex (1,1,1)
    EXPECT_THROW(intersect_halfspaces(hs, 3), DegenerateInput);
}

TEST(Polytope, NonSimpleRejected)
{
    // octahedron: every vertex on four facets
    std::vector<HalfSpace> hs;
    for (int m = 0; m < 8; ++m) hs.push_back({{m & 1 ? 1.0 : -1.0, m & 2 ? 1.0 : -1.0, m & 4 ? 1.0 : -1.0}, 1.0});
    EXPECT_THROW(intersect_halfspaces(hs, 3), DegenerateInput);
}

TEST(Polytope, InvalidHalfspacesRejected)
{
    EXPECT_THROW(intersect_halfspaces({{{1.0, 0.0}, -1.0}}, 2), std::invalid_argument);
    EXPECT_THROW(intersect_halfspaces({{{1.0}, 1.0}}, 2), std::invalid_argument);
    EXPECT_THROW(intersect_halfspaces(cube_halfspaces(11), 11), ResourceLimit);
}

TEST(Polytope, RandomCellsSimpleWithEuler)
{
    for (int d = 2; d <= 5; ++d)
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            auto p = random_cell(seed, d, 12 + 4 * d);
            auto L = face_lattice(p);
            auto chk = check_polytope(p, L);
            EXPECT_TRUE(chk.ok()) << d << " " << seed;
            EXPECT_TRUE(chk.simple);
            auto f = f_vector(L);
            EXPECT_EQ(2 * f[1], d * f[0]);
            // every face is reported once
            for (int k = 0; k < d; ++k) {
                std::set<std::vector<int>> uniq(L.faces[k].begin(), L.faces[k].end());
                EXPECT_EQ(uniq.size(), L.faces[k].size());
            }
        }
}

TEST(Polytope, DualityRoundTrip)
{
    for (int d = 2; d <= 5; ++d)
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            auto p = random_cell(100 + seed, d, 10 + 3 * d);
            std::vector<double> duals;
            for (const auto& h : p.halfspaces)
                for (double x : h.u) duals.push_back(x / h.t);
            auto q = polytope_from_hull(duals, d, convex_hull(duals, d));
            auto fp = f_vector(p), fq = f_vector(q);
            std::reverse(fq.begin(), fq.end());
            EXPECT_EQ(fp, fq) << d << " " << seed;
        }
}

TEST(Polytope, VolumeMatchesRejectionSampling)
{
    Rng rng(11);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const int d = 2 + static_cast<int>(seed % 3);
        auto p = random_cell(200 + seed, d, 8 + 3 * d);
        linalg::Vec lo(d, 1e300), hi(d, -1e300);
        for (int v = 0; v < p.num_vertices(); ++v)
            for (int k = 0; k < d; ++k) {
                lo[k] = std::min(lo[k], p.vertex(v)[k]);
                hi[k] = std::max(hi[k], p.vertex(v)[k]);
            }
        double box = 1.0;
        for (int k = 0; k < d; ++k) box *= hi[k] - lo[k];
        const int n = 200000;
        int hits = 0;
        linalg::Vec x(d);
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < d; ++k) x[k] = std::uniform_real_distribution<double>(lo[k], hi[k])(rng);
            hits += inside(p.halfspaces, x);
        }
        const double ph = static_cast<double>(hits) / n;
        const double est = box * ph, se = box * std::sqrt(ph * (1 - ph) / n);
        EXPECT_LT(std::abs(volume(p) - est), 3.5 * se) << seed;
    }
}

TEST(Polytope, MeasuresScaleAndRotate)
{
    Rng rng(3);
    for (int d = 2; d <= 5; ++d) {
        auto hs = random_halfspaces(rng, d, 30);
        auto p = intersect_halfspaces(hs, d);
        ASSERT_TRUE(p);
        auto q = random_rotation(rng, d);
        auto rs = hs;
        for (auto& h : rs) h.u = rotate_vec(q, h.u);
        auto pr = intersect_halfspaces(rs, d);
        auto sc = hs;
        for (auto& h : sc) h.t *= 1.7;
        auto ps = intersect_halfspaces(sc, d);
        ASSERT_TRUE(pr && ps);
        EXPECT_LT(rel(volume(*pr), volume(*p)), 1e-9);
        EXPECT_LT(rel(volume(*ps), std::pow(1.7, d) * volume(*p)), 1e-9);
        for (int k = 1; k < d; ++k) {
            EXPECT_LT(rel(face_measure(*pr, k), face_measure(*p, k)), 1e-9);
            EXPECT_LT(rel(face_measure(*ps, k), std::pow(1.7, k) * face_measure(*p, k)), 1e-9);
        }
        for (int i = 0; i < 20; ++i) {
            auto u = random_direction(rng, d);
            EXPECT_LT(rel(radial(*ps, u), 1.7 * radial(*p, u)), 1e-12);
        }
    }
}

TEST(Polytope, RadialAndSupport)
{
    auto sq = cube(2);
    EXPECT_NEAR(radial(sq, std::vector<double>{1.0, 0.0}), 1.0, 1e-15);
    EXPECT_NEAR(radial(sq, std::vector<double>{1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}), std::sqrt(2.0), 1e-14);
    Rng rng(9);
    auto p = random_cell(9, 4, 25);
    for (int i = 0; i < 200; ++i) {
        auto u = random_direction(rng, 4);
        const double r = radial(p, u);
        EXPECT_LE(r, support(p, u) + 1e-12);
        auto x = u;
        linalg::scale(x, r);
        double worst = -1e300;
        for (const auto& h : p.halfspaces) worst = std::max(worst, linalg::dot(h.u, x) - h.t);
        EXPECT_NEAR(worst, 0.0, 1e-12);
    }
}

TEST(Polytope, DualVolumeOrderZeroIsVolume)
{
    int fails = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const int d = 2 + static_cast<int>(seed % 3);
        auto p = random_cell(300 + seed, d, 10 + 3 * d);
        auto e = dual_intrinsic_volume(p, 0.0, 4000, seed);
        if (std::abs(e.mean - volume(p)) > 3 * e.std_error()) ++fails;
        EXPECT_LT(rel(dual_volume_quadrature(p, 0.0), volume(p)), 1e-9) << seed;
    }
    // a 3 sigma band misses about 0.3% of the time
    EXPECT_LE(fails, 2);
}

TEST(Polytope, DualVolumeSquareOrderMinusTwo)
{
    // (1/2) int rho^4 over the circle, adaptive angular quadrature
    auto sq = cube(2);
    std::function<double(double, double, double, double, double, int)> simpson;
    auto f = [](double th) { return std::pow(1.0 / std::max(std::abs(std::cos(th)), std::abs(std::sin(th))), 4); };
    simpson = [&](double a, double b, double fa, double fm, double fb, int depth) {
        const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = f(lm), frm = f(rm);
        const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
        const double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
        if (depth > 40 || std::abs(left + right - whole) < 1e-13) return left + right;
        return simpson(a, m, fa, flm, fm, depth + 1) + simpson(m, b, fm, frm, fb, depth + 1);
    };
    double oracle = 0.0;
    for (int q = 0; q < 4; ++q) {
        const double a = -pi / 4 + q * pi / 2, b = a + pi / 2;
        oracle += simpson(a, b, f(a), f(0.5 * (a + b)), f(b), 0);
    }
    oracle /= 2;
    auto e = dual_intrinsic_volume(sq, -2.0, 20000, 1);
    EXPECT_LT(std::abs(e.mean - oracle), 3 * e.std_error());
    EXPECT_LT(rel(dual_volume_quadrature(sq, -2.0), oracle), 1e-12);
}

TEST(Polytope, DualVolumeQuadratureAgreesWithMonteCarlo)
{
    for (int d = 2; d <= 4; ++d)
        for (double s : {-1.5, 0.5, 1.0}) {
            auto p = random_cell(400 + d, d, 8 + 3 * d);
            auto e = dual_intrinsic_volume(p, s, 20000, 17);
            EXPECT_LT(std::abs(e.mean - dual_volume_quadrature(p, s)), 3.5 * e.std_error()) << d << " " << s;
        }
}

TEST(Polytope, ProjectionAndSection)
{
    auto c = cube(3);
    auto pr = project(c, 2);
    EXPECT_EQ(pr.dim, 2);
    EXPECT_EQ(f_vector(pr), (FVector{4, 4}));
    EXPECT_NEAR(volume(pr), 4.0, 1e-12);
    auto se = section(c, coordinate_subspace(3, 2));
    EXPECT_EQ(f_vector(se), (FVector{4, 4}));
    EXPECT_NEAR(volume(se), 4.0, 1e-12);
    auto p1 = project(c, 1);
    EXPECT_NEAR(volume(p1), 2.0, 1e-15);
    Rng rng(21);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto p = random_cell(500 + seed, 3, 20);
        EXPECT_LE(volume(section(p, coordinate_subspace(3, 2))), volume(project(p, 2)) + 1e-12);
        auto b = random_rotation(rng, 3);
        b.pop_back();
        auto s = section(p, b);
        EXPECT_TRUE(check_polytope(s).ok());
        ASSERT_TRUE(s.basis);
        EXPECT_EQ(s.basis->size(), 2u);
    }
}

TEST(Polytope, IntrinsicV1)
{
    auto sq = *intersect_halfspaces(cube_halfspaces(2, 0.5), 2);
    EXPECT_NEAR(intrinsic_V1(sq), 2.0, 1e-14);
    EXPECT_NEAR(intrinsic_V1(cube(3, 0.5)), 3.0, 1e-12);
    EXPECT_THROW(intrinsic_V1(cube(4)), UnsupportedRange);
    // in R^3, V_1 = 4 * mean support value over the sphere
    Rng rng(2);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto p = random_cell(600 + seed, 3, 20);
        Estimate e;
        for (int i = 0; i < 40000; ++i) e.add(4.0 * support(p, random_direction(rng, 3)));
        EXPECT_LT(std::abs(intrinsic_V1(p) - e.mean), 3.5 * e.std_error()) << seed;
    }
}

TEST(Polytope, SteinerParallelArea)
{
    // area of the parallel body A + 2 s V_1 + pi s^2, the area counted on a grid
    auto p = random_cell(77, 2, 9);
    auto dist = [&](double x, double y) {
        double best = 1e300;
        bool in = true;
        for (const auto& h : p.halfspaces)
            if (h.u[0] * x + h.u[1] * y > h.t) in = false;
        if (in) return 0.0;
        for (int f = 0; f < p.num_facets(); ++f) {
            auto a = p.vertex(p.facet_incidence[f][0]), b = p.vertex(p.facet_incidence[f][1]);
            const double ex = b[0] - a[0], ey = b[1] - a[1];
            double t = ((x - a[0]) * ex + (y - a[1]) * ey) / (ex * ex + ey * ey);
            t = std::clamp(t, 0.0, 1.0);
            best = std::min(best, std::hypot(x - a[0] - t * ex, y - a[1] - t * ey));
        }
        return best;
    };
    double R = 0;
    for (int v = 0; v < p.num_vertices(); ++v) R = std::max(R, linalg::norm(p.vertex(v)));
    const double s1 = 0.2, s2 = 0.4, ext = R + s2 + 0.01;
    const int g = 1500;
    const double h = 2 * ext / g;
    double a1 = 0, a2 = 0;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            const double dd = dist(-ext + (i + 0.5) * h, -ext + (j + 0.5) * h);
            a1 += dd <= s1;
            a2 += dd <= s2;
        }
    a1 *= h * h;
    a2 *= h * h;
    // A(s) - A - pi s^2 = 2 s V_1
    const double A = volume(p);
    const double v1a = (a1 - A - pi * s1 * s1) / (2 * s1), v1b = (a2 - A - pi * s2 * s2) / (2 * s2);
    EXPECT_LT(rel(v1a, intrinsic_V1(p)), 0.01);
    EXPECT_LT(rel(v1b, intrinsic_V1(p)), 0.01);
}

TEST(Polytope, FFunctional)
{
    auto c = cube(3);
    EXPECT_NEAR(F_functional(c, 1, 1), 24.0, 1e-12);
    auto f = f_vector(c);
    for (int l = 0; l < 3; ++l) EXPECT_EQ(F_functional(c, l, 0), static_cast<double>(f[l]));
    EXPECT_NEAR(F_functional(c, 2, 2), 24.0, 1e-12);
    EXPECT_NEAR(F_functional(c, 2, 1), 6 * 4.0, 1e-12); // each square: perimeter 8 / 2
    EXPECT_NEAR(F_functional(c, 3, 1), intrinsic_V1(c), 1e-12);
    EXPECT_THROW(F_functional(cube(5), 4, 1), UnsupportedRange);
    EXPECT_THROW(F_functional(c, 2, 3), UnsupportedRange);
    EXPECT_THROW(F_functional(c, 4, 0), std::out_of_range);
}

TEST(Polytope, FTwoOneMatchesVertexCycles)
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto p = random_cell(700 + seed, 3, 18);
        double total = 0.0;
        for (int f = 0; f < p.num_facets(); ++f) {
            // order the facet's vertices by angle around their centroid
            const auto& vs = p.facet_incidence[f];
            linalg::Vec c(3, 0.0);
            for (int v : vs) linalg::axpy(c, 1.0 / vs.size(), p.vertex(v));
            auto b = linalg::orthonormal_basis({linalg::sub(p.vertex(vs[0]), c), p.halfspaces[f].u});
            linalg::Vec e2{b[1][1] * b[0][2] - b[1][2] * b[0][1], b[1][2] * b[0][0] - b[1][0] * b[0][2],
                           b[1][0] * b[0][1] - b[1][1] * b[0][0]};
            std::vector<std::pair<double, int>> ord;
            for (int v : vs) {
                auto w = linalg::sub(p.vertex(v), c);
                ord.emplace_back(std::atan2(linalg::dot(w, e2), linalg::dot(w, b[0])), v);
            }
            std::sort(ord.begin(), ord.end());
            double per = 0.0;
            for (std::size_t i = 0; i < ord.size(); ++i)
                per += linalg::norm(linalg::sub(p.vertex(ord[i].second), p.vertex(ord[(i + 1) % ord.size()].second)));
            total += per / 2;
        }
        EXPECT_LT(rel(F_functional(p, 2, 1), total), 1e-12);
    }
}

TEST(Polytope, JsonRoundTrip)
{
    auto p = random_cell(42, 4, 30);
    auto j = to_json(p);
    auto q = polytope_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(q.coords, p.coords);
    EXPECT_EQ(q.facet_incidence, p.facet_incidence);
    ASSERT_EQ(q.halfspaces.size(), p.halfspaces.size());
    for (std::size_t i = 0; i < p.halfspaces.size(); ++i) {
        EXPECT_EQ(q.halfspaces[i].u, p.halfspaces[i].u);
        EXPECT_EQ(q.halfspaces[i].t, p.halfspaces[i].t);
    }
    EXPECT_EQ(q.vertex_facets, p.vertex_facets);
}

TEST(Polytope, SimpleLatticeMatchesGeneric)
{
    for (int d = 2; d <= 5; ++d)
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            auto p = random_cell(800 + seed, d, 10 + 4 * d);
            ASSERT_TRUE(p.simple);
            auto a = face_lattice_simple(p), b = face_lattice_generic(p);
            for (int k = 0; k <= d; ++k) {
                // same faces, and the same facet structure, up to numbering
                std::map<std::vector<int>, std::set<std::vector<int>>> fa, fb;
                for (std::size_t i = 0; i < a.faces[k].size(); ++i) {
                    auto& e = fa[a.faces[k][i]];
                    if (k > 0)
                        for (int j : a.sub[k][i]) e.insert(a.faces[k - 1][j]);
                }
                for (std::size_t i = 0; i < b.faces[k].size(); ++i) {
                    auto& e = fb[b.faces[k][i]];
                    if (k > 0)
                        for (int j : b.sub[k][i]) e.insert(b.faces[k - 1][j]);
                }
                EXPECT_EQ(fa, fb) << d << " " << seed << " " << k;
            }
        }
}
