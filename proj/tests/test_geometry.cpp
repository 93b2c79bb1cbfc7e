#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <shallowcv/config.hpp>
#include <shallowcv/geometry.hpp>

using namespace shallowcv;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<cplx> circle_points(int n, cplx c, double r, bool clockwise) {
    std::vector<cplx> p;
    for (int j = 0; j < n; ++j) p.push_back(c + std::polar(r, (clockwise ? -1.0 : 1.0) * 2.0 * pi * j / n));
    return p;
}

}  // namespace

TEST(Material, KolosovParameter) {
    MaterialParams m;
    EXPECT_DOUBLE_EQ(m.kappa(), 1.8);
    m.mode = PlaneMode::plane_stress;
    EXPECT_NEAR(m.kappa(), 2.7 / 1.3, 1e-15);
}

TEST(Material, ShearModulusInKilopascal) {
    MaterialParams m;
    EXPECT_NEAR(m.shear_modulus(), 20000.0 / 2.6, 1e-9);
}

TEST(Material, ValidationNamesTheField) {
    MaterialParams m;
    m.nu = 0.5;
    try {
        m.validate();
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("nu"), std::string::npos);
    }
    m = {};
    m.E_mpa = 0.0;
    EXPECT_THROW(m.validate(), ConfigError);
    m = {};
    m.gamma = 0.0;
    EXPECT_NO_THROW(m.validate());
}

TEST(InitialStress, GeostaticAtDepthTen) {
    const StressTriple s = initial_stress({3.0, -10.0}, MaterialParams{});
    EXPECT_DOUBLE_EQ(s.sx, -160.0);
    EXPECT_DOUBLE_EQ(s.sy, -200.0);
    EXPECT_DOUBLE_EQ(s.txy, 0.0);
    EXPECT_THROW((void)initial_stress({0.0, 0.1}, MaterialParams{}), GeometryError);
}

TEST(CavityTraction, MatchesStressTensorTimesInwardNormal) {
    const MaterialParams m;
    const cplx p{1.0, -7.0};
    for (double a : {0.0, 0.3, 1.7, -2.2}) {
        const cplx u = std::polar(1.0, a);
        // clockwise traversal: the cavity lies on the right, normal = u turned by −90°
        const double nx = u.imag(), ny = -u.real();
        const double sx = m.k0 * m.gamma * p.imag(), sy = m.gamma * p.imag();
        const cplx geo{sx * nx, sy * ny};
        const cplx t = cavity_traction(p, u, m);
        EXPECT_NEAR(std::abs(t + geo), 0.0, 1e-12);
    }
}

TEST(Area, ShoelaceUnitSquare) {
    const std::vector<cplx> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    EXPECT_DOUBLE_EQ(signed_area(sq), 1.0);
}

TEST(CompositeEllipse, PointsLieOnTheirHalfEllipses) {
    const CavitySpec s = build_case_boundary(CompositeEllipse{}, 1.0);
    ASSERT_EQ(s.points.size(), 60u);
    EXPECT_NEAR(std::abs(s.points[0] - cplx(0.0, -5.0)), 0.0, 1e-12);
    for (cplx p : s.points) {
        const double a = p.real() >= 0.0 ? 6.0 : 4.0;
        const double e = std::pow(p.real() / a, 2) + std::pow((p.imag() + 10.0) / 5.0, 2);
        EXPECT_NEAR(e, 1.0, 1e-12);
    }
    EXPECT_LT(signed_area(s.points), 0.0);
}

TEST(CompositeEllipse, AreaOracle) {
    // half-ellipse areas πab/2, W = area/2π
    const double W = (pi * 6 * 5 / 2 + pi * 4 * 5 / 2) / (2 * pi);
    EXPECT_DOUBLE_EQ(W, 12.5);
    const AreaResultant r = area_and_resultant(build_case_boundary(CompositeEllipse{}, 1.0), 20.0);
    EXPECT_NEAR(r.W, W, 1e-6 * W);
    EXPECT_NEAR(r.Ry, 2 * pi * W * 20.0, 1e-5 * r.Ry);
}

TEST(CompositeEllipse, AllPresetsBuild) {
    for (const char* id : {"case1", "case2", "case3", "case4"}) {
        CompositeEllipse c;
        c.depth = *preset_depth(id);
        EXPECT_NO_THROW((void)build_case_boundary(c, 1.0)) << id;
    }
    EXPECT_EQ(*preset_depth("case4"), 5.2);
    EXPECT_FALSE(preset_depth("case5").has_value());
}

TEST(Axisymmetric, CircleGeometry) {
    const AxisymmetricShape c = AxisymmetricShape::circle(3.0, 10.0);
    const CavitySpec s = build_case_boundary(c, 500.0);
    for (cplx p : s.points) EXPECT_NEAR(std::abs(p + cplx(0.0, 10.0)), 3.0, 1e-9);
    EXPECT_LT(signed_area(s.points), 0.0);
    EXPECT_NEAR(area_and_resultant(s, 20.0).W, 9.0 / 2.0, 1e-6);
    EXPECT_NEAR(std::abs(s.zc + cplx(0.0, 10.0)), 0.0, 1e-6);  // polygon centroid of a non-uniform sampling
}

TEST(Validation, RejectsBadTraces) {
    auto make = [](std::vector<cplx> p) {
        CavitySpec s;
        s.points = std::move(p);
        s.zc = {0.0, -5.0};
        s.T1 = {-50.0, 0.0};
        s.T2 = {50.0, 0.0};
        return s;
    };
    EXPECT_NO_THROW(validate(make(circle_points(32, {0, -5}, 1, true))));
    EXPECT_THROW(validate(make(circle_points(32, {0, -5}, 1, false))), GeometryError);  // counterclockwise
    EXPECT_THROW(validate(make(circle_points(31, {0, -5}, 1, true))), GeometryError);  // odd count
    EXPECT_THROW(validate(make(circle_points(32, {0, -0.5}, 1, true))), GeometryError);  // above the surface
    auto bow = circle_points(32, {0, -5}, 1, true);
    std::swap(bow[3], bow[20]);
    EXPECT_THROW(validate(make(bow)), GeometryError);
    auto off = make(circle_points(32, {0, -5}, 1, true));
    off.zc = {3.0, -5.0};
    EXPECT_THROW(validate(off), GeometryError);
    auto joint = make(circle_points(32, {0, -5}, 1, true));
    joint.T2 = {0.5, 0.0};
    EXPECT_THROW(validate(joint), GeometryError);
}

TEST(ExplicitTrace, CounterclockwiseInputIsReversed) {
    const CavitySpec s = build_case_boundary(circle_points(40, {0, -5}, 1, false), 2.0);
    EXPECT_LT(signed_area(s.points), 0.0);
    EXPECT_NEAR(std::abs(s.zc - cplx(0, -5)), 0.0, 1e-12);
    EXPECT_NEAR(s.T2.real(), 10.0, 1e-12);
    EXPECT_NEAR(s.T1.real(), -10.0, 1e-12);
}

TEST(Densify, FirstHarmonicIsReproducedExactly) {
    const auto p = circle_points(64, {0.5, -4}, 1.5, true);
    const auto d = densify_trace(p, 1024);
    ASSERT_EQ(d.size(), 1024u);
    for (cplx z : d) EXPECT_NEAR(std::abs(z - cplx(0.5, -4)), 1.5, 1e-12);
    EXPECT_NEAR(std::abs(d[16] - p[1]), 0.0, 1e-12);
}

TEST(Csv, ReadsHeaderCommentsAndWhitespace) {
    const auto f = std::filesystem::temp_directory_path() / "shallowcv_points_test.csv";
    {
        std::ofstream o(f);
        o << "x,y\n# comment\n1, -2\n3 -4\n\n5,-6 # trailing\n";
    }
    const auto p = read_points_csv(f);
    ASSERT_EQ(p.size(), 3u);
    EXPECT_EQ(p[1], cplx(3, -4));
    {
        std::ofstream o(f);
        o << "1,2\nfoo,bar\n";
    }
    EXPECT_THROW((void)read_points_csv(f), GeometryError);
    std::filesystem::remove(f);
    EXPECT_THROW((void)read_points_csv(f), GeometryError);
}
