#include <catch2/catch_amalgamated.hpp>

#include "bivexp/riccati.hpp"
#include "testutil.hpp"

using namespace bivexp;

namespace {

CoeffTriple constant_triple(const Grid& g, Complex f, Complex gg, Complex h) {
    return CoeffTriple(GridFunction::constant(g, f), GridFunction::constant(g, gg),
                       GridFunction::constant(g, h));
}

SphereTrajectory constant_trajectory(const Grid& g, SpherePoint p) {
    SphereTrajectory t(g);
    t.points.assign(static_cast<size_t>(g.n_nodes()), p);
    t.chordal_steps.assign(static_cast<size_t>(g.n_nodes()), 0.0);
    return t;
}

}  // namespace

TEST_CASE("riccati_solve: y' = 1 - y^2 from 0 is tanh") {
    const Grid g = Grid::over(-2.0, 2.0, 2000);
    const SphereTrajectory t =
        riccati_solve(constant_triple(g, -1.0, 0.0, 1.0), SpherePoint(Complex(0.0)), 1e-10);
    CHECK(t.classification == SolutionKind::standard);
    const int i1 = g.zero_index() + 500;  // x = 1
    CHECK_THAT(t.at(i1).value().real(),
               Catch::Matchers::WithinAbs(std::tanh(1.0), 1e-6));
    double worst = 0.0;
    for (int i = 0; i < g.n_nodes(); ++i)
        worst = std::max(worst, std::abs(t.at(i).value() - Complex(std::tanh(g.node(i)))));
    CHECK(worst < 1e-5);
    CHECK(t.at_zero().value() == Complex(0.0));  // exact anchor
    CHECK(t.f_small_fraction == 0.0);
}

TEST_CASE("riccati_solve: y' = y^2 from 1 continues through the pole") {
    const Grid g = Grid::over(0.0, 2.0, 2000);
    const SphereTrajectory t =
        riccati_solve(constant_triple(g, 1.0, 0.0, 0.0), SpherePoint(Complex(1.0)), 1e-10);
    CHECK(t.classification == SolutionKind::projective);
    REQUIRE(t.infinity_nodes.size() == 1);
    CHECK_THAT(g.node(t.infinity_nodes[0]), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(t.at(g.n_cells()).value().real(), Catch::Matchers::WithinAbs(-1.0, 1e-9));
    for (int i = 0; i < g.n_nodes(); ++i) {
        if (t.at(i).is_infinity()) continue;
        const double x = g.node(i);
        if (std::abs(1.0 - x) < 0.05) continue;
        CHECK(std::abs(t.at(i).value() - Complex(1.0 / (1.0 - x))) < 1e-8);
    }
}

TEST_CASE("riccati_solve: Abel case against the elementary solution") {
    // g = 0, f = cos x, gamma = 1, h = f: the solution from 0 is tan(sin x).
    const Grid g = Grid::over(0.0, 1.0, 1000);
    const GridFunction f = sample(std::function<Complex(double)>(
                                      [](double x) { return Complex(std::cos(x)); }),
                                  g);
    const CoeffTriple coeffs(f, GridFunction::zero(g), f);
    const SphereTrajectory t = riccati_solve(coeffs, SpherePoint(Complex(0.0)), 1e-10);
    CHECK_THAT(t.at(1000).value().real(),
               Catch::Matchers::WithinAbs(std::tan(std::sin(1.0)), 1e-5));
}

TEST_CASE("riccati_solve: residual of the ODE in the standard regime") {
    const Grid g = Grid::over(-2.0, 2.0, 2000);
    const double tol = 1e-10;
    const double bound = 50.0 * (g.spacing() * g.spacing() + tol);
    std::mt19937_64 rng(19);
    for (int k = 0; k < 3; ++k) {
        const CoeffTriple c = testutil::random_triple(rng, g, 0.05);
        const SphereTrajectory t = riccati_solve(c, SpherePoint(Complex(0.3, -0.2)), tol);
        REQUIRE(t.classification == SolutionKind::standard);
        std::vector<Complex> vals(static_cast<size_t>(g.n_nodes()));
        for (int i = 0; i < g.n_nodes(); ++i) vals[static_cast<size_t>(i)] = t.at(i).value();
        const GridFunction y(g, std::move(vals));
        const GridFunction yp = fd_derivative(y);
        double worst = 0.0;
        for (int i = 1; i + 1 < g.n_nodes(); ++i)
            worst = std::max(worst,
                             std::abs(yp[i] - (c.f[i] * y[i] * y[i] + c.g[i] * y[i] + c.h[i])));
        CHECK(worst < bound);
    }
}

TEST_CASE("riccati_solve: deterministic evaluation") {
    const Grid g = Grid::over(-1.0, 1.0, 500);
    std::mt19937_64 rng(21);
    const CoeffTriple c = testutil::random_triple(rng, g, 0.2);
    const SphereTrajectory a = riccati_solve(c, SpherePoint(Complex(0.5, 0.1)), 1e-9);
    const SphereTrajectory b = riccati_solve(c, SpherePoint(Complex(0.5, 0.1)), 1e-9);
    for (int i = 0; i < g.n_nodes(); ++i) REQUIRE(a.at(i) == b.at(i));
}

TEST_CASE("riccati_solve: chordal step shrinks under grid refinement") {
    std::mt19937_64 rng(23);
    const auto tf = testutil::random_trig_poly(rng, 0.2, true);
    const auto tg = testutil::random_trig_poly(rng, 0.2, true);
    const auto th = testutil::random_trig_poly(rng, 0.2, true);
    auto solve_on = [&](int cells) {
        const Grid g = Grid::over(-2.0, 2.0, cells);
        const CoeffTriple c(testutil::sample_poly(tf, g), testutil::sample_poly(tg, g),
                            testutil::sample_poly(th, g));
        return riccati_solve(c, SpherePoint(Complex(0.0)), 1e-10).max_chordal_step;
    };
    const double coarse = solve_on(500);
    const double fine = solve_on(1000);
    CHECK(fine < coarse / 1.5);
}

TEST_CASE("abel_closed_form") {
    SECTION("f = 1, g = 0, gamma = 1 from 0 is tan x") {
        const Grid g = Grid::over(0.0, 1.0, 500);
        const SphereTrajectory t = abel_closed_form(
            GridFunction::constant(g, Complex(1.0)), GridFunction::zero(g),
            Complex(1.0), Complex(0.0));
        for (int i = 0; i < g.n_nodes(); i += 50)
            CHECK_THAT(t.at(i).value().real(),
                       Catch::Matchers::WithinAbs(std::tan(g.node(i)), 1e-7));
    }
    SECTION("anchor at node 0 is exact for y0 = 0") {
        const Grid g = Grid::over(-1.0, 1.0, 100);
        std::mt19937_64 rng(29);
        const GridFunction f = testutil::sample_poly(testutil::random_trig_poly(rng, 0.5), g);
        const GridFunction gg = testutil::sample_poly(testutil::random_trig_poly(rng, 0.5), g);
        const SphereTrajectory t = abel_closed_form(f, gg, Complex(2.0, 1.0), Complex(0.0));
        CHECK(t.at_zero().value() == Complex(0.0));
    }
    SECTION("cross-validates riccati_solve on h = gamma^2 f e^{2Pg}") {
        const Grid g = Grid::over(-2.0, 2.0, 4000);
        std::mt19937_64 rng(31);
        for (const Complex gamma : {Complex(1.0), Complex(2.0), Complex(0.0, 1.0)}) {
            const GridFunction f =
                testutil::sample_poly(testutil::random_trig_poly(rng, 0.015), g);
            const GridFunction gg =
                testutil::sample_poly(testutil::random_trig_poly(rng, 0.015), g);
            const GridFunction pg = primitive(gg);
            std::vector<Complex> hv(static_cast<size_t>(g.n_nodes()));
            for (int i = 0; i < g.n_nodes(); ++i)
                hv[static_cast<size_t>(i)] = gamma * gamma * f[i] * std::exp(2.0 * pg[i]);
            const CoeffTriple coeffs(f, gg, GridFunction(g, std::move(hv)));
            const SphereTrajectory ts = riccati_solve(coeffs, SpherePoint(Complex(1.0)), 3e-9);
            const SphereTrajectory ta = abel_closed_form(f, gg, gamma, Complex(1.0));
            double worst = 0.0;
            for (int i = 0; i < g.n_nodes(); ++i)
                worst = std::max(worst, chordal_distance(ts.at(i), ta.at(i)));
            CHECK(worst < 1e-6);
        }
    }
    SECTION("y0 = +-(i gamma) degenerates to the exponential ray") {
        const Grid g = Grid::over(-1.0, 1.0, 200);
        const GridFunction f = GridFunction::constant(g, Complex(0.3));
        const GridFunction gg = GridFunction::constant(g, Complex(0.5));
        // gamma = i, y0 = 1 = -(i*gamma): expect y = e^{Pg}
        const SphereTrajectory t = abel_closed_form(f, gg, Complex(0.0, 1.0), Complex(1.0));
        for (int i = 0; i < g.n_nodes(); i += 20)
            CHECK_THAT(t.at(i).value().real(),
                       Catch::Matchers::WithinAbs(std::exp(0.5 * g.node(i)), 1e-12));
    }
    SECTION("gamma = 0 is rejected") {
        const Grid g = Grid::over(-1.0, 1.0, 10);
        CHECK_THROWS_AS(abel_closed_form(GridFunction::zero(g), GridFunction::zero(g),
                                         Complex(0.0), Complex(1.0)),
                        std::invalid_argument);
    }
}

TEST_CASE("cross_ratio") {
    SECTION("constant across four solutions of y' = 1 - y^2") {
        const Grid g = Grid::over(-2.0, 2.0, 1000);
        const CoeffTriple c = constant_triple(g, -1.0, 0.0, 1.0);
        std::vector<SphereTrajectory> ts;
        for (double y0 : {0.0, 0.5, -0.5, 2.0})
            ts.push_back(riccati_solve(c, SpherePoint(Complex(y0)), 1e-10));
        const GridFunction r = cross_ratio(ts[0], ts[1], ts[2], ts[3]);
        const Complex at_zero = r.at_zero();
        double worst = 0.0;
        for (int i = 0; i < g.n_nodes(); ++i)
            worst = std::max(worst, std::abs(r[i] - at_zero));
        CHECK(worst < 1e-7);
    }
    SECTION("normalization: constants (0, inf, 1, z) give z") {
        const Grid g = Grid::over(-1.0, 1.0, 16);
        const Complex z(2.5, -0.75);
        const GridFunction r = cross_ratio(constant_trajectory(g, SpherePoint(Complex(0.0))),
                                           constant_trajectory(g, SpherePoint::infinity()),
                                           constant_trajectory(g, SpherePoint(Complex(1.0))),
                                           constant_trajectory(g, SpherePoint(z)));
        for (int i = 0; i < g.n_nodes(); ++i) CHECK(std::abs(r[i] - z) < 1e-14);
    }
    SECTION("invariant under a fixed Mobius map") {
        const Grid g = Grid::over(-2.0, 2.0, 400);
        const CoeffTriple c = constant_triple(g, -1.0, 0.0, 1.0);
        const Mat2 J{Complex(1.0, 0.5), Complex(-0.3), Complex(0.2, 0.1), Complex(0.8)};
        std::vector<SphereTrajectory> ts, js;
        for (double y0 : {0.0, 0.5, -0.5, 2.0}) {
            ts.push_back(riccati_solve(c, SpherePoint(Complex(y0)), 1e-10));
            SphereTrajectory mapped(g);
            for (int i = 0; i < g.n_nodes(); ++i)
                mapped.points.push_back(mobius_apply(J, ts.back().at(i)));
            mapped.chordal_steps.assign(static_cast<size_t>(g.n_nodes()), 0.0);
            js.push_back(std::move(mapped));
        }
        const GridFunction r1 = cross_ratio(ts[0], ts[1], ts[2], ts[3]);
        const GridFunction r2 = cross_ratio(js[0], js[1], js[2], js[3]);
        CHECK(max_abs_diff(r1, r2) < 1e-10);
    }
    SECTION("coincident trajectories at node 0 are rejected") {
        const Grid g = Grid::over(-1.0, 1.0, 16);
        const auto t0 = constant_trajectory(g, SpherePoint(Complex(0.0)));
        const auto t1 = constant_trajectory(g, SpherePoint(Complex(1.0)));
        const auto t2 = constant_trajectory(g, SpherePoint(Complex(2.0)));
        CHECK_THROWS_AS(cross_ratio(t0, t0, t1, t2), std::invalid_argument);
    }
}

TEST_CASE("conjugate_coeffs") {
    const Grid g = Grid::over(-2.0, 2.0, 1000);
    std::mt19937_64 rng(37);
    const CoeffTriple c = testutil::random_triple(rng, g, 0.05);

    SECTION("identity leaves coefficients unchanged") {
        const CoeffTriple r = conjugate_coeffs(Mat2::identity(), c);
        CHECK(max_abs_diff(r.f, c.f) == 0.0);
        CHECK(max_abs_diff(r.g, c.g) == 0.0);
        CHECK(max_abs_diff(r.h, c.h) == 0.0);
    }
    SECTION("the swap matrix realizes the involution (f,g,h) -> (-h,-g,-f)") {
        const Mat2 swap{Complex(0.0), Complex(1.0), Complex(1.0), Complex(0.0)};
        const CoeffTriple r = conjugate_coeffs(swap, c);
        CHECK(max_abs_diff(r.f, negate(c.h)) == 0.0);
        CHECK(max_abs_diff(r.g, negate(c.g)) == 0.0);
        CHECK(max_abs_diff(r.h, negate(c.f)) == 0.0);
    }
    SECTION("transport law: solutions of the conjugate equation are phi_J images") {
        const Mat2 J{Complex(1.2, 0.3), Complex(0.4), Complex(-0.2, 0.1), Complex(0.9)};
        const CoeffTriple cc = conjugate_coeffs(J, c);
        const SpherePoint y0(Complex(0.4, -0.1));
        const SphereTrajectory t1 = riccati_solve(c, y0, 1e-10);
        const SphereTrajectory t2 = riccati_solve(cc, mobius_apply(J, y0), 1e-10);
        double worst = 0.0;
        for (int i = 0; i < g.n_nodes(); ++i)
            worst = std::max(worst, chordal_distance(t2.at(i), mobius_apply(J, t1.at(i))));
        CHECK(worst < 1e-6);
    }
    SECTION("involution symmetry: (-h,-g,-f) from 1/y0 gives reciprocals") {
        const Mat2 swap{Complex(0.0), Complex(1.0), Complex(1.0), Complex(0.0)};
        const CoeffTriple cc = conjugate_coeffs(swap, c);
        const SpherePoint y0(Complex(0.7, 0.2));
        const SphereTrajectory t1 = riccati_solve(c, y0, 1e-10);
        const SphereTrajectory t2 = riccati_solve(cc, reciprocal(y0), 1e-10);
        double worst = 0.0;
        for (int i = 0; i < g.n_nodes(); ++i)
            worst = std::max(worst, chordal_distance(t2.at(i), reciprocal(t1.at(i))));
        CHECK(worst < 1e-12);
    }
    SECTION("singular J is rejected") {
        const Mat2 singular{Complex(1.0), Complex(2.0), Complex(2.0), Complex(4.0)};
        CHECK_THROWS_AS(conjugate_coeffs(singular, c), std::invalid_argument);
    }
}
