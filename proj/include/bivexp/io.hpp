#pragma once

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bivexp/airy.hpp"
#include "bivexp/linear2.hpp"
#include "bivexp/miura.hpp"
#include "bivexp/riccati.hpp"
#include "bivexp/rk.hpp"
#include "bivexp/sphere.hpp"

namespace bivexp {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form of a double; locale independent and
/// deterministic, so repeated runs produce byte-identical files.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline Json grid_json(const Grid& g) {
    return Json{{"x_lo", g.x_lo()}, {"x_hi", g.x_hi()}, {"n_cells", g.n_cells()}};
}

// ---------------------------------------------------------------------------
// CSV writers. Convention: header row, comma separation, '.' decimal point,
// complex values split into re/im columns.
// ---------------------------------------------------------------------------

inline void write_gridfunction_csv(std::ostream& os, const GridFunction& f) {
    os << "x,re,im\n";
    for (int i = 0; i < f.size(); ++i)
        os << format_double(f.grid().node(i)) << ',' << format_double(f[i].real())
           << ',' << format_double(f[i].imag()) << '\n';
}

inline void write_bivexp_csv(std::ostream& os, const BivexpResult& r) {
    os << "x,re_E,im_E,re_C,im_C,re_S,im_S\n";
    for (int i = 0; i < r.E.size(); ++i)
        os << format_double(r.E.grid().node(i)) << ',' << format_double(r.E[i].real())
           << ',' << format_double(r.E[i].imag()) << ',' << format_double(r.C[i].real())
           << ',' << format_double(r.C[i].imag()) << ',' << format_double(r.S[i].real())
           << ',' << format_double(r.S[i].imag()) << '\n';
}

inline void write_matpath_csv(std::ostream& os, const MatPath& m) {
    os << "x,re_a,im_a,re_b,im_b,re_c,im_c,re_d,im_d,det_residual\n";
    for (int i = 0; i < m.grid.n_nodes(); ++i) {
        const Complex det = m.a[i] * m.d[i] - m.b[i] * m.c[i];
        const double residual =
            m.unimodular ? std::abs(det - Complex(1.0)) : std::abs(det);
        os << format_double(m.grid.node(i)) << ',' << format_double(m.a[i].real())
           << ',' << format_double(m.a[i].imag()) << ',' << format_double(m.b[i].real())
           << ',' << format_double(m.b[i].imag()) << ',' << format_double(m.c[i].real())
           << ',' << format_double(m.c[i].imag()) << ',' << format_double(m.d[i].real())
           << ',' << format_double(m.d[i].imag()) << ',' << format_double(residual)
           << '\n';
    }
}

inline void write_trajectory_csv(std::ostream& os, const SphereTrajectory& t) {
    os << "x,re,im,is_infinity,chordal_step\n";
    for (int i = 0; i < t.grid.n_nodes(); ++i) {
        const SpherePoint& p = t.points[static_cast<size_t>(i)];
        os << format_double(t.grid.node(i)) << ',';
        if (p.is_infinity())
            os << ",,1,";
        else
            os << format_double(p.value().real()) << ','
               << format_double(p.value().imag()) << ",0,";
        os << format_double(t.chordal_steps[static_cast<size_t>(i)]) << '\n';
    }
}

inline void write_linear_csv(std::ostream& os, const LinearSolution& s) {
    os << "x,re_y,im_y,re_yp,im_yp\n";
    for (int i = 0; i < s.y.size(); ++i)
        os << format_double(s.y.grid().node(i)) << ',' << format_double(s.y[i].real())
           << ',' << format_double(s.y[i].imag()) << ',' << format_double(s.y_prime[i].real())
           << ',' << format_double(s.y_prime[i].imag()) << '\n';
}

inline void write_singular_curve_csv(std::ostream& os, const SingularCurveSample& s) {
    os << "x,re,im\n";
    for (size_t k = 0; k < s.values.size(); ++k)
        os << format_double(s.xs[k]) << ',' << format_double(s.values[k].real()) << ','
           << format_double(s.values[k].imag()) << '\n';
}

inline void write_airy_csv(std::ostream& os, const AiryTable& t) {
    os << "x,Ai,Bi,u1,u2\n";
    for (int i = 0; i < t.grid.n_nodes(); ++i)
        os << format_double(t.grid.node(i)) << ',' << format_double(t.Ai[i].real())
           << ',' << format_double(t.Bi[i].real()) << ',' << format_double(t.u1[i].real())
           << ',' << format_double(t.u2[i].real()) << '\n';
}

inline void write_miura_csv(std::ostream& os, const MiuraResult& r,
                            const GridFunction& q) {
    os << "x,re_alpha,im_alpha,is_infinity,q,q_reconstructed,recon_valid\n";
    const Grid& grid = r.alpha.grid;
    for (int i = 0; i < grid.n_nodes(); ++i) {
        const SpherePoint& p = r.alpha.points[static_cast<size_t>(i)];
        os << format_double(grid.node(i)) << ',';
        if (p.is_infinity())
            os << ",,1,";
        else
            os << format_double(p.value().real()) << ','
               << format_double(p.value().imag()) << ",0,";
        os << format_double(q[i].real()) << ',';
        if (r.recon_valid[static_cast<size_t>(i)])
            os << format_double(r.q_reconstructed[i].real()) << ",1\n";
        else
            os << ",0\n";
    }
}

// ---------------------------------------------------------------------------
// CSV reader for coefficient data (columns x, re, im with a header row).
// ---------------------------------------------------------------------------

inline GridFunction read_gridfunction_csv(std::istream& is, const Grid& grid) {
    std::string line;
    if (!std::getline(is, line))
        throw std::invalid_argument("gridfunction csv: empty input");
    std::vector<Complex> vals;
    vals.reserve(static_cast<size_t>(grid.n_nodes()));
    int row = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string xs, res, ims;
        if (!std::getline(ss, xs, ',') || !std::getline(ss, res, ','))
            throw std::invalid_argument("gridfunction csv: malformed row " +
                                        std::to_string(row + 1));
        std::getline(ss, ims, ',');
        const double x = std::stod(xs);
        const double re = std::stod(res);
        const double im = ims.empty() ? 0.0 : std::stod(ims);
        if (row >= grid.n_nodes())
            throw std::invalid_argument("gridfunction csv: more rows than grid nodes");
        if (std::abs(x - grid.node(row)) > 1e-9 * std::max(1.0, std::abs(grid.node(row))))
            throw std::invalid_argument("gridfunction csv: row " + std::to_string(row + 1) +
                                        " x = " + xs + " does not match grid node " +
                                        format_double(grid.node(row)));
        vals.emplace_back(re, im);
        ++row;
    }
    if (row != grid.n_nodes())
        throw std::invalid_argument("gridfunction csv: expected " +
                                    std::to_string(grid.n_nodes()) + " rows, got " +
                                    std::to_string(row));
    return GridFunction(grid, std::move(vals));
}

// ---------------------------------------------------------------------------
// JSON forms (used by the CLI's --format json and metadata output).
// ---------------------------------------------------------------------------

inline Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline Json gridfunction_json(const GridFunction& f) {
    Json xs = Json::array(), re = Json::array(), im = Json::array();
    for (int i = 0; i < f.size(); ++i) {
        xs.push_back(f.grid().node(i));
        re.push_back(f[i].real());
        im.push_back(f[i].imag());
    }
    return Json{{"grid", grid_json(f.grid())}, {"x", xs}, {"re", re}, {"im", im}};
}

inline Json trajectory_json(const SphereTrajectory& t) {
    Json xs = Json::array(), re = Json::array(), im = Json::array(),
         inf = Json::array(), step = Json::array();
    for (int i = 0; i < t.grid.n_nodes(); ++i) {
        const SpherePoint& p = t.points[static_cast<size_t>(i)];
        xs.push_back(t.grid.node(i));
        if (p.is_infinity()) {
            re.push_back(nullptr);
            im.push_back(nullptr);
            inf.push_back(1);
        } else {
            re.push_back(p.value().real());
            im.push_back(p.value().imag());
            inf.push_back(0);
        }
        step.push_back(t.chordal_steps[static_cast<size_t>(i)]);
    }
    return Json{{"grid", grid_json(t.grid)},
                {"classification", to_string(t.classification)},
                {"max_chordal_step", t.max_chordal_step},
                {"x", xs}, {"re", re}, {"im", im},
                {"is_infinity", inf}, {"chordal_step", step}};
}

inline Json comparison_json(const OracleComparison& c) {
    Json blowups = Json::array();
    for (const BlowupEvent& ev : c.blowups)
        blowups.push_back(Json{{"x", ev.x}, {"direction", ev.direction}});
    return Json{{"verdict", to_string(c.verdict)},
                {"max_chordal_gap", c.max_chordal_gap},
                {"worst_node", c.worst_node},
                {"worst_x", c.worst_x},
                {"compared_nodes", c.compared_nodes},
                {"oracle_blowup", c.oracle_blowup},
                {"blowups", blowups},
                {"series_infinity_count", c.series_infinity_count}};
}

}  // namespace bivexp
