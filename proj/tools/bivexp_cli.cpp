// Command-line front end: every solver in the library behind one binary,
// emitting plot-ready CSV or JSON.
//
// Exit codes: 0 success, 1 usage error, 2 solver rejection, 3 self-check
// failure.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bivexp/bivexp.hpp"

namespace {

using namespace bivexp;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RangeSpec {
    double lo = 0.0, hi = 0.0;
    int cells = 0;
};

RangeSpec parse_range(const std::string& text) {
    RangeSpec r;
    const size_t p1 = text.rfind(':');
    const size_t p0 = p1 == std::string::npos ? std::string::npos
                                              : text.rfind(':', p1 - 1);
    if (p0 == std::string::npos || p1 == std::string::npos || p0 == 0)
        throw UsageError("range must be lo:hi:cells, got '" + text + "'");
    try {
        r.lo = std::stod(text.substr(0, p0));
        r.hi = std::stod(text.substr(p0 + 1, p1 - p0 - 1));
        r.cells = std::stoi(text.substr(p1 + 1));
    } catch (const std::exception&) {
        throw UsageError("range must be lo:hi:cells, got '" + text + "'");
    }
    return r;
}

/// Builds the grid, bumping the cell count upward to the nearest count that
/// puts 0 on a node (with a warning) rather than erroring.
Grid make_grid(const RangeSpec& r) {
    if (r.cells < 1) throw UsageError("range: cell count must be >= 1");
    if (!(r.lo < r.hi)) throw UsageError("range: need lo < hi");
    if (!(r.lo <= 0.0 && 0.0 <= r.hi))
        throw UsageError("range: the interval must contain 0");
    for (int cells = r.cells; cells <= r.cells + 1000000; ++cells) {
        const double h = (r.hi - r.lo) / cells;
        const double k = -r.lo / h;
        if (std::abs(k - std::llround(k)) < 1e-9 * cells) {
            if (cells != r.cells)
                std::cerr << "warning: adjusted cell count " << r.cells << " -> "
                          << cells << " so that 0 is a grid node\n";
            return Grid::over(r.lo, r.hi, cells);
        }
    }
    throw UsageError("range: no nearby cell count puts 0 on a node; "
                     "adjust the interval endpoints");
}

Complex parse_complex(const std::string& text) {
    std::string s = text;
    const size_t comma = s.find(',');
    try {
        if (comma == std::string::npos) return Complex(std::stod(s), 0.0);
        return Complex(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
    } catch (const std::exception&) {
        throw UsageError("expected a complex number as re[,im], got '" + text + "'");
    }
}

SpherePoint parse_sphere_point(const std::string& text) {
    if (text == "inf" || text == "infinity") return SpherePoint::infinity();
    return SpherePoint(parse_complex(text));
}

/// Coefficient spec: a named builtin (zero | one | x), a CSV file path
/// (*.csv with columns x,re,im), or an expression in x.
GridFunction make_coefficient(const std::string& spec, const Grid& grid) {
    if (spec == "zero") return GridFunction::zero(grid);
    if (spec == "one") return GridFunction::constant(grid, Complex(1.0));
    if (spec == "x")
        return sample(std::function<Complex(double)>(
                          [](double x) { return Complex(x); }),
                      grid);
    if (spec.size() > 4 && spec.substr(spec.size() - 4) == ".csv") {
        std::ifstream in(spec);
        if (!in) throw UsageError("cannot open coefficient file '" + spec + "'");
        return read_gridfunction_csv(in, grid);
    }
    try {
        const Expression e = Expression::parse(spec);
        return sample(e.fn(), grid);
    } catch (const ExprError& err) {
        throw UsageError("in coefficient '" + spec + "': " + err.what());
    }
}

struct OutputSink {
    std::string path = "-";
    std::ofstream file;

    std::ostream& stream() {
        if (path == "-") return std::cout;
        if (!file.is_open()) {
            file.open(path, std::ios::binary);
            if (!file) throw std::runtime_error("cannot open output '" + path + "'");
        }
        return file;
    }
};

struct CommonOpts {
    std::string range;
    double tol = 1e-10;
    std::string out = "-";
    std::string format = "csv";
    std::string meta;
    bool timestamp = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_tol = true) {
    cmd->add_option("--range", o.range, "grid as lo:hi:cells (0 must be a node)")
        ->required();
    if (with_tol) cmd->add_option("--tol", o.tol, "series tail tolerance");
    cmd->add_option("--out", o.out, "output path ('-' for stdout)");
    cmd->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--meta", o.meta, "write run metadata JSON to this path");
    cmd->add_flag("--timestamp", o.timestamp,
                  "include a timestamp in metadata (off keeps runs byte-identical)");
}

Json base_meta(const std::string& command, const Grid& grid, const CommonOpts& o) {
    Json meta{{"command", command},
              {"version", kVersion},
              {"grid", grid_json(grid)},
              {"tol", o.tol},
              {"format", o.format}};
    if (o.timestamp) {
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        meta["timestamp_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    }
    return meta;
}

void emit(const CommonOpts& o, const std::string& csv_payload, Json data_json,
          Json meta) {
    OutputSink sink{o.out, {}};
    if (o.format == "csv") {
        sink.stream() << csv_payload;
    } else {
        data_json["meta"] = meta;
        sink.stream() << data_json.dump(2) << '\n';
    }
    if (!o.meta.empty()) {
        std::ofstream mf(o.meta, std::ios::binary);
        if (!mf) throw std::runtime_error("cannot open meta output '" + o.meta + "'");
        mf << meta.dump(2) << '\n';
    }
}

int run(int argc, char** argv) {
    CLI::App app{"explicit Riccati / second-order linear ODE solutions via "
                 "bivariate exponential series"};
    app.require_subcommand(1);

    // --- bivexp ---
    CommonOpts bo;
    std::string bf = "one", bg = "one";
    auto* cb = app.add_subcommand("bivexp", "bivariate exponential E, C, S of (f, g)");
    cb->add_option("--f", bf, "first coefficient (expression | builtin | csv)");
    cb->add_option("--g", bg, "second coefficient");
    add_common(cb, bo);

    // --- matrix ---
    CommonOpts mo;
    std::string mf = "zero", mg = "zero", mh = "zero";
    double m_det_tol = -1.0;
    auto* cm = app.add_subcommand("matrix", "solution matrix path of (f, g, h)");
    cm->add_option("--f", mf);
    cm->add_option("--g", mg);
    cm->add_option("--h", mh);
    cm->add_option("--det-tol", m_det_tol, "det invariant tolerance (default 100*tol)");
    add_common(cm, mo);

    // --- riccati ---
    CommonOpts ro;
    std::string rf = "zero", rg = "zero", rh = "zero", ry0 = "0";
    double r_det_tol = -1.0;
    auto* cr = app.add_subcommand("riccati", "solve y' = f y^2 + g y + h");
    cr->add_option("--f", rf);
    cr->add_option("--g", rg);
    cr->add_option("--h", rh);
    cr->add_option("--y0", ry0, "initial value re[,im] or 'inf'");
    cr->add_option("--det-tol", r_det_tol);
    add_common(cr, ro);

    // --- linear ---
    CommonOpts lo;
    std::string la = "zero", lb = "zero", ly0 = "1", lyp0 = "0";
    auto* cl = app.add_subcommand("linear", "solve y'' + alpha y' + beta y = 0");
    cl->add_option("--alpha", la);
    cl->add_option("--beta", lb);
    cl->add_option("--y0", ly0);
    cl->add_option("--yp0", lyp0);
    add_common(cl, lo);

    // --- airy ---
    CommonOpts ao;
    auto* ca = app.add_subcommand("airy", "Airy functions Ai, Bi and the series bases");
    add_common(ca, ao);

    // --- schrodinger ---
    CommonOpts so;
    std::string sq = "zero", slam = "0", sy0 = "1", syp0 = "0";
    auto* cs = app.add_subcommand("schrodinger", "solve -y'' + q y = lambda y");
    cs->add_option("--q", sq);
    cs->add_option("--lambda", slam);
    cs->add_option("--y0", sy0);
    cs->add_option("--yp0", syp0);
    add_common(cs, so);

    // --- miura ---
    CommonOpts uo;
    std::string uq = "zero";
    double uy0 = 0.0;
    std::vector<double> uscan;
    double ucheck = -1.0;
    auto* cu = app.add_subcommand("miura", "invert the Miura transform for real q");
    cu->add_option("--q", uq);
    cu->add_option("--y0", uy0, "initial value alpha(0)");
    cu->add_option("--scan", uscan, "classify these initial values as well");
    cu->add_option("--check-recon", ucheck,
                   "fail (exit 3) if max |alpha^2+alpha'-q| on valid nodes exceeds this");
    add_common(cu, uo);

    // --- singular-curve ---
    CommonOpts go;
    std::string gf = "zero", gg = "zero", gh = "zero";
    double gz = 1e-12;
    auto* cg = app.add_subcommand("singular-curve",
                                  "sample the singular curve -d/c of psi(f,g,h)");
    cg->add_option("--f", gf);
    cg->add_option("--g", gg);
    cg->add_option("--h", gh);
    cg->add_option("--zero-threshold", gz, "|c| at or below this is a gap");
    add_common(cg, go);

    // --- oracle-compare ---
    CommonOpts oo;
    std::string of = "zero", og = "zero", oh = "zero", oy0 = "0";
    double orel = 1e-9, oabs = 1e-12, omaxgap = -1.0;
    auto* co = app.add_subcommand(
        "oracle-compare", "series solution vs adaptive RK with a discrepancy summary");
    co->add_option("--f", of);
    co->add_option("--g", og);
    co->add_option("--h", oh);
    co->add_option("--y0", oy0);
    co->add_option("--rel-tol", orel, "oracle relative tolerance");
    co->add_option("--abs-tol", oabs, "oracle absolute tolerance");
    co->add_option("--max-gap", omaxgap,
                   "fail (exit 3) if the chordal gap exceeds this and the verdict "
                   "is not expected-pole");
    add_common(co, oo);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (cb->parsed()) {
        const Grid grid = make_grid(parse_range(bo.range));
        const BivexpResult r =
            bivexp::bivexp(make_coefficient(bf, grid), make_coefficient(bg, grid), bo.tol);
        Json meta = base_meta("bivexp", grid, bo);
        meta["terms_used"] = r.terms_used;
        meta["tail_bound"] = r.tail_bound;
        meta["t_bound"] = r.t_bound;
        std::ostringstream csv;
        write_bivexp_csv(csv, r);
        emit(bo, csv.str(),
             Json{{"E", gridfunction_json(r.E)},
                  {"C", gridfunction_json(r.C)},
                  {"S", gridfunction_json(r.S)}},
             meta);
        return 0;
    }
    if (cm->parsed()) {
        const Grid grid = make_grid(parse_range(mo.range));
        const MatPath m =
            solution_matrix(make_coefficient(mf, grid), make_coefficient(mg, grid),
                            make_coefficient(mh, grid), mo.tol, m_det_tol);
        Json meta = base_meta("matrix", grid, mo);
        meta["det_tol"] = m.det_tol;
        meta["max_det_residual"] = m.max_det_residual;
        std::ostringstream csv;
        write_matpath_csv(csv, m);
        emit(mo, csv.str(),
             Json{{"a", gridfunction_json(m.a)},
                  {"b", gridfunction_json(m.b)},
                  {"c", gridfunction_json(m.c)},
                  {"d", gridfunction_json(m.d)}},
             meta);
        return 0;
    }
    if (cr->parsed()) {
        const Grid grid = make_grid(parse_range(ro.range));
        const SpherePoint y0 = parse_sphere_point(ry0);
        const CoeffTriple coeffs(make_coefficient(rf, grid), make_coefficient(rg, grid),
                                 make_coefficient(rh, grid));
        const SphereTrajectory t = riccati_solve(coeffs, y0, ro.tol, r_det_tol);
        Json meta = base_meta("riccati", grid, ro);
        meta["y0"] = ry0;
        meta["classification"] = to_string(t.classification);
        meta["max_chordal_step"] = t.max_chordal_step;
        meta["infinity_nodes"] = t.infinity_nodes.size();
        meta["f_small_fraction"] = t.f_small_fraction;
        std::ostringstream csv;
        write_trajectory_csv(csv, t);
        emit(ro, csv.str(), trajectory_json(t), meta);
        return 0;
    }
    if (cl->parsed()) {
        const Grid grid = make_grid(parse_range(lo.range));
        const LinearSolution s =
            linear_solve(make_coefficient(la, grid), make_coefficient(lb, grid),
                         parse_complex(ly0), parse_complex(lyp0), lo.tol);
        Json meta = base_meta("linear", grid, lo);
        std::ostringstream csv;
        write_linear_csv(csv, s);
        emit(lo, csv.str(),
             Json{{"y", gridfunction_json(s.y)}, {"y_prime", gridfunction_json(s.y_prime)}},
             meta);
        return 0;
    }
    if (ca->parsed()) {
        const Grid grid = make_grid(parse_range(ao.range));
        const AiryTable t = airy(grid, ao.tol);
        Json meta = base_meta("airy", grid, ao);
        meta["terms_used"] = t.terms_used;
        meta["tail_bound"] = t.tail_bound;
        std::ostringstream csv;
        write_airy_csv(csv, t);
        emit(ao, csv.str(),
             Json{{"Ai", gridfunction_json(t.Ai)},
                  {"Bi", gridfunction_json(t.Bi)},
                  {"u1", gridfunction_json(t.u1)},
                  {"u2", gridfunction_json(t.u2)}},
             meta);
        return 0;
    }
    if (cs->parsed()) {
        const Grid grid = make_grid(parse_range(so.range));
        const LinearSolution s =
            schrodinger_solve(make_coefficient(sq, grid), parse_complex(slam),
                              parse_complex(sy0), parse_complex(syp0), so.tol);
        Json meta = base_meta("schrodinger", grid, so);
        meta["lambda"] = slam;
        std::ostringstream csv;
        write_linear_csv(csv, s);
        emit(so, csv.str(),
             Json{{"y", gridfunction_json(s.y)}, {"y_prime", gridfunction_json(s.y_prime)}},
             meta);
        return 0;
    }
    if (cu->parsed()) {
        const Grid grid = make_grid(parse_range(uo.range));
        const GridFunction q = make_coefficient(uq, grid);
        MiuraResult r = miura_invert(q, uy0, uo.tol);
        if (!uscan.empty()) r.singular_scan = miura_singular_scan(q, uscan, uo.tol);
        Json meta = base_meta("miura", grid, uo);
        meta["y0"] = uy0;
        meta["classification"] = to_string(r.alpha.classification);
        double worst = 0.0;
        for (int i = 0; i < grid.n_nodes(); ++i)
            if (r.recon_valid[static_cast<size_t>(i)])
                worst = std::max(worst, std::abs(r.q_reconstructed[i] - q[i]));
        meta["max_reconstruction_residual"] = worst;
        if (!r.singular_scan.empty()) {
            Json scan = Json::array();
            for (const auto& e : r.singular_scan)
                scan.push_back(Json{{"y0", e.y0},
                                    {"classification", to_string(e.classification)}});
            meta["scan"] = scan;
            meta["scan_contiguous"] = scan_contiguous(r.singular_scan);
        }
        std::ostringstream csv;
        write_miura_csv(csv, r, q);
        Json data{{"alpha", trajectory_json(r.alpha)},
                  {"q", gridfunction_json(q)},
                  {"q_reconstructed", gridfunction_json(r.q_reconstructed)}};
        emit(uo, csv.str(), data, meta);
        if (ucheck >= 0.0 && worst > ucheck) {
            std::cerr << "self-check failed: reconstruction residual " << worst
                      << " exceeds " << ucheck << "\n";
            return 3;
        }
        return 0;
    }
    if (cg->parsed()) {
        const Grid grid = make_grid(parse_range(go.range));
        const MatPath m =
            solution_matrix(make_coefficient(gf, grid), make_coefficient(gg, grid),
                            make_coefficient(gh, grid), go.tol);
        const SingularCurveSample s = singular_curve(m, gz);
        Json meta = base_meta("singular-curve", grid, go);
        meta["zero_threshold"] = gz;
        meta["points"] = s.values.size();
        meta["gaps"] = s.gap_nodes.size();
        std::ostringstream csv;
        write_singular_curve_csv(csv, s);
        Json xs = Json::array(), re = Json::array(), im = Json::array();
        for (size_t k = 0; k < s.values.size(); ++k) {
            xs.push_back(s.xs[k]);
            re.push_back(s.values[k].real());
            im.push_back(s.values[k].imag());
        }
        emit(go, csv.str(), Json{{"x", xs}, {"re", re}, {"im", im}}, meta);
        return 0;
    }
    if (co->parsed()) {
        const Grid grid = make_grid(parse_range(oo.range));
        const SpherePoint y0 = parse_sphere_point(oy0);
        if (y0.is_infinity())
            throw UsageError("oracle-compare: y0 must be finite for the RK oracle");
        const CoeffTriple coeffs(make_coefficient(of, grid), make_coefficient(og, grid),
                                 make_coefficient(oh, grid));
        const SphereTrajectory t = riccati_solve(coeffs, y0, oo.tol);
        OracleOptions opts;
        opts.rel_tol = orel;
        opts.abs_tol = oabs;
        const RkScalarResult rk = rk_riccati(coeffs, y0.value(), opts);
        const double gap_tol = omaxgap >= 0.0 ? omaxgap : 1e-5;
        const OracleComparison cmp = compare_riccati(t, rk, gap_tol);
        Json meta = base_meta("oracle-compare", grid, oo);
        meta["rel_tol"] = orel;
        meta["abs_tol"] = oabs;
        meta["series_classification"] = to_string(t.classification);
        Json summary = comparison_json(cmp);
        std::ostringstream csv;
        csv << "max_chordal_gap,worst_node,worst_x,verdict\n"
            << format_double(cmp.max_chordal_gap) << ',' << cmp.worst_node << ','
            << format_double(cmp.worst_x) << ',' << to_string(cmp.verdict) << '\n';
        emit(oo, csv.str(), summary, meta);
        if (omaxgap >= 0.0 && cmp.verdict == CompareVerdict::mismatch) {
            std::cerr << "self-check failed: verdict mismatch with max chordal gap "
                      << cmp.max_chordal_gap << "\n";
            return 3;
        }
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const ExprError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
