#include "gkflow/errors.hpp"
#include "gkflow/lie_gk.hpp"
#include "gkflow/scenarios.hpp"
#include "gkflow/suites.hpp"
#include "gkflow_cli/app.hpp"
#include "gkflow_cli/scenario_file.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace gkflow::cli {

namespace {

using nlohmann::ordered_json;

constexpr const char* kCoordNames[] = {"x1", "y1", "x2", "y2", "x3", "y3"};

/// Shortest round-trip text for a double; non-finite values become JSON null upstream.
std::string fmt(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << content;
}

void write_json(const std::filesystem::path& path, const ordered_json& doc) { write_file(path, doc.dump(2) + "\n"); }

ordered_json to_json(const suites::SuiteReport& report) {
    ordered_json checks = ordered_json::array();
    for (const auto& c : report.checks)
        checks.push_back({{"name", c.name},
                          {"pass", c.pass()},
                          {"max_residual", num(c.residual)},
                          {"tolerance", c.tolerance},
                          {"samples", c.samples},
                          {"failures", c.failures},
                          {"detail", c.detail}});
    return {{"suite", report.suite}, {"pass", report.pass()}, {"checks", checks}};
}

void print_suite(const suites::SuiteReport& report, std::ostream& out) {
    for (const auto& c : report.checks)
        out << (c.pass() ? "PASS " : "FAIL ") << c.name << "  max=" << fmt(c.residual) << "  tol=" << fmt(c.tolerance)
            << "  samples=" << c.samples << (c.detail.empty() ? "" : "  " + c.detail) << "\n";
    out << report.suite << ": " << (report.pass() ? "all invariants hold" : "verification failed") << "\n";
}

ordered_json to_json(const flow::ResidualReport& r) {
    return {{"name", r.name}, {"pass", r.pass}, {"max_residual", num(r.max_residual)},
            {"max_magnitude", num(r.max_magnitude)}, {"points", r.points}};
}

ordered_json weight_json(const lie::Weight& w) { return ordered_json(w); }

ordered_json root_json(const lie::RootDatum& rd) {
    ordered_json out{{"name", rd.name},
                     {"rank", rd.rank},
                     {"cartan", rd.cartan},
                     {"positive_roots", rd.positive},
                     {"valid", lie::validate_root_datum(rd)},
                     {"products_of_A1", lie::classify_products_of_A1(rd)},
                     {"root_sum_criterion", lie::root_sum_criterion(rd)}};
    if (const auto w = lie::root_sum_witness(rd)) out["witness"] = {{"alpha", w->alpha}, {"beta", w->beta}};
    return out;
}

std::string gauss_text(const lie::GaussRational& g) {
    std::ostringstream out;
    out << g.re.numerator() << "/" << g.re.denominator() << " + " << g.im.numerator() << "/" << g.im.denominator() << "i";
    return out.str();
}

struct GroupSpec {
    int n_u1 = 0;
    int m_su2 = 0;
    std::string extra;
};

GroupSpec parse_group(const std::string& text) {
    GroupSpec g;
    std::stringstream in(text);
    std::string token;
    bool any = false;
    while (std::getline(in, token, ',')) {
        token.erase(0, token.find_first_not_of(' '));
        token.erase(token.find_last_not_of(' ') + 1);
        if (token.empty()) throw InputError("--group has an empty factor");
        any = true;
        const auto colon = token.find(':');
        if (colon == std::string::npos) {
            g.extra = g.extra.empty() ? token : g.extra + "x" + token;
            continue;
        }
        const std::string kind = token.substr(0, colon);
        const std::string count = token.substr(colon + 1);
        if (count.empty() || count.find_first_not_of("0123456789") != std::string::npos || count.size() > 3)
            throw InputError("--group factor '" + token + "' needs a small nonnegative count");
        const int c = std::stoi(count);
        if (kind == "u1") g.n_u1 += c;
        else if (kind == "su2") g.m_su2 += c;
        else throw InputError("--group factor kind '" + kind + "' is not u1 or su2");
    }
    if (!any) throw InputError("--group is empty");
    return g;
}

}  // namespace

void validate(const RunConfig& c) {
    const Overrides& o = c.overrides;
    if (o.grid && (*o.grid < 2 || *o.grid > 33)) throw InputError("--grid must be between 2 and 33");
    if (o.h && !(*o.h > 0.0 && *o.h < 1.0)) throw InputError("--h must lie in (0, 1)");
    if (o.dt && !(*o.dt > 0.0 && *o.dt < 1.0)) throw InputError("--dt must lie in (0, 1)");
    if (o.tol && !(*o.tol > 0.0)) throw InputError("--tol must be positive");
    if (o.t_schedule)
        for (double t : *o.t_schedule)
            if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("--t must be a nonnegative number");
    if (c.n < 1 || c.n > 4) throw InputError("--n must be between 1 and 4");
    if (c.samples < 0) throw InputError("--samples must be nonnegative");
    if (!(c.t_hi > 0.0)) throw InputError("--t-hi must be positive");
    if (c.command == "flow" && !c.input) throw InputError("flow needs --scenario");
    if (c.command == "lie" && c.group.empty() && c.roots.empty() && !c.scan_table)
        throw InputError("lie needs --group, --roots or --scan-table");
    if (!c.y.empty() && c.group.empty()) throw InputError("--Y needs --group");
    if (std::filesystem::exists(c.out_dir) && !std::filesystem::is_directory(c.out_dir))
        throw InputError("--out '" + c.out_dir.string() + "' exists and is not a directory");
}

ExitCode cmd_algebra_check(const RunConfig& c, std::ostream& out) {
    suites::AlgebraOptions opt;
    opt.n_max = c.n;
    if (c.samples > 0) opt.samples = c.samples;
    if (c.overrides.seed) opt.seed = *c.overrides.seed;
    if (c.overrides.tol) opt.tol = *c.overrides.tol;
    if (c.inject_sign_flip) opt.fault = suites::Fault::sign_flip;
    const suites::SuiteReport report = suites::algebra_suite(opt);
    ordered_json doc = to_json(report);
    doc["config"] = {{"n_max", opt.n_max}, {"samples", opt.samples}, {"seed", opt.seed}, {"tol", opt.tol},
                     {"fault", c.inject_sign_flip ? "sign-flip" : "none"}};
    write_json(c.out_dir / "algebra.json", doc);
    print_suite(report, out);
    return report.pass() ? ExitCode::ok : ExitCode::verification_failure;
}

ExitCode cmd_dictionary(const RunConfig& c, std::ostream& out) {
    suites::DictionaryOptions opt;
    opt.dims.clear();
    for (int n = 1; n <= c.n; ++n) opt.dims.push_back(n);
    if (c.samples > 0) opt.samples = c.samples;
    if (c.overrides.seed) opt.seed = *c.overrides.seed;
    if (c.overrides.tol) opt.roundtrip_tol = opt.poisson_tol = *c.overrides.tol;
    opt.degenerate = c.degenerate;
    const suites::SuiteReport report = suites::dictionary_suite(opt);
    ordered_json doc = to_json(report);
    doc["config"] = {{"dims", opt.dims},
                     {"samples", opt.samples},
                     {"seed", opt.seed},
                     {"roundtrip_tol", opt.roundtrip_tol},
                     {"poisson_tol", opt.poisson_tol},
                     {"degenerate", opt.degenerate}};
    write_json(c.out_dir / "dictionary.json", doc);
    print_suite(report, out);
    return report.pass() ? ExitCode::ok : ExitCode::verification_failure;
}

ExitCode cmd_flow(const RunConfig& c, std::ostream& out) {
    ScenarioFile file = load_scenario(*c.input);
    flow::Scenario& s = file.scenario;
    if (c.overrides.grid) s.grid.assign(s.domain.dim(), *c.overrides.grid);
    if (c.overrides.h) s.numerics.h = *c.overrides.h;
    if (c.overrides.dt) s.numerics.dt = *c.overrides.dt;
    if (c.overrides.tol) {
        s.tolerances.nijenhuis = s.tolerances.torsion = s.tolerances.flow_identity = *c.overrides.tol;
        s.tolerances.lie = s.tolerances.pullback = *c.overrides.tol;
    }
    const std::vector<double> times = c.overrides.t_schedule ? *c.overrides.t_schedule : file.t_schedule;
    const std::vector<Vec> grid = flow::scenario_grid(s);
    const int dim = s.domain.dim();

    std::ostringstream csv;
    csv << "t,point_index";
    for (int k = 0; k < dim; ++k) csv << "," << kCoordNames[k];
    csv << ",min_eig_g_t,nijenhuis_plus,nijenhuis_minus,torsion_plus_residual,torsion_minus_residual,"
           "flow_identity_residual,dH_residual\n";

    bool all_pass = true;
    ordered_json runs = ordered_json::array();
    for (double t : times) {
        ordered_json run{{"t", t}};
        try {
            const flow::DeformedStructure d = flow::deform(s, t, grid);
            const flow::BihermitianReport r = flow::verify_bihermitian(s, d);
            for (std::size_t i = 0; i < r.points.size(); ++i) {
                const auto& p = r.points[i];
                csv << fmt(t) << "," << i;
                for (int k = 0; k < dim; ++k) csv << "," << fmt(p.x(k));
                csv << "," << fmt(p.min_eig_g_t) << "," << fmt(p.nijenhuis_plus) << "," << fmt(p.nijenhuis_minus) << ","
                    << fmt(p.torsion_plus) << "," << fmt(p.torsion_minus) << "," << fmt(p.flow_identity) << ","
                    << fmt(p.dh) << "\n";
            }
            std::ostringstream statement;
            statement << (r.positive ? "positive" : "not positive") << " on grid with margin " << fmt(r.lipschitz_margin);
            run["min_eig_g_t"] = num(r.min_eig);
            run["lipschitz_margin"] = num(r.lipschitz_margin);
            run["certificate"] = statement.str();
            run["checks"] = {{"positivity", r.positive},
                             {"nijenhuis", r.max_nijenhuis <= s.tolerances.nijenhuis},
                             {"torsion", r.max_torsion <= s.tolerances.torsion},
                             {"dH", r.max_dh <= s.tolerances.dh},
                             {"flow_identity", r.max_flow_identity <= s.tolerances.flow_identity},
                             {"compatibility", r.max_compatibility <= s.tolerances.compatibility}};
            run["max_nijenhuis"] = num(r.max_nijenhuis);
            run["max_torsion"] = num(r.max_torsion);
            run["max_dH"] = num(r.max_dh);
            run["max_flow_identity"] = num(r.max_flow_identity);
            run["max_compatibility"] = num(r.max_compatibility);
            bool pass = r.pass;
            ordered_json pullback = ordered_json::array();
            for (const auto& p : flow::check_pullback_consistency(s, t, grid)) {
                pullback.push_back(to_json(p));
                pass = pass && p.pass;
            }
            run["pullback"] = pullback;
            run["pass"] = pass;
            all_pass = all_pass && pass;
            out << (pass ? "PASS " : "FAIL ") << s.name << " t=" << fmt(t) << "  min_eig=" << fmt(r.min_eig)
                << "  margin=" << fmt(r.lipschitz_margin) << "  nijenhuis=" << fmt(r.max_nijenhuis)
                << "  torsion=" << fmt(r.max_torsion) << "  dH=" << fmt(r.max_dh)
                << "  flow_identity=" << fmt(r.max_flow_identity) << "\n";
        } catch (const Error& e) {
            run["error"] = e.what();
            run["pass"] = false;
            all_pass = false;
            out << "FAIL " << s.name << " t=" << fmt(t) << "  " << e.what() << "\n";
        }
        runs.push_back(run);
    }

    ordered_json lie = ordered_json::array();
    for (const auto& r : flow::check_lie_identities(s, grid)) {
        lie.push_back(to_json(r));
        all_pass = all_pass && r.pass;
        out << (r.pass ? "PASS " : "FAIL ") << r.name << "  max=" << fmt(r.max_residual) << "  points=" << r.points << "\n";
    }

    const flow::WindowResult w = flow::positivity_window(s, grid, c.t_hi);
    ordered_json window{{"t_hi", c.t_hi},
                        {"t_max", w.t_max},
                        {"bracket", {w.bracket_low, w.bracket_high}},
                        {"hit_upper_bound", w.hit_upper_bound},
                        {"evaluations", w.evaluations}};
    if (c.window) out << "t_max=" << fmt(w.t_max) << (w.hit_upper_bound ? " (upper bound reached)" : "") << "\n";

    ordered_json tol{{"nijenhuis", s.tolerances.nijenhuis}, {"torsion", s.tolerances.torsion},
                     {"dH", s.tolerances.dh},               {"flow_identity", s.tolerances.flow_identity},
                     {"lie", s.tolerances.lie},             {"pullback", s.tolerances.pullback},
                     {"compatibility", s.tolerances.compatibility}, {"collar", s.tolerances.collar}};
    ordered_json doc{{"scenario", s.name},
                     {"description", s.description},
                     {"grid", {{"counts", s.grid}, {"inset", s.grid_inset}, {"points", grid.size()}}},
                     {"numerics", {{"h", s.numerics.h}, {"dt", s.numerics.dt}, {"panels", s.numerics.panels}}},
                     {"tolerances", tol},
                     {"runs", runs},
                     {"lie_identities", lie},
                     {"window", window},
                     {"pass", all_pass}};
    write_file(c.out_dir / ("flow_" + s.name + ".csv"), csv.str());
    write_json(c.out_dir / ("flow_" + s.name + ".json"), doc);
    return all_pass ? ExitCode::ok : ExitCode::verification_failure;
}

ExitCode cmd_lie(const RunConfig& c, std::ostream& out) {
    ordered_json doc = ordered_json::object();
    bool consistent = true;

    if (c.scan_table) {
        ordered_json table = ordered_json::array();
        for (const auto& rd : lie::supported_table()) {
            const bool criterion = lie::root_sum_criterion(rd);
            const bool a1 = lie::classify_products_of_A1(rd);
            consistent = consistent && criterion == a1 && lie::validate_root_datum(rd);
            table.push_back(root_json(rd));
            out << rd.name << "  |R+|=" << rd.positive.size() << "  root_sum=" << (criterion ? "true" : "false")
                << "  products_of_A1=" << (a1 ? "true" : "false") << (criterion == a1 ? "" : "  MISMATCH") << "\n";
        }
        doc["scan_table"] = table;
        doc["equivalence_holds"] = consistent;
    }

    if (!c.roots.empty()) {
        lie::RootDatum rd;
        try {
            rd = lie::root_datum(c.roots);
        } catch (const InvalidStructureError& e) {
            throw InputError(std::string("--roots: ") + e.what());
        }
        ordered_json entry = root_json(rd);
        const bool criterion = lie::root_sum_criterion(rd);
        // Matrix-model cross-check: the torus conormal bracket is degenerate exactly when the criterion holds.
        if (rd.name == "A1" || rd.name == "A2" || rd.name == "B2" || rd.name == "G2") {
            const lie::FloatAlgebra a = lie::float_algebra(rd.name);
            const bool degenerate = lie::degeneracy_test(lie::torus_conormal_bracket(a), 1e-9).degenerate;
            entry["matrix_model"] = {{"dim", a.dim},
                                     {"positive_roots", a.root_vectors.size()},
                                     {"jacobi_defect", lie::jacobi_defect(a)},
                                     {"conormal_degenerate", degenerate},
                                     {"positive_closure", lie::positive_closure(a)}};
            consistent = consistent && degenerate == criterion &&
                         a.root_vectors.size() == rd.positive.size() && lie::positive_closure(a);
        }
        doc["roots"] = entry;
        out << rd.name << ": root_sum_criterion=" << (criterion ? "true" : "false");
        if (const auto w = lie::root_sum_witness(rd)) {
            out << "  witness alpha=" << weight_json(w->alpha).dump() << " beta=" << weight_json(w->beta).dump();
        }
        out << "\n";
    }

    if (!c.group.empty()) {
        const GroupSpec g = parse_group(c.group);
        const lie::CompactAlgebra a = lie::build_compact_algebra(g.n_u1, g.m_su2);
        lie::YSpec y;
        if (!c.y.empty()) {
            try {
                y = lie::parse_y_spec(c.y, a);
            } catch (const ParseError& e) {
                throw InputError(std::string("--Y: ") + e.what());
            }
        }
        lie::EligibilityReport r;
        try {
            r = lie::blowup_eligibility(g.n_u1, g.m_su2, y, g.extra);
        } catch (const InvalidStructureError& e) {
            throw InputError(std::string("--group: ") + e.what());
        }
        const lie::AlgebraReport checks = lie::validate_algebra(a);
        consistent = consistent && checks.exact();
        ordered_json entry{{"n_u1", g.n_u1},
                           {"m_su2", g.m_su2},
                           {"extra_roots", g.extra},
                           {"Y", {{"y_prime_pairs", y.y_prime_pairs}, {"circle_factors", y.circle_factors}}},
                           {"algebra_exact", checks.exact()},
                           {"verdict", std::string(lie::to_string(r.verdict))},
                           {"detail", r.detail},
                           {"conormal_zero", r.conormal_zero},
                           {"conormal_degenerate", r.conormal_degenerate}};
        if (r.witness) entry["witness"] = {{"alpha", r.witness->alpha}, {"beta", r.witness->beta}};
        if (r.conormal) {
            consistent = consistent && r.conormal->closed && r.conormal->complex_linear;
            ordered_json nonzero = ordered_json::array();
            const auto& b = r.conormal->bracket;
            for (int i = 0; i < b.dim; ++i)
                for (int j = 0; j < b.dim; ++j)
                    for (int k = 0; k < b.dim; ++k)
                        if (!b(i, j, k).is_zero()) nonzero.push_back({{"i", i}, {"j", j}, {"k", k}, {"c", gauss_text(b(i, j, k))}});
            entry["conormal"] = {{"complex_dim", b.dim},
                                 {"closed", r.conormal->closed},
                                 {"complex_linear", r.conormal->complex_linear},
                                 {"nonzero_constants", nonzero}};
        }
        doc["eligibility"] = entry;
        out << "group u1:" << g.n_u1 << ",su2:" << g.m_su2 << (g.extra.empty() ? "" : "," + g.extra)
            << "  verdict=" << lie::to_string(r.verdict) << "  (" << r.detail << ")\n";
    }

    doc["consistent"] = consistent;
    write_json(c.out_dir / "lie.json", doc);
    return consistent ? ExitCode::ok : ExitCode::verification_failure;
}

}  // namespace gkflow::cli
