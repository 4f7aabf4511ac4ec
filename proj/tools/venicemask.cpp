// venicemask: drives the hypothesis suites, class-intersection checks, plug
// pipeline, and the full example verdicts, emitting JSON reports with CSV
// point sets and SVG figures.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "venice/branched1d.hpp"
#include "venice/cherryplug.hpp"
#include "venice/config.hpp"
#include "venice/report.hpp"
#include "venice/skew2d.hpp"
#include "venice/suspension.hpp"
#include "venice/svg.hpp"

namespace fs = std::filesystem;
using venice::report::json;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = "out";
    int workers = 1;
    uint64_t seed = 0;
    std::set<std::string> formats = {"json"};
    venice::config::Config cfg;
    venice::Tolerances tol;

    bool want(const std::string& f) const { return formats.count(f) > 0; }
};

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"run",
         {"n", "n_max", "eps", "grid_eps", "seed", "workers", "n_samples", "n_iters", "p_max",
          "leo_m_max", "preimage_n_max", "attractor_gen", "net_grid_eps", "net_n_max",
          "unstable_eps"}},
        {"tolerances",
         {"tol_root", "tol_lim", "tol_cover", "tol_quad", "tol_fix", "tol_ode", "tol_time",
          "n_deriv"}},
        {"plug", {"tau", "lambda_ss", "grid_n"}},
        {"output", {"dir", "format"}},
        {"map.*", {"*"}},
    };
    return s;
}

void load_config(Options& opt) {
    if (opt.config_path.empty()) return;
    std::ifstream in(opt.config_path);
    if (!in) throw venice::ConfigError("cannot open config: " + opt.config_path);
    opt.cfg = venice::config::Config::parse(in);
    venice::config::validate(opt.cfg, schema());
    auto& t = opt.tol;
    t.tol_root = opt.cfg.get_double("tolerances", "tol_root", t.tol_root);
    t.tol_lim = opt.cfg.get_double("tolerances", "tol_lim", t.tol_lim);
    t.tol_cover = opt.cfg.get_double("tolerances", "tol_cover", t.tol_cover);
    t.tol_quad = opt.cfg.get_double("tolerances", "tol_quad", t.tol_quad);
    t.tol_fix = opt.cfg.get_double("tolerances", "tol_fix", t.tol_fix);
    t.tol_ode = opt.cfg.get_double("tolerances", "tol_ode", t.tol_ode);
    t.tol_time = opt.cfg.get_double("tolerances", "tol_time", t.tol_time);
    t.n_deriv = opt.cfg.get_int("tolerances", "n_deriv", t.n_deriv);
    for (const char* k : {"tol_root", "tol_lim", "tol_cover", "tol_quad", "tol_fix", "tol_ode",
                          "tol_time"})
        if (opt.cfg.get_double("tolerances", k, 1.0) <= 0.0)
            throw venice::ConfigError(std::string("tolerance must be > 0: ") + k);
    opt.out_dir = opt.cfg.get_str("output", "dir", opt.out_dir);
}

venice::branched1d::BranchedIntervalMap map_or_default(
    const Options& opt, const std::string& name,
    venice::branched1d::BranchedIntervalMap (*def)()) {
    const auto* sec = opt.cfg.section("map." + name);
    return sec ? venice::config::parse_map(*sec) : def();
}

struct OutputSink {
    std::vector<std::pair<std::string, std::string>> files;
    void add(const std::string& rel, const std::string& content) { files.push_back({rel, content}); }
    void flush(const std::string& dir) {
        fs::create_directories(dir);
        for (const auto& [rel, content] : files) {
            std::ofstream o(fs::path(dir) / rel, std::ios::binary);
            o << content;
        }
    }
};

class Timer {
public:
    Timer() : t0_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point t0_;
};

void add_record(venice::report::DiagnosticsReport& rep, const std::string& name,
                const std::string& tag, bool pass, json witness, double ms) {
    rep.records.push_back({name, tag, pass, std::move(witness), ms});
}

json hyp_to_json(const venice::branched1d::HypothesisReport& h) {
    json j = json::object();
    for (const auto& e : h.entries) {
        json rec = json::object();
        rec["pass"] = e.pass;
        if (!e.witness.empty()) rec["witness"] = e.witness;
        j[e.name] = rec;
    }
    return j;
}

// -------------------------------------------------------------------------
// verify-1d

int cmd_verify_1d(const Options& opt, OutputSink& sink) {
    namespace b1 = venice::branched1d;
    venice::report::DiagnosticsReport rep;
    rep.command = "verify-1d";

    auto f = map_or_default(opt, "f", b1::default_f);
    auto fp = map_or_default(opt, "f_plus", b1::default_f_plus);
    auto fm = map_or_default(opt, "f_minus", b1::default_f_minus_base);

    struct { const char* name; const b1::BranchedIntervalMap* m; } maps[] = {
        {"f", &f}, {"f_plus", &fp}, {"f_minus", &fm}};
    for (const auto& [name, m] : maps) {
        Timer t;
        auto h = b1::verify_hypotheses(*m, opt.tol);
        add_record(rep, std::string("hypotheses_") + name, "(H1)", h.all_pass(), hyp_to_json(h),
                   t.ms());
    }

    {
        Timer t;
        b1::ArcLengthBudget budget;
        budget.seg1 = venice::Interval::closed(0.0, f.d1);
        budget.seg2 = venice::Interval::closed(f.d_star, 1.0);
        json w = json::object();
        bool ok = true;
        try {
            auto r1 = b1::verify_arclength_eps(f, fp, budget, opt.tol);
            auto r2 = b1::verify_arclength_eps(f, fm, budget, opt.tol);
            ok = r1.pass && r2.pass;
            w["plus"] = {{"base1", r1.base1}, {"plus1", r1.plus1},
                         {"base2", r1.base2}, {"plus2", r1.plus2}};
            w["minus"] = {{"base1", r2.base1}, {"plus1", r2.plus1},
                          {"base2", r2.base2}, {"plus2", r2.plus2}};
        } catch (const std::exception& e) {
            ok = false;
            w["error"] = e.what();
        }
        add_record(rep, "arclength_eps", "(H5)", ok, w, t.ms());
    }

    {
        Timer t;
        int m_max = opt.cfg.get_int("run", "leo_m_max", 40);
        auto m0 = b1::leo_check(fp, venice::Interval::open(0.0, 1.0), m_max, opt.tol);
        auto m1 = b1::leo_check(fp, venice::Interval::open(0.45, 0.55), m_max, opt.tol);
        json w = json::object();
        w["open_unit"] = m0 ? *m0 : -1;
        w["mid_tenth"] = m1 ? *m1 : -1;
        add_record(rep, "leo", "(H4)", m0.has_value() && m1.has_value(), w, t.ms());
    }

    {
        Timer t;
        double grid = opt.cfg.get_double("run", "net_grid_eps", 0.01);
        int n_max = opt.cfg.get_int("run", "net_n_max", 20);
        auto r = b1::periodic_net_check(fp, grid, n_max, opt.tol);
        json w = {{"coverage", r.coverage},
                  {"max_period", r.max_period_used},
                  {"first_uncovered", r.first_uncovered}};
        add_record(rep, "periodic_density", "(H5)", r.pass, w, t.ms());
    }

    {
        Timer t;
        int n_max = opt.cfg.get_int("run", "preimage_n_max", 15);
        double grid = opt.cfg.get_double("run", "net_grid_eps", 0.01);
        auto r = b1::preimage_net_check(fp, 0.3, grid, n_max, opt.tol);
        json w = {{"coverage", r.coverage}, {"levels_used", r.max_period_used}};
        add_record(rep, "preimage_density", "(H4)", r.pass, w, t.ms());
    }

    sink.add("verify-1d.json", rep.to_json().dump(2) + "\n");
    return rep.overall() ? 0 : 1;
}

// -------------------------------------------------------------------------
// classes

int cmd_classes(const Options& opt, const std::string& variant, OutputSink& sink) {
    namespace s2 = venice::skew2d;
    venice::report::DiagnosticsReport rep;
    rep.command = "classes-" + variant;
    s2::SkewReturnMap m = variant == "H" ? s2::default_H() : s2::default_G();
    int n = opt.cfg.get_int("run", "n", 12);
    double eps = opt.cfg.get_double("run", "eps", 1e-2);

    bool budget_hit = false;
    s2::BoxSet ap, am;
    s2::IntersectionReport inter;
    try {
        Timer t;
        ap = s2::attractor_half(m, s2::Half::Plus, n);
        am = s2::attractor_half(m, s2::Half::Minus, n);
        add_record(rep, "attractor_halves", variant == "H" ? "(L1)" : "(G1)", true,
                   {{"boxes_plus", ap.boxes.size()}, {"boxes_minus", am.boxes.size()}}, t.ms());

        Timer t2;
        inter = s2::class_intersection(m, n, eps, opt.tol);
        bool kind_ok = variant == "H" ? inter.kind == s2::IntersectKind::Point
                                      : inter.kind == s2::IntersectKind::SegmentClosure &&
                                            inter.contains_P;
        json w = {{"diameter", inter.diameter},
                  {"contains_P", inter.contains_P},
                  {"kind", inter.kind == s2::IntersectKind::Point ? "point" : "segment-closure"}};
        add_record(rep, "class_intersection", variant == "H" ? "(L3)" : "(G3)", kind_ok, w,
                   t2.ms());
    } catch (const venice::BudgetExceeded& e) {
        budget_hit = true;
        add_record(rep, "class_intersection", "-", false, {{"error", e.what()}}, 0.0);
    }

    {
        Timer t;
        auto P = s2::fixed_point_P(m, opt.tol);
        auto q = s2::apply(m, P);
        bool ok = std::abs(q.u - P.u) <= opt.tol.tol_fix && std::abs(q.y - P.y) <= opt.tol.tol_fix;
        add_record(rep, "fixed_point_P", "(L2)", ok, {{"leaf", P.u}, {"fiber", P.y}}, t.ms());
    }

    {
        Timer t;
        auto orbits = s2::periodic_points_2d(m, opt.cfg.get_int("run", "p_max", 5), opt.tol);
        bool saddles = !orbits.empty();
        for (const auto& o : orbits)
            saddles = saddles && o.base_multiplier > 1.0 && o.fiber_multiplier < 1.0;
        add_record(rep, "saddle_certificates", "(G2)", saddles, {{"orbits", orbits.size()}},
                   t.ms());
    }

    if (!budget_hit) {
        if (opt.want("csv")) {
            std::ostringstream cp, cm;
            s2::write_csv(ap, cp);
            s2::write_csv(am, cm);
            sink.add("classes-" + variant + "-aplus.csv", cp.str());
            sink.add("classes-" + variant + "-aminus.csv", cm.str());
        }
        if (opt.want("svg"))
            sink.add("classes-" + variant + ".svg",
                     venice::svg::render_section(ap, am, inter.cluster,
                                                 s2::fixed_point_P(m, opt.tol)));
    }
    sink.add("classes-" + variant + ".json", rep.to_json().dump(2) + "\n");
    return rep.overall() ? 0 : 1;
}

// -------------------------------------------------------------------------
// plug

int cmd_plug(const Options& opt, OutputSink& sink) {
    namespace cp = venice::cherryplug;
    venice::report::DiagnosticsReport rep;
    rep.command = "plug";
    double tau = opt.cfg.get_double("plug", "tau", 0.75);
    double lss = opt.cfg.get_double("plug", "lambda_ss", -10.0);
    int grid_n = opt.cfg.get_int("plug", "grid_n", 96);
    if (lss >= 0.0) throw venice::ConfigError("lambda_ss must be negative");

    {
        Timer t;
        auto eq = cp::equilibria(cp::cherry_field(), grid_n, opt.tol);
        int saddles = 0, sinks = 0;
        for (const auto& e : eq.points) {
            saddles += e.type == cp::EqType::Saddle;
            sinks += e.type == cp::EqType::Sink;
        }
        bool ok = eq.points.size() == 2 && saddles == 1 && sinks == 1;
        add_record(rep, "cherry_equilibria", "(X1)", ok,
                   {{"count", eq.points.size()}, {"saddles", saddles}, {"sinks", sinks}}, t.ms());
    }

    cp::PlugResult plug;
    {
        Timer t;
        plug = cp::build_plug(tau, lss, grid_n, opt.tol);
        int sources = 0, saddles = 0, sinks = 0;
        for (const auto& e : plug.all_equilibria) {
            sources += e.type == cp::EqType::Source;
            saddles += e.type == cp::EqType::Saddle;
            sinks += e.type == cp::EqType::Sink;
        }
        bool ok = sources == 1 && saddles == 2 && sinks == 1 && plug.all_equilibria.size() == 4;
        json w = {{"count", plug.all_equilibria.size()},
                  {"sources", sources},
                  {"saddles", saddles},
                  {"sinks", sinks},
                  {"tau", tau}};
        add_record(rep, "perturbed_equilibria", "(X1)", ok, w, t.ms());
    }

    {
        json w = json::array();
        for (const auto& s : plug.saddles)
            w.push_back({{"ss", s.spectrum.ss},
                         {"s", s.spectrum.s},
                         {"u", s.spectrum.u},
                         {"lorenz_like", s.lorenz_like}});
        add_record(rep, "lorenz_like_spectra", "(X2)", plug.lorenz_like, w, 0.0);
    }

    {
        bool ok = plug.separatrices.distinct_components;
        json w = json::array();
        for (const auto& h : plug.separatrices.hits)
            w.push_back({{"label", h.label}, {"component", h.component},
                         {"entry_x", h.entry[0]}, {"entry_y", h.entry[1]}});
        add_record(rep, "separatrix_targets", "(X3)", ok, w, 0.0);
    }

    if (opt.want("svg")) {
        venice::svg::Canvas c(-1.0, 1.0, -1.0, 1.0, 500, 500);
        for (const auto& e : plug.all_equilibria)
            c.circle(e.p[0], e.p[1], 4.0,
                     e.type == cp::EqType::Saddle ? "#c04020"
                     : e.type == cp::EqType::Sink ? "#2060c0"
                                                  : "#109030");
        for (const auto& h : plug.separatrices.hits) {
            std::vector<std::array<double, 2>> pts;
            for (const auto& p : h.path) pts.push_back({p[0], p[1]});
            c.polyline(pts, "#555555");
        }
        sink.add("plug.svg", c.str());
    }
    if (opt.want("csv")) {
        std::ostringstream os;
        os << "label,x,y\n";
        for (const auto& h : plug.separatrices.hits)
            for (const auto& p : h.path) os << h.label << ',' << p[0] << ',' << p[1] << '\n';
        sink.add("plug-separatrices.csv", os.str());
    }
    sink.add("plug.json", rep.to_json().dump(2) + "\n");
    return rep.overall() ? 0 : 1;
}

// -------------------------------------------------------------------------
// example

int cmd_example(const Options& opt, const std::string& which, OutputSink& sink) {
    namespace sp = venice::suspension;
    namespace s2 = venice::skew2d;
    venice::report::DiagnosticsReport rep;
    rep.command = "example-" + which;

    sp::ExampleKind kind = which == "X"   ? sp::ExampleKind::X
                           : which == "Y" ? sp::ExampleKind::Y
                                          : sp::ExampleKind::OneSingularity;
    double tau = opt.cfg.get_double("plug", "tau", 0.75);
    double lss = opt.cfg.get_double("plug", "lambda_ss", -10.0);
    sp::SingularSuspension susp = sp::build_example(kind, tau, lss, opt.tol);

    int n = opt.cfg.get_int("run", "n", 12);
    double eps = opt.cfg.get_double("run", "eps", 1e-2);
    double grid_eps = opt.cfg.get_double("run", "grid_eps", 1e-2);
    int n_max = opt.cfg.get_int("run", "n_max", 20);
    int n_samples = opt.cfg.get_int("run", "n_samples", 10000);
    int n_iters = opt.cfg.get_int("run", "n_iters", 1000);
    int p_max = opt.cfg.get_int("run", "p_max", 10);

    {
        Timer t;
        int attractor_gen = opt.cfg.get_int("run", "attractor_gen", 10);
        auto r = sp::dense_periodic_check(susp, grid_eps, n_max, opt.tol, attractor_gen);
        json w = {{"coverage", r.coverage},
                  {"cells", r.cells_total},
                  {"covered", r.cells_covered},
                  {"max_period", r.max_period_used}};
        add_record(rep, "dense_periodic", "LemA.2", r.pass, w, t.ms());
    }

    {
        Timer t;
        auto r = sp::transitivity_witness(susp, n_samples, n_iters, opt.seed, opt.workers);
        bool ok = r.verdict == sp::TransitivityVerdict::NonTransitive;
        json w = {{"crossings", r.crossings},
                  {"certificate", r.structural_certificate},
                  {"frac_plus", r.frac_plus}};
        add_record(rep, "non_transitive", "(L1)", ok, w, t.ms());
    }

    sp::ClassStructureReport cs;
    {
        Timer t;
        cs = sp::class_structure(susp, n, eps, opt.tol);
        bool ok = which == "X" ? cs.verdict == "periodic_orbit" &&
                                     cs.base_multiplier > 1.0 && cs.fiber_multiplier < 1.0
                               : cs.verdict == "singular_closure" &&
                                     cs.hausdorff_to_traces <= eps;
        json w = {{"verdict", cs.verdict},
                  {"diameter", cs.intersection.diameter},
                  {"contains_P", cs.contains_P}};
        if (cs.verdict == "periodic_orbit") {
            w["base_multiplier"] = cs.base_multiplier;
            w["fiber_multiplier"] = cs.fiber_multiplier;
        } else {
            w["hausdorff_to_traces"] = cs.hausdorff_to_traces;
        }
        add_record(rep, "class_structure", which == "X" ? "ThmA" : "ThmB", ok, w, t.ms());
    }

    {
        Timer t;
        bool all = true;
        // the traced strips carry the full entering fiber interval, so the
        // containment slack must absorb the attractor's permanent fiber gaps
        double ueps = opt.cfg.get_double("run", "unstable_eps", 0.05);
        json w = json::array();
        for (const auto& sg : susp.singularities) {
            auto r = sp::unstable_in_class(susp, sg.label, n, ueps);
            all = all && r.pass;
            w.push_back({{"label", sg.label}, {"max_dist", r.max_dist}, {"pass", r.pass}});
        }
        add_record(rep, "unstable_in_class", "PropA.1", all, w, t.ms());
    }

    {
        Timer t;
        auto rows = sp::sectional_expansion_audit(susp, p_max, opt.tol);
        double max_ceiling = 0.0;
        for (const auto& r : rows) max_ceiling = std::max(max_ceiling, r.max_ceiling);
        double bound = std::log(susp.section.plus.expansion_const) / max_ceiling;
        bool ok = !rows.empty();
        for (const auto& r : rows)
            ok = ok && r.expansion_rate >= bound - 1e-12 && r.contraction_rate < 0.0;
        json w = {{"orbits", rows.size()}, {"rate_bound", bound}, {"max_ceiling", max_ceiling}};
        add_record(rep, "sectional_expansion", "PropA.3", ok, w, t.ms());
    }

    if (opt.want("svg") || opt.want("csv")) {
        auto ap = s2::attractor_half(susp.section, s2::Half::Plus, n);
        s2::BoxSet am;
        if (susp.section.has_minus_half())
            am = s2::attractor_half(susp.section, s2::Half::Minus, n);
        if (opt.want("svg"))
            sink.add("example-" + which + ".svg",
                     venice::svg::render_section(ap, am, cs.intersection.cluster,
                                                 s2::fixed_point_P(susp.section, opt.tol)));
        if (opt.want("csv")) {
            auto orb = sp::flow_orbit(susp, {0.1, 0.3}, 200, 1e9, opt.tol);
            std::ostringstream os;
            sp::write_csv(orb, os);
            sink.add("example-" + which + "-orbit.csv", os.str());
        }
    }
    sink.add("example-" + which + ".json", rep.to_json().dump(2) + "\n");
    return rep.overall() ? 0 : 1;
}

// -------------------------------------------------------------------------
// report (summary over the cheap suites)

int cmd_report(const Options& opt, OutputSink& sink) {
    int rc = 0;
    rc = std::max(rc, cmd_verify_1d(opt, sink));
    rc = std::max(rc, cmd_classes(opt, "H", sink));
    rc = std::max(rc, cmd_classes(opt, "G", sink));
    rc = std::max(rc, cmd_plug(opt, sink));
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Venice-mask construction diagnostics"};
    app.require_subcommand(1);

    Options opt;
    std::string fmt = "json";
    app.add_option("--config", opt.config_path, "config file (INI-like)");
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_option("--workers", opt.workers, "worker pool size");
    app.add_option("--seed", opt.seed, "RNG seed");
    app.add_option("--format", fmt, "comma-separated: csv,json,svg");

    auto* c_verify = app.add_subcommand("verify-1d", "1D hypothesis suite");
    auto* c_classes = app.add_subcommand("classes", "class intersection for a variant");
    std::string variant = "H";
    c_classes->add_option("variant", variant, "G or H")->check(CLI::IsMember({"G", "H"}));
    auto* c_example = app.add_subcommand("example", "full example verdict");
    std::string which = "X";
    c_example->add_option("which", which, "X, Y, or one_singularity")
        ->check(CLI::IsMember({"X", "Y", "one_singularity"}));
    auto* c_plug = app.add_subcommand("plug", "Cherry field + DA plug pipeline");
    auto* c_report = app.add_subcommand("report", "summary over all cheap suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        opt.formats.clear();
        std::stringstream ss(fmt);
        std::string part;
        while (std::getline(ss, part, ',')) {
            if (part != "csv" && part != "json" && part != "svg")
                throw venice::ConfigError("unknown format: " + part);
            opt.formats.insert(part);
        }
        load_config(opt);
        if (opt.cfg.find("run", "seed")) opt.seed = uint64_t(opt.cfg.get_int("run", "seed", 0));
        if (opt.cfg.find("run", "workers")) opt.workers = opt.cfg.get_int("run", "workers", 1);

        OutputSink sink;
        int rc = 0;
        if (c_verify->parsed()) rc = cmd_verify_1d(opt, sink);
        else if (c_classes->parsed()) rc = cmd_classes(opt, variant, sink);
        else if (c_example->parsed()) rc = cmd_example(opt, which, sink);
        else if (c_plug->parsed()) rc = cmd_plug(opt, sink);
        else if (c_report->parsed()) rc = cmd_report(opt, sink);
        sink.flush(opt.out_dir);
        return rc;
    } catch (const venice::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
