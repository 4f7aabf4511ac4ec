// Acceptance harness: one line per criterion, nonzero exit if any fail.
// Criterion 10 exercises the installed CLI via the VENICE_CLI environment
// variable; everything else drives the library directly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "venice/branched1d.hpp"
#include "venice/cherryplug.hpp"
#include "venice/skew2d.hpp"
#include "venice/suspension.hpp"

namespace fs = std::filesystem;
using namespace venice;

namespace {

int g_failures = 0;

struct Criterion {
    int id;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string note;

    explicit Criterion(int n) : id(n) {}
    void check(bool cond, const std::string& msg) {
        if (!cond) {
            ok = false;
            if (!note.empty()) note += "; ";
            note += msg;
        }
    }
    ~Criterion() {
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2d: %s (%.1fs)%s%s\n", id, ok ? "PASS" : "FAIL", sec,
                    note.empty() ? "" : " -- ", note.c_str());
        std::fflush(stdout);
        if (!ok) ++g_failures;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

int main() {
    namespace b1 = branched1d;
    namespace s2 = skew2d;
    namespace sp = suspension;

    auto f = b1::default_f();
    auto fp = b1::default_f_plus();
    auto fm = b1::default_f_minus_base();

    {  // 1: hypothesis suite + arc-length sandwich
        Criterion c(1);
        for (const auto* m : {&f, &fp, &fm}) {
            auto h = b1::verify_hypotheses(*m);
            c.check(h.all_pass(), "hypotheses failed");
        }
        b1::ArcLengthBudget budget;  // epsilon = 0.05 over [0, d1] and [d*, 1]
        c.check(b1::verify_arclength_eps(f, fp, budget).pass, "sandwich f+ failed");
        c.check(b1::verify_arclength_eps(f, fm, budget).pass, "sandwich f- failed");
    }

    {  // 2: leo on 100 seeded random open intervals, m <= 40
        Criterion c(2);
        std::mt19937_64 rng(20260824);
        std::uniform_real_distribution<double> len_d(1e-3, 0.1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        int worst = 0;
        for (int k = 0; k < 100; ++k) {
            double len = len_d(rng);
            double lo = unit(rng) * (1.0 - len);
            auto m = b1::leo_check(fp, Interval::open(lo, lo + len), 40);
            if (!m) {
                c.check(false, "no m <= 40 for [" + std::to_string(lo) + "]");
                break;
            }
            worst = std::max(worst, *m);
        }
        c.note = "max m = " + std::to_string(worst);
    }

    {  // 3: periodic 0.01-net (p <= 20) and preimage 0.01-net of 0.3 (n <= 15)
        Criterion c(3);
        for (const auto* m : {&f, &fp}) {
            c.check(b1::periodic_net_check(*m, 0.01, 20).pass, "periodic net failed");
            c.check(b1::preimage_net_check(*m, 0.3, 0.01, 15).pass, "preimage net failed");
        }
    }

    {  // 4: H intersection is a point through P at n = 12
        Criterion c(4);
        auto H = s2::default_H();
        auto r = s2::class_intersection(H, 12, 1e-2);
        c.check(r.kind == s2::IntersectKind::Point, "kind not point");
        c.check(r.diameter <= 2.0 * std::pow(3.0, -12.0) + 1e-2,
                "diameter " + std::to_string(r.diameter));
        c.check(r.contains_P, "P not in the intersection");
        auto P = s2::fixed_point_P(H);
        c.check(std::max(std::abs(P.u), std::abs(P.y - 0.5)) <= 1e-10, "P off (0, 0.5)");
    }

    sp::SingularSuspension Y = sp::build_example(sp::ExampleKind::Y);

    {  // 5: G intersection is fat and matches the singular traces
        Criterion c(5);
        auto cs = sp::class_structure(Y, 12, 1e-2);
        c.check(cs.intersection.contains_P, "P not in the intersection");
        c.check(cs.intersection.diameter >= 0.1,
                "diameter " + std::to_string(cs.intersection.diameter));
        c.check(cs.verdict == "singular_closure", "verdict " + cs.verdict);
        c.check(cs.hausdorff_to_traces <= 1e-2,
                "hausdorff " + std::to_string(cs.hausdorff_to_traces));
    }

    sp::SingularSuspension X = sp::build_example(sp::ExampleKind::X);

    {  // 6: Theorem A verdict on example X
        Criterion c(6);
        auto d = sp::dense_periodic_check(X, 0.01, 20);
        c.check(d.pass, "coverage " + std::to_string(d.coverage));
        auto t = sp::transitivity_witness(X, 10000, 1000, 20260824, 4);
        c.check(t.structural_certificate, "no branch certificate");
        c.check(t.crossings == 0, "crossings " + std::to_string(t.crossings));
        c.check(t.verdict == sp::TransitivityVerdict::NonTransitive, "not non-transitive");
        auto cs = sp::class_structure(X, 12, 1e-2);
        c.check(cs.verdict == "periodic_orbit", "verdict " + cs.verdict);
        c.check(cs.fiber_multiplier < 1.0 && cs.base_multiplier > 1.0, "multipliers");
    }

    {  // 7: Theorem B verdict on example Y
        Criterion c(7);
        auto d = sp::dense_periodic_check(Y, 0.01, 20);
        c.check(d.pass, "coverage " + std::to_string(d.coverage));
        auto t = sp::transitivity_witness(Y, 10000, 1000, 20260824, 4);
        c.check(t.verdict == sp::TransitivityVerdict::NonTransitive && t.crossings == 0,
                "transitivity verdict");
        auto cs = sp::class_structure(Y, 12, 1e-2);
        c.check(cs.verdict == "singular_closure" && cs.hausdorff_to_traces <= 1e-2,
                "closure match");
        for (const char* label : {"sigma1", "sigma2"}) {
            auto u = sp::unstable_in_class(Y, label, 12, 0.05);
            c.check(u.pass, std::string(label) + " max_dist " + std::to_string(u.max_dist));
        }
    }

    {  // 8: plug pipeline
        Criterion c(8);
        namespace cp = cherryplug;
        auto eq = cp::equilibria(cp::cherry_field(), 96);
        int saddle = 0, sink = 0;
        for (const auto& e : eq.points) {
            saddle += e.type == cp::EqType::Saddle;
            sink += e.type == cp::EqType::Sink;
        }
        c.check(eq.points.size() == 2 && saddle == 1 && sink == 1, "cherry equilibria");
        auto plug = cp::build_plug(0.75, -10.0, 96);
        int src = 0, sad = 0, snk = 0;
        for (const auto& e : plug.all_equilibria) {
            src += e.type == cp::EqType::Source;
            sad += e.type == cp::EqType::Saddle;
            snk += e.type == cp::EqType::Sink;
        }
        c.check(plug.all_equilibria.size() == 4 && src == 1 && sad == 2 && snk == 1,
                "perturbed equilibria");
        c.check(plug.lorenz_like, "spectra not Lorenz-like");
        c.check(plug.separatrices.distinct_components, "separatrix components");
    }

    {  // 9: sectional-expansion audit up to period 10
        Criterion c(9);
        auto rows = sp::sectional_expansion_audit(X, 10);
        c.check(!rows.empty(), "no orbits");
        for (const auto& r : rows) {
            double bound = std::log(1.2) / r.max_ceiling;
            if (r.expansion_rate < bound - 1e-12) {
                c.check(false, "rate below bound at period " + std::to_string(r.period));
                break;
            }
        }
        for (const auto& r : rows) {
            double fm2 = std::exp(r.contraction_rate * r.total_time);
            if (fm2 > std::pow(1.0 / 3.0, r.period) + 1e-12) {
                c.check(false, "fiber multiplier too large");
                break;
            }
        }
        c.note = std::to_string(rows.size()) + " orbits";
    }

    {  // 10: determinism of CLI reports with fixed config + seed
        Criterion c(10);
        const char* cli = std::getenv("VENICE_CLI");
        if (!cli) {
            c.check(false, "VENICE_CLI not set");
        } else {
            fs::path dir = fs::temp_directory_path() / "venice_acceptance";
            fs::remove_all(dir);
            fs::create_directories(dir);
            std::ofstream(dir / "run.ini") << "[run]\nn_samples = 2000\nn_iters = 200\n"
                                              "seed = 11\nworkers = 4\n";
            for (const char* sub : {"verify-1d", "plug", "example X"}) {
                std::string base = std::string(sub).substr(0, std::string(sub).find(' '));
                std::string j1, j2;
                for (int run = 0; run < 2; ++run) {
                    fs::path out = dir / ("out" + std::to_string(run));
                    std::string cmd = std::string(cli) + " --config " + (dir / "run.ini").string() +
                                      " --out " + out.string() + " --seed 11 " + sub +
                                      " > /dev/null 2>&1";
                    int rc = std::system(cmd.c_str());
                    if (rc != 0) c.check(false, std::string(sub) + " exited " + std::to_string(rc));
                    fs::path rep;
                    for (const auto& e : fs::directory_iterator(out))
                        if (e.path().extension() == ".json") rep = e.path();
                    auto j = nlohmann::ordered_json::parse(slurp(rep));
                    j.erase("timings");
                    (run == 0 ? j1 : j2) = j.dump();
                }
                c.check(!j1.empty() && j1 == j2, std::string(sub) + " reports differ");
            }
        }
    }

    return g_failures == 0 ? 0 : 1;
}
