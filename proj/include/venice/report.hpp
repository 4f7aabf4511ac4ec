#pragma once

// Structured diagnostics: one record per check, each carrying the hypothesis
// tag it verifies.  JSON output preserves insertion order; timing fields live
// under a separate "timings" object so determinism comparisons can drop them
// wholesale.

#include <string>
#include <vector>

#include <json.hpp>

namespace venice::report {

using json = nlohmann::ordered_json;

struct Record {
    std::string name;
    std::string tag;   // (H1)..(H5), (G1)..(G3), (L1)..(L3), (X1)..(X3),
                       // PropA.1, LemA.2, PropA.3, ThmA, ThmB, or "-"
    bool pass = false;
    json witness = json::object();
    double elapsed_ms = 0.0;
};

struct DiagnosticsReport {
    std::string command;
    std::vector<Record> records;

    bool overall() const {
        for (const auto& r : records)
            if (!r.pass) return false;
        return true;
    }

    json to_json(bool include_timings = true) const {
        json j = json::object();
        j["command"] = command;
        j["overall"] = overall() ? "pass" : "fail";
        json checks = json::array();
        for (const auto& r : records) {
            json c = json::object();
            c["name"] = r.name;
            c["tag"] = r.tag;
            c["pass"] = r.pass;
            c["witness"] = r.witness;
            checks.push_back(c);
        }
        j["checks"] = checks;
        if (include_timings) {
            json t = json::object();
            for (const auto& r : records) t[r.name] = r.elapsed_ms;
            j["timings"] = t;
        }
        return j;
    }
};

}  // namespace venice::report
