#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <set>

namespace cli {

namespace {

struct Claim {
    std::string id, anchor, basis;
    std::vector<std::string> args;
    std::vector<std::string> box;
    std::optional<double> tol;
    json expect = json::object();
    std::map<std::string, bool> zero;  // named check -> expected zero-test outcome
};

Claim read_claim(const json& j) {
    Claim c;
    c.id = j.at("id").get<std::string>();
    c.anchor = j.value("anchor", "");
    c.basis = j.value("basis", "stated");
    c.args = j.at("args").get<std::vector<std::string>>();
    if (j.contains("box")) c.box = j.at("box").get<std::vector<std::string>>();
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("expect")) c.expect = j.at("expect");
    if (j.contains("zero")) c.zero = j.at("zero").get<std::map<std::string, bool>>();
    if (c.args.empty()) throw UsageError("claim " + c.id + " has no command");
    if (c.args.front() == "verify") throw UsageError("claim " + c.id + " would recurse into verify");
    static const std::set<std::string> bases{"stated", "derived", "control"};
    if (!bases.count(c.basis)) throw UsageError("claim " + c.id + ": basis must be stated, derived or control");
    return c;
}

// first path where `want` is not contained in `got`, empty when it is
std::string subset_mismatch(const json& want, const json& got, const std::string& path = "") {
    if (want.is_object()) {
        if (!got.is_object()) return path.empty() ? "/" : path;
        for (const auto& [k, v] : want.items()) {
            if (!got.contains(k)) return path + "/" + k;
            auto m = subset_mismatch(v, got.at(k), path + "/" + k);
            if (!m.empty()) return m;
        }
        return "";
    }
    if (want.is_array()) {
        if (!got.is_array() || got.size() != want.size()) return path;
        for (std::size_t i = 0; i < want.size(); ++i) {
            auto m = subset_mismatch(want[i], got[i], path + "/" + std::to_string(i));
            if (!m.empty()) return m;
        }
        return "";
    }
    if (want.is_number() && got.is_number()) return want.get<double>() == got.get<double>() ? "" : path;
    return want == got ? "" : path;
}

std::string zero_mismatch(const std::map<std::string, bool>& want, const json& report) {
    for (const auto& [name, zero] : want) {
        const json* found = nullptr;
        if (report.contains("checks"))
            for (const auto& c : report["checks"])
                if (c.value("name", "") == name) found = &c;
        if (!found) return "/checks/" + name;
        if ((*found)["zero"].get<bool>() != zero) return "/checks/" + name + "/zero";
    }
    return "";
}

constexpr double kHeadroomTol = 1e-6;

struct ClaimRun {
    Outcome outcome;
    std::string mismatch;
    bool ok = false;
};

ClaimRun run_claim(const Claim& c, const RunConfig& rc) {
    rc.validate();
    CommandSet cs;
    std::vector<std::string> argv(c.args.rbegin(), c.args.rend());
    cs.app().parse(argv);
    ClaimRun r{cs.run(rc), "", false};
    r.mismatch = subset_mismatch(c.expect, r.outcome.report);
    if (r.mismatch.empty()) r.mismatch = zero_mismatch(c.zero, r.outcome.report);
    r.ok = r.outcome.pass && r.mismatch.empty();
    return r;
}

// a failure that disappears at a loose tolerance is numerical-headroom
std::string failure_class(const Claim& c, RunConfig rc) {
    if (rc.tol >= kHeadroomTol) return "logical";
    rc.tol = kHeadroomTol;
    try {
        return run_claim(c, rc).ok ? "numerical-headroom" : "logical";
    } catch (const std::exception&) {
        return "logical";
    }
}

}  // namespace

Outcome run_verify_paper(const RunConfig& cfg, const std::string& catalog_path) {
    std::ifstream in(catalog_path);
    if (!in) throw UsageError("cannot read catalog " + catalog_path);
    json catalog;
    try {
        in >> catalog;
    } catch (const json::exception& e) {
        throw UsageError("catalog " + catalog_path + " is not valid JSON: " + e.what());
    }
    std::vector<Claim> claims;
    try {
        for (const auto& j : catalog.at("claims")) claims.push_back(read_claim(j));
    } catch (const json::exception& e) {
        throw UsageError("catalog " + catalog_path + ": " + e.what());
    }
    std::sort(claims.begin(), claims.end(), [](const Claim& a, const Claim& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < claims.size(); ++i)
        if (claims[i].id == claims[i - 1].id) throw UsageError("duplicate claim id " + claims[i].id);

    Outcome out;
    out.report["inputs"] = {{"catalog", catalog_path}};
    json rows = json::array();
    int passed = 0;
    for (const auto& c : claims) {
        RunConfig rc = cfg;
        rc.json_output = false;
        rc.box = c.box;
        rc.box.insert(rc.box.end(), cfg.box.begin(), cfg.box.end());
        if (c.tol && !cfg.tol_set) rc.tol = *c.tol;

        json row{{"id", c.id}, {"anchor", c.anchor}, {"basis", c.basis}, {"args", c.args}, {"tol", rc.tol}};
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ClaimRun r = run_claim(c, rc);
            ok = r.ok;
            row["verdict"] = r.outcome.report.value("verdict", "");
            if (!r.mismatch.empty()) row["mismatch"] = r.mismatch;
            if (!ok) {
                row["class"] = failure_class(c, rc);
                row["report"] = r.outcome.report;
            }
        } catch (const CLI::ParseError& e) {
            row["class"] = "error";
            row["error"] = std::string("bad command: ") + e.what();
        } catch (const std::exception& e) {
            row["class"] = "error";
            row["error"] = e.what();
        }
        row["pass"] = ok;
        row["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        passed += ok;
        std::string line = std::string(ok ? "PASS " : "FAIL ") + c.id + " [" + c.basis + "]";
        if (!ok) {
            line += " " + row["class"].get<std::string>();
            if (row.contains("mismatch")) line += " at " + row["mismatch"].get<std::string>();
            if (row.contains("error")) line += ": " + row["error"].get<std::string>();
        }
        out.lines.push_back(line);
        rows.push_back(std::move(row));
    }
    const int total = static_cast<int>(claims.size());
    out.report["results"] = {{"claims", rows}, {"passed", passed}, {"total", total}};
    out.report["verdict"] = passed == total ? "all-claims-hold" : "claims-failed";
    out.lines.push_back(std::to_string(passed) + "/" + std::to_string(total) + " claims hold");
    out.pass = passed == total;
    return out;
}

}  // namespace cli
