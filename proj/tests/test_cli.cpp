#include "odegeom/ode3.hpp"
#include "odegeom/monge.hpp"
#include "odegeom/parse.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using json = nlohmann::json;
using namespace odegeom;

namespace {

struct Result {
    int code = -1;
    std::string out, err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

Result run(const std::vector<std::string>& args, const std::string& env = "") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto out = dir / ("odegeom_cli_out_" + std::to_string(::getpid()));
    const auto err = dir / ("odegeom_cli_err_" + std::to_string(::getpid()));
    std::string cmd = env.empty() ? "env -u ODEGEOM_CONFIG " : "env " + env + " ";
    cmd += quote(ODEGEOM_CLI_PATH);
    for (const auto& a : args) cmd += " " + quote(a);
    cmd += " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    std::filesystem::remove(out);
    std::filesystem::remove(err);
    return r;
}

json run_json(std::vector<std::string> args, int expected_code = 0) {
    args.insert(args.begin(), "--json");
    const Result r = run(args);
    EXPECT_EQ(r.code, expected_code) << r.err;
    return json::parse(r.out);
}

// enough of draft-07 for the report schema: type, required, properties, items, enum, $ref
class SchemaCheck {
public:
    explicit SchemaCheck(json root) : root_(std::move(root)) {}

    std::vector<std::string> errors(const json& doc) {
        errors_.clear();
        check(root_, doc, "");
        return errors_;
    }

private:
    const json& resolve(const json& s) const {
        if (!s.contains("$ref")) return s;
        std::string ref = s["$ref"].get<std::string>();
        return root_.at(json::json_pointer(ref.substr(1)));
    }

    static bool has_type(const json& v, const std::string& t) {
        if (t == "object") return v.is_object();
        if (t == "array") return v.is_array();
        if (t == "string") return v.is_string();
        if (t == "boolean") return v.is_boolean();
        if (t == "integer") return v.is_number_integer();
        if (t == "number") return v.is_number();
        if (t == "null") return v.is_null();
        return false;
    }

    void check(const json& schema, const json& v, const std::string& path) {
        const json& s = resolve(schema);
        if (s.contains("type")) {
            bool ok = false;
            if (s["type"].is_array()) {
                for (const auto& t : s["type"]) ok = ok || has_type(v, t.get<std::string>());
            } else {
                ok = has_type(v, s["type"].get<std::string>());
            }
            if (!ok) {
                errors_.push_back(path + ": wrong type");
                return;
            }
        }
        if (s.contains("enum") && std::find(s["enum"].begin(), s["enum"].end(), v) == s["enum"].end())
            errors_.push_back(path + ": not in enum");
        if (v.is_object()) {
            if (s.contains("required"))
                for (const auto& k : s["required"])
                    if (!v.contains(k.get<std::string>())) errors_.push_back(path + ": missing " + k.get<std::string>());
            if (s.contains("properties"))
                for (const auto& [k, sub] : s["properties"].items())
                    if (v.contains(k)) check(sub, v[k], path + "/" + k);
        }
        if (v.is_array() && s.contains("items"))
            for (std::size_t i = 0; i < v.size(); ++i) check(s["items"], v[i], path + "/" + std::to_string(i));
    }

    json root_;
    std::vector<std::string> errors_;
};

SchemaCheck& schema() {
    static SchemaCheck s(json::parse(slurp(std::filesystem::path(ODEGEOM_DATA_DIR) / "report.schema.json")));
    return s;
}

std::string temp_file(const std::string& name, const std::string& content) {
    const auto p = std::filesystem::temp_directory_path() / (name + std::to_string(::getpid()));
    std::ofstream(p) << content;
    return p.string();
}

}  // namespace

TEST(Cli, ClassifyExamples) {
    Result r = run({"--box", "q:0.1:10", "ode3", "classify", "--F", "q^(3/2)", "--expect", "einstein-weyl"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("einstein-weyl"), std::string::npos);
    r = run({"monge", "classify2", "--F", "q^2+y"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("g2"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({"ode3", "classify", "--F", "q^2", "--expect", "generic"}).code, 0);
    const Result mismatch = run({"ode3", "classify", "--F", "q^2", "--expect", "einstein-weyl"});
    EXPECT_EQ(mismatch.code, 1);
    EXPECT_NE(mismatch.out.find("mismatch"), std::string::npos);

    const Result unknown = run({"bogus"});
    EXPECT_EQ(unknown.code, 2);
    EXPECT_EQ(unknown.err.rfind("unknown subcommand: bogus", 0), 0u) << unknown.err;
    const Result formula = run({"ode3", "classify", "--F", "q^("});
    EXPECT_EQ(formula.code, 2);
    EXPECT_EQ(formula.err.rfind("malformed formula:", 0), 0u) << formula.err;
    const Result box = run({"--box", "q:2:1", "ode3", "classify", "--F", "q^2"});
    EXPECT_EQ(box.code, 2);
    EXPECT_EQ(box.err.rfind("box violation:", 0), 0u) << box.err;
    const Result empty_box = run({"--box", "q:-2:-1", "ode3", "classify", "--F", "sqrt(q)"});
    EXPECT_EQ(empty_box.code, 2);
    EXPECT_EQ(empty_box.err.rfind("box violation:", 0), 0u) << empty_box.err;
    const Result samples = run({"--samples", "3", "ode3", "classify", "--F", "q^2"});
    EXPECT_EQ(samples.code, 2);
    EXPECT_EQ(samples.err.rfind("usage error:", 0), 0u) << samples.err;
}

TEST(Cli, ReportsValidateAgainstSchema) {
    const std::vector<std::vector<std::string>> commands{
        {"ode3", "classify", "--F", "q^2"},
        {"ode3", "invariants", "--F", "q^3"},
        {"ode3", "metric", "--F", "q^2"},
        {"ode3", "nu", "--F", "q^3"},
        {"dkp", "residual", "--u", "sqrt(2*x)"},
        {"dkp", "coframe", "--u", "sqrt(2*x)", "--X", "t+v^2/2+sqrt(2*x)"},
        {"ode2", "metric", "--Q", "p^4"},
        {"ode2", "invariants", "--Q", "p^4"},
        {"ode2", "flatness", "--Q", "p^4"},
        {"monge", "classify1", "--F", "p^2"},
        {"monge", "classify2", "--F", "q^3/6"},
        {"monge", "verify-solution", "--example", "4"},
        {"monge", "example6", "a5", "--F", "q^3/6"},
        {"monge", "example6", "weyl-pattern", "--F", "q^3/6"},
        {"lie", "verify", "ccg2"},
        {"identities", "fefferman", "--F", "p^4"},
    };
    for (const auto& c : commands) {
        std::vector<std::string> args = c;
        if (c[0] == "monge" && c.size() > 2 && c[1] == "example6") args.insert(args.begin(), {"--box", "q:0.5:2"});
        if (c[0] == "dkp") args.insert(args.begin(), {"--box", "x:0.1:2"});
        const json report = run_json(args);
        const auto errs = schema().errors(report);
        EXPECT_TRUE(errs.empty()) << c[0] << " " << c[1] << ": " << (errs.empty() ? "" : errs.front());
        EXPECT_EQ(report["status"], "pass");
    }
}

TEST(Cli, SchemaCatchesBrokenReport) {
    json bad = run_json({"ode3", "classify", "--F", "q^2"});
    bad.erase("seconds");
    bad["status"] = "maybe";
    bad["checks"][0].erase("witness");
    EXPECT_EQ(schema().errors(bad).size(), 3u);
}

TEST(Cli, FormulaStringsReparse) {
    const json inv = run_json({"ode3", "invariants", "--F", "q^2 + p*q"});
    EXPECT_EQ(parse(inv["inputs"]["F"].get<std::string>()), parse("q^2 + p*q"));
    const auto I = ode3_invariants(parse("q^2 + p*q"));
    EXPECT_EQ(parse(inv["results"]["A"].get<std::string>()), I.A);
    EXPECT_EQ(parse(inv["results"]["G"].get<std::string>()), I.G);

    const json a5 = run_json({"--box", "q:0.5:2", "monge", "example6", "a5", "--F", "q^3/6"});
    EXPECT_EQ(parse(a5["results"]["a5"].get<std::string>()), example6_a5(parse("q^3/6")));

    const json cls = run_json({"ode3", "classify", "--F", "q^2"});
    for (const auto& c : cls["checks"])
        if (c.contains("residual")) EXPECT_NO_THROW(parse(c["residual"].get<std::string>())) << c["name"];
}

TEST(Cli, WitnessesAreReported) {
    const json r = run_json({"ode3", "classify", "--F", "q^2"});
    bool found = false;
    for (const auto& c : r["checks"])
        if (c["name"] == "A") {
            found = true;
            EXPECT_FALSE(c["zero"].get<bool>());
            const double q = c["witness"]["point"]["q"];
            EXPECT_NEAR(c["witness"]["value"].get<double>(), -2.0 / 27 * q * q * q, 1e-9 * q * q * q);
        }
    EXPECT_TRUE(found);
}

TEST(Cli, ConfigFileAndEnvironment) {
    const std::string cfg = temp_file("odegeom_cfg_", R"({"seed": 7, "samples": 9, "tol": 1e-8})");
    const json viaflag = run_json({"--config", cfg, "ode3", "classify", "--F", "q^2"});
    EXPECT_EQ(viaflag["config"]["seed"], 7);
    EXPECT_EQ(viaflag["config"]["samples"], 9);
    EXPECT_DOUBLE_EQ(viaflag["config"]["tol"].get<double>(), 1e-8);

    const Result env = run({"--json", "--seed", "3", "ode3", "classify", "--F", "q^2"}, "ODEGEOM_CONFIG=" + cfg);
    ASSERT_EQ(env.code, 0) << env.err;
    const json viaenv = json::parse(env.out);
    EXPECT_EQ(viaenv["config"]["seed"], 3);  // flag wins over file
    EXPECT_EQ(viaenv["config"]["samples"], 9);

    const std::string broken = temp_file("odegeom_badcfg_", "{ not json");
    const Result bad = run({"--config", broken, "ode3", "classify", "--F", "q^2"});
    EXPECT_EQ(bad.code, 2);
    EXPECT_EQ(bad.err.rfind("usage error:", 0), 0u);
    std::filesystem::remove(cfg);
    std::filesystem::remove(broken);
}

TEST(Cli, LieReport) {
    const json r = run_json({"lie", "verify", "ccg2"});
    const auto& res = r["results"];
    EXPECT_TRUE(res["induced_jacobi"]["ok"].get<bool>());
    EXPECT_EQ(res["induced_killing"]["signature"], json::array({8, 6, 0}));
    EXPECT_TRUE(res["closure"]["closed"].get<bool>());
    EXPECT_TRUE(res["closure"]["equal_after_relabeling"].get<bool>());
    EXPECT_EQ(res["bilinear_form"]["dimension"], 1);
    EXPECT_TRUE(res["three_form"]["generic"].get<bool>());
    EXPECT_EQ(run({"lie", "verify", "nonesuch"}).code, 2);
}

TEST(Cli, SolutionMutationsReported) {
    const json r = run_json({"monge", "verify-solution", "--example", "5", "--k", "3", "--mutations"});
    EXPECT_EQ(r["status"], "pass");
}

TEST(Cli, VerifyPaperIsSeedStable) {
    std::vector<json> claims;
    for (const char* seed : {"0", "1", "2"}) {
        const json r = run_json({"--seed", seed, "verify", "paper"});
        EXPECT_EQ(r["verdict"], "all-claims-hold") << seed;
        EXPECT_EQ(r["results"]["passed"], r["results"]["total"]) << seed;
        json verdicts = json::array();
        for (const auto& c : r["results"]["claims"]) verdicts.push_back({c["id"], c["verdict"], c["pass"]});
        claims.push_back(verdicts);
    }
    EXPECT_EQ(claims[0], claims[1]);
    EXPECT_EQ(claims[0], claims[2]);
    EXPECT_GE(claims[0].size(), 40u);
}

TEST(Cli, TightToleranceGivesHeadroomFailures) {
    const json r = run_json({"--tol", "1e-25", "verify", "paper"}, 1);
    EXPECT_EQ(r["verdict"], "claims-failed");
    int failed = 0;
    for (const auto& c : r["results"]["claims"])
        if (!c["pass"].get<bool>()) {
            ++failed;
            EXPECT_EQ(c["class"], "numerical-headroom") << c["id"];
        }
    EXPECT_GT(failed, 0);
}

TEST(Cli, CatalogErrors) {
    const std::string dup = temp_file(
        "odegeom_cat_",
        R"({"claims": [{"id": "a", "anchor": "x", "basis": "derived", "args": ["monge", "classify2", "--F", "q^2"]},
                       {"id": "a", "anchor": "x", "basis": "derived", "args": ["monge", "classify2", "--F", "q^2"]}]})");
    const Result r = run({"verify", "paper", "--catalog", dup});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("duplicate claim id"), std::string::npos) << r.err;
    std::filesystem::remove(dup);

    const std::string wrong = temp_file(
        "odegeom_cat2_",
        R"({"claims": [{"id": "b", "anchor": "x", "basis": "derived", "args": ["monge", "classify2", "--F", "q^2"],
                        "expect": {"verdict": "integral-free"}}]})");
    const Result w = run({"--json", "verify", "paper", "--catalog", wrong});
    EXPECT_EQ(w.code, 1);
    const json rep = json::parse(w.out);
    EXPECT_EQ(rep["results"]["claims"][0]["class"], "logical");
    std::filesystem::remove(wrong);
}
