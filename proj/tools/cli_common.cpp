#include "cli.hpp"
#include "odegeom/print.hpp"

#include <cmath>
#include <fstream>

namespace cli {

void RunConfig::validate() const {
    if (!(tol > 0)) throw UsageError("tolerance must be positive");
    if (samples < 5) throw UsageError("samples must be at least 5");
    try {
        (void)user_box();
    } catch (const std::exception& e) {
        throw BoxError(e.what());
    }
}

json RunConfig::to_json() const {
    return {{"tol", tol}, {"samples", samples}, {"seed", seed}, {"box", box}};
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw UsageError("config file " + path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    try {
        if (j.contains("tol")) {
            cfg.tol = j.at("tol").get<double>();
            cfg.tol_set = true;
        }
        if (j.contains("samples")) cfg.samples = j.at("samples").get<int>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("box")) cfg.box = j.at("box").get<std::vector<std::string>>();
        if (j.contains("json")) cfg.json_output = j.at("json").get<bool>();
    } catch (const json::exception& e) {
        throw UsageError("config file " + path + ": " + e.what());
    }
}

json number_json(odegeom::real v) {
    if (!std::isfinite(v)) return nullptr;
    return static_cast<double>(v);
}

json point_json(const odegeom::Point& p) {
    json j = json::object();
    for (const auto& [k, v] : p) j[k] = number_json(v);
    return j;
}

json verdict_json(const odegeom::ZeroVerdict& v) {
    json j{{"zero", v.zero},
           {"samples", v.samples},
           {"attempts", v.attempts},
           {"failures", v.failures},
           {"seed", v.seed},
           {"tol", number_json(v.tol)},
           {"worst_ratio", number_json(v.worst_ratio)},
           {"max_magnitude", number_json(v.max_magnitude)}};
    if (v.witness)
        j["witness"] = {{"point", point_json(v.witness->point)},
                        {"component", v.witness->component},
                        {"value", number_json(v.witness->value)},
                        {"magnitude", number_json(v.witness->magnitude)}};
    else
        j["witness"] = nullptr;
    return j;
}

json box_json(const odegeom::DomainBox& b) {
    json j = json::object();
    for (const auto& [k, r] : b.ranges()) j[k] = {number_json(r.lo), number_json(r.hi)};
    return j;
}

json signature_json(const odegeom::Signature& s) { return {s.positive, s.negative, s.zero}; }

std::string signature_text(const odegeom::Signature& s) {
    return "(" + std::to_string(s.positive) + "," + std::to_string(s.negative) + "," + std::to_string(s.zero) + ")";
}

std::string check_line(const std::string& name, const odegeom::ZeroVerdict& v) {
    return "  " + name + ": " + odegeom::describe(v);
}

void merge_report(Outcome& out, const odegeom::InvariantReport& r) {
    out.report["subject"] = r.subject;
    out.report["verdict"] = r.verdict;
    out.report["consistent"] = r.consistent;
    json checks = json::array();
    for (const auto& c : r.checks) {
        json cj = verdict_json(c.verdict);
        cj["name"] = c.name;
        if (c.residual) cj["residual"] = odegeom::to_string(*c.residual);
        checks.push_back(std::move(cj));
    }
    out.report["checks"] = std::move(checks);
    json notes = json::object();
    for (const auto& [k, v] : r.notes) notes[k] = v;
    out.report["notes"] = std::move(notes);
    out.lines.push_back(r.subject + " " + r.input + ": " + r.verdict + (r.consistent ? "" : " (inconsistent)"));
    for (const auto& c : r.checks) out.lines.push_back(check_line(c.name, c.verdict));
    for (const auto& [k, v] : r.notes) out.lines.push_back("  " + k + ": " + v);
    if (!r.consistent) out.pass = false;
}

std::string default_catalog_path() { return std::string(ODEGEOM_DATA_DIR) + "/catalog.json"; }

}  // namespace cli
