#pragma once

#include "CLI11.hpp"
#include "json.hpp"
#include "odegeom/curvature.hpp"
#include "odegeom/report.hpp"
#include "odegeom/zero_test.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cli {

using json = nlohmann::json;

struct RunConfig {
    double tol = 1e-9;
    int samples = 20;
    std::uint64_t seed = 0;
    std::vector<std::string> box;
    bool json_output = false;
    bool tol_set = false;  // chosen by flag or config file rather than defaulted

    odegeom::ZeroTestOptions options() const { return {samples, seed, static_cast<odegeom::real>(tol)}; }
    odegeom::DomainBox user_box() const { return odegeom::DomainBox::from_specs(box); }
    void validate() const;
    json to_json() const;
};

// JSON object with any of: tol, samples, seed, box, json
void apply_config_file(RunConfig& cfg, const std::string& path);

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BoxError : public UsageError {
public:
    using UsageError::UsageError;
};

struct Outcome {
    json report = json::object();
    std::vector<std::string> lines;
    bool pass = true;
};

json number_json(odegeom::real v);
json point_json(const odegeom::Point& p);
json verdict_json(const odegeom::ZeroVerdict& v);
json box_json(const odegeom::DomainBox& b);
json signature_json(const odegeom::Signature& s);
std::string signature_text(const odegeom::Signature& s);
// verdict, consistent, checks and notes of an invariant report
void merge_report(Outcome& out, const odegeom::InvariantReport& r);
std::string check_line(const std::string& name, const odegeom::ZeroVerdict& v);

std::string default_catalog_path();

// Every subcommand, bound to its own option storage. Global options are added
// by the caller; one instance parses one command line.
class CommandSet {
public:
    CommandSet();
    CommandSet(const CommandSet&) = delete;
    CommandSet& operator=(const CommandSet&) = delete;

    CLI::App& app() { return app_; }
    std::string command() const;  // "ode3 classify", empty before a parse
    Outcome run(const RunConfig& cfg);

private:
    const CLI::App* chosen() const;

    CLI::App app_;
    std::vector<std::pair<CLI::App*, std::function<Outcome(const RunConfig&)>>> leaves_;
    std::string F_, Q_, U_, X_, expect_, system_, catalog_ = default_catalog_path(), k_text_ = "3";
    int example_ = 4;
    double at_q_ = 1;
    bool mutated_ = false, mutations_ = false;
};

Outcome run_verify_paper(const RunConfig& cfg, const std::string& catalog_path);

}  // namespace cli
