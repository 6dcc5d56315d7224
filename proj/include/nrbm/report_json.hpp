#pragma once

// JSON serialization of StatReports.  Every report record carries exactly
// the seven fields {name, estimate, se, p_value, target, tolerance, verdict};
// p_value is null for moment/band checks.

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nrbm/stats.hpp"

namespace nrbm {

inline nlohmann::json report_to_json(const StatReport& r) {
    nlohmann::json j;
    j["name"] = r.name;
    j["estimate"] = r.estimate;
    j["se"] = r.std_error;
    if (r.p_value)
        j["p_value"] = *r.p_value;
    else
        j["p_value"] = nullptr;
    j["target"] = r.target;
    j["tolerance"] = r.tolerance;
    j["verdict"] = r.pass ? "pass" : "fail";
    return j;
}

inline bool all_hard_pass(const std::vector<StatReport>& reports) {
    for (const auto& r : reports)
        if (!r.pass && !r.warn_only) return false;
    return true;
}

inline void write_summary(const std::string& path, const std::vector<StatReport>& reports,
                          const nlohmann::json& meta = nlohmann::json::object()) {
    nlohmann::json j = meta;
    j["reports"] = nlohmann::json::array();
    for (const auto& r : reports) j["reports"].push_back(report_to_json(r));
    j["all_pass"] = all_hard_pass(reports);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("summary: cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

} // namespace nrbm
