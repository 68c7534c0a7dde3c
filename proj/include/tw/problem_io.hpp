#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "tw/profile.hpp"

namespace tw {

struct ProblemFile {
    CoefficientSet cs;
    SolverOptions opt;
    std::string name;
};

// Problem files are JSON: coefficients are expression strings in phi, or
// arrays of {"expr": ..., "to": ...} pieces covering [0,1].
ProblemFile problem_from_json(const nlohmann::json& j);
ProblemFile load_problem_file(const std::string& path);

nlohmann::json validation_to_json(const ValidationReport& rep);
nlohmann::json thresholds_to_json(const ThresholdSet& ts);
nlohmann::json report_to_json(const SpeedReport& rep);
nlohmann::json condition_to_json(const std::string& id,
                                 const ConditionReport& rep);
nlohmann::json growth_to_json(const GrowthFlags& gf);
nlohmann::json sharpness_to_json(const SharpnessClass& sc);
nlohmann::json profile_meta_to_json(const ProfileCurve& p);

// CSV with header xi,phi,dphi; 17 significant digits per value.
void write_profile_csv(std::ostream& os, const ProfileCurve& p);

std::string format_double(double v);

}  // namespace tw
