#pragma once

#include <string>

#include "json.hpp"
#include "oe/plan.hpp"
#include "oe/simulate.hpp"
#include "oe/verifier.hpp"

namespace oe {

using Json = nlohmann::ordered_json;

// supernatural numbers: {"2": "inf", "3": 5}
Json supernatural_to_json(const SupernaturalNumber& sn);
SupernaturalNumber supernatural_from_json(const Json& j);

// omega: {"family": "power", "p": "1/2"} etc.; rationals as "num/den" strings
Json omega_to_json(const OmegaFn& omega);
OmegaFn omega_from_json(const Json& j);

// plan: {"ks": [...decimal strings...], "targetX": ..., "targetY": ...,
//        "omega": ..., "delta": "num/den", "terms_II": [...], "terms_III": [...],
//        "cursorX": n, "cursorY": n}
Json plan_to_json(const SequencePlan& plan);
SequencePlan plan_from_json(const Json& j);

Json certificate_to_json(const PlanCertificate& cert);
Json verification_to_json(const VerificationReport& rep);
std::string verification_to_csv(const VerificationReport& rep);
std::string defect_plot_csv(const VerificationReport& rep);
std::string norm_plot_csv(const VerificationReport& rep);

Json simulation_summary_to_json(const MonteCarloResult& mc, const StabilizationSummary& stab,
                                const std::string& plan_hash);
std::string samples_csv(const MonteCarloResult& mc, const StabilizationSummary& stab);
std::string partial_means_csv(const MonteCarloResult& mc);
std::string stabilization_csv(const StabilizationSummary& stab);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace oe
