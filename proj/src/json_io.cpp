#include "oe/json_io.hpp"

#include <fstream>
#include <sstream>

#include "oe/rational.hpp"

namespace oe {

Json supernatural_to_json(const SupernaturalNumber& sn) {
    Json j = Json::object();
    for (const auto& [q, e] : sn.exponents()) {
        if (e.infinite)
            j[q.get_str()] = "inf";
        else
            j[q.get_str()] = e.value;
    }
    return j;
}

SupernaturalNumber supernatural_from_json(const Json& j) {
    std::map<mpz_class, Exponent> exps;
    for (const auto& [key, val] : j.items()) {
        Exponent e = val.is_string() ? Exponent::inf()
                                     : Exponent::fin(val.get<unsigned long>());
        exps.emplace(mpz_class(key), e);
    }
    return SupernaturalNumber(std::move(exps));
}

Json omega_to_json(const OmegaFn& omega) {
    Json j = Json::object();
    switch (omega.family()) {
        case OmegaFn::Family::Power:
            j["family"] = "power";
            j["p"] = rational_str(omega.p());
            break;
        case OmegaFn::Family::PowerLog:
            j["family"] = "powerlog";
            j["p"] = rational_str(omega.p());
            j["q"] = rational_str(omega.q());
            break;
        case OmegaFn::Family::Log:
            j["family"] = "log";
            break;
        case OmegaFn::Family::Constant:
            j["family"] = "constant";
            j["c"] = rational_str(omega.p());
            break;
        case OmegaFn::Family::Table: {
            j["family"] = "table";
            // reconstructable from the shorthand form
            j["spec"] = omega.describe();
            break;
        }
    }
    return j;
}

OmegaFn omega_from_json(const Json& j) {
    const std::string family = j.at("family").get<std::string>();
    if (family == "power") return OmegaFn::power(parse_rational(j.at("p").get<std::string>()));
    if (family == "powerlog")
        return OmegaFn::power_log(parse_rational(j.at("p").get<std::string>()), parse_rational(j.at("q").get<std::string>()));
    if (family == "log") return OmegaFn::log();
    if (family == "constant") return OmegaFn::constant(parse_rational(j.at("c").get<std::string>()));
    if (family == "table") return OmegaFn::parse(j.at("spec").get<std::string>());
    throw Error("unknown omega family: " + family);
}

Json plan_to_json(const SequencePlan& plan) {
    Json j = Json::object();
    Json ks = Json::array();
    for (const auto& k : plan.ks) ks.push_back(k.get_str());
    j["ks"] = std::move(ks);
    j["targetX"] = supernatural_to_json(plan.target_x);
    j["targetY"] = supernatural_to_json(plan.target_y);
    j["omega"] = omega_to_json(plan.omega);
    j["delta"] = rational_str(plan.delta);
    j["terms_II"] = plan.terms_ii;
    j["terms_III"] = plan.terms_iii;
    j["cursorX"] = plan.cursor_x;
    j["cursorY"] = plan.cursor_y;
    return j;
}

SequencePlan plan_from_json(const Json& j) {
    SequencePlan p;
    for (const auto& s : j.at("ks")) p.ks.emplace_back(s.get<std::string>());
    p.target_x = supernatural_from_json(j.at("targetX"));
    p.target_y = supernatural_from_json(j.at("targetY"));
    p.omega = omega_from_json(j.at("omega"));
    p.delta = parse_rational(j.at("delta").get<std::string>());
    p.terms_ii = j.at("terms_II").get<std::vector<double>>();
    p.terms_iii = j.at("terms_III").get<std::vector<double>>();
    p.cursor_x = j.value("cursorX", std::uint64_t{0});
    p.cursor_y = j.value("cursorY", std::uint64_t{0});
    return p;
}

Json certificate_to_json(const PlanCertificate& cert) {
    Json j = Json::object();
    j["all_pass"] = cert.all_pass();
    Json items = Json::array();
    for (const auto& it : cert.items)
        items.push_back({{"name", it.name}, {"pass", it.pass}, {"detail", it.detail}});
    j["items"] = std::move(items);
    return j;
}

Json verification_to_json(const VerificationReport& rep) {
    Json j = Json::object();
    j["plan_hash"] = rep.plan_hash;
    j["omega"] = rep.omega;
    j["all_pass"] = rep.all_pass();
    Json levels = Json::array();
    for (const auto& lvl : rep.levels) {
        Json lj = Json::object();
        lj["level"] = lvl.level;
        lj["domain"] = lvl.domain;
        lj["skipped"] = lvl.skipped;
        Json checks = Json::array();
        for (const auto& c : lvl.checks)
            checks.push_back(
                {{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"bound", c.bound}});
        lj["checks"] = std::move(checks);
        if (lvl.has_diagram) {
            lj["diagram_defect"] = lvl.diagram_defect.get_str();
            lj["diagram_bound"] = lvl.diagram_bound.get_str();
            if (!lvl.diagram_defect_points.empty())
                lj["diagram_defect_points"] = lvl.diagram_defect_points;
        }
        if (lvl.has_composition) {
            lj["composition_defect"] = lvl.composition_defect.get_str();
            lj["composition_bound"] = lvl.composition_bound.get_str();
            if (!lvl.composition_defect_points.empty())
                lj["composition_defect_points"] = lvl.composition_defect_points;
        }
        if (lvl.has_fiber) {
            lj["fiber_max"] = lvl.fiber_max.get_str();
            lj["fiber_bound"] = lvl.fiber_bound.get_str();
        }
        if (lvl.has_norms) {
            lj["norm_psi"] = lvl.norm_psi;
            lj["norm_psi_inv"] = lvl.norm_psi_inv;
            lj["norm_mod_psi_inv"] = lvl.norm_mod_psi_inv;
            lj["psi_bound"] = lvl.psi_bound;
        }
        if (lvl.has_phi_norm) {
            lj["norm_phi"] = lvl.norm_phi;
            lj["phi_bound"] = lvl.phi_bound;
        }
        lj["table_mismatches"] = lvl.table_mismatches;
        lj["shortcut_failures"] = lvl.shortcut_failures;
        levels.push_back(std::move(lj));
    }
    j["levels"] = std::move(levels);
    return j;
}

std::string verification_to_csv(const VerificationReport& rep) {
    std::ostringstream os;
    os << "plan_hash,level,check,value,bound,pass\n";
    for (const auto& lvl : rep.levels) {
        if (lvl.skipped) {
            os << rep.plan_hash << "," << lvl.level << ",skipped,,,skipped\n";
            continue;
        }
        for (const auto& c : lvl.checks) {
            std::string name = c.name, value = c.value, bound = c.bound;
            for (auto* s : {&name, &value, &bound})
                for (auto& ch : *s)
                    if (ch == ',') ch = ';';
            os << rep.plan_hash << "," << lvl.level << "," << name << "," << value << "," << bound
               << "," << (c.pass ? "pass" : "FAIL") << "\n";
        }
    }
    return os.str();
}

std::string defect_plot_csv(const VerificationReport& rep) {
    std::ostringstream os;
    os << "level,diagram_defect,diagram_bound,composition_defect,composition_bound\n";
    for (const auto& lvl : rep.levels) {
        if (!lvl.has_diagram && !lvl.has_composition) continue;
        os << lvl.level << ",";
        if (lvl.has_diagram)
            os << lvl.diagram_defect.get_str() << "," << lvl.diagram_bound.get_str();
        else
            os << ",";
        os << ",";
        if (lvl.has_composition)
            os << lvl.composition_defect.get_str() << "," << lvl.composition_bound.get_str();
        else
            os << ",";
        os << "\n";
    }
    return os.str();
}

std::string norm_plot_csv(const VerificationReport& rep) {
    std::ostringstream os;
    os << "level,norm_psi,norm_psi_inv,norm_mod_psi_inv,psi_bound,norm_phi,phi_bound\n";
    for (const auto& lvl : rep.levels) {
        if (!lvl.has_norms) continue;
        os << lvl.level << "," << lvl.norm_psi << "," << lvl.norm_psi_inv << ","
           << lvl.norm_mod_psi_inv << "," << lvl.psi_bound << ",";
        if (lvl.has_phi_norm)
            os << lvl.norm_phi << "," << lvl.phi_bound;
        else
            os << ",";
        os << "\n";
    }
    return os.str();
}

Json simulation_summary_to_json(const MonteCarloResult& mc, const StabilizationSummary& stab,
                                const std::string& plan_hash) {
    Json j = Json::object();
    j["plan_hash"] = plan_hash;
    j["samples"] = mc.samples;
    j["estimate"] = mc.estimate;
    j["std_error"] = mc.std_error;
    j["omega1_plus_delta"] = mc.omega1_plus_delta;
    j["series_bound"] = mc.series_bound;
    j["within_budget"] = mc.within_budget();
    j["stabilized_fraction"] = stab.stabilized_fraction;
    j["stable_fraction_from_stage"] = stab.stable_fraction_from_stage;
    return j;
}

std::string samples_csv(const MonteCarloResult& mc, const StabilizationSummary& stab) {
    std::ostringstream os;
    os << "sample,stable_stage,final_cocycle,omega_value\n";
    for (std::size_t i = 0; i < mc.omega_values.size(); ++i) {
        os << i << ",";
        if (i < stab.records.size()) {
            os << stab.records[i].first_stable_stage << ",";
            if (!stab.records[i].cocycle_trace.empty())
                os << stab.records[i].cocycle_trace.back().get_str();
            os << ",";
        } else {
            os << ",,";
        }
        os << mc.omega_values[i] << "\n";
    }
    return os.str();
}

std::string partial_means_csv(const MonteCarloResult& mc) {
    std::ostringstream os;
    os << "samples,partial_mean\n";
    double sum = 0.0;
    for (std::size_t i = 0; i < mc.omega_values.size(); ++i) {
        sum += mc.omega_values[i];
        const std::size_t n = i + 1;
        if ((n & (n - 1)) == 0 || n == mc.omega_values.size())
            os << n << "," << sum / static_cast<double>(n) << "\n";
    }
    return os.str();
}

std::string stabilization_csv(const StabilizationSummary& stab) {
    std::ostringstream os;
    os << "stage,stable_fraction_from_stage\n";
    for (std::size_t s = 1; s < stab.stable_fraction_from_stage.size(); ++s)
        os << s << "," << stab.stable_fraction_from_stage[s] << "\n";
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    f << content;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace oe
