// odoe: plan, verify and simulate finite-depth orbit equivalences between
// Z-odometers. All outputs are deterministic given (inputs, seed); every
// output directory carries a manifest sufficient to reproduce it.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "oe/json_io.hpp"
#include "oe/rational.hpp"

namespace fs = std::filesystem;
using namespace oe;

namespace {

constexpr const char* kVersion = "odoe 0.1.0";

constexpr int kExitFail = 1;
constexpr int kExitNotSublinear = 2;
constexpr int kExitCapExceeded = 3;
constexpr int kExitNoFillerPrime = 4;
constexpr int kExitUsage = 64;

int thread_count(int cli_value) {
    if (const char* env = std::getenv("OE_THREADS")) return std::max(1, std::atoi(env));
    return std::max(1, cli_value);
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    long long ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start)
            .count();
    }
};

void write_manifest(const fs::path& dir, const std::string& subcommand, Json params,
                    const std::string& hash, const std::string& outcome, long long wall_ms) {
    Json m = Json::object();
    m["tool"] = kVersion;
    m["subcommand"] = subcommand;
    m["parameters"] = std::move(params);
    m["plan_hash"] = hash;
    m["outcome"] = outcome;
    // wall clock is the one reproducibility exception; kept in its own field
    m["wall_clock_ms"] = wall_ms;
    write_file((dir / "manifest.json").string(), m.dump(2) + "\n");
}

SequencePlan load_plan(const std::string& path) {
    return plan_from_json(Json::parse(read_file(path)));
}

int cmd_plan(const std::string& tx, const std::string& ty, const std::string& omega_s,
             const std::string& delta_s, long depth, unsigned long cap_bits,
             const std::string& out_dir) {
    Timer timer;
    fs::create_directories(out_dir);
    Json params{{"target-x", tx},   {"target-y", ty},       {"omega", omega_s},
                {"delta", delta_s}, {"depth", depth},       {"cap-bits", cap_bits}};
    try {
        SupernaturalNumber x = SupernaturalNumber::parse(tx);
        SupernaturalNumber y = SupernaturalNumber::parse(ty);
        OmegaFn omega = OmegaFn::parse(omega_s);
        mpq_class delta = parse_rational(delta_s);
        SequencePlan p = plan(x, y, omega, delta, depth, cap_bits);
        PlanCertificate cert = check_plan(p);
        write_file((fs::path(out_dir) / "plan.json").string(), plan_to_json(p).dump(2) + "\n");
        write_file((fs::path(out_dir) / "certificate.json").string(),
                   certificate_to_json(cert).dump(2) + "\n");
        const bool ok = cert.all_pass();
        write_manifest(out_dir, "plan", params, plan_hash(p), ok ? "certified" : "uncertified",
                       timer.ms());
        if (!ok) {
            std::cerr << "plan not certified; first failing condition: " << cert.first_failure()
                      << "\n";
            return kExitFail;
        }
        std::cout << "certified plan of depth " << p.depth() << " written to " << out_dir << "\n";
        return 0;
    } catch (const NotSublinearError& e) {
        std::cerr << "condition III unreachable: " << e.what() << "\n";
        return kExitNotSublinear;
    } catch (const CapExceededError& e) {
        std::cerr << "conditions II/III drove the search past the cap: " << e.what() << "\n";
        return kExitCapExceeded;
    } catch (const NoFillerPrimeError& e) {
        std::cerr << "condition I leaves no filler prime: " << e.what() << "\n";
        return kExitNoFillerPrime;
    }
}

int cmd_verify(const std::string& plan_path, std::uint64_t max_enum, int threads, bool strict,
               const std::string& out_dir) {
    Timer timer;
    fs::create_directories(out_dir);
    SequencePlan p = load_plan(plan_path);
    PlanCertificate cert = check_plan(p);
    fs::path dir(out_dir);
    Json params{{"plan", plan_path},
                {"max-enumeration", max_enum},
                {"strict", strict}};
    if (!cert.all_pass()) {
        // a broken plan cannot be enumerated; report the certificate and stop
        write_file((dir / "certificate.json").string(), certificate_to_json(cert).dump(2) + "\n");
        write_manifest(out_dir, "verify", params, plan_hash(p), "plan certificate failed",
                       timer.ms());
        std::cerr << "plan certificate failed: " << cert.first_failure() << "\n";
        return kExitFail;
    }
    VerifyOptions opt;
    opt.enumeration_cap = max_enum;
    opt.threads = thread_count(threads);
    VerificationReport rep = verify_plan(p, p.omega, opt);

    write_file((dir / "certificate.json").string(), certificate_to_json(cert).dump(2) + "\n");
    write_file((dir / "report.json").string(), verification_to_json(rep).dump(2) + "\n");
    write_file((dir / "report.csv").string(), verification_to_csv(rep));
    write_file((dir / "defect_vs_level.csv").string(), defect_plot_csv(rep));
    write_file((dir / "norms_vs_level.csv").string(), norm_plot_csv(rep));

    const bool ok = rep.all_pass();
    write_manifest(out_dir, "verify", params, rep.plan_hash,
                   ok ? "all checks pass" : "violations found", timer.ms());
    if (!ok) {
        for (const auto& lvl : rep.levels)
            for (const auto& c : lvl.checks)
                if (!c.pass)
                    std::cerr << "level " << lvl.level << ": " << c.name << " (" << c.value
                              << " vs " << c.bound << ")\n";
        return kExitFail;
    }
    if (strict && rep.any_skipped()) {
        std::cerr << "levels skipped over the enumeration cap (strict mode)\n";
        return kExitCapExceeded;
    }
    std::cout << "all checks pass (" << rep.levels.size() << " levels)\n";
    return 0;
}

int cmd_simulate(const std::string& plan_path, std::uint64_t samples, std::uint64_t seed,
                 int threads, double stab_target, const std::string& out_dir) {
    Timer timer;
    fs::create_directories(out_dir);
    SequencePlan p = load_plan(plan_path);
    const int t = thread_count(threads);
    fs::path dir(out_dir);

    MonteCarloResult mc;
    StabilizationSummary stab;
    if (samples > 0) {
        mc = monte_carlo_norm(p, p.omega, samples, seed, t);
        stab = stabilization_profile(p, samples, seed, t);
    } else {
        mc.omega1_plus_delta = p.omega.eval(mpz_class(1)) + p.delta.get_d();
        mc.series_bound = series_norm_bound(p, p.omega);
        stab.stabilized_fraction = 1.0;
    }
    write_file((dir / "samples.csv").string(), samples_csv(mc, stab));
    write_file((dir / "partial_means.csv").string(), partial_means_csv(mc));
    write_file((dir / "stabilization_curve.csv").string(), stabilization_csv(stab));
    write_file((dir / "summary.json").string(),
               simulation_summary_to_json(mc, stab, plan_hash(p)).dump(2) + "\n");

    const bool ok = samples == 0 ||
                    (mc.within_budget() && stab.stabilized_fraction >= stab_target);
    Json params{{"plan", plan_path}, {"samples", samples}, {"seed", seed},
                {"stab-target", stab_target}};
    write_manifest(out_dir, "simulate", params, plan_hash(p),
                   ok ? "within budget" : "budget or stabilization target missed", timer.ms());
    if (!ok) {
        std::cerr << "estimate " << mc.estimate << " +- " << mc.std_error << " vs budget "
                  << mc.omega1_plus_delta << "; stabilized " << stab.stabilized_fraction << "\n";
        return kExitFail;
    }
    std::cout << "estimate " << mc.estimate << " +- " << mc.std_error << " <= "
              << mc.omega1_plus_delta << "; stabilized fraction " << stab.stabilized_fraction
              << "\n";
    return 0;
}

int cmd_report(const std::string& run_dir) {
    // roll the artifacts of a previous run into one summary
    fs::path dir(run_dir);
    Json out = Json::object();
    for (const char* name : {"manifest.json", "certificate.json", "report.json", "summary.json"}) {
        fs::path f = dir / name;
        if (fs::exists(f)) out[name] = Json::parse(read_file(f.string()));
    }
    if (out.empty()) {
        std::cerr << "no run artifacts in " << run_dir << "\n";
        return kExitFail;
    }
    write_file((dir / "combined_report.json").string(), out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-depth construction and certification of odometer orbit equivalences"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "choose an interleaved base sequence");
    std::string tx, ty, omega_s = "power:1/2", delta_s = "1/10", out_dir = "run";
    long depth = 6;
    unsigned long cap_bits = 1u << 20;
    plan_cmd->add_option("--target-x", tx, "supernatural number of X, e.g. 2^inf")->required();
    plan_cmd->add_option("--target-y", ty, "supernatural number of Y, e.g. 3^inf")->required();
    plan_cmd->add_option("--omega", omega_s, "weight function, e.g. power:1/2, log, const:1");
    plan_cmd->add_option("--delta", delta_s, "budget delta as a rational");
    plan_cmd->add_option("--depth", depth, "number of entries k_1..k_depth")
        ->check(CLI::Range(2l, 64l));
    plan_cmd->add_option("--cap-bits", cap_bits, "bit-length cap per entry");
    plan_cmd->add_option("--out", out_dir, "output directory");

    // verify
    auto* verify_cmd = app.add_subcommand(
        "verify",
        "enumerate and check all level bounds.\n"
        "Writes report.json, report.csv (plan_hash,level,check,value,bound,pass),\n"
        "defect_vs_level.csv (level,diagram_defect,diagram_bound,composition_defect,"
        "composition_bound),\n"
        "norms_vs_level.csv (level,norm_psi,norm_psi_inv,norm_mod_psi_inv,psi_bound,"
        "norm_phi,phi_bound)");
    std::string plan_path;
    std::uint64_t max_enum = 1ull << 24;
    int threads = 1;
    bool strict = false;
    verify_cmd->add_option("--plan", plan_path, "plan JSON file")->required();
    verify_cmd->add_option("--max-enumeration", max_enum, "largest enumerable level domain");
    verify_cmd->add_option("--threads", threads, "worker threads (env OE_THREADS overrides)");
    verify_cmd->add_flag("--strict", strict, "fail when levels are skipped over the cap");
    verify_cmd->add_option("--out", out_dir, "output directory");

    // simulate
    auto* sim_cmd = app.add_subcommand(
        "simulate",
        "Monte Carlo limit-norm and stabilization.\n"
        "Writes summary.json, samples.csv (sample,stable_stage,final_cocycle,omega_value),\n"
        "partial_means.csv (samples,partial_mean), stabilization_curve.csv "
        "(stage,stable_fraction_from_stage)");
    std::uint64_t samples = 10000, seed = 0;
    double stab_target = 0.99;
    sim_cmd->add_option("--plan", plan_path, "plan JSON file")->required();
    sim_cmd->add_option("--samples", samples, "number of samples");
    sim_cmd->add_option("--seed", seed, "RNG seed");
    sim_cmd->add_option("--threads", threads, "worker threads (env OE_THREADS overrides)");
    sim_cmd->add_option("--stab-target", stab_target, "required stabilized fraction");
    sim_cmd->add_option("--out", out_dir, "output directory");

    // report
    auto* report_cmd = app.add_subcommand("report", "combine run artifacts into one summary");
    std::string run_dir = "run";
    report_cmd->add_option("--dir", run_dir, "run directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (plan_cmd->parsed())
            return cmd_plan(tx, ty, omega_s, delta_s, depth, cap_bits, out_dir);
        if (verify_cmd->parsed())
            return cmd_verify(plan_path, max_enum, threads, strict, out_dir);
        if (sim_cmd->parsed())
            return cmd_simulate(plan_path, samples, seed, threads, stab_target, out_dir);
        if (report_cmd->parsed()) return cmd_report(run_dir);
    } catch (const NotSublinearError& e) {
        std::cerr << e.what() << "\n";
        return kExitNotSublinear;
    } catch (const CapExceededError& e) {
        std::cerr << e.what() << "\n";
        return kExitCapExceeded;
    } catch (const NoFillerPrimeError& e) {
        std::cerr << e.what() << "\n";
        return kExitNoFillerPrime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}
