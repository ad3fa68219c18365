#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "gcce/commands.hpp"
#include "gcce/error.hpp"
#include "gcce/units.hpp"

namespace {

int run(const std::string& command, const std::string& config_path, gcce::RunOptions options) {
    using namespace gcce;
    const SimulationConfig config = load_config(config_path);
    options.log = &std::cerr;
    if (command == "simulate") {
        const ResultRecord rec = cmd_simulate(config, options);
        if (rec.result.fit)
            std::cout << "T2 = " << rec.result.fit->t2 / units::kMicrosecond << " us, beta = " << rec.result.fit->beta << "\n";
        else
            std::cout << "no fit: " << rec.result.fit_error << "\n";
    } else if (command == "sweep") {
        const SweepReport r = cmd_sweep_concentration(config, options);
        std::cout << "log-log slope = " << r.scan.loglog_slope << ", intercept = " << r.scan.loglog_intercept << "\n";
        for (const auto& c : r.crossovers)
            std::cout << "crossover at T2 = " << c.target_us << " us: " << c.concentration * 100.0 << " % (" << c.molar_mM
                      << " mM)\n";
        for (const auto& f : r.failures) std::cout << "failed: " << f << "\n";
    } else if (command == "cpmg") {
        const CpmgReport r = cmd_cpmg_scan(config, options);
        for (const auto& p : r.points) std::cout << "n = " << p.n << ": T2 = " << p.t2 / units::kMicrosecond << " us\n";
        if (r.has_power_law)
            std::cout << "T2_0 = " << r.power_law.t2_0 / units::kMicrosecond << " us, p = " << r.power_law.p << "\n";
        for (const auto& f : r.failures) std::cout << "failed: " << f << "\n";
    } else if (command == "verify") {
        const VerifyReport r = cmd_verify(config, options);
        for (std::size_t k = 0; k < r.max_deviation.size(); ++k)
            std::cout << "order " << k + 1 << ": max |L_gcce - L_exact| = " << r.max_deviation[k] << "\n";
        if (!r.passed) {
            std::cout << "full-order result disagrees with exact evolution\n";
            return 4;
        }
    } else if (command == "fit") {
        const StretchedExpFit f = cmd_fit(config, options);
        std::cout << "T2 = " << f.t2 / units::kMicrosecond << " us, beta = " << f.beta << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized cluster-correlation expansion for central-spin decoherence"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int workers = 1;
    for (const char* name : {"simulate", "sweep", "cpmg", "verify", "fit"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "Configuration file")->required();
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--seed", seed, "Master seed, overrides the config");
        sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    }
    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    gcce::RunOptions options;
    options.out_dir = out_dir;
    options.workers = workers;
    if (app.get_subcommands().front()->count("--seed")) options.seed = seed;
    try {
        return run(command, config_path, options);
    } catch (const gcce::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const gcce::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const gcce::VerificationError& e) {
        std::cerr << "verification error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
