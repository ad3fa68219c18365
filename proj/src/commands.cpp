#include "gcce/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <memory>
#include <json.hpp>

#include "gcce/error.hpp"
#include "gcce/exact.hpp"
#include "gcce/io.hpp"
#include "gcce/rng.hpp"
#include "gcce/units.hpp"

namespace gcce {

using nlohmann::json;

namespace {

PulseSequence sequence_from(const SimulationConfig& c) {
    PulseSequence seq;
    if (c.sequence == "fid")
        seq = PulseSequence::fid();
    else if (c.sequence == "hahn")
        seq = PulseSequence::hahn();
    else
        seq = PulseSequence::cpmg(c.n_pulses);
    seq.axis = c.pulse_axis == "x" ? PulseAxis::X : PulseAxis::Y;
    return seq;
}

CentralCoupling coupling_from(const std::string& s) {
    if (s == "ising") return CentralCoupling::Ising;
    if (s == "none") return CentralCoupling::None;
    return CentralCoupling::Full;
}

std::string path_in(const std::string& dir, const std::string& name) { return (std::filesystem::path(dir) / name).string(); }

json fit_json(const StretchedExpFit& f) {
    return json{{"t2_ms", f.t2},
                {"t2_us", f.t2 / units::kMicrosecond},
                {"beta", f.beta},
                {"residual", f.residual},
                {"t2_stderr_ms", f.t2_stderr},
                {"beta_stderr", f.beta_stderr}};
}

json meta_json(const CoherenceMeta& m) {
    return json{{"order", m.order},
                {"r_bath", m.r_bath},
                {"r_dipole", m.r_dipole},
                {"sequence", m.sequence},
                {"field_gauss", {m.field[0], m.field[1], m.field[2]}},
                {"seeds", m.seeds},
                {"n_clusters", m.n_clusters},
                {"guarded_points", m.guarded_points},
                {"total_quotient_points", m.total_points},
                {"flagged", m.flagged},
                {"failures", m.failures}};
}

void say(std::ostream* log, const std::string& msg) {
    if (log) *log << msg << std::endl;
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SimulationConfig with_seed(SimulationConfig c, const RunOptions& o) {
    if (o.seed) c.seed = *o.seed;
    c.validate();
    return c;
}

} // namespace

SpeciesRegistry registry_for(const SimulationConfig& config) {
    SpeciesRegistry reg = SpeciesRegistry::defaults(units::kFreeElectronG);
    if (!config.species.empty())
        for (const auto& s : load_species_registry(config.resolve(config.species)).all()) reg.add(s);
    return reg;
}

CentralSystem central_from_config(const SimulationConfig& config, const SpeciesRegistry& registry, const Vec3& position) {
    CentralSystem cs;
    cs.g_tensor = config.g_diag.asDiagonal();
    cs.field = config.field_gauss;
    cs.position = position;
    if (config.central_nucleus != "none" && !config.central_nucleus.empty()) {
        OwnNucleus n;
        n.species = registry.find(config.central_nucleus);
        n.hyperfine = (config.hyperfine_mhz * units::kMHz).asDiagonal();
        n.quadrupole_p = units::mhz_to_rad_per_ms(config.quadrupole_mhz);
        cs.own_nucleus = n;
    }
    const auto& q = config.qubit_levels;
    cs.qubit_levels = select_qubit_levels(build_central_hamiltonian(cs), cs, {LevelLabel{q[0], q[1]}, LevelLabel{q[2], q[3]}});
    return cs;
}

std::vector<BathSpin> synthetic_bath(int n, double box, const SpinSpecies& species, std::uint64_t seed, double min_separation) {
    Rng rng(seed);
    std::vector<BathSpin> out;
    int attempts = 0;
    while (static_cast<int>(out.size()) < n) {
        if (++attempts > 100000) throw ConfigError("cannot place synthetic spins with the requested separation");
        const Vec3 p((rng.uniform() - 0.5) * box, (rng.uniform() - 0.5) * box, (rng.uniform() - 0.5) * box);
        if (p.norm() < min_separation) continue;
        bool ok = true;
        for (const auto& s : out) ok = ok && (s.position - p).norm() >= min_separation;
        if (!ok) continue;
        BathSpin s;
        s.position = p;
        s.species = species;
        out.push_back(s);
    }
    return out;
}

EnsembleProblem problem_from_config(const SimulationConfig& config, int workers) {
    config.validate();
    if (config.bath_type != BathType::Synthetic && config.structure.empty())
        throw ConfigError("structure is required for this bath_type");
    const SpeciesRegistry reg = registry_for(config);
    EnsembleProblem p;
    p.seed = config.seed;
    p.n_realizations = static_cast<std::size_t>(config.n_realizations);
    p.n_meanfield_samples = static_cast<std::size_t>(config.n_meanfield_samples);
    p.mean_field = config.mean_field;
    p.r_bath = config.r_bath;
    p.settings.order = static_cast<std::size_t>(config.order);
    p.settings.r_dipole = config.r_dipole;
    p.settings.coupling.central = coupling_from(config.central_coupling);
    p.settings.coupling.bath_bath = config.bath_bath;
    p.settings.coupling.dim_cap = static_cast<std::size_t>(config.dim_cap);
    p.settings.sequence = sequence_from(config);
    p.settings.times = uniform_grid(config.t_max_ms, static_cast<std::size_t>(config.n_points));
    p.settings.workers = workers;
    p.settings.cluster_cap = static_cast<std::size_t>(config.cluster_cap);
    p.settings.sampled_members = config.mean_field && config.bath_state == "sampled";

    if (config.bath_type == BathType::Synthetic) {
        p.central = central_from_config(config, reg, Vec3::Zero());
        const SpinSpecies h = reg.find("H");
        const int n = config.synthetic_spins;
        const double box = config.synthetic_box;
        p.realization = [h, n, box](std::size_t, std::uint64_t seed) {
            BathRealization r;
            r.seed = seed;
            r.spins = synthetic_bath(n, box, h, seed);
            return r;
        };
        return p;
    }

    auto cell = std::make_shared<const UnitCell>(load_structure(config.resolve(config.structure)));
    const Vec3 center = cell->qubit_position();
    p.central = central_from_config(config, reg, center);

    std::vector<BathSpin> nuclear;
    if (config.bath_type != BathType::Electron) {
        nuclear = build_bath(*cell, config.r_bath, BathFilter{{"H", reg.find("H")}}, center);
        if (config.bath_type == BathType::NuclearD) nuclear = substitute_isotope(nuclear, reg.find("H"), reg.find("D"));
    }
    if (config.bath_type == BathType::NuclearH || config.bath_type == BathType::NuclearD) {
        p.realization = [nuclear](std::size_t, std::uint64_t seed) {
            BathRealization r;
            r.seed = seed;
            r.spins = nuclear;
            return r;
        };
        return p;
    }

    // Electron sites, optionally carrying the host g tensor and a frozen own-nucleus shift.
    const std::vector<Vec3> sites = qubit_sites(*cell, config.r_bath);
    SpinSpecies electron = reg.find("e");
    const bool bound = config.electron_mode == ElectronMode::Bound;
    const CentralSystem host = p.central;
    if (bound) electron.gamma = host.dipolar_gamma();
    const double f = config.concentration;
    p.realization = [sites, electron, bound, host, f, nuclear](std::size_t, std::uint64_t seed) {
        BathRealization r = sample_electron_bath(sites, f, seed, electron);
        if (bound) {
            Rng rng(derive_seed(seed, {0xb0u}));
            for (auto& s : r.spins) {
                s.zeeman_tensor = Mat3(units::kBohrRadPerMsGauss * host.g_tensor);
                if (host.own_nucleus) {
                    const double spin = host.own_nucleus->species.s;
                    const auto k = rng.below(static_cast<std::uint64_t>(spin_dimension(spin)));
                    s.local_field = host.own_nucleus->hyperfine * Vec3(0.0, 0.0, spin - static_cast<double>(k));
                }
            }
        }
        if (!nuclear.empty()) r.spins.insert(r.spins.begin(), nuclear.begin(), nuclear.end());
        return r;
    };
    return p;
}

SimulationResult simulate_with_fit(const SimulationConfig& config, int workers, std::ostream* log) {
    SimulationConfig c = config;
    c.validate();
    int direction = 0;
    SimulationResult out;
    for (int attempt = 0;; ++attempt) {
        const EnsembleProblem problem = problem_from_config(c, workers);
        out.curve = ensemble_coherence(problem);
        out.t_max_ms = c.t_max_ms;
        const std::vector<double> mag = out.curve.magnitude();
        say(log, "  t_max " + std::to_string(c.t_max_ms) + " ms, final |L| " + std::to_string(mag.back()));
        if (attempt >= c.max_extensions) break;
        const double lowest = *std::min_element(mag.begin(), mag.end());
        if (lowest >= 0.9 && direction >= 0) {
            // Gaussian-like estimate from the last point, bounded to [2x, 16x].
            double factor = 2.0;
            const double last = mag.back();
            if (last > 0.0 && last < 0.999) factor = std::clamp(2.5 / std::sqrt(-std::log(last)), 2.0, 16.0);
            else if (last >= 0.999) factor = 16.0;
            c.t_max_ms *= factor;
            direction = 1;
            continue;
        }
        const auto cross = std::find_if(mag.begin(), mag.end(), [](double m) { return m < std::exp(-1.0); });
        const auto k = static_cast<std::size_t>(cross - mag.begin());
        if (cross != mag.end() && k < mag.size() / 10 && direction <= 0) {
            c.t_max_ms = std::max(out.curve.times[std::max<std::size_t>(k, 1)] * 2.5, c.t_max_ms / 64.0);
            direction = -1;
            continue;
        }
        break;
    }
    try {
        out.fit = fit_stretched_exp(out.curve);
    } catch (const NumericalError& e) {
        out.fit_error = e.what();
    }
    return out;
}

ResultRecord cmd_simulate(const SimulationConfig& config, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const SimulationConfig c = with_seed(config, options);
    ResultRecord rec;
    rec.config_echo = echo_config(c);
    rec.result = simulate_with_fit(c, options.workers, options.log);
    rec.wall_time_s = elapsed_s(start);
    if (!options.out_dir.empty()) {
        write_curve_csv(path_in(options.out_dir, "curve.csv"), rec.result.curve);
        json j{{"command", "simulate"},
               {"version", rec.version},
               {"config", rec.config_echo},
               {"t_max_ms", rec.result.t_max_ms},
               {"meta", meta_json(rec.result.curve.meta)},
               {"wall_time_s", rec.wall_time_s}};
        if (rec.result.fit)
            j["fit"] = fit_json(*rec.result.fit);
        else
            j["fit_error"] = rec.result.fit_error;
        write_text_file(path_in(options.out_dir, "summary.json"), j.dump(2) + "\n");
    }
    return rec;
}

SweepReport cmd_sweep_concentration(const SimulationConfig& config, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const SimulationConfig base = with_seed(config, options);
    if (base.concentrations.size() < 3) throw ConfigError("concentrations: a sweep needs at least 3 values");
    SweepReport report;
    std::vector<ScanPoint> points;
    json rows = json::array();
    for (std::size_t i = 0; i < base.concentrations.size(); ++i) {
        const double f = base.concentrations[i];
        json row{{"concentration", f}};
        try {
            CoherenceCurve curve;
            std::optional<StretchedExpFit> fit;
            if (!base.sweep_curves.empty()) {
                curve = read_curve_csv(base.resolve(base.sweep_curves[i]));
                fit = fit_stretched_exp(curve);
            } else {
                SimulationConfig c = base;
                c.concentration = f;
                // Electron-bath T2 scales roughly as 1/f.
                c.t_max_ms = base.t_max_ms * base.concentration / f;
                say(options.log, "concentration " + std::to_string(f));
                SimulationResult r = simulate_with_fit(c, options.workers, options.log);
                curve = r.curve;
                if (!r.fit) throw InsufficientDecayError(r.fit_error);
                fit = r.fit;
                row["meta"] = meta_json(curve.meta);
            }
            if (!options.out_dir.empty()) write_curve_csv(path_in(options.out_dir, "curve_" + std::to_string(i) + ".csv"), curve);
            points.push_back({f, fit->t2});
            report.betas.push_back(fit->beta);
            row["fit"] = fit_json(*fit);
        } catch (const Error& e) {
            report.failures.push_back("concentration " + std::to_string(f) + ": " + e.what());
            row["error"] = e.what();
        }
        rows.push_back(row);
    }
    if (points.size() < 3)
        throw NumericalError("sweep produced only " + std::to_string(points.size()) + " successful points");
    report.scan = fit_loglog(points);

    std::optional<UnitCell> cell;
    if (!base.structure.empty()) {
        try {
            cell = load_structure(base.resolve(base.structure));
        } catch (const Error&) {
        }
    }
    int per_cell = base.qubits_per_cell;
    if (cell && per_cell == 0)
        per_cell = static_cast<int>(std::count_if(cell->atoms.begin(), cell->atoms.end(),
                                                  [&](const Atom& a) { return a.element == cell->qubit_element(); }));
    json crossings = json::array();
    for (double target : base.crossover_targets_us) {
        CrossoverResult cr;
        cr.target_us = target;
        cr.concentration = solve_crossover(report.scan, target * units::kMicrosecond);
        if (cell) cr.molar_mM = concentration_to_molar(cr.concentration, *cell, per_cell);
        report.crossovers.push_back(cr);
        crossings.push_back({{"target_us", target},
                             {"concentration", cr.concentration},
                             {"concentration_percent", cr.concentration * 100.0},
                             {"molar_mM", cr.molar_mM}});
    }
    if (!options.out_dir.empty()) {
        json j{{"command", "sweep"},
               {"version", kVersion},
               {"config", echo_config(base)},
               {"points", rows},
               {"loglog_slope", report.scan.loglog_slope},
               {"loglog_intercept", report.scan.loglog_intercept},
               {"crossovers", crossings},
               {"failures", report.failures},
               {"wall_time_s", elapsed_s(start)}};
        write_text_file(path_in(options.out_dir, "sweep.json"), j.dump(2) + "\n");
    }
    return report;
}

CpmgReport cmd_cpmg_scan(const SimulationConfig& config, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const SimulationConfig base = with_seed(config, options);
    if (base.pulse_counts.empty()) throw ConfigError("pulse_counts: at least one pulse count is required");
    CpmgReport report;
    json rows = json::array();
    for (std::size_t i = 0; i < base.pulse_counts.size(); ++i) {
        const double n = base.pulse_counts[i];
        if (n != std::floor(n)) throw ConfigError("pulse_counts must be integers");
        SimulationConfig c = base;
        c.sequence = "cpmg";
        c.n_pulses = static_cast<int>(n);
        c.t_max_ms = base.t_max_ms * n;
        json row{{"n", n}};
        say(options.log, "cpmg n = " + std::to_string(c.n_pulses));
        try {
            SimulationResult r = simulate_with_fit(c, options.workers, options.log);
            if (!options.out_dir.empty()) write_curve_csv(path_in(options.out_dir, "curve_n" + std::to_string(c.n_pulses) + ".csv"), r.curve);
            row["meta"] = meta_json(r.curve.meta);
            if (!r.fit) throw InsufficientDecayError(r.fit_error);
            report.points.push_back({n, r.fit->t2});
            report.betas.push_back(r.fit->beta);
            row["fit"] = fit_json(*r.fit);
        } catch (const Error& e) {
            report.failures.push_back("n = " + std::to_string(c.n_pulses) + ": " + e.what());
            row["error"] = e.what();
        }
        rows.push_back(row);
    }
    json j{{"command", "cpmg"}, {"version", kVersion}, {"config", echo_config(base)}, {"points", rows}, {"failures", report.failures}};
    if (report.points.size() >= 3) {
        report.power_law = fit_power_law(report.points);
        report.has_power_law = true;
        j["power_law"] = {{"t2_0_ms", report.power_law.t2_0}, {"t2_0_us", report.power_law.t2_0 / units::kMicrosecond},
                          {"p", report.power_law.p}};
    } else if (base.pulse_counts.size() >= 3) {
        throw NumericalError("cpmg scan produced fewer than 3 fitted points");
    }
    j["wall_time_s"] = elapsed_s(start);
    if (!options.out_dir.empty()) write_text_file(path_in(options.out_dir, "cpmg.json"), j.dump(2) + "\n");
    return report;
}

VerifyReport cmd_verify(const SimulationConfig& config, const RunOptions& options) {
    SimulationConfig c = with_seed(config, options);
    if (c.bath_type != BathType::Synthetic) throw ConfigError("bath_type: verify needs a synthetic bath");
    EnsembleProblem problem = problem_from_config(c, options.workers);
    const BathRealization bath = problem.realization(0, realization_seed(c.seed, 0));

    ExactOptions exact_options;
    exact_options.coupling = problem.settings.coupling;
    exact_options.dim_cap = problem.settings.coupling.dim_cap;
    const CoherenceCurve exact = exact_coherence(problem.central, bath.spins, problem.settings.sequence, problem.settings.times, exact_options);

    VerifyReport report;
    report.n_spins = bath.spins.size();
    json rows = json::array();
    EngineSettings s = problem.settings;
    s.r_dipole = 1e9;
    for (std::size_t m = 1; m <= bath.spins.size(); ++m) {
        s.order = m;
        const CoherenceCurve approx = gcce_coherence(problem.central, bath.spins, s);
        double dev = 0.0;
        for (std::size_t i = 0; i < approx.values.size(); ++i) dev = std::max(dev, std::abs(approx.values[i] - exact.values[i]));
        report.max_deviation.push_back(dev);
        rows.push_back({{"order", m}, {"max_deviation", dev}});
        if (!options.out_dir.empty()) write_curve_csv(path_in(options.out_dir, "gcce_order" + std::to_string(m) + ".csv"), approx);
    }
    report.passed = !report.max_deviation.empty() && report.max_deviation.back() < kVerifyTolerance;
    if (!options.out_dir.empty()) {
        write_curve_csv(path_in(options.out_dir, "exact.csv"), exact);
        json j{{"command", "verify"},
               {"version", kVersion},
               {"config", echo_config(c)},
               {"n_spins", report.n_spins},
               {"orders", rows},
               {"tolerance", kVerifyTolerance},
               {"passed", report.passed}};
        write_text_file(path_in(options.out_dir, "verify.json"), j.dump(2) + "\n");
    }
    return report;
}

StretchedExpFit cmd_fit(const SimulationConfig& config, const RunOptions& options) {
    if (config.input_curve.empty()) throw ConfigError("input_curve: the fit command needs a curve file");
    const CoherenceCurve curve = read_curve_csv(config.resolve(config.input_curve));
    const StretchedExpFit fit = fit_stretched_exp(curve);
    if (!options.out_dir.empty()) {
        json j{{"command", "fit"}, {"version", kVersion}, {"input_curve", config.input_curve}, {"fit", fit_json(fit)}};
        write_text_file(path_in(options.out_dir, "fit.json"), j.dump(2) + "\n");
    }
    return fit;
}

} // namespace gcce
