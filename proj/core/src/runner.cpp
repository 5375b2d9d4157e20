#include "conecert/runner.hpp"

#include "conecert/hilbert.hpp"
#include "conecert/io.hpp"
#include "conecert/plot.hpp"
#include "conecert/version.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace conecert {

namespace {

std::string artifact_comment(const Scenario& scenario) {
    return "scenario=" + scenario.name + " hash=" + scenario.hash_hex() + " tool=" +
           std::string(kToolName) + "/" + kToolVersion;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

void write_metadata(const std::filesystem::path& path, const Scenario& scenario,
                    double wall_seconds, const std::string& verdict_summary) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write metadata: " + path.string());
    out << "{\n";
    out << "  \"tool\": \"" << kToolName << "\",\n";
    out << "  \"version\": \"" << kToolVersion << "\",\n";
    out << "  \"scenario\": \"" << json_escape(scenario.name) << "\",\n";
    out << "  \"scenario_hash\": \"" << scenario.hash_hex() << "\",\n";
    out << "  \"wall_clock_s\": " << format_full(wall_seconds) << ",\n";
    out << "  \"verdicts\": \"" << json_escape(verdict_summary) << "\",\n";
    out << "  \"resolved\": [\n";
    const auto& entries = scenario.resolved().entries();
    std::size_t i = 0;
    for (const auto& [key, value] : entries) {
        out << "    \"" << key << " = " << json_escape(value.render()) << '"';
        out << (++i < entries.size() ? ",\n" : "\n");
    }
    out << "  ]\n}\n";
}

Scenario load_scenario(const std::filesystem::path& file, const RunOptions& options) {
    ConfigDoc doc = ConfigDoc::parse_file(file);
    if (options.seed_override) {
        doc.set("scenario.seed", ConfigValue{static_cast<double>(*options.seed_override)});
    }
    return Scenario::resolve(doc);
}

struct Timer {
    std::chrono::steady_clock::time_point begin = std::chrono::steady_clock::now();
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    }
};

} // namespace

SimulationProduct execute_simulation(Scenario scenario) {
    SimulationProduct product{std::move(scenario), {}, {}, 0.0};
    const Scenario& s = product.scenario;
    if (s.shift_margin > 0.0) {
        const ShiftResult shift = shift_to_positive(s.x0, s.shift_margin);
        product.alpha = shift.alpha;
        const SystemModel shifted = SystemModel::shifted(s.model, shift.alpha);
        product.certified = simulate(shifted, shift.shifted, s.t0, s.t_end, s.step_h, s.scheme);
        product.reported = unshift_trajectory(product.certified, shift.alpha);
    } else {
        product.reported = simulate(s.model, s.x0, s.t0, s.t_end, s.step_h, s.scheme);
        product.certified = product.reported;
    }
    return product;
}

int run_simulate(const std::filesystem::path& scenario_file, const RunOptions& options,
                 std::ostream& log) {
    const Timer timer;
    const Scenario scenario = load_scenario(scenario_file, options);
    SimulationProduct product = execute_simulation(scenario);

    const auto csv_path = options.out_dir / scenario.csv_name;
    write_trajectory_csv(csv_path, product.reported, artifact_comment(scenario));
    if (scenario.topology_signal) {
        write_signal_trace(options.out_dir / (scenario.name + "_signal.csv"),
                           *scenario.topology_signal, artifact_comment(scenario));
    }
    std::ostringstream verdict;
    verdict << "spread " << format_full(product.reported.spread_initial()) << " -> "
            << format_full(product.reported.spread_final());
    write_metadata(options.out_dir / (scenario.name + "_metadata.json"), scenario, timer.seconds(),
                   verdict.str());
    log << "simulate " << scenario.name << ": " << product.reported.samples() << " samples, "
        << verdict.str() << "\n";
    log << "wrote " << csv_path.string() << "\n";
    return kExitOk;
}

int run_certify(const std::filesystem::path& scenario_or_csv, const RunOptions& options,
                std::ostream& log) {
    const Timer timer;
    int code = kExitOk;
    std::string summary;
    std::ostringstream report_text;
    std::ostringstream report_json;

    const bool from_csv = scenario_or_csv.extension() == ".csv";
    if (from_csv) {
        const Trajectory traj = read_trajectory_csv(scenario_or_csv);
        const ConsensusReport report = certify_consensus(traj);
        report_text << render_report_text(report);
        report_json << render_report_json(report);
        summary = to_string(report.verdict);
        if (report.verdict == ConsensusVerdict::diverging ||
            report.verdict == ConsensusVerdict::undecided) {
            code = kExitCheckFailed;
        }
        const auto base = options.out_dir / "report";
        std::filesystem::create_directories(options.out_dir);
        const std::string provenance = read_artifact_comment(scenario_or_csv);
        std::ofstream txt(base.string() + ".txt", std::ios::binary);
        if (!provenance.empty()) txt << "# " << provenance << "\n";
        txt << report_text.str();
        std::ofstream(base.string() + ".json", std::ios::binary) << report_json.str();
        log << report_text.str();
        log << "verdict: " << summary << "\n";
        return code;
    }

    const Scenario scenario = load_scenario(scenario_or_csv, options);
    const SimulationProduct product = execute_simulation(scenario);
    const ConsensusReport report =
        certify_consensus(product.certified, scenario.fit_window_fraction, scenario.residual_tol);
    report_text << render_report_text(report);
    report_json << render_report_json(report);
    summary = to_string(report.verdict);
    if (report.verdict == ConsensusVerdict::diverging ||
        report.verdict == ConsensusVerdict::undecided) {
        code = kExitCheckFailed;
    }

    if (scenario.bound) {
        const SystemModel certified_model =
            product.alpha != 0.0 ? SystemModel::shifted(scenario.model, product.alpha)
                                 : scenario.model;
        const AccumulatedBoundReport bound_report = verify_accumulated_lower_bound(
            certified_model, product.certified, scenario.checkpoints(), *scenario.bound);
        report_text << render_bound_report_text(bound_report);
        // merge the two documents: strip the outer braces of the second
        std::string bound_json = render_bound_report_json(bound_report);
        std::string main_json = report_json.str();
        main_json.erase(main_json.rfind('}'));
        main_json.erase(main_json.find_last_not_of(" \n") + 1);
        bound_json.erase(0, bound_json.find('{') + 2);
        report_json.str(main_json + ",\n" + bound_json);
        summary += bound_report.pass ? "+bound-pass" : "+bound-fail";
        if (!bound_report.pass) code = kExitCheckFailed;
        if (bound_report.bound_qsc) {
            log << "bound graph is QSC with center node " << (bound_report.bound_qsc->center + 1)
                << " (margin " << format_full(bound_report.bound_qsc->margin) << ")\n";
        } else {
            log << "bound graph is NOT QSC\n";
        }
    }

    const auto base = options.out_dir / (scenario.report_name.empty() ? std::string("report")
                                                                      : scenario.report_name);
    std::filesystem::create_directories(options.out_dir);
    std::ofstream(base.string() + ".txt", std::ios::binary)
        << "# " << artifact_comment(scenario) << "\n"
        << report_text.str();
    std::string json_doc = report_json.str();
    json_doc.insert(json_doc.find('{') + 2,
                    "  \"scenario_hash\": \"" + scenario.hash_hex() + "\",\n");
    std::ofstream(base.string() + ".json", std::ios::binary) << json_doc;
    write_metadata(options.out_dir / (scenario.name + "_metadata.json"), scenario, timer.seconds(),
                   summary);
    log << report_text.str();
    log << "verdict: " << summary << "\n";
    return code;
}

int run_verify(const VerifyOptions& options, std::ostream& log) {
    long violations = 0;
    const bool all = options.suite == "all";

    if (all || options.suite == "contraction") {
        for (int n = options.n_begin; n <= options.n_end; ++n) {
            for (const double delta : {0.1, 0.3, 0.6, 1.0}) {
                for (const double frac : {0.2, 0.5, 0.8}) {
                    const double eps = frac * Cone::gamma_limit(n);
                    const ContractionReport r =
                        verify_lemma_contraction(n, delta, eps, options.samples, options.seed);
                    violations += r.violations;
                    log << "contraction n=" << n << " delta=" << delta << " eps=" << format_full(eps)
                        << ": C=" << format_full(r.c_theoretical)
                        << " observed=" << format_full(r.c_observed)
                        << " violations=" << r.violations << "\n";
                }
            }
        }
    }
    if (all || options.suite == "diameter") {
        for (const int n : {2, 3}) {
            for (const double gamma : {0.1, 0.2}) {
                const Cone cone(n, gamma);
                const DiameterEstimate est =
                    estimate_cone_diameter(cone, options.samples, options.seed);
                const bool over = est.worst_excess > 1e-9;
                const bool close_enough = est.sup >= 0.99 * est.formula;
                if (over || !close_enough) ++violations;
                log << "diameter n=" << n << " gamma=" << gamma
                    << ": formula=" << format_full(est.formula) << " sup=" << format_full(est.sup)
                    << " pairs=" << est.pairs << (over ? " EXCEEDED" : "") << "\n";
            }
        }
        SplitRng rng = SplitRng(options.seed).stream("verify-decay");
        for (const int n : {3, 4}) {
            Matrix a(n, n);
            for (int i = 0; i < n; ++i) {
                double row = 0.0;
                for (int j = 0; j < n; ++j) {
                    a(i, j) = rng.uniform01();
                    row += a(i, j);
                }
                for (int j = 0; j < n; ++j) a(i, j) = 0.6 * a(i, j) / row;
                a(i, 0) += 0.4;
            }
            const DiameterDecayReport decay = verify_diameter_decay(a, 0.3, 5, options.samples);
            violations += decay.violations;
            log << "diameter-decay n=" << n << " delta=" << format_full(decay.measured_delta)
                << " factor=" << format_full(decay.decay_factor)
                << " violations=" << decay.violations << "\n";
        }
    }
    if (all || options.suite == "sandwich") {
        SplitRng rng = SplitRng(options.seed).stream("verify-sandwich");
        long local = 0;
        for (int n = 2; n <= 10; ++n) {
            for (long s = 0; s < options.samples; ++s) {
                StateVector x(n);
                for (int i = 0; i < n; ++i) x[i] = rng.uniform01() < 0.1 ? 0.0 : rng.uniform(0.0, 10.0);
                if (x.norm() == 0.0) x[0] = 1.0;
                const AnBn q = an_bn(x);
                const double scale = std::max(1.0, q.b_n);
                if (q.b_n - n * q.a_n < -1e-12 * scale || 2 * n * q.a_n - q.b_n < -1e-12 * scale) {
                    ++local;
                }
            }
        }
        violations += local;
        log << "sandwich: " << (options.samples * 9) << " samples, violations=" << local << "\n";
    }
    if (all || options.suite == "two_cone") {
        const TwoConeReport r = two_cone_demo();
        if (!r.pass) ++violations;
        log << "two-cone: boundary gamma=" << format_full(r.boundary_gamma)
            << " preserved=" << (r.boundary_preserved ? "yes" : "no");
        for (const auto& c : r.cones) {
            log << "  K(" << c.gamma << ")->max " << format_full(c.max_gamma_after);
        }
        log << (r.pass ? "  pass" : "  FAIL") << "\n";
    }
    if (!all && options.suite != "contraction" && options.suite != "diameter" &&
        options.suite != "sandwich" && options.suite != "two_cone") {
        throw std::invalid_argument("unknown verify suite '" + options.suite + "'");
    }
    log << "total violations: " << violations << "\n";
    return violations == 0 ? kExitOk : kExitCheckFailed;
}

int run_sweep(const std::filesystem::path& scenario_file, const std::string& parameter,
              const std::vector<double>& values, const RunOptions& options, std::ostream& log,
              std::vector<SweepResultRow>* table_out) {
    const ConfigDoc base = ConfigDoc::parse_file(scenario_file);
    if (!values.empty() && !base.has(parameter)) {
        // the key may be addressable even if absent (it would introduce a
        // default override); require it to exist to catch typos
        throw std::invalid_argument("sweep parameter '" + parameter +
                                    "' is not a key of the scenario");
    }
    std::filesystem::create_directories(options.out_dir);
    std::ofstream table(options.out_dir / "sweep.csv", std::ios::binary);
    char base_hash[24];
    std::snprintf(base_hash, sizeof base_hash, "%016llx",
                  static_cast<unsigned long long>(base.hash()));
    table << "# sweep parameter=" << parameter << " base_hash=" << base_hash << " tool="
          << kToolName << "/" << kToolVersion << "\n";
    table << "value,verdict,rate_lambda\n";
    log << "value,verdict,rate_lambda\n";
    for (const double v : values) {
        ConfigDoc doc = base;
        doc.set(parameter, ConfigValue{v});
        if (options.seed_override) {
            doc.set("scenario.seed", ConfigValue{static_cast<double>(*options.seed_override)});
        }
        const Scenario scenario = Scenario::resolve(doc);
        const SimulationProduct product = execute_simulation(scenario);
        const ConsensusReport report = certify_consensus(
            product.certified, scenario.fit_window_fraction, scenario.residual_tol);
        const std::string row = format_full(v) + "," + to_string(report.verdict) + "," +
                                format_full(report.rate_lambda);
        table << row << "\n";
        log << row << "\n";
        if (table_out) table_out->push_back({v, to_string(report.verdict), report.rate_lambda});
    }
    return kExitOk;
}

int run_plot(const std::filesystem::path& input, const std::string& kind,
             const std::filesystem::path& out_file, std::ostream& log, int edge_i, int edge_j) {
    const std::string comment = read_artifact_comment(input); // propagate the scenario hash
    if (kind == "states") {
        plot_states_svg(out_file, read_trajectory_csv(input), input.stem().string(), comment);
    } else if (kind == "metric") {
        const Trajectory traj = read_trajectory_csv(input);
        ConsensusReport fit;
        try {
            fit = certify_consensus(traj);
        } catch (const std::invalid_argument&) {
            fit.rate_lambda = std::numeric_limits<double>::quiet_NaN();
        }
        plot_metric_svg(out_file, traj, fit.rate_lambda, fit.prefactor_k, input.stem().string(),
                        comment);
    } else if (kind == "signal") {
        plot_signal_svg(out_file, read_signal_trace(input), edge_i - 1, edge_j - 1,
                        input.stem().string(), comment);
    } else {
        throw std::invalid_argument("unknown plot kind '" + kind +
                                    "' (expected states, metric or signal)");
    }
    log << "wrote " << out_file.string() << "\n";
    return kExitOk;
}

int exit_code_for_current_exception(std::ostream& log) {
    try {
        throw;
    } catch (const ModelContractError& e) {
        log << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

} // namespace conecert
