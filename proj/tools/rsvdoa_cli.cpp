// SPDX-License-Identifier: Apache-2.0
//
// rsvdoa: coherent-source DOA estimation under amplitude-phase errors
// Copyright (C) 2026 The rsvdoa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command-line front end: Monte Carlo experiments, calibration, single-shot
// estimation and the solver self-test.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracle/selftest.hpp"
#include "rsvdoa/benchmark_estimators.hpp"
#include "rsvdoa/csv.hpp"
#include "rsvdoa/experiment.hpp"
#include "rsvdoa/frequency_domain.hpp"
#include "rsvdoa/matrix_io.hpp"

namespace fs = std::filesystem;
using namespace rsvdoa;

namespace
{
    // Flags shared by every configuration-driven subcommand. File values
    // override the preset, flags override the file.
    struct CommonFlags
    {
        std::string config_path;
        std::string out_dir = "out";
        std::optional<std::uint64_t> seed;
        std::optional<int> trials;
        std::optional<int> workers;
        std::string estimators;
        std::vector<std::string> overrides;
        bool timing = false;
        bool quiet = false;
        bool dump_config = false;

        void attach(CLI::App *app, bool with_trials = true)
        {
            app->add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
            app->add_option("--out", out_dir, "output directory")->capture_default_str();
            app->add_option("--seed", seed, "base seed; trial k uses seed + k");
            if (with_trials)
                app->add_option("--trials", trials, "Monte Carlo trials K")->check(CLI::PositiveNumber);
            app->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
            app->add_option("--estimators", estimators,
                            "comma separated list, e.g. rsv-sr,ml:nominal,wsf:error-free");
            app->add_option("--set", overrides, "override one key: section.key=value (repeatable)");
            app->add_flag("--timing", timing, "record wall time (outputs are then not byte identical)");
            app->add_flag("--quiet", quiet, "no progress on stderr");
            app->add_flag("--dump-config", dump_config, "print the effective configuration and exit");
        }

        ExperimentConfig resolve(Preset preset) const
        {
            ExperimentConfig c = preset_config(preset);
            if (!config_path.empty())
                c = load_config(config_path, c);
            if (!overrides.empty())
            {
                boost::property_tree::ptree tree;
                for (const auto &o : overrides)
                    apply_override(tree, o);
                c = config_from_tree(tree, c);
            }
            if (seed)
                c.base_seed = *seed;
            if (trials)
                c.trials = *trials;
            if (workers)
                c.workers = *workers;
            if (!estimators.empty())
                c.estimators = parse_estimator_list(estimators);
            if (timing)
                c.timing = true;
            c.validate();
            return c;
        }
    };

    void report_warnings(const ExperimentConfig &c)
    {
        for (const auto &w : c.warnings())
            std::cerr << "warning: " << w << "\n";
    }

    ProgressCallback progress_printer(bool quiet)
    {
        if (quiet)
            return {};
        return [](int done, int total)
        {
            const int step = std::max(1, total / 20);
            if (done % step == 0 || done == total)
                std::cerr << "\rtrials " << done << "/" << total << (done == total ? "\n" : "") << std::flush;
        };
    }

    int run_monte_carlo_command(const CommonFlags &flags, Preset preset, const std::string &name)
    {
        const ExperimentConfig c = flags.resolve(preset);
        if (flags.dump_config)
        {
            std::cout << format_config(c);
            return 0;
        }
        report_warnings(c);
        const ExperimentResult r = run_experiment(c, flags.out_dir, name, progress_printer(flags.quiet));
        write_summary_csv(std::cout, c, r.summary);
        return 0;
    }

    int run_spectrum_command(const CommonFlags &flags)
    {
        const ExperimentConfig c = flags.resolve(Preset::spectrum);
        if (flags.dump_config)
        {
            std::cout << format_config(c);
            return 0;
        }
        report_warnings(c);
        const SpectrumResult s = run_spectrum(c, flags.out_dir);
        for (std::size_t i = 0; i < s.estimators.size(); ++i)
        {
            if (!s.failures[i].empty())
            {
                std::cout << s.estimators[i].str() << ": failed (" << s.failures[i] << ")\n";
                continue;
            }
            // Report the two strongest grid peaks as a quick sanity check.
            Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(s.spectra[i].data(), s.spectra[i].size());
            const AngularGrid grid(c.grid_size);
            try
            {
                const DoaEstimate e = extract_top_j(p, grid, static_cast<int>(c.angles_deg.size()),
                                                    default_index_separation(c.grid_size));
                std::cout << s.estimators[i].str() << ": peaks at";
                for (double a : e.angles)
                    std::cout << " " << csv_number(rad2deg(a));
                std::cout << " deg\n";
            }
            catch (const std::exception &)
            {
                std::cout << s.estimators[i].str() << ": fewer peaks than sources\n";
            }
        }
        std::cout << "wrote " << (fs::path(flags.out_dir) / "spectrum.csv").string() << "\n";
        return 0;
    }

    int run_calibrate_command(const CommonFlags &flags, int trial, const std::string &file)
    {
        ExperimentConfig c = flags.resolve(Preset::rmse_vs_snr);
        if (flags.dump_config)
        {
            std::cout << format_config(c);
            return 0;
        }
        const std::uint64_t error_seed = c.fixed_errors ? derive_seed(c.base_seed, 1)
                                                        : derive_seed(c.base_seed + static_cast<std::uint64_t>(trial), 1);
        const ArrayConfig corrupted = c.array().with_errors(draw_error_model(c.num_antennas, c.errors, error_seed));
        SweepOptions sweep = c.sweep;
        sweep.workers = c.workers;
        const RsvBasis basis =
            normalize(sweep_and_build(corrupted, AngularGrid(c.grid_size), sweep, derive_seed(error_seed, 2)));
        fs::create_directories(flags.out_dir);
        const fs::path path = fs::path(flags.out_dir) / (file.empty() ? basis_cache_name(c, error_seed) : file);
        save_basis(path, basis);
        std::cout << "gains";
        for (int m = 0; m < corrupted.errors.size(); ++m)
            std::cout << " " << csv_number(corrupted.errors.gains[m]);
        std::cout << "\nphases_deg";
        for (int m = 0; m < corrupted.errors.size(); ++m)
            std::cout << " " << csv_number(rad2deg(corrupted.errors.phases[m]));
        std::cout << "\nwrote " << path.string() << " (" << basis.antennas() << " x " << basis.grid.size() << ")\n";
        return 0;
    }

    int run_synthesize_command(const CommonFlags &flags, int trial, bool error_free, const std::string &file)
    {
        const ExperimentConfig c = flags.resolve(Preset::spectrum);
        if (flags.dump_config)
        {
            std::cout << format_config(c);
            return 0;
        }
        const TrialSetup setup = [&]
        {
            ExperimentConfig light = c;
            light.estimators = parse_estimator_list("ml:nominal"); // no sweep needed
            return prepare_trial(light, trial);
        }();
        const double snr = c.axis == Axis::snapshots ? c.snr_db : c.axis_values().front();
        const int L = c.axis == Axis::snapshots ? c.snapshot_list.front() : c.snapshots;
        const ArrayConfig array = error_free ? c.array() : setup.corrupted;
        const SnapshotMatrix x = synthesize_snapshots(array, c.sources(), L, snr, setup.noise_seed);
        fs::create_directories(flags.out_dir);
        const fs::path path = fs::path(flags.out_dir) / file;
        save_snapshots(path, x);
        std::cout << "wrote " << path.string() << " (" << x.antennas() << " x " << x.snapshots() << ", "
                  << csv_number(snr) << " dB)\n";
        return 0;
    }

    struct SolveFlags
    {
        std::string snapshots;
        std::string basis;
        int sources = 2;
        std::vector<int> bins;
        std::string method = "rsv-sr";
        double alpha = 0.05;
        int grid = 900;
    };

    int run_solve_command(const SolveFlags &f)
    {
        const SnapshotMatrix x = load_snapshots(f.snapshots);
        const int M = x.antennas();
        std::shared_ptr<const RsvBasis> basis;
        if (!f.basis.empty())
        {
            RsvBasis b = load_basis(f.basis);
            if (!b.normalized)
                b = normalize(b);
            basis = std::make_shared<const RsvBasis>(std::move(b));
        }
        else
        {
            basis = std::make_shared<const RsvBasis>(nominal_basis(ArrayConfig::half_wavelength(M), AngularGrid(f.grid)));
        }
        if (basis->antennas() != M)
            throw std::invalid_argument("basis has " + std::to_string(basis->antennas()) + " rows, snapshots have " +
                                        std::to_string(M));

        const EstimatorId id = EstimatorId::parse(f.method);
        CsvWriter w(std::cout);
        w.row({"estimator", "angle_deg", "magnitude", "iterations", "converged"});
        DoaEstimate est;
        int iterations = 0;
        bool converged = true;
        if (id.method == Method::rsv_sr)
        {
            const SpectrumMatrix spectrum = dft_all_antennas(x);
            std::vector<int> bins = f.bins;
            if (bins.empty())
                bins = detect_peaks(spectrum, 1);
            const SparseDoaResult r = estimate_doa(*basis, accumulate_peaks(spectrum, bins), f.sources, MuPolicy{f.alpha});
            est = r.estimate;
            iterations = r.solution.iterations;
            converged = r.solution.converged;
        }
        else
        {
            const SteeringModel model = f.basis.empty() ? SteeringModel::nominal(ArrayConfig::half_wavelength(M))
                                                        : SteeringModel::calibrated(basis);
            const CovarianceEstimate cov = sample_covariance(x);
            if (id.method == Method::ml)
                est = ml_estimate(cov, model, f.sources);
            else if (id.method == Method::wsf)
                est = wsf_estimate(cov, model, f.sources);
            else
                est = music_estimate(cov, model, f.sources, basis->grid);
        }
        for (std::size_t j = 0; j < est.angles.size(); ++j)
            w.row({id.str(), csv_number(rad2deg(est.angles[j])), csv_number(est.magnitudes[j]),
                   std::to_string(iterations), converged ? "1" : "0"});
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"rsvdoa: DOA estimation of coherent sources under amplitude-phase errors"};
    app.require_subcommand(1);

    CommonFlags spectrum_flags, snr_flags, snapshot_flags, resolution_flags, calibrate_flags, synth_flags;

    auto *spectrum = app.add_subcommand("spectrum", "spatial spectra of one trial (-40/20 deg, L = 128, 20 dB)");
    spectrum_flags.attach(spectrum, false);

    auto *rmse_snr = app.add_subcommand("rmse-vs-snr", "RMSE against SNR (-10/32 deg, L = 512)");
    snr_flags.attach(rmse_snr);

    auto *rmse_snap = app.add_subcommand("rmse-vs-snapshots", "RMSE against snapshot count (-10/32 deg, 10 dB)");
    snapshot_flags.attach(rmse_snap);

    auto *resolution = app.add_subcommand("resolution-vs-snr", "resolution probability against SNR (15/20 deg)");
    resolution_flags.attach(resolution);

    int calibrate_trial = 0;
    std::string calibrate_file;
    auto *calibrate = app.add_subcommand("calibrate", "sweep the auxiliary source and store the normalized basis");
    calibrate_flags.attach(calibrate, false);
    calibrate->add_option("--trial", calibrate_trial, "take Gamma from this trial's seed")->capture_default_str();
    calibrate->add_option("--file", calibrate_file, "file name inside --out (default: cache name)");

    int synth_trial = 0;
    bool synth_error_free = false;
    std::string synth_file = "snapshots.rsvs";
    auto *synthesize = app.add_subcommand("synthesize", "write one trial's snapshots to a binary file");
    synth_flags.attach(synthesize, false);
    synthesize->add_option("--trial", synth_trial, "trial index")->capture_default_str();
    synthesize->add_flag("--error-free", synth_error_free, "use an array without amplitude-phase errors");
    synthesize->add_option("--file", synth_file, "file name inside --out")->capture_default_str();

    SolveFlags solve_flags;
    auto *solve = app.add_subcommand("solve", "estimate DOAs from a snapshot file");
    solve->add_option("--snapshots", solve_flags.snapshots, "snapshot file (.rsvs)")->required()->check(CLI::ExistingFile);
    solve->add_option("--basis", solve_flags.basis, "basis file (.rsvb); default: error-free steering")
        ->check(CLI::ExistingFile);
    solve->add_option("--sources", solve_flags.sources, "number of sources J")->capture_default_str();
    solve->add_option("--bins", solve_flags.bins, "peak bins (1-based); default: strongest bin");
    solve->add_option("--method", solve_flags.method, "rsv-sr, ml, wsf or music")->capture_default_str();
    solve->add_option("--alpha", solve_flags.alpha, "penalty factor mu / ||D^H y||_inf")->capture_default_str();
    solve->add_option("--grid", solve_flags.grid, "grid size when no basis is given")->capture_default_str();

    oracle::SelftestOptions selftest_options;
    bool selftest_verbose = false;
    auto *selftest = app.add_subcommand("selftest", "compare the ADMM solver with the coordinate-descent oracle");
    selftest->add_option("--instances", selftest_options.instances, "random instances")->capture_default_str();
    selftest->add_option("--seed", selftest_options.seed, "instance seed")->capture_default_str();
    selftest->add_flag("--verbose", selftest_verbose, "one line per instance");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*spectrum)
            return run_spectrum_command(spectrum_flags);
        if (*rmse_snr)
            return run_monte_carlo_command(snr_flags, Preset::rmse_vs_snr, "rmse_vs_snr");
        if (*rmse_snap)
            return run_monte_carlo_command(snapshot_flags, Preset::rmse_vs_snapshots, "rmse_vs_snapshots");
        if (*resolution)
            return run_monte_carlo_command(resolution_flags, Preset::resolution_vs_snr, "resolution_vs_snr");
        if (*calibrate)
            return run_calibrate_command(calibrate_flags, calibrate_trial, calibrate_file);
        if (*synthesize)
            return run_synthesize_command(synth_flags, synth_trial, synth_error_free, synth_file);
        if (*solve)
            return run_solve_command(solve_flags);
        if (*selftest)
        {
            const auto report = oracle::run_solver_selftest(selftest_options, selftest_verbose ? &std::cout : nullptr);
            std::printf("%d instances, max relative objective gap %.3e, %d at or above %.0e, %d hit max_iters\n",
                        report.instances, report.max_gap, report.failures, selftest_options.tolerance,
                        report.unconverged);
            std::printf("%s\n", report.passed() ? "PASS" : "FAIL");
            return report.passed() ? 0 : 1;
        }
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
