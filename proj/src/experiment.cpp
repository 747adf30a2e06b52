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

#include "rsvdoa/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "rsvdoa/benchmark_estimators.hpp"
#include "rsvdoa/csv.hpp"
#include "rsvdoa/frequency_domain.hpp"
#include "rsvdoa/matrix_io.hpp"

namespace rsvdoa
{
    namespace
    {
        bool uses_variant(const ExperimentConfig &c, SteeringVariant v)
        {
            return std::any_of(c.estimators.begin(), c.estimators.end(),
                               [&](const EstimatorId &id) { return id.variant == v; });
        }

        bool uses_corrupted_data(const ExperimentConfig &c)
        {
            return uses_variant(c, SteeringVariant::calibrated) || uses_variant(c, SteeringVariant::nominal);
        }

        std::uint64_t fnv1a(const std::string &text)
        {
            std::uint64_t h = 1469598103934665603ull;
            for (unsigned char ch : text)
            {
                h ^= ch;
                h *= 1099511628211ull;
            }
            return h;
        }

        std::string failure_tag(const std::exception &e)
        {
            if (dynamic_cast<const UnresolvedPeaksError *>(&e))
                return "unresolved-peaks";
            if (dynamic_cast<const DegenerateSubspaceError *>(&e))
                return "degenerate-subspace";
            if (dynamic_cast<const PeakDetectionError *>(&e))
                return "peak-detection";
            return "error";
        }

        PeakMeasurement peak_measurement(const ExperimentConfig &c, const SnapshotMatrix &x)
        {
            const SpectrumMatrix spectrum = dft_all_antennas(x);
            std::vector<int> bins;
            if (c.detect_bins)
            {
                const int peaks = c.coherent ? 1 : static_cast<int>(c.angles_deg.size());
                bins = detect_peaks(spectrum, peaks, c.bin_separation);
            }
            else
            {
                std::set<int> unique(c.bins.begin(), c.bins.end());
                bins.assign(unique.begin(), unique.end());
            }
            return accumulate_peaks(spectrum, bins);
        }

        struct Shared
        {
            AngularGrid grid;
            std::shared_ptr<const RsvBasis> nominal;
        };

        Shared make_shared_state(const ExperimentConfig &c)
        {
            const AngularGrid grid(c.grid_size);
            return {grid, std::make_shared<const RsvBasis>(nominal_basis(c.array(), grid))};
        }

        SteeringModel steering_for(const EstimatorId &id, const TrialSetup &setup, const ExperimentConfig &c)
        {
            if (id.variant == SteeringVariant::calibrated)
                return SteeringModel::calibrated(setup.basis);
            return SteeringModel::nominal(c.array());
        }

        // Runs one estimator; returns the estimate and fills diagnostics.
        DoaEstimate estimate(const ExperimentConfig &c, const Shared &shared, const TrialSetup &setup,
                             const EstimatorId &id, const SnapshotMatrix &x, TrialResult &out)
        {
            const int J = static_cast<int>(c.angles_deg.size());
            if (id.method == Method::rsv_sr)
            {
                const RsvBasis &basis = id.variant == SteeringVariant::calibrated ? *setup.basis : *shared.nominal;
                const SparseDoaResult r = estimate_doa(basis, peak_measurement(c, x), J, MuPolicy{c.alpha},
                                                       c.solver, c.index_separation);
                out.iterations = r.solution.iterations;
                out.converged = r.solution.converged;
                out.primal_residual = r.solution.primal_residual;
                out.dual_residual = r.solution.dual_residual;
                return r.estimate;
            }
            const CovarianceEstimate cov = sample_covariance(x);
            const SteeringModel model = steering_for(id, setup, c);
            switch (id.method)
            {
            case Method::ml:
                return ml_estimate(cov, model, J, c.search);
            case Method::wsf:
                return wsf_estimate(cov, model, J, c.search);
            default:
                return music_estimate(cov, model, J, shared.grid, c.index_separation);
            }
        }

        std::vector<TrialResult> run_trial_with(const ExperimentConfig &c, const Shared &shared, int k)
        {
            std::vector<double> truth = c.angles_deg;
            std::sort(truth.begin(), truth.end());
            const double half_window = c.resolution_threshold_deg() / 2.0;
            const std::vector<double> axis = c.axis_values();

            std::vector<TrialResult> results;
            auto blank = [&](double axis_value, const EstimatorId &id)
            {
                TrialResult r;
                r.trial = k;
                r.seed = c.base_seed + static_cast<std::uint64_t>(k);
                r.axis_value = axis_value;
                r.estimator = id;
                r.truth_deg = truth;
                return r;
            };

            TrialSetup setup;
            try
            {
                setup = prepare_trial(c, k);
            }
            catch (const std::exception &)
            {
                for (double v : axis)
                    for (const auto &id : c.estimators)
                    {
                        TrialResult r = blank(v, id);
                        r.failure = "setup";
                        results.push_back(std::move(r));
                    }
                return results;
            }

            const SourceSpec sources = c.sources();
            const ArrayConfig clean = c.array();
            for (double v : axis)
            {
                const double snr = c.axis == Axis::snr || c.axis == Axis::fixed ? v : c.snr_db;
                const int L = c.axis == Axis::snapshots ? static_cast<int>(v) : c.snapshots;
                std::optional<SnapshotMatrix> corrupted_data, clean_data;
                if (uses_corrupted_data(c))
                    corrupted_data = synthesize_snapshots(setup.corrupted, sources, L, snr, setup.noise_seed);
                if (uses_variant(c, SteeringVariant::error_free))
                    clean_data = synthesize_snapshots(clean, sources, L, snr, setup.noise_seed);

                for (const auto &id : c.estimators)
                {
                    TrialResult r = blank(v, id);
                    const SnapshotMatrix &x =
                        id.variant == SteeringVariant::error_free ? *clean_data : *corrupted_data;
                    const auto start = std::chrono::steady_clock::now();
                    try
                    {
                        const DoaEstimate est = estimate(c, shared, setup, id, x, r);
                        for (double a : est.angles)
                            r.estimates_deg.push_back(rad2deg(a));
                        std::sort(r.estimates_deg.begin(), r.estimates_deg.end());
                        if (r.estimates_deg.size() != truth.size())
                            throw UnresolvedPeaksError("estimate count differs from the source count");
                        r.resolved = true;
                        for (std::size_t j = 0; j < truth.size(); ++j)
                        {
                            const double err = r.estimates_deg[j] - truth[j];
                            r.squared_errors.push_back(err * err);
                            if (!(std::abs(err) < half_window))
                                r.resolved = false;
                        }
                    }
                    catch (const std::exception &e)
                    {
                        r.estimates_deg.clear();
                        r.squared_errors.clear();
                        r.resolved = false;
                        r.failure = failure_tag(e);
                    }
                    if (c.timing)
                        r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                                        .count();
                    results.push_back(std::move(r));
                }
            }
            return results;
        }

        std::string join(const std::vector<double> &values)
        {
            std::string out;
            for (std::size_t i = 0; i < values.size(); ++i)
                out += (i ? ";" : "") + csv_number(values[i]);
            return out;
        }

        std::string axis_header(Axis axis) { return axis == Axis::snapshots ? "snapshots" : "snr_db"; }

        void write_file(const std::filesystem::path &path, const std::function<void(std::ostream &)> &body)
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
                throw std::runtime_error("cannot open " + path.string() + " for writing");
            body(out);
            out.flush();
            if (!out)
                throw std::runtime_error("write to " + path.string() + " failed");
        }

        nlohmann::ordered_json config_json(const ExperimentConfig &c)
        {
            nlohmann::ordered_json j;
            const auto tree = config_to_tree(c);
            for (const auto &[section, keys] : tree)
                for (const auto &[key, value] : keys)
                    j[section][key] = value.data();
            return j;
        }

        void write_manifest(const std::filesystem::path &path, const ExperimentConfig &c, const std::string &command,
                            const std::vector<std::string> &files, const nlohmann::ordered_json &failures)
        {
            nlohmann::ordered_json m;
            m["tool"] = "rsvdoa";
            m["format_version"] = 1;
            m["command"] = command;
            m["base_seed"] = c.base_seed;
            m["trials"] = c.trials;
            m["config"] = config_json(c);
            m["config_ini"] = format_config(c);
            m["warnings"] = c.warnings();
            m["files"] = files;
            m["failures"] = failures;
            write_file(path, [&](std::ostream &out) { out << m.dump(2) << "\n"; });
        }
    }

    // ---- Trials -------------------------------------------------------------------

    std::string basis_cache_name(const ExperimentConfig &c, std::uint64_t error_seed)
    {
        char key[256];
        std::snprintf(key, sizeof key, "d=%.17g|lambda=%.17g|g=%.17g,%.17g|p=%.17g|aux=%d|L0=%d|rep=%d", c.spacing,
                      c.wavelength, c.errors.gain_mean, c.errors.gain_std, c.errors.phase_std_deg, c.sweep.aux_bin,
                      c.sweep.snapshots, c.sweep.repeats);
        char name[256];
        std::snprintf(name, sizeof name, "basis_M%d_N%d_e%llu_s%s_%016llx.rsvb", c.num_antennas, c.grid_size,
                      static_cast<unsigned long long>(error_seed), csv_number(c.sweep.snr_db).c_str(),
                      static_cast<unsigned long long>(fnv1a(key)));
        return name;
    }

    std::shared_ptr<const RsvBasis> obtain_basis(const ExperimentConfig &c, const ArrayConfig &corrupted,
                                                 std::uint64_t error_seed)
    {
        const AngularGrid grid(c.grid_size);
        std::filesystem::path cached;
        if (!c.basis_cache.empty())
        {
            cached = std::filesystem::path(c.basis_cache) / basis_cache_name(c, error_seed);
            if (std::filesystem::exists(cached))
            {
                RsvBasis b = load_basis(cached);
                if (b.antennas() == c.num_antennas && b.grid == grid && b.normalized)
                    return std::make_shared<const RsvBasis>(std::move(b));
            }
        }
        SweepOptions sweep = c.sweep;
        sweep.workers = 1;
        auto basis = std::make_shared<const RsvBasis>(
            normalize(sweep_and_build(corrupted, grid, sweep, derive_seed(error_seed, 2))));
        if (!cached.empty())
        {
            // Write to a private name first so concurrent trials never read a
            // half-written file.
            std::filesystem::create_directories(cached.parent_path());
            const auto tmp = cached.string() + ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
            save_basis(tmp, *basis);
            std::filesystem::rename(tmp, cached);
        }
        return basis;
    }

    TrialSetup prepare_trial(const ExperimentConfig &c, int trial)
    {
        TrialSetup s;
        s.seed = c.base_seed + static_cast<std::uint64_t>(trial);
        s.error_seed = c.fixed_errors ? derive_seed(c.base_seed, 1) : derive_seed(s.seed, 1);
        s.noise_seed = derive_seed(s.seed, 3);
        s.corrupted = c.array().with_errors(draw_error_model(c.num_antennas, c.errors, s.error_seed));
        if (uses_variant(c, SteeringVariant::calibrated))
            s.basis = obtain_basis(c, s.corrupted, s.error_seed);
        return s;
    }

    std::vector<TrialResult> run_trial(const ExperimentConfig &config, int trial)
    {
        config.validate();
        return run_trial_with(config, make_shared_state(config), trial);
    }

    double rmse(const std::vector<TrialResult> &results, int expected_trials)
    {
        if (static_cast<int>(results.size()) != expected_trials)
            throw std::invalid_argument("rmse: expected " + std::to_string(expected_trials) + " trial results, got " +
                                        std::to_string(results.size()));
        double sum = 0.0;
        std::size_t terms = 0;
        for (const auto &r : results)
        {
            if (!r.ok())
                continue;
            if (r.squared_errors.size() != r.truth_deg.size())
                throw std::invalid_argument("rmse: trial " + std::to_string(r.trial) + " carries " +
                                            std::to_string(r.squared_errors.size()) + " error terms for " +
                                            std::to_string(r.truth_deg.size()) + " sources");
            for (double e : r.squared_errors)
                sum += e;
            terms += r.squared_errors.size();
        }
        if (terms == 0)
            return std::numeric_limits<double>::quiet_NaN();
        return std::sqrt(sum / static_cast<double>(terms));
    }

    double resolution_probability(const std::vector<TrialResult> &results)
    {
        if (results.empty())
            return 0.0;
        const auto resolved = std::count_if(results.begin(), results.end(), [](const auto &r) { return r.resolved; });
        return 100.0 * static_cast<double>(resolved) / static_cast<double>(results.size());
    }

    std::vector<PointSummary> summarize(const ExperimentConfig &c, const std::vector<TrialResult> &trials)
    {
        std::vector<PointSummary> out;
        for (double v : c.axis_values())
            for (const auto &id : c.estimators)
            {
                std::vector<TrialResult> group;
                for (const auto &r : trials)
                    if (r.axis_value == v && r.estimator == id)
                        group.push_back(r);
                PointSummary s;
                s.axis_value = v;
                s.estimator = id;
                s.trials = static_cast<int>(group.size());
                s.rmse_deg = rmse(group, s.trials);
                s.resolution_pct = resolution_probability(group);
                s.failures = static_cast<int>(std::count_if(group.begin(), group.end(), [](const auto &r) { return !r.ok(); }));
                double wall = 0.0;
                for (const auto &r : group)
                    wall += r.wall_ms;
                s.mean_wall_ms = group.empty() ? 0.0 : wall / static_cast<double>(group.size());
                out.push_back(s);
            }
        return out;
    }

    ExperimentResult run_monte_carlo(const ExperimentConfig &c, const ProgressCallback &progress)
    {
        c.validate();
        const Shared shared = make_shared_state(c);
        std::vector<std::vector<TrialResult>> per_trial(c.trials);
        std::atomic<int> next{0};
        std::atomic<int> done{0};
        std::mutex progress_mutex;

        auto worker = [&]
        {
            for (int k = next++; k < c.trials; k = next++)
            {
                per_trial[k] = run_trial_with(c, shared, k);
                const int finished = ++done;
                if (progress)
                {
                    std::lock_guard lock(progress_mutex);
                    progress(finished, c.trials);
                }
            }
        };

        const int workers = std::clamp(c.workers, 1, c.trials);
        if (workers == 1)
            worker();
        else
        {
            std::vector<std::jthread> pool;
            for (int w = 0; w < workers; ++w)
                pool.emplace_back(worker);
        }

        ExperimentResult result;
        for (auto &rows : per_trial)
            for (auto &r : rows)
                result.trials.push_back(std::move(r));
        result.summary = summarize(c, result.trials);
        return result;
    }

    // ---- Spectra ------------------------------------------------------------------

    SpectrumResult compute_spectra(const ExperimentConfig &c)
    {
        c.validate();
        const Shared shared = make_shared_state(c);
        const TrialSetup setup = prepare_trial(c, 0);
        const double v = c.axis_values().front();
        const double snr = c.axis == Axis::snapshots ? c.snr_db : v;
        const int L = c.axis == Axis::snapshots ? static_cast<int>(v) : c.snapshots;
        const SourceSpec sources = c.sources();
        const int J = sources.count();

        SpectrumResult out;
        for (int i = 0; i < shared.grid.size(); ++i)
            out.angles_deg.push_back(shared.grid.angle_deg(i));

        for (const auto &id : c.estimators)
        {
            const ArrayConfig array = id.variant == SteeringVariant::error_free ? c.array() : setup.corrupted;
            const SnapshotMatrix x = synthesize_snapshots(array, sources, L, snr, setup.noise_seed);
            Eigen::VectorXd p;
            std::string failure;
            try
            {
                if (id.method == Method::rsv_sr)
                {
                    const RsvBasis &basis =
                        id.variant == SteeringVariant::calibrated ? *setup.basis : *shared.nominal;
                    const PeakMeasurement pm = peak_measurement(c, x);
                    const double mu = MuPolicy{c.alpha}.penalty(basis.matrix, pm.vector);
                    p = LassoSolver(basis.matrix).solve(pm.vector, mu, c.solver).spectrum.cwiseAbs();
                }
                else
                {
                    const CovarianceEstimate cov = sample_covariance(x);
                    const SteeringModel model = steering_for(id, setup, c);
                    if (id.method == Method::ml)
                        p = projection_spectrum(cov.matrix, model, shared.grid);
                    else if (id.method == Method::wsf)
                        p = projection_spectrum(wsf_target(eigen_descending(cov.matrix), J), model, shared.grid);
                    else
                        p = music_spectrum(cov, model, J, shared.grid);
                }
                const double peak = p.maxCoeff();
                if (peak > 0.0)
                    p /= peak;
            }
            catch (const std::exception &e)
            {
                p.resize(0);
                failure = failure_tag(e);
            }
            out.estimators.push_back(id);
            out.spectra.emplace_back(p.data(), p.data() + p.size());
            out.failures.push_back(failure);
        }
        return out;
    }

    // ---- Output -------------------------------------------------------------------

    void write_summary_csv(std::ostream &out, const ExperimentConfig &c, const std::vector<PointSummary> &rows)
    {
        CsvWriter w(out);
        w.row({axis_header(c.axis), "estimator", "rmse_deg", "resolution_pct", "mean_wall_ms", "trials", "failures"});
        for (const auto &s : rows)
            w.row({csv_number(s.axis_value), s.estimator.str(), csv_number(s.rmse_deg), csv_number(s.resolution_pct),
                   c.timing ? csv_number(s.mean_wall_ms) : std::string(), std::to_string(s.trials),
                   std::to_string(s.failures)});
    }

    void write_trials_csv(std::ostream &out, const ExperimentConfig &c, const std::vector<TrialResult> &rows)
    {
        CsvWriter w(out);
        w.row({"trial", "seed", axis_header(c.axis), "estimator", "estimates_deg", "truth_deg", "squared_errors_deg2",
               "resolved", "failure", "iterations", "converged", "primal_residual", "dual_residual", "wall_ms"});
        for (const auto &r : rows)
            w.row({std::to_string(r.trial), std::to_string(r.seed), csv_number(r.axis_value), r.estimator.str(),
                   join(r.estimates_deg), join(r.truth_deg), join(r.squared_errors), r.resolved ? "1" : "0",
                   r.failure, std::to_string(r.iterations), r.converged ? "1" : "0", csv_number(r.primal_residual),
                   csv_number(r.dual_residual), c.timing ? csv_number(r.wall_ms) : std::string()});
    }

    void write_spectrum_csv(std::ostream &out, const SpectrumResult &s)
    {
        CsvWriter w(out);
        std::vector<std::string> header{"angle_deg"};
        for (const auto &id : s.estimators)
            header.push_back(id.str());
        w.row(header);
        for (std::size_t i = 0; i < s.angles_deg.size(); ++i)
        {
            std::vector<std::string> fields{csv_number(s.angles_deg[i])};
            for (const auto &col : s.spectra)
                fields.push_back(col.empty() ? std::string() : csv_number(col[i]));
            w.row(fields);
        }
    }

    ExperimentResult run_experiment(const ExperimentConfig &c, const std::filesystem::path &out_dir,
                                    const std::string &name, const ProgressCallback &progress)
    {
        c.validate();
        std::filesystem::create_directories(out_dir);
        ExperimentResult result = run_monte_carlo(c, progress);

        const std::string summary_file = name + ".csv";
        const std::string trials_file = name + "_trials.csv";
        write_file(out_dir / summary_file, [&](std::ostream &out) { write_summary_csv(out, c, result.summary); });
        write_file(out_dir / trials_file, [&](std::ostream &out) { write_trials_csv(out, c, result.trials); });

        nlohmann::ordered_json failures = nlohmann::ordered_json::object();
        for (const auto &r : result.trials)
            if (!r.ok())
            {
                auto &slot = failures[r.estimator.str()][r.failure];
                slot = slot.is_null() ? 1 : slot.get<int>() + 1;
            }
        write_manifest(out_dir / "manifest.json", c, name, {summary_file, trials_file}, failures);
        return result;
    }

    SpectrumResult run_spectrum(const ExperimentConfig &c, const std::filesystem::path &out_dir)
    {
        std::filesystem::create_directories(out_dir);
        SpectrumResult s = compute_spectra(c);
        write_file(out_dir / "spectrum.csv", [&](std::ostream &out) { write_spectrum_csv(out, s); });
        nlohmann::ordered_json failures = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < s.estimators.size(); ++i)
            if (!s.failures[i].empty())
                failures[s.estimators[i].str()][s.failures[i]] = 1;
        write_manifest(out_dir / "manifest.json", c, "spectrum", {"spectrum.csv"}, failures);
        return s;
    }
}
