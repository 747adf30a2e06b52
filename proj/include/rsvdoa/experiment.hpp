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

#ifndef RSVDOA_EXPERIMENT_HPP
#define RSVDOA_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rsvdoa/experiment_config.hpp"

namespace rsvdoa
{
    // Outcome of one estimator on one trial at one axis point.
    struct TrialResult
    {
        int trial = 0;
        std::uint64_t seed = 0; // base_seed + trial
        double axis_value = 0.0;
        EstimatorId estimator;

        std::vector<double> estimates_deg; // ascending
        std::vector<double> truth_deg;     // ascending
        std::vector<double> squared_errors; // deg^2, sorted-order pairing
        bool resolved = false;
        std::string failure; // empty on success, otherwise a short tag

        // RSV-SR solver diagnostics (zero for other estimators).
        int iterations = 0;
        bool converged = true;
        double primal_residual = 0.0;
        double dual_residual = 0.0;

        double wall_ms = 0.0; // only measured when timing is enabled

        bool ok() const { return failure.empty(); }
    };

    // Per-trial random draws shared by every estimator and axis point.
    struct TrialSetup
    {
        std::uint64_t seed = 0;
        std::uint64_t error_seed = 0;
        std::uint64_t noise_seed = 0;
        ArrayConfig corrupted; // array with this trial's Gamma
        std::shared_ptr<const RsvBasis> basis; // normalized sweep basis, null when unused
    };

    // Seeds: trial k uses s = base_seed + k. Gamma is drawn from
    // derive_seed(s, 1) (or derive_seed(base_seed, 1) for every trial when
    // errors are fixed), the sweep noise from derive_seed(error seed, 2) and
    // the measurement noise from derive_seed(s, 3); error-free data reuse the
    // measurement noise seed.
    TrialSetup prepare_trial(const ExperimentConfig &config, int trial);

    // All configured estimators at every axis point for trial k. Estimator
    // failures are recorded in the results, never thrown.
    std::vector<TrialResult> run_trial(const ExperimentConfig &config, int trial);

    // sqrt(sum of squared errors / (K J)) in degrees over the successful
    // results. Throws std::invalid_argument when the number of results
    // differs from `expected_trials` or a result carries the wrong number of
    // error terms. Returns NaN when every trial failed.
    double rmse(const std::vector<TrialResult> &results, int expected_trials);

    // 100 * resolved / total, in [0, 100]; 0 for an empty set.
    double resolution_probability(const std::vector<TrialResult> &results);

    struct PointSummary
    {
        double axis_value = 0.0;
        EstimatorId estimator;
        double rmse_deg = 0.0;
        double resolution_pct = 0.0;
        double mean_wall_ms = 0.0;
        int trials = 0;
        int failures = 0;
    };

    struct ExperimentResult
    {
        std::vector<TrialResult> trials; // ordered by (trial, axis point, estimator)
        std::vector<PointSummary> summary; // ordered by (axis point, estimator)
    };

    using ProgressCallback = std::function<void(int done, int total)>;

    // Runs trials 0..K-1 on `config.workers` threads. The output does not
    // depend on the worker count.
    ExperimentResult run_monte_carlo(const ExperimentConfig &config, const ProgressCallback &progress = {});

    std::vector<PointSummary> summarize(const ExperimentConfig &config, const std::vector<TrialResult> &trials);

    // Normalized (peak = 1) spatial spectra over the grid for trial 0 at the
    // first axis point: |S| for rsv-sr, 1-D projection scans for ml and wsf,
    // the pseudospectrum for music. Failed estimators yield an empty vector.
    struct SpectrumResult
    {
        std::vector<double> angles_deg;
        std::vector<EstimatorId> estimators;
        std::vector<std::vector<double>> spectra;
        std::vector<std::string> failures;
    };

    SpectrumResult compute_spectra(const ExperimentConfig &config);

    // ---- Files ----------------------------------------------------------------
    //
    // <name>.csv         axis value, estimator, rmse_deg, resolution_pct,
    //                    mean_wall_ms, trials, failures
    // <name>_trials.csv  one row per TrialResult
    // spectrum.csv       angle_deg, one column per estimator
    // manifest.json      command, configuration, seed, files, failure summary
    //
    // mean_wall_ms and wall_ms are left empty unless timing is enabled, so
    // that reruns are byte identical.
    void write_summary_csv(std::ostream &out, const ExperimentConfig &config, const std::vector<PointSummary> &rows);
    void write_trials_csv(std::ostream &out, const ExperimentConfig &config, const std::vector<TrialResult> &rows);
    void write_spectrum_csv(std::ostream &out, const SpectrumResult &spectra);

    // Runs the Monte Carlo and writes <name>.csv, <name>_trials.csv and
    // manifest.json into `out_dir` (created when missing).
    ExperimentResult run_experiment(const ExperimentConfig &config, const std::filesystem::path &out_dir,
                                    const std::string &name, const ProgressCallback &progress = {});

    // Writes spectrum.csv and manifest.json.
    SpectrumResult run_spectrum(const ExperimentConfig &config, const std::filesystem::path &out_dir);

    // Cache file name for a sweep basis, keyed by the array size, grid size,
    // error seed and sweep settings.
    std::string basis_cache_name(const ExperimentConfig &config, std::uint64_t error_seed);

    // Loads the cached basis or sweeps and stores it.
    std::shared_ptr<const RsvBasis> obtain_basis(const ExperimentConfig &config, const ArrayConfig &corrupted,
                                                 std::uint64_t error_seed);
}

#endif
