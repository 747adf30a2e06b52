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

#ifndef RSVDOA_EXPERIMENT_CONFIG_HPP
#define RSVDOA_EXPERIMENT_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "rsvdoa/array_model.hpp"
#include "rsvdoa/benchmark_estimators.hpp"
#include "rsvdoa/rsv_calibration.hpp"
#include "rsvdoa/sparse_recovery.hpp"

namespace rsvdoa
{
    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    enum class Method
    {
        rsv_sr,
        ml,
        wsf,
        music
    };

    // calibrated: corrupted data, steering from the RSV basis.
    // nominal:    corrupted data, error-free steering model.
    // error_free: data from an error-free array, error-free steering model.
    enum class SteeringVariant
    {
        calibrated,
        nominal,
        error_free
    };

    struct EstimatorId
    {
        Method method = Method::rsv_sr;
        SteeringVariant variant = SteeringVariant::calibrated;

        // "rsv-sr", "ml:nominal", "wsf:error-free", ... A bare method name
        // takes its default variant: calibrated for rsv-sr, nominal otherwise.
        static EstimatorId parse(const std::string &text);
        std::string str() const;

        friend bool operator==(const EstimatorId &, const EstimatorId &) = default;
    };

    std::vector<EstimatorId> parse_estimator_list(const std::string &text);

    enum class Axis
    {
        fixed,     // one point at (snr_db, snapshots)
        snr,       // snr_list at fixed snapshots
        snapshots  // snapshot_list at fixed snr_db
    };

    std::string axis_name(Axis axis);

    struct ExperimentConfig
    {
        // [array]
        int num_antennas = 8;
        double spacing = 0.5;    // in wavelengths
        double wavelength = 1.0; // meters

        // [errors]
        ErrorDistribution errors;
        bool fixed_errors = false; // one Gamma for every trial (debugging)

        // [grid]
        int grid_size = 900;

        // [sources]
        std::vector<double> angles_deg{-10.0, 32.0};
        std::vector<int> bins{16};        // one entry when coherent
        std::vector<double> amplitudes{}; // empty: all ones
        bool coherent = true;
        bool detect_bins = false;         // locate peaks instead of using `bins`
        int bin_separation = default_bin_separation;

        // [sweep]
        SweepOptions sweep;
        std::string basis_cache; // directory, empty disables caching

        // [solver]
        double alpha = 0.05;
        SolverOptions solver;
        int index_separation = -1; // -1: ceil(N / 180)

        // [search]
        SearchOptions search;

        // [experiment]
        Axis axis = Axis::fixed;
        double snr_db = 20.0;
        int snapshots = 512;
        std::vector<double> snr_list{};
        std::vector<int> snapshot_list{};
        int trials = 500;
        std::uint64_t base_seed = 1;
        int workers = 1;
        std::vector<EstimatorId> estimators{EstimatorId{}};
        double resolution_deg = 0.0; // delta theta; 0 selects the default
        bool timing = false;         // record wall time (breaks byte identity)

        // Throws ConfigError with a message naming the offending key.
        void validate() const;

        // Non-fatal remarks, e.g. snapshot counts that are not powers of two.
        std::vector<std::string> warnings() const;

        ArrayConfig array() const; // identity errors
        SourceSpec sources() const;
        std::vector<double> axis_values() const;

        // Delta theta for the resolution test: resolution_deg when set,
        // otherwise the smallest pairwise source separation (1 degree for J = 1).
        double resolution_threshold_deg() const;
    };

    // Built-in setups of the four standard experiments (M = 8, N = 900,
    // K = 500, g ~ N(1, 0.1^2), phi ~ N(0, (10 deg)^2), default 30 dB sweep):
    //   spectrum           -40 / 20 deg, L = 128, 20 dB, one trial
    //   rmse_vs_snr        -10 / 32 deg, L = 512, SNR -12..20 dB
    //   rmse_vs_snapshots  -10 / 32 deg, 10 dB, L = 64..512
    //   resolution_vs_snr  15 / 20 deg, delta theta 5 deg, L = 512, SNR -12..12 dB
    enum class Preset
    {
        spectrum,
        rmse_vs_snr,
        rmse_vs_snapshots,
        resolution_vs_snr
    };

    ExperimentConfig preset_config(Preset preset);

    // Section/key tree <-> config. Unknown sections or keys are rejected so
    // typos do not silently fall back to defaults.
    ExperimentConfig config_from_tree(const boost::property_tree::ptree &tree,
                                      const ExperimentConfig &defaults = {});
    boost::property_tree::ptree config_to_tree(const ExperimentConfig &config);

    // Reads an INI file on top of `defaults`.
    ExperimentConfig load_config(const std::filesystem::path &path, const ExperimentConfig &defaults = {});

    // Parses one "section.key=value" override into the tree.
    void apply_override(boost::property_tree::ptree &tree, const std::string &assignment);

    std::string format_config(const ExperimentConfig &config); // INI text
}

#endif
