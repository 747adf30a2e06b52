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

#ifndef RSVDOA_ARRAY_MODEL_HPP
#define RSVDOA_ARRAY_MODEL_HPP

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace rsvdoa
{
    using cplx = std::complex<double>;
    using CVector = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;

    inline constexpr double pi = std::numbers::pi;

    inline double deg2rad(double deg) { return deg * pi / 180.0; }
    inline double rad2deg(double rad) { return rad * 180.0 / pi; }

    // ---- Random numbers ----------------------------------------------------
    //
    // Every stochastic routine takes an explicit 64-bit seed and drives a
    // std::mt19937_64 from it. Independent streams inside one Monte Carlo
    // trial are obtained with derive_seed(seed, stream), which runs the pair
    // through std::seed_seq (fully specified by the standard, hence portable).

    using Rng = std::mt19937_64;

    std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

    // Fills `out` with i.i.d. CN(0, 1) samples.
    void fill_standard_complex_normal(CMatrix &out, Rng &rng);

    // ---- Array geometry and errors -----------------------------------------

    // Per-antenna amplitude-phase error g_m * exp(j phi_m). Antenna 0 is the
    // reference: gains[0] == 1 and phases[0] == 0 exactly.
    struct ErrorModel
    {
        Eigen::VectorXd gains;
        Eigen::VectorXd phases; // radians

        static ErrorModel identity(int num_antennas);

        int size() const { return static_cast<int>(gains.size()); }
        cplx factor(int m) const { return std::polar(gains[m], phases[m]); }
        bool is_identity() const;

        // Throws std::invalid_argument on a broken reference or a non-positive gain.
        void validate() const;
    };

    // Distribution of the random errors on antennas 2..M.
    struct ErrorDistribution
    {
        double gain_mean = 1.0;
        double gain_std = 0.1;
        double phase_std_deg = 10.0;
    };

    // g_m ~ N(gain_mean, gain_std^2) (redrawn while non-positive),
    // phi_m ~ N(0, phase_std^2) for m >= 2; antenna 1 stays the reference.
    ErrorModel draw_error_model(int num_antennas, const ErrorDistribution &dist, std::uint64_t seed);

    // Uniform linear array. `spacing` and `wavelength` share a unit (meters).
    struct ArrayConfig
    {
        int num_antennas = 8;
        double spacing = 0.5;
        double wavelength = 1.0;
        ErrorModel errors = ErrorModel::identity(8);

        // Half-wavelength spacing, identity errors.
        static ArrayConfig half_wavelength(int num_antennas, double wavelength = 1.0);

        ArrayConfig with_errors(ErrorModel e) const;
        void validate() const;
    };

    // Narrowband sources. Source j emits amplitudes[j] * exp(j 2 pi bins[j] l / L)
    // at snapshot l = 1..L, so its energy sits exactly in DFT bin bins[j].
    struct SourceSpec
    {
        std::vector<double> angles; // radians, open interval (-pi/2, pi/2)
        std::vector<int> bins;      // DFT bins in [1, L]
        std::vector<cplx> amplitudes;
        bool coherent = true; // all sources share one bin

        int count() const { return static_cast<int>(angles.size()); }

        // Mean power of the summed envelope vector, sum_j |amplitude_j|^2.
        double signal_power() const;

        void validate(int num_antennas) const;

        // J sources sharing one bin with unit amplitude.
        static SourceSpec coherent_sources(std::vector<double> angles_rad, int bin);
    };

    // M x L complex samples; row m = antenna m, column l = snapshot l + 1.
    struct SnapshotMatrix
    {
        CMatrix data;

        int antennas() const { return static_cast<int>(data.rows()); }
        int snapshots() const { return static_cast<int>(data.cols()); }
    };

    namespace detail
    {
        // Unchecked array response; `with_errors` applies Gamma. Valid for
        // any real theta, including endfire.
        CVector array_response(const ArrayConfig &config, double theta, bool with_errors);
    }

    // a(theta)[m] = exp(j 2 pi m d sin(theta) / lambda), m = 0..M-1.
    // Throws std::domain_error unless |theta| < pi/2.
    CVector steering_vector(const ArrayConfig &config, double theta);

    // b(theta) = Gamma a(theta), Gamma = diag(g_m exp(j phi_m)).
    CVector corrupted_steering_vector(const ArrayConfig &config, double theta);

    // Noise variance sigma_n^2 matching 10 log10(E|s|^2 / sigma_n^2) = snr_db.
    // Returns 0 for snr_db = +inf.
    double noise_power(double signal_power, double snr_db);

    // x(l) = sum_j b(theta_j) s_j(l) + n(l), n ~ CN(0, sigma_n^2 I).
    // The noise draws come from one CN(0,1) stream seeded by `seed` and are
    // scaled by sigma_n, so equal seeds give the same noise shape at every SNR.
    SnapshotMatrix synthesize_snapshots(const ArrayConfig &config, const SourceSpec &sources,
                                        int num_snapshots, double snr_db, std::uint64_t seed);
}

#endif
