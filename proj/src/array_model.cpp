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

#include "rsvdoa/array_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rsvdoa
{
    std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        std::uint32_t out[2];
        seq.generate(out, out + 2);
        return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }

    void fill_standard_complex_normal(CMatrix &out, Rng &rng)
    {
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
        // Column-major fill order is part of the determinism contract.
        for (Eigen::Index c = 0; c < out.cols(); ++c)
            for (Eigen::Index r = 0; r < out.rows(); ++r)
            {
                const double re = normal(rng);
                const double im = normal(rng);
                out(r, c) = cplx(re, im);
            }
    }

    ErrorModel ErrorModel::identity(int num_antennas)
    {
        return {Eigen::VectorXd::Ones(num_antennas), Eigen::VectorXd::Zero(num_antennas)};
    }

    bool ErrorModel::is_identity() const
    {
        return (gains.array() == 1.0).all() && (phases.array() == 0.0).all();
    }

    void ErrorModel::validate() const
    {
        if (gains.size() != phases.size())
            throw std::invalid_argument("ErrorModel: gains and phases differ in length");
        if (gains.size() < 1)
            throw std::invalid_argument("ErrorModel: empty");
        if (gains[0] != 1.0 || phases[0] != 0.0)
            throw std::invalid_argument("ErrorModel: antenna 1 must be the reference (g = 1, phi = 0)");
        for (Eigen::Index m = 0; m < gains.size(); ++m)
            if (!(gains[m] > 0.0) || !std::isfinite(gains[m]) || !std::isfinite(phases[m]))
                throw std::invalid_argument("ErrorModel: gain of antenna " + std::to_string(m + 1) +
                                            " must be positive and finite");
    }

    ErrorModel draw_error_model(int num_antennas, const ErrorDistribution &dist, std::uint64_t seed)
    {
        if (num_antennas < 1)
            throw std::invalid_argument("draw_error_model: num_antennas must be positive");
        if (dist.gain_std < 0.0 || dist.phase_std_deg < 0.0 || !(dist.gain_mean > 0.0))
            throw std::invalid_argument("draw_error_model: invalid distribution parameters");

        Rng rng(seed);
        std::normal_distribution<double> unit(0.0, 1.0);
        ErrorModel e = ErrorModel::identity(num_antennas);
        const double phase_std = deg2rad(dist.phase_std_deg);
        for (int m = 1; m < num_antennas; ++m)
        {
            double g = 0.0;
            do
                g = dist.gain_mean + dist.gain_std * unit(rng);
            while (g <= 0.0);
            e.gains[m] = g;
            e.phases[m] = phase_std * unit(rng);
        }
        return e;
    }

    ArrayConfig ArrayConfig::half_wavelength(int num_antennas, double wavelength)
    {
        ArrayConfig c;
        c.num_antennas = num_antennas;
        c.wavelength = wavelength;
        c.spacing = wavelength / 2.0;
        c.errors = ErrorModel::identity(num_antennas);
        return c;
    }

    ArrayConfig ArrayConfig::with_errors(ErrorModel e) const
    {
        ArrayConfig c = *this;
        c.errors = std::move(e);
        c.validate();
        return c;
    }

    void ArrayConfig::validate() const
    {
        if (num_antennas < 2)
            throw std::invalid_argument("ArrayConfig: need at least 2 antennas");
        if (!(spacing > 0.0) || !(wavelength > 0.0))
            throw std::invalid_argument("ArrayConfig: spacing and wavelength must be positive");
        if (errors.size() != num_antennas)
            throw std::invalid_argument("ArrayConfig: error model length differs from antenna count");
        errors.validate();
    }

    double SourceSpec::signal_power() const
    {
        double p = 0.0;
        for (const auto &a : amplitudes)
            p += std::norm(a);
        return p;
    }

    void SourceSpec::validate(int num_antennas) const
    {
        const int J = count();
        if (J < 1 || J >= num_antennas)
            throw std::invalid_argument("SourceSpec: need 1 <= J < M sources (J = " + std::to_string(J) +
                                        ", M = " + std::to_string(num_antennas) + ")");
        if (static_cast<int>(bins.size()) != J || static_cast<int>(amplitudes.size()) != J)
            throw std::invalid_argument("SourceSpec: angles, bins and amplitudes differ in length");
        for (int j = 0; j < J; ++j)
        {
            if (!(std::abs(angles[j]) < pi / 2))
                throw std::domain_error("SourceSpec: angle outside (-90, 90) degrees");
            if (bins[j] < 1)
                throw std::invalid_argument("SourceSpec: DFT bins start at 1");
            if (coherent && bins[j] != bins[0])
                throw std::invalid_argument("SourceSpec: coherent sources must share one bin");
        }
    }

    SourceSpec SourceSpec::coherent_sources(std::vector<double> angles_rad, int bin)
    {
        SourceSpec s;
        const auto J = angles_rad.size();
        s.angles = std::move(angles_rad);
        s.bins.assign(J, bin);
        s.amplitudes.assign(J, cplx(1.0, 0.0));
        s.coherent = true;
        return s;
    }

    CVector detail::array_response(const ArrayConfig &config, double theta, bool with_errors)
    {
        const double k = 2.0 * pi * config.spacing * std::sin(theta) / config.wavelength;
        CVector a(config.num_antennas);
        a[0] = cplx(1.0, 0.0);
        for (int m = 1; m < config.num_antennas; ++m)
        {
            a[m] = std::polar(1.0, k * m);
            if (with_errors)
                a[m] *= config.errors.factor(m);
        }
        return a;
    }

    namespace
    {
        void check_look_direction(double theta)
        {
            if (!(std::abs(theta) < pi / 2))
                throw std::domain_error("steering_vector: look direction must lie in (-90, 90) degrees");
        }
    }

    CVector steering_vector(const ArrayConfig &config, double theta)
    {
        check_look_direction(theta);
        return detail::array_response(config, theta, false);
    }

    CVector corrupted_steering_vector(const ArrayConfig &config, double theta)
    {
        check_look_direction(theta);
        return detail::array_response(config, theta, true);
    }

    double noise_power(double signal_power, double snr_db)
    {
        if (std::isinf(snr_db) && snr_db > 0)
            return 0.0;
        if (std::isnan(snr_db))
            throw std::invalid_argument("noise_power: SNR is NaN");
        return signal_power / std::pow(10.0, snr_db / 10.0);
    }

    SnapshotMatrix synthesize_snapshots(const ArrayConfig &config, const SourceSpec &sources,
                                        int num_snapshots, double snr_db, std::uint64_t seed)
    {
        config.validate();
        sources.validate(config.num_antennas);
        if (num_snapshots < 1)
            throw std::invalid_argument("synthesize_snapshots: need at least one snapshot");
        for (int bin : sources.bins)
            if (bin > num_snapshots)
                throw std::invalid_argument("synthesize_snapshots: bin " + std::to_string(bin) +
                                            " outside the " + std::to_string(num_snapshots) + "-point DFT");

        const int M = config.num_antennas;
        const int L = num_snapshots;
        SnapshotMatrix x{CMatrix::Zero(M, L)};

        for (int j = 0; j < sources.count(); ++j)
        {
            const CVector b = corrupted_steering_vector(config, sources.angles[j]);
            Eigen::RowVectorXcd s(L);
            for (int l = 0; l < L; ++l)
            {
                // Reduce the phase index modulo L before scaling to keep it exact.
                const long long k = (static_cast<long long>(sources.bins[j]) * (l + 1)) % L;
                s[l] = sources.amplitudes[j] * std::polar(1.0, 2.0 * pi * static_cast<double>(k) / L);
            }
            x.data.noalias() += b * s;
        }

        const double sigma2 = noise_power(sources.signal_power(), snr_db);
        if (sigma2 > 0.0)
        {
            Rng rng(seed);
            CMatrix n(M, L);
            fill_standard_complex_normal(n, rng);
            x.data += std::sqrt(sigma2) * n;
        }
        return x;
    }
}
