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

#include "rsvdoa/rsv_calibration.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "rsvdoa/frequency_domain.hpp"

namespace rsvdoa
{
    AngularGrid::AngularGrid(int size) : size_(size)
    {
        if (size < 1)
            throw std::invalid_argument("AngularGrid: size must be positive");
    }

    double AngularGrid::angle(int index) const
    {
        if (index < 0 || index >= size_)
            throw std::out_of_range("AngularGrid: index out of range");
        return -pi / 2 + (index + 1) * pi / size_;
    }

    int AngularGrid::nearest_index(double theta) const
    {
        const double pos = (theta + pi / 2) / step() - 1.0;
        const int idx = static_cast<int>(std::ceil(pos - 0.5));
        return std::clamp(idx, 0, size_ - 1);
    }

    namespace
    {
        CVector capture_peak_column(const ArrayConfig &config, double theta, const SweepOptions &opt,
                                    double sigma, std::uint64_t seed_base, int index)
        {
            const int M = config.num_antennas;
            const int L0 = opt.snapshots;
            const CVector b = detail::array_response(config, theta, true);

            Eigen::RowVectorXcd s0(L0);
            for (int l = 0; l < L0; ++l)
            {
                const long long k = (static_cast<long long>(opt.aux_bin) * (l + 1)) % L0;
                s0[l] = opt.amplitude * std::polar(1.0, 2.0 * pi * static_cast<double>(k) / L0);
            }

            CVector acc = CVector::Zero(M);
            for (int r = 0; r < opt.repeats; ++r)
            {
                SnapshotMatrix x{b * s0};
                if (sigma > 0.0)
                {
                    Rng rng(derive_seed(seed_base, static_cast<std::uint64_t>(index) * opt.repeats + r));
                    CMatrix n(M, L0);
                    fill_standard_complex_normal(n, rng);
                    x.data += sigma * n;
                }
                acc += dft_all_antennas(x).column(opt.aux_bin);
            }
            return acc / static_cast<double>(opt.repeats);
        }
    }

    RsvBasis sweep_and_build(const ArrayConfig &config, const AngularGrid &grid, const SweepOptions &options,
                             std::uint64_t seed)
    {
        config.validate();
        if (options.snapshots < 1)
            throw std::invalid_argument("sweep_and_build: need at least one snapshot");
        if (options.aux_bin < 1 || options.aux_bin > options.snapshots)
            throw std::invalid_argument("sweep_and_build: auxiliary bin outside [1, L0]");
        if (options.repeats < 1)
            throw std::invalid_argument("sweep_and_build: repeats must be >= 1");
        if (grid.size() < config.num_antennas)
            std::cerr << "warning: sweep_and_build: grid of " << grid.size() << " angles is narrower than the "
                      << config.num_antennas << "-antenna array\n";

        const double sigma = std::sqrt(noise_power(std::norm(options.amplitude), options.snr_db));
        const int N = grid.size();
        RsvBasis basis{CMatrix(config.num_antennas, N), grid, false};

        auto fill_range = [&](int begin, int end)
        {
            for (int i = begin; i < end; ++i)
                basis.matrix.col(i) = capture_peak_column(config, grid.angle(i), options, sigma, seed, i);
        };

        const int workers = std::clamp(options.workers, 1, N);
        if (workers == 1)
        {
            fill_range(0, N);
        }
        else
        {
            // Each column is written by exactly one thread.
            std::vector<std::jthread> pool;
            const int chunk = (N + workers - 1) / workers;
            for (int w = 0; w < workers; ++w)
                pool.emplace_back(fill_range, std::min(N, w * chunk), std::min(N, (w + 1) * chunk));
        }
        return basis;
    }

    RsvBasis normalize(const RsvBasis &basis)
    {
        RsvBasis out = basis;
        for (Eigen::Index n = 0; n < out.matrix.cols(); ++n)
        {
            const cplx ref = out.matrix(0, n);
            if (ref == cplx(1.0, 0.0))
                continue;
            if (!(std::abs(ref) >= 1e-12))
            {
                std::ostringstream msg;
                msg << "normalize: reference entry of column " << n << " (grid angle "
                    << basis.grid.angle_deg(static_cast<int>(n)) << " deg) is near zero; the sweep is corrupted";
                throw std::runtime_error(msg.str());
            }
            out.matrix.col(n) /= ref;
            out.matrix(0, n) = cplx(1.0, 0.0);
        }
        out.normalized = true;
        return out;
    }

    RsvBasis nominal_basis(const ArrayConfig &config, const AngularGrid &grid)
    {
        RsvBasis basis{CMatrix(config.num_antennas, grid.size()), grid, true};
        for (int i = 0; i < grid.size(); ++i)
            basis.matrix.col(i) = detail::array_response(config, grid.angle(i), false);
        return basis;
    }
}
