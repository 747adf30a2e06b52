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

#ifndef RSVDOA_RSV_CALIBRATION_HPP
#define RSVDOA_RSV_CALIBRATION_HPP

#include <cstdint>

#include "rsvdoa/array_model.hpp"

namespace rsvdoa
{
    // N angles theta_i = -pi/2 + (i + 1) pi / N for zero-based i = 0..N-1,
    // i.e. the interval (-pi/2, pi/2] with constant step pi/N. The last point
    // is endfire (+90 degrees); dictionaries evaluate the array response there
    // directly even though steering_vector() rejects it as a look direction.
    class AngularGrid
    {
    public:
        explicit AngularGrid(int size);

        int size() const { return size_; }
        double step() const { return pi / size_; }
        double angle(int index) const;
        double angle_deg(int index) const { return rad2deg(angle(index)); }

        // Index of the grid angle closest to theta (ties to the lower index).
        int nearest_index(double theta) const;

        friend bool operator==(const AngularGrid &, const AngularGrid &) = default;

    private:
        int size_;
    };

    // M x N real-steering-vector dictionary; column i belongs to grid angle i.
    struct RsvBasis
    {
        CMatrix matrix;
        AngularGrid grid{1};
        bool normalized = false;

        int antennas() const { return static_cast<int>(matrix.rows()); }
    };

    // Auxiliary-source sweep parameters. The auxiliary source emits
    // amplitude * exp(j 2 pi aux_bin l / snapshots).
    struct SweepOptions
    {
        int aux_bin = 16;
        int snapshots = 512; // L0
        double snr_db = 30.0;
        int repeats = 1;     // peak columns averaged over repeated captures
        cplx amplitude{1.0, 0.0};
        int workers = 1;
    };

    // Places the auxiliary source at every grid angle, captures L0 snapshots
    // through the (error-corrupted) array, takes the per-antenna DFT and keeps
    // the column at aux_bin. Deterministic in `seed` for any worker count:
    // the noise of angle i, repeat r comes from derive_seed(seed, i * repeats + r).
    // Warns on stderr when N < M.
    RsvBasis sweep_and_build(const ArrayConfig &config, const AngularGrid &grid, const SweepOptions &options,
                             std::uint64_t seed);

    // Divides every column by its first entry. Columns whose first entry is
    // already exactly 1 are left untouched, so the operation is idempotent
    // bit for bit. Throws std::runtime_error naming the grid angle when a
    // reference entry has magnitude below 1e-12.
    RsvBasis normalize(const RsvBasis &basis);

    // Error-free dictionary: column i = a(theta_i).
    RsvBasis nominal_basis(const ArrayConfig &config, const AngularGrid &grid);
}

#endif
