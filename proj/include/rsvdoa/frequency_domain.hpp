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

#ifndef RSVDOA_FREQUENCY_DOMAIN_HPP
#define RSVDOA_FREQUENCY_DOMAIN_HPP

#include <span>
#include <stdexcept>
#include <vector>

#include "rsvdoa/array_model.hpp"

namespace rsvdoa
{
    // Per-antenna L-point DFT of a snapshot matrix.
    //
    // Convention (fixed, golden files depend on it): bins are numbered
    // w = 1..L and
    //
    //     X_m(w) = sum_{l=1..L} x_m(l) exp(-j 2 pi w l / L),
    //
    // unnormalized. Bin L is DC. Bin w lives in column w - 1 of `data`.
    struct SpectrumMatrix
    {
        CMatrix data;

        int antennas() const { return static_cast<int>(data.rows()); }
        int bins() const { return static_cast<int>(data.cols()); }

        // 1-based bin access; throws std::out_of_range.
        CVector column(int bin) const;
    };

    // Array-wide measurement vector taken from one or more spectral peaks.
    struct PeakMeasurement
    {
        CVector vector;              // sum of the spectrum columns at `bins`
        std::vector<int> bins;       // 1-based
        double aggregate_power = 0.; // sum over `bins` of P(w) = sum_m |X_m(w)|^2
    };

    class PeakDetectionError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // FFT per antenna row, O(M L log L).
    SpectrumMatrix dft_all_antennas(const SnapshotMatrix &snapshots);

    // Exact inverse of dft_all_antennas.
    SnapshotMatrix inverse_dft(const SpectrumMatrix &spectrum);

    // P(w) = sum_m |X_m(w)|^2; entry w - 1 holds bin w.
    Eigen::VectorXd aggregate_power(const SpectrumMatrix &spectrum);

    inline constexpr int default_bin_separation = 2;

    // Greedy peak picking on P(w). Bins within `min_bin_separation` of an
    // already selected bin are suppressed; bins carrying less than 1e-12 of
    // the strongest bin's power are not candidates. Result is ordered by
    // descending power, ties to the lower bin. Throws PeakDetectionError when
    // fewer than `num_peaks` candidates survive.
    std::vector<int> detect_peaks(const SpectrumMatrix &spectrum, int num_peaks,
                                  int min_bin_separation = default_bin_separation);

    // Sums the spectrum columns at the (distinct, 1-based) `bins`.
    PeakMeasurement accumulate_peaks(const SpectrumMatrix &spectrum, std::span<const int> bins);
}

#endif
