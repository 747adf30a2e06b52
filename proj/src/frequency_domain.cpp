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

#include "rsvdoa/frequency_domain.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include <unsupported/Eigen/FFT>

namespace rsvdoa
{
    namespace
    {
        // exp(-j 2 pi w / L): maps the zero-based FFT output Y[w mod L]
        // onto the one-based sum X(w) = exp(-j 2 pi w / L) Y[w mod L].
        cplx bin_shift(int bin, int L)
        {
            return std::polar(1.0, -2.0 * pi * static_cast<double>(bin % L) / L);
        }
    }

    CVector SpectrumMatrix::column(int bin) const
    {
        if (bin < 1 || bin > bins())
            throw std::out_of_range("SpectrumMatrix: bin " + std::to_string(bin) + " outside [1, " +
                                    std::to_string(bins()) + "]");
        return data.col(bin - 1);
    }

    SpectrumMatrix dft_all_antennas(const SnapshotMatrix &snapshots)
    {
        const int M = snapshots.antennas();
        const int L = snapshots.snapshots();
        if (M < 1 || L < 1)
            throw std::invalid_argument("dft_all_antennas: empty snapshot matrix");

        Eigen::FFT<double> fft;
        std::vector<cplx> in(L), out(L);
        std::vector<cplx> shift(L);
        for (int w = 1; w <= L; ++w)
            shift[w - 1] = bin_shift(w, L);

        SpectrumMatrix X{CMatrix(M, L)};
        for (int m = 0; m < M; ++m)
        {
            for (int l = 0; l < L; ++l)
                in[l] = snapshots.data(m, l);
            if (L == 1)
                out = in; // length-1 transform
            else
                fft.fwd(out, in);
            for (int w = 1; w <= L; ++w)
                X.data(m, w - 1) = shift[w - 1] * out[w % L];
        }
        return X;
    }

    SnapshotMatrix inverse_dft(const SpectrumMatrix &spectrum)
    {
        const int M = spectrum.antennas();
        const int L = spectrum.bins();
        if (M < 1 || L < 1)
            throw std::invalid_argument("inverse_dft: empty spectrum");

        Eigen::FFT<double> fft; // inv() scales by 1/L
        std::vector<cplx> in(L), out(L);
        SnapshotMatrix x{CMatrix(M, L)};
        for (int m = 0; m < M; ++m)
        {
            for (int w = 1; w <= L; ++w)
                in[w % L] = std::conj(bin_shift(w, L)) * spectrum.data(m, w - 1);
            if (L == 1)
                out = in;
            else
                fft.inv(out, in);
            for (int l = 0; l < L; ++l)
                x.data(m, l) = out[l];
        }
        return x;
    }

    Eigen::VectorXd aggregate_power(const SpectrumMatrix &spectrum)
    {
        return spectrum.data.cwiseAbs2().colwise().sum().transpose();
    }

    std::vector<int> detect_peaks(const SpectrumMatrix &spectrum, int num_peaks, int min_bin_separation)
    {
        if (num_peaks < 1)
            throw std::invalid_argument("detect_peaks: num_peaks must be >= 1");
        if (min_bin_separation < 1)
            throw std::invalid_argument("detect_peaks: min_bin_separation must be >= 1");

        const Eigen::VectorXd power = aggregate_power(spectrum);
        const int L = static_cast<int>(power.size());
        const double floor = 1e-12 * power.maxCoeff();

        std::vector<int> order(L);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return power[a] > power[b]; });

        std::vector<int> picked;
        for (int idx : order)
        {
            if (static_cast<int>(picked.size()) == num_peaks)
                break;
            if (!(power[idx] > floor))
                break;
            const int bin = idx + 1;
            const bool suppressed = std::any_of(picked.begin(), picked.end(), [&](int p)
                                                { return std::abs(p - bin) <= min_bin_separation; });
            if (!suppressed)
                picked.push_back(bin);
        }
        if (static_cast<int>(picked.size()) < num_peaks)
            throw PeakDetectionError("detect_peaks: only " + std::to_string(picked.size()) + " of " +
                                     std::to_string(num_peaks) + " peaks survive a separation of " +
                                     std::to_string(min_bin_separation) + " bins");
        return picked;
    }

    PeakMeasurement accumulate_peaks(const SpectrumMatrix &spectrum, std::span<const int> bins)
    {
        if (bins.empty())
            throw std::invalid_argument("accumulate_peaks: no bins given");
        const std::set<int> unique(bins.begin(), bins.end());
        if (unique.size() != bins.size())
            throw std::invalid_argument("accumulate_peaks: duplicate bins");

        PeakMeasurement p;
        p.vector = CVector::Zero(spectrum.antennas());
        for (int bin : bins)
        {
            const CVector col = spectrum.column(bin);
            p.vector += col;
            p.aggregate_power += col.squaredNorm();
        }
        p.bins.assign(bins.begin(), bins.end());
        return p;
    }
}
