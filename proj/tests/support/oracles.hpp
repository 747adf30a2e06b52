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

// Reference computations used only by the tests. Each one follows the
// defining formula directly, without the library's fast paths.

#ifndef RSVDOA_TEST_ORACLES_HPP
#define RSVDOA_TEST_ORACLES_HPP

#include <cmath>
#include <complex>

#include "rsvdoa/array_model.hpp"

namespace rsvdoa::test
{
    // X_m(w) = sum_{l=1..L} x_m(l) exp(-j 2 pi w l / L), w = 1..L, by direct summation.
    inline CMatrix direct_dft(const CMatrix &x)
    {
        const Eigen::Index M = x.rows(), L = x.cols();
        CMatrix X = CMatrix::Zero(M, L);
        for (Eigen::Index w = 1; w <= L; ++w)
            for (Eigen::Index l = 1; l <= L; ++l)
            {
                const double ang = -2.0 * pi * static_cast<double>((w * l) % L) / static_cast<double>(L);
                X.col(w - 1) += x.col(l - 1) * std::polar(1.0, ang);
            }
        return X;
    }

    // Closed form of sum_{l=1..L} exp(j 2 pi w0 l / L) exp(-j 2 pi w l / L):
    // L when w == w0 (mod L), 0 otherwise (geometric series of an L-th root of unity).
    inline cplx tone_dft(int w0, int w, int L)
    {
        return ((w - w0) % L + L) % L == 0 ? cplx(static_cast<double>(L), 0.0) : cplx(0.0, 0.0);
    }

    // Hand evaluation of g_m exp(j phi_m) exp(j 2 pi m d sin(theta) / lambda).
    inline CVector manual_response(int M, double d_over_lambda, double theta, const Eigen::VectorXd &g,
                                   const Eigen::VectorXd &phi)
    {
        CVector v(M);
        for (int m = 0; m < M; ++m)
            v[m] = g[m] * std::exp(cplx(0.0, phi[m] + 2.0 * pi * m * d_over_lambda * std::sin(theta)));
        return v;
    }

    inline double max_abs(const CMatrix &a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }
}

#endif
