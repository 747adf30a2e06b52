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

#include "oracle/coordinate_descent.hpp"

#include <cmath>
#include <stdexcept>

namespace rsvdoa::oracle
{
    CoordinateDescentResult coordinate_descent_lasso(const CMatrix &dictionary, const CVector &measurement,
                                                     double penalty, double tol, long max_sweeps)
    {
        const Eigen::Index N = dictionary.cols();
        if (measurement.size() != dictionary.rows())
            throw std::invalid_argument("coordinate_descent_lasso: size mismatch");

        CoordinateDescentResult out;
        out.solution = CVector::Zero(N);
        CVector residual = measurement;
        const Eigen::VectorXd col_norm2 = dictionary.colwise().squaredNorm().transpose();

        for (out.sweeps = 1; out.sweeps <= max_sweeps; ++out.sweeps)
        {
            double largest_move = 0.0;
            for (Eigen::Index k = 0; k < N; ++k)
            {
                if (col_norm2[k] == 0.0)
                    continue;
                const cplx old = out.solution[k];
                const cplx corr = dictionary.col(k).dot(residual) + col_norm2[k] * old;
                const double mag = std::abs(corr);
                const cplx updated = mag > penalty / 2 ? corr * ((mag - penalty / 2) / mag) / col_norm2[k]
                                                       : cplx(0.0, 0.0);
                if (updated != old)
                {
                    residual -= dictionary.col(k) * (updated - old);
                    out.solution[k] = updated;
                    largest_move = std::max(largest_move, std::abs(updated - old));
                }
            }
            if (largest_move <= tol)
            {
                out.converged = true;
                break;
            }
        }
        out.objective = (measurement - dictionary * out.solution).squaredNorm() +
                        penalty * out.solution.cwiseAbs().sum();
        return out;
    }

    int best_single_atom(const CMatrix &dictionary, const CVector &measurement)
    {
        Eigen::Index best = 0;
        double best_score = -1.0;
        for (Eigen::Index k = 0; k < dictionary.cols(); ++k)
        {
            const double score = std::abs(dictionary.col(k).dot(measurement)) / dictionary.col(k).norm();
            if (score > best_score)
            {
                best_score = score;
                best = k;
            }
        }
        return static_cast<int>(best);
    }
}
