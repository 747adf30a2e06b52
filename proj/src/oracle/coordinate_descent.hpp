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

#ifndef RSVDOA_ORACLE_COORDINATE_DESCENT_HPP
#define RSVDOA_ORACLE_COORDINATE_DESCENT_HPP

#include "rsvdoa/array_model.hpp"

namespace rsvdoa::oracle
{
    struct CoordinateDescentResult
    {
        CVector solution;
        double objective = 0.0;
        long sweeps = 0;
        bool converged = false;
    };

    // Cyclic coordinate descent for min ||y - D s||^2 + mu ||s||_1. Each
    // coordinate update is the exact complex soft-threshold
    //   s_k = soft(d_k^H r_k, mu / 2) / ||d_k||^2,  r_k = y - sum_{i != k} d_i s_i.
    // Stops when a full sweep moves no coordinate by more than `tol`.
    // Shares no code with the ADMM solver.
    CoordinateDescentResult coordinate_descent_lasso(const CMatrix &dictionary, const CVector &measurement,
                                                     double penalty, double tol = 1e-10,
                                                     long max_sweeps = 2'000'000);

    // Single-atom matching pursuit: the column index maximizing
    // |d_k^H y| / ||d_k||.
    int best_single_atom(const CMatrix &dictionary, const CVector &measurement);
}

#endif
