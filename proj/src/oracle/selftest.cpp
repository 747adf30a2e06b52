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

#include "oracle/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "oracle/coordinate_descent.hpp"

namespace rsvdoa::oracle
{
    SelftestReport run_solver_selftest(const SelftestOptions &options, std::ostream *log)
    {
        SelftestReport report;
        Rng rng(options.seed);
        std::uniform_int_distribution<int> antennas(2, options.max_antennas);
        std::uniform_int_distribution<int> atoms(2, options.max_atoms);
        std::uniform_real_distribution<double> alpha(0.02, 1.5);

        for (int i = 0; i < options.instances; ++i)
        {
            const int M = antennas(rng);
            const int N = atoms(rng);
            CMatrix D(M, N);
            CMatrix y(M, 1);
            fill_standard_complex_normal(D, rng);
            fill_standard_complex_normal(y, rng);
            const double a = alpha(rng);
            const double mu = a * (D.adjoint() * y).cwiseAbs().maxCoeff();

            const SparseSolution admm = LassoSolver(D).solve(y.col(0), mu, options.solver);
            const CoordinateDescentResult cd = coordinate_descent_lasso(D, y.col(0), mu);
            const double gap = std::abs(admm.objective - cd.objective) / cd.objective;

            ++report.instances;
            if (!admm.converged)
                ++report.unconverged;
            if (!(gap < options.tolerance))
                ++report.failures;
            if (gap > report.max_gap || report.worst_instance < 0)
            {
                report.max_gap = std::max(gap, report.max_gap);
                report.worst_instance = i;
            }
            if (log)
            {
                char line[160];
                std::snprintf(line, sizeof line, "instance %3d  M=%d N=%2d alpha=%.3f  admm=%.12g cd=%.12g gap=%.2e%s\n",
                              i, M, N, a, admm.objective, cd.objective, gap, admm.converged ? "" : "  (max_iters)");
                *log << line;
            }
        }
        return report;
    }
}
