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

#ifndef RSVDOA_ORACLE_SELFTEST_HPP
#define RSVDOA_ORACLE_SELFTEST_HPP

#include <cstdint>
#include <iosfwd>

#include "rsvdoa/sparse_recovery.hpp"

namespace rsvdoa::oracle
{
    struct SelftestOptions
    {
        int instances = 100;
        int max_antennas = 6; // M drawn from [2, max_antennas]
        int max_atoms = 32;   // N drawn from [2, max_atoms]
        double tolerance = 1e-6;
        std::uint64_t seed = 2026;
        SolverOptions solver;
    };

    struct SelftestReport
    {
        int instances = 0;
        int failures = 0;       // relative gap at or above the tolerance
        double max_gap = 0.0;   // max |f_admm - f_cd| / f_cd
        int worst_instance = -1;
        int unconverged = 0;    // ADMM runs that hit max_iters

        bool passed() const { return failures == 0; }
    };

    // Random complex LASSO instances (D and y i.i.d. CN(0, 1),
    // mu = alpha ||D^H y||_inf with alpha uniform in [0.02, 1.5]) solved by
    // the ADMM solver and by the coordinate-descent oracle. When `log` is
    // given, one line per instance is written to it.
    SelftestReport run_solver_selftest(const SelftestOptions &options = {}, std::ostream *log = nullptr);
}

#endif
