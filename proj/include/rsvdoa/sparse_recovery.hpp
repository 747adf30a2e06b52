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

#ifndef RSVDOA_SPARSE_RECOVERY_HPP
#define RSVDOA_SPARSE_RECOVERY_HPP

#include <stdexcept>
#include <vector>

#include "rsvdoa/array_model.hpp"
#include "rsvdoa/frequency_domain.hpp"
#include "rsvdoa/rsv_calibration.hpp"

namespace rsvdoa
{
    // min_s ||y - D s||_2^2 + mu ||s||_1 over complex s.
    struct LassoProblem
    {
        CMatrix dictionary; // M x N
        CVector measurement; // M
        double penalty = 0.0;
    };

    struct SolverOptions
    {
        double tol = 1e-8;
        int max_iters = 5000;
    };

    struct SparseSolution
    {
        CVector spectrum;           // N, exactly sparse
        double objective = 0.0;     // recomputed at `spectrum`
        int iterations = 0;
        double primal_residual = 0.0;
        double dual_residual = 0.0;
        bool converged = false;
    };

    // max(|v| - kappa, 0) v / |v|, and 0 at v = 0.
    cplx soft_threshold(cplx v, double kappa);

    double lasso_objective(const CMatrix &dictionary, const CVector &measurement, double penalty,
                           const CVector &s);

    // ADMM for the complex LASSO with x = z splitting.
    //
    // The problem is first rescaled so that ||D^H y||_inf = 1 (the solution
    // scales back linearly), which makes the stopping rule scale free:
    // iterate until the primal residual ||x - z|| and the dual residual
    // rho ||z - z_prev|| of the rescaled problem both drop below tol sqrt(N).
    // The x-step uses the matrix inversion lemma around a Cholesky factor of
    // the smaller Gram matrix (M x M when M < N), refactored whenever the
    // penalty parameter rho is rebalanced. rho is frozen for the second half
    // of the iteration budget.
    //
    // The solver holds no mutable state; one instance may serve concurrent
    // solves against the same dictionary.
    class LassoSolver
    {
    public:
        // Throws std::invalid_argument on NaN/Inf entries or an empty dictionary.
        explicit LassoSolver(CMatrix dictionary);

        // Non-convergence is reported through SparseSolution::converged.
        SparseSolution solve(const CVector &measurement, double penalty, const SolverOptions &options = {}) const;

        const CMatrix &dictionary() const { return dict_; }

    private:
        CMatrix dict_;
        CMatrix adjoint_;
        CMatrix gram_; // D D^H when wide, D^H D otherwise
        bool wide_;
    };

    SparseSolution solve_l1(const LassoProblem &problem, const SolverOptions &options = {});

    // mu = alpha ||D^H y||_inf. The all-zero vector is optimal once
    // mu >= 2 ||D^H y||_inf, so alpha < 2 keeps the problem non-trivial.
    struct MuPolicy
    {
        double alpha = 0.05;

        double penalty(const CMatrix &dictionary, const CVector &measurement) const;
    };

    // Grid-indexed DOA estimate. `angles` are ascending; `indices` and
    // `magnitudes` follow the same order. Off-grid estimators leave
    // `indices` empty.
    struct DoaEstimate
    {
        std::vector<int> indices;
        std::vector<double> angles; // radians
        std::vector<double> magnitudes;
    };

    class UnresolvedPeaksError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // ceil(N / 180): grid steps spanning one degree.
    int default_index_separation(int grid_size);

    // Greedy top-J on the magnitudes; indices within `min_index_separation`
    // of a selected one are suppressed, zero entries never qualify, ties go
    // to the lower index. Throws UnresolvedPeaksError when fewer than J peaks
    // remain.
    DoaEstimate extract_top_j(const Eigen::VectorXd &magnitudes, const AngularGrid &grid, int num_sources,
                              int min_index_separation);
    DoaEstimate extract_top_j(const SparseSolution &solution, const AngularGrid &grid, int num_sources,
                              int min_index_separation);

    struct SparseDoaResult
    {
        DoaEstimate estimate;
        SparseSolution solution;
        double penalty = 0.0;
    };

    // Penalty selection, ADMM solve and top-J extraction against a
    // normalized dictionary. A negative separation selects the default.
    SparseDoaResult estimate_doa(const RsvBasis &basis, const PeakMeasurement &measurement, int num_sources,
                                 const MuPolicy &mu_policy = {}, const SolverOptions &options = {},
                                 int min_index_separation = -1);
}

#endif
