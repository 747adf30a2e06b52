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

#ifndef RSVDOA_BENCHMARK_ESTIMATORS_HPP
#define RSVDOA_BENCHMARK_ESTIMATORS_HPP

#include <memory>
#include <optional>
#include <stdexcept>

#include "rsvdoa/array_model.hpp"
#include "rsvdoa/rsv_calibration.hpp"
#include "rsvdoa/sparse_recovery.hpp"

namespace rsvdoa
{
    struct CovarianceEstimate
    {
        CMatrix matrix; // Hermitian M x M
        int snapshots_used = 0;
    };

    // R = (1/L) sum_l x(l) x(l)^H, symmetrized.
    CovarianceEstimate sample_covariance(const SnapshotMatrix &snapshots);

    // Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
    struct EigenDecomposition
    {
        Eigen::VectorXd values;
        CMatrix vectors;
    };

    EigenDecomposition eigen_descending(const CMatrix &hermitian);

    // Raised when the J-th and (J+1)-th eigenvalues coincide to 1e-9
    // relative, so the signal subspace is not identifiable.
    class DegenerateSubspaceError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Candidate steering vectors for the covariance-based estimators: either
    // the analytic error-free response or the nearest column of an RSV basis.
    class SteeringModel
    {
    public:
        static SteeringModel nominal(const ArrayConfig &config);
        static SteeringModel calibrated(std::shared_ptr<const RsvBasis> basis);

        CVector operator()(double theta) const;

        // Response at a grid point; endfire is allowed here.
        CVector at_grid(const AngularGrid &grid, int index) const;

        int antennas() const;
        bool is_calibrated() const { return basis_ != nullptr; }

    private:
        std::optional<ArrayConfig> config_;
        std::shared_ptr<const RsvBasis> basis_;
    };

    // Orthogonal projector A (A^H A)^{-1} A^H onto span(A).
    CMatrix projector(const CMatrix &steering);

    struct SearchOptions
    {
        double coarse_step_deg = 1.0;
        double refine_step_deg = 0.01;
        double condition_limit = 1e8;
    };

    // Maximizes trace(P_A(theta) T) over J-tuples, J in {1, 2}: exhaustive
    // search on the coarse grid (open interval (-90, 90) degrees), then a
    // pattern search whose step halves from coarse/2 down to refine_step.
    // Candidate sets with cond(A^H A) above the limit are skipped.
    DoaEstimate projection_search(const CMatrix &target, const SteeringModel &model, int num_sources,
                                  const SearchOptions &options = {});

    // Deterministic ML: maximize trace(P_A R).
    DoaEstimate ml_estimate(const CovarianceEstimate &cov, const SteeringModel &model, int num_sources,
                            const SearchOptions &options = {});

    // WSF weights max(l_i - s2, 0)^2 / l_i for the J leading eigenvalues,
    // s2 the mean of the remaining M - J.
    Eigen::VectorXd wsf_weights(const Eigen::VectorXd &descending_values, int num_sources);

    // E_s W E_s^H; throws DegenerateSubspaceError.
    CMatrix wsf_target(const EigenDecomposition &eig, int num_sources);

    // Weighted subspace fitting: minimize trace(P_A^perp E_s W E_s^H).
    DoaEstimate wsf_estimate(const CovarianceEstimate &cov, const SteeringModel &model, int num_sources,
                             const SearchOptions &options = {});

    // MUSIC pseudospectrum ||a||^2 / ||E_n^H a||^2 over the grid.
    Eigen::VectorXd music_spectrum(const CovarianceEstimate &cov, const SteeringModel &model, int num_sources,
                                   const AngularGrid &grid);

    // Top-J of the MUSIC pseudospectrum with the extract_top_j rule.
    DoaEstimate music_estimate(const CovarianceEstimate &cov, const SteeringModel &model, int num_sources,
                               const AngularGrid &grid, int min_index_separation = -1);

    // One-dimensional scans a^H T a / ||a||^2 for plotting.
    Eigen::VectorXd projection_spectrum(const CMatrix &target, const SteeringModel &model, const AngularGrid &grid);
}

#endif
