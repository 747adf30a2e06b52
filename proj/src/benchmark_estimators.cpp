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

#include "rsvdoa/benchmark_estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace rsvdoa
{
    CovarianceEstimate sample_covariance(const SnapshotMatrix &snapshots)
    {
        const int L = snapshots.snapshots();
        if (L < 1)
            throw std::invalid_argument("sample_covariance: no snapshots");
        CMatrix R = snapshots.data * snapshots.data.adjoint() / static_cast<double>(L);
        CMatrix Rh = 0.5 * (R + R.adjoint());
        return {std::move(Rh), L};
    }

    EigenDecomposition eigen_descending(const CMatrix &hermitian)
    {
        Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("eigen_descending: eigendecomposition failed");
        EigenDecomposition out;
        out.values = solver.eigenvalues().reverse();
        out.vectors = solver.eigenvectors().rowwise().reverse();
        return out;
    }

    // ---- SteeringModel -------------------------------------------------------

    SteeringModel SteeringModel::nominal(const ArrayConfig &config)
    {
        SteeringModel m;
        ArrayConfig c = config;
        c.errors = ErrorModel::identity(config.num_antennas);
        c.validate();
        m.config_ = std::move(c);
        return m;
    }

    SteeringModel SteeringModel::calibrated(std::shared_ptr<const RsvBasis> basis)
    {
        if (!basis || !basis->normalized)
            throw std::invalid_argument("SteeringModel: calibrated model needs a normalized basis");
        SteeringModel m;
        m.basis_ = std::move(basis);
        return m;
    }

    CVector SteeringModel::operator()(double theta) const
    {
        if (basis_)
            return basis_->matrix.col(basis_->grid.nearest_index(theta));
        return steering_vector(*config_, theta);
    }

    CVector SteeringModel::at_grid(const AngularGrid &grid, int index) const
    {
        if (basis_)
        {
            if (basis_->grid == grid)
                return basis_->matrix.col(index);
            return basis_->matrix.col(basis_->grid.nearest_index(grid.angle(index)));
        }
        return detail::array_response(*config_, grid.angle(index), false);
    }

    int SteeringModel::antennas() const
    {
        return basis_ ? basis_->antennas() : config_->num_antennas;
    }

    CMatrix projector(const CMatrix &steering)
    {
        const CMatrix gram = steering.adjoint() * steering;
        return steering * gram.ldlt().solve(steering.adjoint());
    }

    // ---- Projection search ---------------------------------------------------

    namespace
    {
        constexpr double edge_margin_deg = 1e-6;

        double clamp_deg(double deg)
        {
            return std::clamp(deg, -90.0 + edge_margin_deg, 90.0 - edge_margin_deg);
        }

        // trace(G^{-1} H) for a 2 x 2 Hermitian pair, or NaN when G is too
        // ill-conditioned.
        double pair_criterion(cplx g11, cplx g12, cplx g22, cplx h11, cplx h12, cplx h21, cplx h22,
                              double condition_limit)
        {
            const double a = g11.real(), d = g22.real();
            const double off = std::norm(g12);
            const double half_sum = 0.5 * (a + d);
            const double radius = std::sqrt(0.25 * (a - d) * (a - d) + off);
            const double lmax = half_sum + radius;
            const double lmin = half_sum - radius;
            if (!(lmin > 0.0) || lmax > condition_limit * lmin)
                return std::numeric_limits<double>::quiet_NaN();
            const double det = a * d - off;
            const cplx num = d * h11 - g12 * h21 - std::conj(g12) * h12 + a * h22;
            return num.real() / det;
        }

        double tuple_criterion(const CMatrix &target, const SteeringModel &model, const std::vector<double> &deg,
                               double condition_limit)
        {
            const int J = static_cast<int>(deg.size());
            CMatrix A(model.antennas(), J);
            for (int j = 0; j < J; ++j)
                A.col(j) = model(deg2rad(deg[j]));
            const CMatrix TA = target * A;
            if (J == 1)
                return (A.col(0).dot(TA.col(0))).real() / A.col(0).squaredNorm();
            const CMatrix G = A.adjoint() * A;
            const CMatrix H = A.adjoint() * TA;
            return pair_criterion(G(0, 0), G(0, 1), G(1, 1), H(0, 0), H(0, 1), H(1, 0), H(1, 1), condition_limit);
        }
    }

    DoaEstimate projection_search(const CMatrix &target, const SteeringModel &model, int num_sources,
                                  const SearchOptions &options)
    {
        if (num_sources < 1 || num_sources > 2)
            throw std::invalid_argument("projection_search: only J = 1 or J = 2 is supported");
        if (target.rows() != model.antennas() || target.cols() != model.antennas())
            throw std::invalid_argument("projection_search: target size differs from the array");
        if (!(options.coarse_step_deg > 0.0) || !(options.refine_step_deg > 0.0))
            throw std::invalid_argument("projection_search: steps must be positive");

        std::vector<double> coarse;
        const int half = static_cast<int>(std::ceil(90.0 / options.coarse_step_deg)) - 1;
        for (int k = -half; k <= half; ++k)
        {
            const double deg = k * options.coarse_step_deg;
            if (std::abs(deg) < 90.0)
                coarse.push_back(deg);
        }
        const int K = static_cast<int>(coarse.size());
        CMatrix A(model.antennas(), K);
        for (int k = 0; k < K; ++k)
            A.col(k) = model(deg2rad(coarse[k]));
        const CMatrix G = A.adjoint() * A;
        const CMatrix H = A.adjoint() * (target * A);

        std::vector<double> best;
        double best_value = -std::numeric_limits<double>::infinity();
        if (num_sources == 1)
        {
            for (int k = 0; k < K; ++k)
            {
                const double v = H(k, k).real() / G(k, k).real();
                if (v > best_value)
                {
                    best_value = v;
                    best = {coarse[k]};
                }
            }
        }
        else
        {
            for (int i = 0; i < K; ++i)
                for (int j = i + 1; j < K; ++j)
                {
                    const double v = pair_criterion(G(i, i), G(i, j), G(j, j), H(i, i), H(i, j), H(j, i), H(j, j),
                                                    options.condition_limit);
                    if (v > best_value)
                    {
                        best_value = v;
                        best = {coarse[i], coarse[j]};
                    }
                }
        }
        if (best.empty())
            throw std::runtime_error("projection_search: every candidate set is ill-conditioned");

        // Pattern search with halving steps.
        for (double step = options.coarse_step_deg / 2; step > options.refine_step_deg / 2; step /= 2)
        {
            bool moved = true;
            while (moved)
            {
                moved = false;
                std::vector<double> champion = best;
                const int span = num_sources == 1 ? 0 : 1;
                for (int d0 = -1; d0 <= 1; ++d0)
                    for (int d1 = -span; d1 <= span; ++d1)
                    {
                        if (d0 == 0 && d1 == 0)
                            continue;
                        std::vector<double> trial = best;
                        trial[0] = clamp_deg(trial[0] + d0 * step);
                        if (num_sources == 2)
                            trial[1] = clamp_deg(trial[1] + d1 * step);
                        const double v = tuple_criterion(target, model, trial, options.condition_limit);
                        if (v > best_value)
                        {
                            best_value = v;
                            champion = trial;
                            moved = true;
                        }
                    }
                best = champion;
            }
        }

        std::sort(best.begin(), best.end());
        DoaEstimate est;
        for (double deg : best)
        {
            est.angles.push_back(deg2rad(deg));
            est.magnitudes.push_back(best_value);
        }
        return est;
    }

    DoaEstimate ml_estimate(const CovarianceEstimate &cov, const SteeringModel &model, int num_sources,
                            const SearchOptions &options)
    {
        return projection_search(cov.matrix, model, num_sources, options);
    }

    namespace
    {
        void check_identifiable(const Eigen::VectorXd &values, int num_sources)
        {
            const int M = static_cast<int>(values.size());
            if (num_sources < 1 || num_sources >= M)
                throw std::invalid_argument("subspace estimators need 1 <= J < M");
            const double lj = values[num_sources - 1];
            const double next = values[num_sources];
            if (std::abs(lj - next) <= 1e-9 * std::abs(lj))
                throw DegenerateSubspaceError("signal subspace ambiguous: eigenvalues " + std::to_string(num_sources) +
                                              " and " + std::to_string(num_sources + 1) + " coincide");
        }
    }

    Eigen::VectorXd wsf_weights(const Eigen::VectorXd &descending_values, int num_sources)
    {
        check_identifiable(descending_values, num_sources);
        const int M = static_cast<int>(descending_values.size());
        const double sigma2 = descending_values.tail(M - num_sources).mean();
        Eigen::VectorXd w(num_sources);
        for (int i = 0; i < num_sources; ++i)
        {
            const double l = descending_values[i];
            const double excess = std::max(l - sigma2, 0.0);
            w[i] = l > 0.0 ? excess * excess / l : 0.0;
        }
        return w;
    }

    CMatrix wsf_target(const EigenDecomposition &eig, int num_sources)
    {
        const Eigen::VectorXd w = wsf_weights(eig.values, num_sources);
        const CMatrix Es = eig.vectors.leftCols(num_sources);
        return Es * w.asDiagonal() * Es.adjoint();
    }

    DoaEstimate wsf_estimate(const CovarianceEstimate &cov, const SteeringModel &model, int num_sources,
                             const SearchOptions &options)
    {
        const EigenDecomposition eig = eigen_descending(cov.matrix);
        return projection_search(wsf_target(eig, num_sources), model, num_sources, options);
    }

    Eigen::VectorXd music_spectrum(const CovarianceEstimate &cov, const SteeringModel &model, int num_sources,
                                   const AngularGrid &grid)
    {
        const EigenDecomposition eig = eigen_descending(cov.matrix);
        check_identifiable(eig.values, num_sources);
        const CMatrix En = eig.vectors.rightCols(eig.values.size() - num_sources);
        Eigen::VectorXd p(grid.size());
        for (int i = 0; i < grid.size(); ++i)
        {
            const CVector a = model.at_grid(grid, i);
            const double denom = (En.adjoint() * a).squaredNorm();
            p[i] = a.squaredNorm() / std::max(denom, std::numeric_limits<double>::min());
        }
        return p;
    }

    DoaEstimate music_estimate(const CovarianceEstimate &cov, const SteeringModel &model, int num_sources,
                               const AngularGrid &grid, int min_index_separation)
    {
        if (min_index_separation < 0)
            min_index_separation = default_index_separation(grid.size());
        return extract_top_j(music_spectrum(cov, model, num_sources, grid), grid, num_sources, min_index_separation);
    }

    Eigen::VectorXd projection_spectrum(const CMatrix &target, const SteeringModel &model, const AngularGrid &grid)
    {
        Eigen::VectorXd p(grid.size());
        for (int i = 0; i < grid.size(); ++i)
        {
            const CVector a = model.at_grid(grid, i);
            p[i] = a.dot(target * a).real() / a.squaredNorm();
        }
        return p;
    }
}
