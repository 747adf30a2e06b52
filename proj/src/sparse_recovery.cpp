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

#include "rsvdoa/sparse_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rsvdoa
{
    cplx soft_threshold(cplx v, double kappa)
    {
        const double mag = std::abs(v);
        if (mag <= kappa || mag == 0.0)
            return cplx(0.0, 0.0);
        return v * ((mag - kappa) / mag);
    }

    double lasso_objective(const CMatrix &dictionary, const CVector &measurement, double penalty,
                           const CVector &s)
    {
        return (measurement - dictionary * s).squaredNorm() + penalty * s.cwiseAbs().sum();
    }

    LassoSolver::LassoSolver(CMatrix dictionary) : dict_(std::move(dictionary))
    {
        if (dict_.size() == 0)
            throw std::invalid_argument("LassoSolver: empty dictionary");
        if (!dict_.allFinite())
            throw std::invalid_argument("LassoSolver: dictionary contains NaN or Inf");
        adjoint_ = dict_.adjoint();
        wide_ = dict_.rows() < dict_.cols();
        gram_ = wide_ ? CMatrix(dict_ * adjoint_) : CMatrix(adjoint_ * dict_);
    }

    SparseSolution LassoSolver::solve(const CVector &measurement, double penalty, const SolverOptions &options) const
    {
        const Eigen::Index M = dict_.rows();
        const Eigen::Index N = dict_.cols();
        if (measurement.size() != M)
            throw std::invalid_argument("LassoSolver: measurement length " + std::to_string(measurement.size()) +
                                        " differs from dictionary rows " + std::to_string(M));
        if (!measurement.allFinite())
            throw std::invalid_argument("LassoSolver: measurement contains NaN or Inf");
        if (!(penalty > 0.0) || !std::isfinite(penalty))
            throw std::invalid_argument("LassoSolver: penalty must be positive");
        if (!(options.tol > 0.0) || options.max_iters < 1)
            throw std::invalid_argument("LassoSolver: tol must be positive and max_iters >= 1");

        SparseSolution out;
        const CVector correlation = adjoint_ * measurement;
        const double scale = correlation.cwiseAbs().maxCoeff();
        if (scale == 0.0 || penalty >= 2.0 * scale)
        {
            // Zero satisfies the optimality condition ||2 D^H y||_inf <= mu.
            out.spectrum = CVector::Zero(N);
            out.objective = lasso_objective(dict_, measurement, penalty, out.spectrum);
            out.converged = true;
            return out;
        }

        const CVector Dty2 = (2.0 / scale) * correlation; // 2 D^H y in rescaled units
        const double mu = penalty / scale;
        const double threshold = options.tol * std::sqrt(static_cast<double>(N));

        double rho = 2.0 * gram_.diagonal().real().sum() / static_cast<double>(wide_ ? N : M);
        rho = std::max(rho, 1e-6);
        const auto identity = CMatrix::Identity(gram_.rows(), gram_.cols());
        Eigen::LLT<CMatrix> factor(2.0 * gram_ + rho * identity);

        CVector x = CVector::Zero(N), z = CVector::Zero(N), u = CVector::Zero(N);
        CVector z_prev(N), rhs(N);
        const int adapt_until = options.max_iters / 2;

        for (int it = 1; it <= options.max_iters; ++it)
        {
            rhs = Dty2 + rho * (z - u);
            if (wide_)
            {
                const CVector w = factor.solve(dict_ * rhs);
                x = (rhs - 2.0 * (adjoint_ * w)) / rho;
            }
            else
            {
                x = factor.solve(rhs);
            }

            z_prev = z;
            const double kappa = mu / rho;
            for (Eigen::Index n = 0; n < N; ++n)
                z[n] = soft_threshold(x[n] + u[n], kappa);
            u += x - z;

            const double r = (x - z).norm();
            const double s = rho * (z - z_prev).norm();
            out.iterations = it;
            out.primal_residual = r;
            out.dual_residual = s;
            if (r <= threshold && s <= threshold)
            {
                out.converged = true;
                break;
            }

            if (it < adapt_until && it % 10 == 0)
            {
                double factor_change = 1.0;
                if (r > 10.0 * s)
                    factor_change = 2.0;
                else if (s > 10.0 * r)
                    factor_change = 0.5;
                if (factor_change != 1.0)
                {
                    rho *= factor_change;
                    u /= factor_change;
                    factor.compute(2.0 * gram_ + rho * identity);
                }
            }
        }

        out.spectrum = scale * z;
        out.objective = lasso_objective(dict_, measurement, penalty, out.spectrum);
        return out;
    }

    SparseSolution solve_l1(const LassoProblem &problem, const SolverOptions &options)
    {
        return LassoSolver(problem.dictionary).solve(problem.measurement, problem.penalty, options);
    }

    double MuPolicy::penalty(const CMatrix &dictionary, const CVector &measurement) const
    {
        if (!(alpha > 0.0))
            throw std::invalid_argument("MuPolicy: alpha must be positive");
        return alpha * (dictionary.adjoint() * measurement).cwiseAbs().maxCoeff();
    }

    int default_index_separation(int grid_size)
    {
        return (grid_size + 179) / 180;
    }

    DoaEstimate extract_top_j(const Eigen::VectorXd &magnitudes, const AngularGrid &grid, int num_sources,
                              int min_index_separation)
    {
        if (num_sources < 1)
            throw std::invalid_argument("extract_top_j: need J >= 1");
        if (min_index_separation < 0)
            throw std::invalid_argument("extract_top_j: separation must be non-negative");
        const int N = static_cast<int>(magnitudes.size());
        if (N != grid.size())
            throw std::invalid_argument("extract_top_j: spectrum length differs from grid size");

        std::vector<int> order(N);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return magnitudes[a] > magnitudes[b]; });

        std::vector<int> picked;
        for (int idx : order)
        {
            if (static_cast<int>(picked.size()) == num_sources || !(magnitudes[idx] > 0.0))
                break;
            const bool suppressed = std::any_of(picked.begin(), picked.end(), [&](int p)
                                                { return std::abs(p - idx) <= min_index_separation; });
            if (!suppressed)
                picked.push_back(idx);
        }
        if (static_cast<int>(picked.size()) < num_sources)
            throw UnresolvedPeaksError("extract_top_j: " + std::to_string(picked.size()) + " of " +
                                       std::to_string(num_sources) + " peaks found");

        std::sort(picked.begin(), picked.end());
        DoaEstimate est;
        for (int idx : picked)
        {
            est.indices.push_back(idx);
            est.angles.push_back(grid.angle(idx));
            est.magnitudes.push_back(magnitudes[idx]);
        }
        return est;
    }

    DoaEstimate extract_top_j(const SparseSolution &solution, const AngularGrid &grid, int num_sources,
                              int min_index_separation)
    {
        return extract_top_j(Eigen::VectorXd(solution.spectrum.cwiseAbs()), grid, num_sources, min_index_separation);
    }

    SparseDoaResult estimate_doa(const RsvBasis &basis, const PeakMeasurement &measurement, int num_sources,
                                 const MuPolicy &mu_policy, const SolverOptions &options, int min_index_separation)
    {
        if (!basis.normalized)
            throw std::invalid_argument("estimate_doa: basis must be normalized");
        if (min_index_separation < 0)
            min_index_separation = default_index_separation(basis.grid.size());

        SparseDoaResult result;
        result.penalty = mu_policy.penalty(basis.matrix, measurement.vector);
        if (!(result.penalty > 0.0))
            throw UnresolvedPeaksError("estimate_doa: measurement is orthogonal to every dictionary column");
        result.solution = LassoSolver(basis.matrix).solve(measurement.vector, result.penalty, options);
        result.estimate = extract_top_j(result.solution, basis.grid, num_sources, min_index_separation);
        return result;
    }
}
