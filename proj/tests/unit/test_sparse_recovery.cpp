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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracle/coordinate_descent.hpp"
#include "rsvdoa/frequency_domain.hpp"
#include "rsvdoa/sparse_recovery.hpp"
#include "support/oracles.hpp"

using namespace rsvdoa;

namespace
{
    CMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed)
    {
        Rng rng(seed);
        CMatrix m(rows, cols);
        fill_standard_complex_normal(m, rng);
        return m;
    }

    RsvBasis calibrated_basis(int M, int N, std::uint64_t error_seed, ArrayConfig *out_cfg = nullptr)
    {
        const auto cfg = ArrayConfig::half_wavelength(M).with_errors(draw_error_model(M, {}, error_seed));
        if (out_cfg)
            *out_cfg = cfg;
        SweepOptions opt;
        opt.snr_db = INFINITY;
        opt.snapshots = 64;
        opt.aux_bin = 4;
        return normalize(sweep_and_build(cfg, AngularGrid(N), opt, error_seed));
    }
}

TEST_CASE("complex soft threshold")
{
    CHECK(soft_threshold(cplx(3.0, 0.0), 1.0) == cplx(2.0, 0.0));
    CHECK(soft_threshold(cplx(0.5, 0.0), 1.0) == cplx(0.0, 0.0));
    CHECK(soft_threshold(cplx(0.0, 0.0), 0.0) == cplx(0.0, 0.0));
    const cplx v(3.0, 4.0); // |v| = 5
    CHECK(std::abs(soft_threshold(v, 2.0) - v * 0.6) < 1e-15);
    CHECK(soft_threshold(v, 5.0) == cplx(0.0, 0.0));
}

TEST_CASE("identity dictionary reduces to scalar soft thresholds")
{
    CVector y(2);
    y << 3.0, 0.5;
    const auto sol = solve_l1({CMatrix::Identity(2, 2), y, 2.0});
    CHECK(sol.converged);
    CHECK(std::abs(sol.spectrum[0] - cplx(2.0, 0.0)) < 1e-7);
    CHECK(std::abs(sol.spectrum[1]) < 1e-7);
}

TEST_CASE("random M = 4, N = 16 instance agrees with coordinate descent")
{
    const CMatrix D = random_matrix(4, 16, 1);
    const CVector y = random_matrix(4, 1, 2).col(0);
    const double mu = 0.3 * (D.adjoint() * y).cwiseAbs().maxCoeff();
    const auto admm = solve_l1({D, y, mu});
    const auto cd = oracle::coordinate_descent_lasso(D, y, mu);
    CHECK(cd.converged);
    CHECK(std::abs(admm.objective - cd.objective) / cd.objective < 1e-6);
    CHECK((admm.spectrum - cd.solution).norm() < 1e-4 * cd.solution.norm());
}

TEST_CASE("oracle equivalence over 100 random small instances")
{
    std::mt19937_64 pick(99);
    std::uniform_int_distribution<int> Ms(2, 6), Ns(2, 32);
    std::uniform_real_distribution<double> alphas(0.02, 1.5);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i)
    {
        const int M = Ms(pick), N = Ns(pick);
        const CMatrix D = random_matrix(M, N, 500 + i);
        const CVector y = random_matrix(M, 1, 900 + i).col(0);
        const double mu = alphas(pick) * (D.adjoint() * y).cwiseAbs().maxCoeff();
        const auto admm = solve_l1({D, y, mu});
        const auto cd = oracle::coordinate_descent_lasso(D, y, mu);
        worst = std::max(worst, std::abs(admm.objective - cd.objective) / cd.objective);
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("reported objective is recomputed at the returned spectrum")
{
    const CMatrix D = random_matrix(6, 40, 3);
    const CVector y = random_matrix(6, 1, 4).col(0);
    const double mu = 0.1 * (D.adjoint() * y).cwiseAbs().maxCoeff();
    for (int iters : {3, 50, 5000})
    {
        const auto sol = solve_l1({D, y, mu}, {1e-8, iters});
        CHECK(std::abs(sol.objective - lasso_objective(D, y, mu, sol.spectrum)) <= 1e-9 * sol.objective);
    }
}

TEST_CASE("termination: residuals under tol sqrt(N) or the flag is cleared")
{
    const CMatrix D = random_matrix(5, 30, 5);
    const CVector y = random_matrix(5, 1, 6).col(0);
    const double mu = 0.2 * (D.adjoint() * y).cwiseAbs().maxCoeff();
    for (int iters : {1, 10, 5000})
    {
        const SolverOptions opt{1e-8, iters};
        const auto sol = solve_l1({D, y, mu}, opt);
        const double bound = opt.tol * std::sqrt(30.0);
        CHECK(sol.iterations <= iters);
        if (sol.converged)
            CHECK(std::max(sol.primal_residual, sol.dual_residual) <= bound);
        else
        {
            CHECK(sol.iterations == iters);
            CHECK(std::max(sol.primal_residual, sol.dual_residual) > bound);
        }
    }
}

TEST_CASE("zero solution boundary at mu = 2 ||D^H y||_inf")
{
    const CMatrix D = random_matrix(4, 12, 7);
    const CVector y = random_matrix(4, 1, 8).col(0);
    const double c = (D.adjoint() * y).cwiseAbs().maxCoeff();
    const auto at = solve_l1({D, y, 2.0 * c});
    CHECK(at.spectrum.cwiseAbs().maxCoeff() == 0.0);
    CHECK(at.objective == doctest::Approx(y.squaredNorm()));
    const auto above = solve_l1({D, y, 5.0 * c});
    CHECK(above.spectrum.cwiseAbs().maxCoeff() == 0.0);
    const auto below = solve_l1({D, y, 1.9 * c});
    CHECK(below.spectrum.cwiseAbs().maxCoeff() > 0.0);
    // Between ||D^H y||_inf and 2 ||D^H y||_inf the solution is still non-zero.
    const auto mid = solve_l1({D, y, 1.2 * c});
    CHECK(mid.spectrum.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("vanishing penalty on an exact atom concentrates on that atom")
{
    const RsvBasis basis = nominal_basis(ArrayConfig::half_wavelength(8), AngularGrid(16));
    for (int n : {2, 7, 11})
    {
        const CVector y = basis.matrix.col(n);
        const double mu = 1e-6 * (basis.matrix.adjoint() * y).cwiseAbs().maxCoeff();
        const auto sol = solve_l1({basis.matrix, y, mu}, {1e-8, 20000});
        CHECK(oracle::best_single_atom(basis.matrix, y) == n);
        for (int k = 0; k < 16; ++k)
            if (k != n)
                CHECK(std::abs(sol.spectrum[k]) < 1e-3 * std::abs(sol.spectrum[n]));
    }
}

TEST_CASE("scale equivariance of the solution and the argmax")
{
    const RsvBasis basis = calibrated_basis(8, 180, 12);
    const CVector y = basis.matrix.col(50) + cplx(0.4, 0.3) * basis.matrix.col(120);
    const double mu = MuPolicy{}.penalty(basis.matrix, y);
    const LassoSolver solver(basis.matrix);
    const auto ref = solver.solve(y, mu);
    const auto ref_idx = extract_top_j(ref, basis.grid, 2, 1).indices;
    for (double c : {1e-3, 7.0, 1e4})
    {
        const auto sol = solver.solve(c * y, c * mu);
        CHECK((sol.spectrum - c * ref.spectrum).norm() <= 1e-6 * c * ref.spectrum.norm());
        CHECK(extract_top_j(sol, basis.grid, 2, 1).indices == ref_idx);
    }
}

TEST_CASE("penalty policy")
{
    const CMatrix D = random_matrix(3, 9, 13);
    const CVector y = random_matrix(3, 1, 14).col(0);
    CHECK(MuPolicy{0.5}.penalty(D, y) == doctest::Approx(0.5 * (D.adjoint() * y).cwiseAbs().maxCoeff()));
    CHECK_THROWS_AS(MuPolicy{0.0}.penalty(D, y), std::invalid_argument);
}

TEST_CASE("solver input checks")
{
    const CMatrix D = random_matrix(3, 9, 15);
    const CVector y = random_matrix(3, 1, 16).col(0);
    CMatrix bad = D;
    bad(1, 4) = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS(LassoSolver{bad}, std::invalid_argument);
    bad(1, 4) = cplx(0.0, std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(LassoSolver{bad}, std::invalid_argument);
    CHECK_THROWS_AS(LassoSolver{CMatrix(0, 0)}, std::invalid_argument);
    CHECK_THROWS_AS(solve_l1({D, y, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(solve_l1({D, y, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(solve_l1({D, random_matrix(4, 1, 1).col(0), 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(solve_l1({D, y, 1.0}, {0.0, 10}), std::invalid_argument);
}

TEST_CASE("tall dictionaries use the N x N factorization")
{
    const CMatrix D = random_matrix(12, 5, 17);
    const CVector y = random_matrix(12, 1, 18).col(0);
    const double mu = 0.4 * (D.adjoint() * y).cwiseAbs().maxCoeff();
    const auto admm = solve_l1({D, y, mu});
    const auto cd = oracle::coordinate_descent_lasso(D, y, mu);
    CHECK(std::abs(admm.objective - cd.objective) / cd.objective < 1e-8);
}

TEST_CASE("extract_top_j examples")
{
    const AngularGrid grid(900);
    SUBCASE("two isolated nonzeros")
    {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(900);
        s[250] = 0.7;
        s[610] = 2.0;
        const auto est = extract_top_j(s, grid, 2, 5);
        CHECK(est.indices == std::vector<int>{250, 610});
        CHECK(est.angles[0] == grid.angle(250));
        CHECK(est.angles[1] == grid.angle(610));
        CHECK(est.magnitudes == std::vector<double>{0.7, 2.0});
    }
    SUBCASE("all zero spectrum")
    {
        CHECK_THROWS_AS(extract_top_j(Eigen::VectorXd::Zero(900), grid, 1, 5), UnresolvedPeaksError);
    }
    SUBCASE("cluster suppression")
    {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(900);
        s[400] = 1.0;
        s[401] = 0.9;
        s[610] = 0.8;
        CHECK(extract_top_j(s, grid, 2, 5).indices == std::vector<int>{400, 610});
        CHECK(extract_top_j(s, grid, 2, 0).indices == std::vector<int>{400, 401});
    }
    SUBCASE("ties go to the lower index")
    {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(900);
        s[300] = 1.0;
        s[302] = 1.0;
        CHECK(extract_top_j(s, grid, 1, 5).indices == std::vector<int>{300});
    }
    SUBCASE("suppression can leave too few peaks")
    {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(900);
        s[10] = 1.0;
        s[12] = 0.5;
        CHECK_THROWS_AS(extract_top_j(s, grid, 2, 5), UnresolvedPeaksError);
    }
    SUBCASE("argument checks")
    {
        CHECK_THROWS_AS(extract_top_j(Eigen::VectorXd::Ones(10), grid, 1, 1), std::invalid_argument);
        CHECK_THROWS_AS(extract_top_j(Eigen::VectorXd::Ones(900), grid, 0, 1), std::invalid_argument);
    }
    CHECK(default_index_separation(900) == 5);
    CHECK(default_index_separation(180) == 1);
    CHECK(default_index_separation(181) == 2);
}

TEST_CASE("single exact atom is recovered as the top-1 index")
{
    const RsvBasis basis = calibrated_basis(8, 900, 30);
    std::mt19937_64 pick(3);
    std::uniform_int_distribution<int> atom(5, 894);
    for (int t = 0; t < 20; ++t)
    {
        const int n = atom(pick);
        PeakMeasurement pm;
        pm.vector = cplx(1.3, -0.4) * basis.matrix.col(n);
        const auto r = estimate_doa(basis, pm, 1);
        CHECK(r.estimate.indices == std::vector<int>{n});
    }
}

TEST_CASE("noiseless coherent pair at -40 and 20 degrees on a calibrated basis")
{
    ArrayConfig cfg;
    const RsvBasis basis = calibrated_basis(8, 900, 77, &cfg);
    const auto src = SourceSpec::coherent_sources({deg2rad(-40.0), deg2rad(20.0)}, 16);
    const auto X = dft_all_antennas(synthesize_snapshots(cfg, src, 128, INFINITY, 0));
    const std::vector<int> bins{16};
    const auto r = estimate_doa(basis, accumulate_peaks(X, bins), 2);
    CHECK(r.estimate.indices == std::vector<int>{basis.grid.nearest_index(deg2rad(-40.0)),
                                                 basis.grid.nearest_index(deg2rad(20.0))});
    CHECK(r.penalty > 0.0);
}

TEST_CASE("distinct-frequency sources accumulated over both peaks")
{
    ArrayConfig cfg;
    const RsvBasis basis = calibrated_basis(8, 900, 5, &cfg);
    SourceSpec src;
    src.angles = {deg2rad(-25.0), deg2rad(36.0)};
    src.bins = {10, 23};
    src.amplitudes = {cplx(1.0, 0.0), cplx(0.0, 0.8)};
    src.coherent = false;
    const auto X = dft_all_antennas(synthesize_snapshots(cfg, src, 64, INFINITY, 0));
    const auto bins = detect_peaks(X, 2);
    const auto r = estimate_doa(basis, accumulate_peaks(X, bins), 2);
    CHECK(r.estimate.indices == std::vector<int>{basis.grid.nearest_index(src.angles[0]),
                                                 basis.grid.nearest_index(src.angles[1])});
}

TEST_CASE("estimate_doa requires a normalized basis")
{
    RsvBasis raw{CMatrix::Ones(4, 10), AngularGrid(10), false};
    PeakMeasurement pm;
    pm.vector = CVector::Ones(4);
    CHECK_THROWS_AS(estimate_doa(raw, pm, 1), std::invalid_argument);
}
