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

#include "rsvdoa/rsv_calibration.hpp"
#include "support/oracles.hpp"

using namespace rsvdoa;

namespace
{
    SweepOptions noiseless(int L0 = 64, int aux_bin = 5)
    {
        SweepOptions o;
        o.snapshots = L0;
        o.aux_bin = aux_bin;
        o.snr_db = INFINITY;
        return o;
    }

    bool bit_equal(const CMatrix &a, const CMatrix &b)
    {
        return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
    }
}

TEST_CASE("angular grid layout")
{
    const AngularGrid g(900);
    CHECK(g.angle(0) == doctest::Approx(-pi / 2 + pi / 900));
    CHECK(g.angle(899) == doctest::Approx(pi / 2));
    CHECK(g.angle_deg(449) == doctest::Approx(0.0));
    for (int i = 1; i < 900; ++i)
        CHECK(g.angle(i) - g.angle(i - 1) == doctest::Approx(pi / 900).epsilon(1e-12));
    CHECK(g.nearest_index(0.0) == 449);
    CHECK(g.nearest_index(deg2rad(20.0)) == 549);
    CHECK(g.nearest_index(deg2rad(20.09)) == 549);
    CHECK(g.nearest_index(deg2rad(20.11)) == 550);
    CHECK(g.nearest_index(-10.0) == 0);
    CHECK(g.nearest_index(10.0) == 899);
    CHECK_THROWS_AS(AngularGrid(0), std::invalid_argument);
    CHECK_THROWS_AS(g.angle(900), std::out_of_range);
}

TEST_CASE("noiseless sweep columns equal L0 b(theta) amplitude")
{
    const auto cfg = ArrayConfig::half_wavelength(6).with_errors(draw_error_model(6, {}, 8));
    const AngularGrid grid(36);
    SweepOptions opt = noiseless(64, 9);
    opt.amplitude = cplx(0.3, -2.0);
    const auto raw = sweep_and_build(cfg, grid, opt, 1);
    CHECK_FALSE(raw.normalized);
    for (int i = 0; i < grid.size(); ++i)
    {
        const CVector b = test::manual_response(6, 0.5, grid.angle(i), cfg.errors.gains, cfg.errors.phases);
        CHECK(test::max_abs(raw.matrix.col(i) - 64.0 * opt.amplitude * b) < 1e-9);
    }
}

TEST_CASE("identity errors: normalized noiseless sweep equals the nominal basis")
{
    const auto cfg = ArrayConfig::half_wavelength(8);
    const AngularGrid grid(90);
    const auto swept = normalize(sweep_and_build(cfg, grid, noiseless(), 3));
    const auto nominal = nominal_basis(cfg, grid);
    CHECK(test::max_abs(swept.matrix - nominal.matrix) < 1e-12);
    for (int i = 0; i < 89; ++i) // endfire column excluded: steering_vector rejects it
        CHECK(test::max_abs(nominal.matrix.col(i) - steering_vector(cfg, grid.angle(i))) < 1e-15);
}

TEST_CASE("noiseless fidelity to Gamma a(theta) for random errors")
{
    const AngularGrid grid(180);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s)
    {
        const auto cfg = ArrayConfig::half_wavelength(8).with_errors(draw_error_model(8, {}, s));
        const auto basis = normalize(sweep_and_build(cfg, grid, noiseless(512, 16), s));
        for (int i = 0; i < grid.size(); ++i)
            worst = std::max(worst, test::max_abs(basis.matrix.col(i) -
                                                  detail::array_response(cfg, grid.angle(i), true)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("normalization: reference row, idempotence and scale invariance")
{
    const auto cfg = ArrayConfig::half_wavelength(8).with_errors(draw_error_model(8, {}, 21));
    const AngularGrid grid(60);
    SweepOptions opt;
    opt.snapshots = 128;
    opt.snr_db = 10.0;
    const auto raw = sweep_and_build(cfg, grid, opt, 4);
    const auto once = normalize(raw);
    CHECK(once.normalized);
    CHECK((once.matrix.row(0).array() == cplx(1.0, 0.0)).all());
    CHECK(bit_equal(normalize(once).matrix, once.matrix));

    for (cplx c : {cplx(3.0, 0.0), cplx(0.0, -1e-3), cplx(-7.5, 2.25)})
    {
        RsvBasis scaled = raw;
        scaled.matrix *= c;
        CHECK(test::max_abs(normalize(scaled).matrix - once.matrix) < 1e-12);
    }
}

TEST_CASE("normalization names the corrupted grid angle")
{
    RsvBasis b{CMatrix::Ones(3, 4), AngularGrid(4), false};
    b.matrix(0, 2) = 0.0;
    try
    {
        normalize(b);
        FAIL("expected an exception");
    }
    catch (const std::runtime_error &e)
    {
        CHECK(std::string(e.what()).find("column 2") != std::string::npos);
        CHECK(std::string(e.what()).find("45") != std::string::npos);
    }
}

TEST_CASE("sweep is deterministic in the seed and independent of the worker count")
{
    const auto cfg = ArrayConfig::half_wavelength(8).with_errors(draw_error_model(8, {}, 2));
    const AngularGrid grid(120);
    SweepOptions opt;
    opt.snapshots = 128;
    opt.snr_db = 5.0;
    opt.repeats = 2;
    const auto a = sweep_and_build(cfg, grid, opt, 10);
    const auto b = sweep_and_build(cfg, grid, opt, 10);
    opt.workers = 3;
    const auto c = sweep_and_build(cfg, grid, opt, 10);
    const auto d = sweep_and_build(cfg, grid, opt, 11);
    CHECK(bit_equal(a.matrix, b.matrix));
    CHECK(bit_equal(a.matrix, c.matrix));
    CHECK_FALSE(bit_equal(a.matrix, d.matrix));
}

TEST_CASE("noisy sweep at 20 dB, L0 = 512: per-column relative error below 5%")
{
    const AngularGrid grid(180);
    SweepOptions opt;
    opt.snapshots = 512;
    opt.snr_db = 20.0;
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s)
    {
        const auto cfg = ArrayConfig::half_wavelength(8).with_errors(draw_error_model(8, {}, 100 + s));
        const auto basis = normalize(sweep_and_build(cfg, grid, opt, s));
        for (int i = 0; i < grid.size(); ++i)
        {
            const CVector truth = detail::array_response(cfg, grid.angle(i), true);
            worst = std::max(worst, (basis.matrix.col(i) - truth).norm() / truth.norm());
        }
    }
    CHECK(worst < 0.05);
}

TEST_CASE("repeat averaging reduces sweep error")
{
    const auto cfg = ArrayConfig::half_wavelength(8).with_errors(draw_error_model(8, {}, 1));
    const AngularGrid grid(90);
    SweepOptions opt;
    opt.snapshots = 64;
    opt.snr_db = -5.0;
    auto error = [&](int repeats)
    {
        opt.repeats = repeats;
        const auto basis = normalize(sweep_and_build(cfg, grid, opt, 9));
        double e = 0.0;
        for (int i = 0; i < grid.size(); ++i)
            e += (basis.matrix.col(i) - detail::array_response(cfg, grid.angle(i), true)).squaredNorm();
        return e;
    };
    CHECK(error(16) < 0.5 * error(1));
}

TEST_CASE("sweep argument checks")
{
    const auto cfg = ArrayConfig::half_wavelength(4);
    SweepOptions opt = noiseless(32, 33);
    CHECK_THROWS_AS(sweep_and_build(cfg, AngularGrid(10), opt, 0), std::invalid_argument);
    opt.aux_bin = 0;
    CHECK_THROWS_AS(sweep_and_build(cfg, AngularGrid(10), opt, 0), std::invalid_argument);
    opt.aux_bin = 4;
    opt.repeats = 0;
    CHECK_THROWS_AS(sweep_and_build(cfg, AngularGrid(10), opt, 0), std::invalid_argument);
    opt.repeats = 1;
    // N < M only warns.
    CHECK(sweep_and_build(cfg, AngularGrid(3), opt, 0).matrix.cols() == 3);
}

TEST_CASE("nominal basis for the standard grid")
{
    const auto b = nominal_basis(ArrayConfig::half_wavelength(8), AngularGrid(900));
    CHECK(b.normalized);
    CHECK(b.matrix.rows() == 8);
    CHECK(b.matrix.cols() == 900);
    CHECK((b.matrix.row(0).array() == cplx(1.0, 0.0)).all());
    CHECK((b.matrix.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
}
