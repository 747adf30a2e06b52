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

#include <cstring>
#include <filesystem>
#include <limits>
#include <sstream>

#include "rsvdoa/matrix_io.hpp"

using namespace rsvdoa;

namespace
{
    CMatrix awkward_values(int rows, int cols)
    {
        Rng rng(3);
        CMatrix m(rows, cols);
        fill_standard_complex_normal(m, rng);
        if (rows * cols >= 4)
        {
            m(0, 0) = cplx(-0.0, std::numeric_limits<double>::denorm_min());
            m(0, 1) = cplx(std::numeric_limits<double>::max(), -std::numeric_limits<double>::infinity());
            m(rows - 1, cols - 1) = cplx(1e-300, std::numeric_limits<double>::quiet_NaN());
        }
        return m;
    }

    bool same_bits(const CMatrix &a, const CMatrix &b)
    {
        return a.rows() == b.rows() && a.cols() == b.cols() &&
               std::memcmp(a.data(), b.data(), sizeof(cplx) * static_cast<std::size_t>(a.size())) == 0;
    }
}

TEST_CASE("snapshot container layout")
{
    CMatrix m(2, 3);
    m << cplx(1, 2), cplx(3, 4), cplx(5, 6), cplx(7, 8), cplx(9, 10), cplx(11, 12);
    std::ostringstream out;
    write_snapshots(out, SnapshotMatrix{m});
    const std::string bytes = out.str();
    REQUIRE(bytes.size() == 16 + 2 * 3 * 16);
    CHECK(bytes.substr(0, 4) == "RSVS");
    CHECK(bytes.substr(4, 4) == std::string("\x01\x00\x00\x00", 4));
    CHECK(bytes.substr(8, 4) == std::string("\x02\x00\x00\x00", 4));
    CHECK(bytes.substr(12, 4) == std::string("\x03\x00\x00\x00", 4));
    // Row-major: the second stored pair is (3, 4), the first entry of row 0, column 1.
    double re = 0, im = 0;
    std::memcpy(&re, bytes.data() + 16 + 16, 8);
    std::memcpy(&im, bytes.data() + 16 + 24, 8);
    CHECK(re == 3.0);
    CHECK(im == 4.0);
}

TEST_CASE("snapshot round trip is bit exact")
{
    for (auto [r, c] : {std::pair{1, 1}, std::pair{8, 512}, std::pair{3, 7}})
    {
        const CMatrix m = awkward_values(r, c);
        std::stringstream io;
        write_snapshots(io, SnapshotMatrix{m});
        CHECK(same_bits(read_snapshots(io).data, m));
    }
}

TEST_CASE("basis round trip keeps the grid and the flag")
{
    RsvBasis b{awkward_values(8, 90), AngularGrid(90), true};
    std::stringstream io;
    write_basis(io, b);
    const std::string bytes = io.str();
    CHECK(bytes.substr(0, 4) == "RSVB");
    CHECK(bytes.size() == 16 + 24 + 8 * 90 * 16);
    const RsvBasis back = read_basis(io);
    CHECK(same_bits(back.matrix, b.matrix));
    CHECK(back.grid == b.grid);
    CHECK(back.normalized);

    b.normalized = false;
    std::stringstream io2;
    write_basis(io2, b);
    CHECK_FALSE(read_basis(io2).normalized);
}

TEST_CASE("files on disk")
{
    const auto dir = std::filesystem::temp_directory_path() / "rsvdoa_matrix_io_test";
    std::filesystem::create_directories(dir);
    const CMatrix m = awkward_values(4, 16);
    save_snapshots(dir / "x.rsvs", SnapshotMatrix{m});
    CHECK(same_bits(load_snapshots(dir / "x.rsvs").data, m));
    const RsvBasis b{awkward_values(4, 30), AngularGrid(30), true};
    save_basis(dir / "b.rsvb", b);
    CHECK(same_bits(load_basis(dir / "b.rsvb").matrix, b.matrix));
    CHECK_THROWS_AS(load_basis(dir / "x.rsvs"), MatrixFormatError);
    CHECK_THROWS_AS(load_snapshots(dir / "missing.rsvs"), MatrixFormatError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("malformed input is rejected")
{
    std::ostringstream good;
    write_snapshots(good, SnapshotMatrix{awkward_values(2, 2)});
    const std::string bytes = good.str();

    SUBCASE("truncated payload")
    {
        std::istringstream in(bytes.substr(0, bytes.size() - 1));
        CHECK_THROWS_AS(read_snapshots(in), MatrixFormatError);
    }
    SUBCASE("wrong magic")
    {
        std::string b = bytes;
        b[3] = 'X';
        std::istringstream in(b);
        CHECK_THROWS_AS(read_snapshots(in), MatrixFormatError);
    }
    SUBCASE("unknown version")
    {
        std::string b = bytes;
        b[4] = 2;
        std::istringstream in(b);
        CHECK_THROWS_AS(read_snapshots(in), MatrixFormatError);
    }
    SUBCASE("basis grid descriptor disagreeing with the columns")
    {
        RsvBasis basis{CMatrix::Ones(2, 10), AngularGrid(10), true};
        std::ostringstream out;
        write_basis(out, basis);
        std::string b = out.str();
        b[16] = 11; // N
        std::istringstream in(b);
        CHECK_THROWS_AS(read_basis(in), MatrixFormatError);
    }
    SUBCASE("basis with a mismatched grid cannot be written")
    {
        RsvBasis basis{CMatrix::Ones(2, 10), AngularGrid(11), true};
        std::ostringstream out;
        CHECK_THROWS_AS(write_basis(out, basis), MatrixFormatError);
    }
}
