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

#include "rsvdoa/matrix_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace rsvdoa
{
    namespace
    {
        constexpr std::array<char, 4> snapshot_magic{'R', 'S', 'V', 'S'};
        constexpr std::array<char, 4> basis_magic{'R', 'S', 'V', 'B'};

        template <typename U>
        void put_le(std::ostream &out, U value)
        {
            std::array<char, sizeof(U)> bytes;
            for (std::size_t i = 0; i < sizeof(U); ++i)
                bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
            out.write(bytes.data(), bytes.size());
        }

        template <typename U>
        U get_le(std::istream &in)
        {
            std::array<unsigned char, sizeof(U)> bytes;
            if (!in.read(reinterpret_cast<char *>(bytes.data()), bytes.size()))
                throw MatrixFormatError("matrix file truncated");
            U value = 0;
            for (std::size_t i = 0; i < sizeof(U); ++i)
                value |= static_cast<U>(bytes[i]) << (8 * i);
            return value;
        }

        void put_f64(std::ostream &out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
        double get_f64(std::istream &in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

        std::uint32_t checked_dim(Eigen::Index n, const char *what)
        {
            if (n < 0 || static_cast<std::uint64_t>(n) > std::numeric_limits<std::uint32_t>::max())
                throw MatrixFormatError(std::string("matrix too large to store: ") + what);
            return static_cast<std::uint32_t>(n);
        }

        void write_header(std::ostream &out, const std::array<char, 4> &magic, const CMatrix &m)
        {
            out.write(magic.data(), magic.size());
            put_le(out, matrix_format_version);
            put_le(out, checked_dim(m.rows(), "rows"));
            put_le(out, checked_dim(m.cols(), "cols"));
        }

        void write_payload(std::ostream &out, const CMatrix &m)
        {
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                for (Eigen::Index c = 0; c < m.cols(); ++c)
                {
                    put_f64(out, m(r, c).real());
                    put_f64(out, m(r, c).imag());
                }
            if (!out)
                throw MatrixFormatError("matrix write failed");
        }

        // Reads magic and version, returns (rows, cols).
        std::pair<std::uint32_t, std::uint32_t> read_header(std::istream &in, const std::array<char, 4> &magic)
        {
            std::array<char, 4> got{};
            if (!in.read(got.data(), got.size()))
                throw MatrixFormatError("matrix file truncated");
            if (got != magic)
                throw MatrixFormatError("bad magic: expected " + std::string(magic.data(), 4));
            const auto version = get_le<std::uint32_t>(in);
            if (version != matrix_format_version)
                throw MatrixFormatError("unsupported matrix format version " + std::to_string(version));
            const auto rows = get_le<std::uint32_t>(in);
            const auto cols = get_le<std::uint32_t>(in);
            return {rows, cols};
        }

        CMatrix read_payload(std::istream &in, std::uint32_t rows, std::uint32_t cols)
        {
            CMatrix m(rows, cols);
            for (std::uint32_t r = 0; r < rows; ++r)
                for (std::uint32_t c = 0; c < cols; ++c)
                {
                    const double re = get_f64(in);
                    const double im = get_f64(in);
                    m(r, c) = cplx(re, im);
                }
            return m;
        }

        template <typename F>
        void with_output(const std::filesystem::path &path, F &&f)
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
                throw MatrixFormatError("cannot open " + path.string() + " for writing");
            f(out);
            out.flush();
            if (!out)
                throw MatrixFormatError("write to " + path.string() + " failed");
        }

        std::ifstream open_input(const std::filesystem::path &path)
        {
            std::ifstream in(path, std::ios::binary);
            if (!in)
                throw MatrixFormatError("cannot open " + path.string());
            return in;
        }
    }

    void write_snapshots(std::ostream &out, const SnapshotMatrix &snapshots)
    {
        write_header(out, snapshot_magic, snapshots.data);
        write_payload(out, snapshots.data);
    }

    SnapshotMatrix read_snapshots(std::istream &in)
    {
        const auto [rows, cols] = read_header(in, snapshot_magic);
        return SnapshotMatrix{read_payload(in, rows, cols)};
    }

    void write_basis(std::ostream &out, const RsvBasis &basis)
    {
        if (basis.matrix.cols() != basis.grid.size())
            throw MatrixFormatError("basis column count differs from its grid size");
        write_header(out, basis_magic, basis.matrix);
        put_le(out, static_cast<std::uint32_t>(basis.grid.size()));
        put_le(out, static_cast<std::uint32_t>(basis.normalized ? 1 : 0));
        put_f64(out, basis.grid.angle(0));
        put_f64(out, basis.grid.step());
        write_payload(out, basis.matrix);
    }

    RsvBasis read_basis(std::istream &in)
    {
        const auto [rows, cols] = read_header(in, basis_magic);
        const auto n = get_le<std::uint32_t>(in);
        const auto flag = get_le<std::uint32_t>(in);
        const double first = get_f64(in);
        const double step = get_f64(in);
        if (n != cols || n == 0 || n > static_cast<std::uint32_t>(std::numeric_limits<int>::max()))
            throw MatrixFormatError("grid descriptor disagrees with the column count");
        if (flag > 1)
            throw MatrixFormatError("bad normalized flag");
        const AngularGrid grid(static_cast<int>(n));
        if (std::abs(first - grid.angle(0)) > 1e-12 || std::abs(step - grid.step()) > 1e-12)
            throw MatrixFormatError("grid descriptor does not describe a uniform (-pi/2, pi/2] grid");
        return RsvBasis{read_payload(in, rows, cols), grid, flag == 1};
    }

    void save_snapshots(const std::filesystem::path &path, const SnapshotMatrix &snapshots)
    {
        with_output(path, [&](std::ostream &out) { write_snapshots(out, snapshots); });
    }

    SnapshotMatrix load_snapshots(const std::filesystem::path &path)
    {
        auto in = open_input(path);
        return read_snapshots(in);
    }

    void save_basis(const std::filesystem::path &path, const RsvBasis &basis)
    {
        with_output(path, [&](std::ostream &out) { write_basis(out, basis); });
    }

    RsvBasis load_basis(const std::filesystem::path &path)
    {
        auto in = open_input(path);
        return read_basis(in);
    }
}
