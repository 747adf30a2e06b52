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

#ifndef RSVDOA_MATRIX_IO_HPP
#define RSVDOA_MATRIX_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "rsvdoa/array_model.hpp"
#include "rsvdoa/rsv_calibration.hpp"

namespace rsvdoa
{
    // Binary container for complex matrices, all fields little-endian:
    //
    //   offset  size  field
    //   0       4     magic: "RSVS" (snapshots) or "RSVB" (basis)
    //   4       4     u32 format version (1)
    //   8       4     u32 rows (M)
    //   12      4     u32 cols (L for snapshots, N for a basis)
    //   16      24    basis only: u32 N, u32 normalized flag (0/1),
    //                 f64 first grid angle (rad), f64 grid step (rad)
    //   ...           rows * cols pairs of f64 (real, imag), row-major
    //
    // Doubles are stored as their IEEE-754 bit patterns, so a round trip is
    // bit exact.
    class MatrixFormatError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline constexpr std::uint32_t matrix_format_version = 1;

    void write_snapshots(std::ostream &out, const SnapshotMatrix &snapshots);
    SnapshotMatrix read_snapshots(std::istream &in);

    void write_basis(std::ostream &out, const RsvBasis &basis);
    RsvBasis read_basis(std::istream &in);

    void save_snapshots(const std::filesystem::path &path, const SnapshotMatrix &snapshots);
    SnapshotMatrix load_snapshots(const std::filesystem::path &path);

    void save_basis(const std::filesystem::path &path, const RsvBasis &basis);
    RsvBasis load_basis(const std::filesystem::path &path);
}

#endif
