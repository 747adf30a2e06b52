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

#ifndef RSVDOA_CSV_HPP
#define RSVDOA_CSV_HPP

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace rsvdoa
{
    // RFC 4180 output: CRLF record separators, fields quoted only when they
    // contain a comma, a double quote, CR or LF (embedded quotes doubled).
    std::string csv_escape(const std::string &field);

    // Floats use 9 significant digits ("%.9g"); non-finite values print as
    // nan, inf, -inf.
    std::string csv_number(double value);

    class CsvWriter
    {
    public:
        explicit CsvWriter(std::ostream &out) : out_(out) {}

        void row(const std::vector<std::string> &fields);
        void row(std::initializer_list<std::string> fields) { row(std::vector<std::string>(fields)); }

    private:
        std::ostream &out_;
    };
}

#endif
