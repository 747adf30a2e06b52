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

#include "rsvdoa/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace rsvdoa
{
    std::string csv_escape(const std::string &field)
    {
        if (field.find_first_of(",\"\r\n") == std::string::npos)
            return field;
        std::string out = "\"";
        for (char ch : field)
        {
            if (ch == '"')
                out += '"';
            out += ch;
        }
        out += '"';
        return out;
    }

    std::string csv_number(double value)
    {
        if (std::isnan(value))
            return "nan";
        if (std::isinf(value))
            return value > 0 ? "inf" : "-inf";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", value);
        return buf;
    }

    void CsvWriter::row(const std::vector<std::string> &fields)
    {
        for (std::size_t i = 0; i < fields.size(); ++i)
        {
            if (i)
                out_ << ',';
            out_ << csv_escape(fields[i]);
        }
        out_ << "\r\n";
    }
}
