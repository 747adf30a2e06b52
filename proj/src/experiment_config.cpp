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

#include "rsvdoa/experiment_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>

namespace rsvdoa
{
    namespace pt = boost::property_tree;

    // ---- Estimator ids --------------------------------------------------------

    EstimatorId EstimatorId::parse(const std::string &text)
    {
        std::string t = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(text));
        std::string method = t, variant;
        if (const auto colon = t.find(':'); colon != std::string::npos)
        {
            method = t.substr(0, colon);
            variant = t.substr(colon + 1);
        }
        EstimatorId id;
        if (method == "rsv-sr")
            id.method = Method::rsv_sr;
        else if (method == "ml")
            id.method = Method::ml;
        else if (method == "wsf")
            id.method = Method::wsf;
        else if (method == "music")
            id.method = Method::music;
        else
            throw ConfigError("unknown estimator '" + text + "' (expected rsv-sr, ml, wsf or music)");

        if (variant.empty())
            id.variant = id.method == Method::rsv_sr ? SteeringVariant::calibrated : SteeringVariant::nominal;
        else if (variant == "calibrated")
            id.variant = SteeringVariant::calibrated;
        else if (variant == "nominal")
            id.variant = SteeringVariant::nominal;
        else if (variant == "error-free")
            id.variant = SteeringVariant::error_free;
        else
            throw ConfigError("unknown estimator variant '" + variant + "' (expected calibrated, nominal or error-free)");
        return id;
    }

    std::string EstimatorId::str() const
    {
        static const char *methods[] = {"rsv-sr", "ml", "wsf", "music"};
        static const char *variants[] = {"calibrated", "nominal", "error-free"};
        return std::string(methods[static_cast<int>(method)]) + ":" + variants[static_cast<int>(variant)];
    }

    namespace
    {
        std::vector<std::string> split_list(const std::string &text)
        {
            std::vector<std::string> parts, out;
            boost::algorithm::split(parts, text, boost::algorithm::is_any_of(","));
            for (auto &p : parts)
            {
                boost::algorithm::trim(p);
                if (!p.empty())
                    out.push_back(p);
            }
            return out;
        }
    }

    std::vector<EstimatorId> parse_estimator_list(const std::string &text)
    {
        std::vector<EstimatorId> out;
        for (const auto &item : split_list(text))
        {
            const EstimatorId id = EstimatorId::parse(item);
            if (std::find(out.begin(), out.end(), id) == out.end())
                out.push_back(id);
        }
        return out;
    }

    std::string axis_name(Axis axis)
    {
        switch (axis)
        {
        case Axis::snr:
            return "snr";
        case Axis::snapshots:
            return "snapshots";
        default:
            return "fixed";
        }
    }

    // ---- Value formatting / parsing ------------------------------------------

    namespace
    {
        std::string fmt_double(double v)
        {
            if (std::isinf(v))
                return v > 0 ? "inf" : "-inf";
            char buf[32];
            const auto res = std::to_chars(buf, buf + sizeof buf, v); // shortest round-trip form
            return std::string(buf, res.ptr);
        }

        template <typename T>
        std::string fmt_list(const std::vector<T> &values)
        {
            std::string out;
            for (std::size_t i = 0; i < values.size(); ++i)
            {
                if (i)
                    out += ",";
                if constexpr (std::is_floating_point_v<T>)
                    out += fmt_double(values[i]);
                else
                    out += std::to_string(values[i]);
            }
            return out;
        }

        std::string fmt_bool(bool v) { return v ? "true" : "false"; }

        struct Reader
        {
            const pt::ptree &tree;

            std::string raw(const std::string &key) const
            {
                return boost::algorithm::trim_copy(tree.get<std::string>(key));
            }

            [[noreturn]] void bad(const std::string &key, const std::string &what) const
            {
                throw ConfigError("config key '" + key + "': " + what + " (got '" + raw(key) + "')");
            }

            double real(const std::string &key) const
            {
                const std::string s = raw(key);
                try
                {
                    std::size_t used = 0;
                    const double v = std::stod(s, &used);
                    if (used == s.size())
                        return v;
                }
                catch (const std::exception &)
                {
                }
                bad(key, "expected a number");
            }

            long long integer(const std::string &key) const
            {
                const std::string s = raw(key);
                try
                {
                    std::size_t used = 0;
                    const long long v = std::stoll(s, &used);
                    if (used == s.size())
                        return v;
                }
                catch (const std::exception &)
                {
                }
                bad(key, "expected an integer");
            }

            int int32(const std::string &key) const
            {
                const long long v = integer(key);
                if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
                    bad(key, "integer out of range");
                return static_cast<int>(v);
            }

            std::uint64_t u64(const std::string &key) const
            {
                const std::string s = raw(key);
                try
                {
                    std::size_t used = 0;
                    if (!s.empty() && s[0] != '-')
                    {
                        const unsigned long long v = std::stoull(s, &used);
                        if (used == s.size())
                            return v;
                    }
                }
                catch (const std::exception &)
                {
                }
                bad(key, "expected an unsigned 64-bit integer");
            }

            bool boolean(const std::string &key) const
            {
                const std::string s = boost::algorithm::to_lower_copy(raw(key));
                if (s == "true" || s == "yes" || s == "on" || s == "1")
                    return true;
                if (s == "false" || s == "no" || s == "off" || s == "0")
                    return false;
                bad(key, "expected true or false");
            }

            std::vector<double> reals(const std::string &key) const
            {
                std::vector<double> out;
                for (const auto &item : split_list(raw(key)))
                {
                    try
                    {
                        std::size_t used = 0;
                        const double v = std::stod(item, &used);
                        if (used != item.size())
                            bad(key, "expected a comma separated list of numbers");
                        out.push_back(v);
                    }
                    catch (const std::logic_error &)
                    {
                        bad(key, "expected a comma separated list of numbers");
                    }
                }
                return out;
            }

            std::vector<int> ints(const std::string &key) const
            {
                std::vector<int> out;
                for (const auto &item : split_list(raw(key)))
                {
                    try
                    {
                        std::size_t used = 0;
                        const int v = std::stoi(item, &used);
                        if (used != item.size())
                            bad(key, "expected a comma separated list of integers");
                        out.push_back(v);
                    }
                    catch (const std::logic_error &)
                    {
                        bad(key, "expected a comma separated list of integers");
                    }
                }
                return out;
            }
        };

        Axis parse_axis(const std::string &text)
        {
            const std::string t = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(text));
            if (t == "fixed")
                return Axis::fixed;
            if (t == "snr")
                return Axis::snr;
            if (t == "snapshots")
                return Axis::snapshots;
            throw ConfigError("config key 'experiment.axis': expected fixed, snr or snapshots (got '" + text + "')");
        }

        std::string estimator_list_str(const std::vector<EstimatorId> &ids)
        {
            std::string out;
            for (std::size_t i = 0; i < ids.size(); ++i)
                out += (i ? "," : "") + ids[i].str();
            return out;
        }
    }

    pt::ptree config_to_tree(const ExperimentConfig &c)
    {
        pt::ptree t;
        t.put("array.antennas", c.num_antennas);
        t.put("array.spacing", fmt_double(c.spacing));
        t.put("array.wavelength", fmt_double(c.wavelength));

        t.put("errors.gain_mean", fmt_double(c.errors.gain_mean));
        t.put("errors.gain_std", fmt_double(c.errors.gain_std));
        t.put("errors.phase_std_deg", fmt_double(c.errors.phase_std_deg));
        t.put("errors.fixed", fmt_bool(c.fixed_errors));

        t.put("grid.size", c.grid_size);

        t.put("sources.angles_deg", fmt_list(c.angles_deg));
        t.put("sources.bins", fmt_list(c.bins));
        t.put("sources.amplitudes", fmt_list(c.amplitudes));
        t.put("sources.coherent", fmt_bool(c.coherent));
        t.put("sources.detect_bins", fmt_bool(c.detect_bins));
        t.put("sources.bin_separation", c.bin_separation);

        t.put("sweep.aux_bin", c.sweep.aux_bin);
        t.put("sweep.snapshots", c.sweep.snapshots);
        t.put("sweep.snr_db", fmt_double(c.sweep.snr_db));
        t.put("sweep.repeats", c.sweep.repeats);
        t.put("sweep.cache_dir", c.basis_cache);

        t.put("solver.alpha", fmt_double(c.alpha));
        t.put("solver.tol", fmt_double(c.solver.tol));
        t.put("solver.max_iters", c.solver.max_iters);
        t.put("solver.index_separation", c.index_separation);

        t.put("search.coarse_step_deg", fmt_double(c.search.coarse_step_deg));
        t.put("search.refine_step_deg", fmt_double(c.search.refine_step_deg));
        t.put("search.condition_limit", fmt_double(c.search.condition_limit));

        t.put("experiment.axis", axis_name(c.axis));
        t.put("experiment.snr_db", fmt_double(c.snr_db));
        t.put("experiment.snapshots", c.snapshots);
        t.put("experiment.snr_list", fmt_list(c.snr_list));
        t.put("experiment.snapshot_list", fmt_list(c.snapshot_list));
        t.put("experiment.trials", c.trials);
        t.put("experiment.seed", std::to_string(c.base_seed));
        t.put("experiment.workers", c.workers);
        t.put("experiment.estimators", estimator_list_str(c.estimators));
        t.put("experiment.resolution_deg", fmt_double(c.resolution_deg));
        t.put("experiment.timing", fmt_bool(c.timing));
        return t;
    }

    ExperimentConfig config_from_tree(const pt::ptree &tree, const ExperimentConfig &defaults)
    {
        // Overlay the given tree on the defaults, rejecting unknown keys.
        pt::ptree merged = config_to_tree(defaults);
        for (const auto &[section, keys] : tree)
        {
            const auto known = merged.get_child_optional(section);
            if (!known || known->empty())
                throw ConfigError("unknown config section [" + section + "]");
            if (!keys.data().empty() && keys.empty())
                throw ConfigError("config entry '" + section + "' must live inside a section");
            for (const auto &[key, value] : keys)
            {
                if (!known->get_child_optional(pt::ptree::path_type(key, '\0')))
                    throw ConfigError("unknown config key '" + section + "." + key + "'");
                merged.put(pt::ptree::path_type(section + "\x1f" + key, '\x1f'), value.data());
            }
        }

        const Reader r{merged};
        ExperimentConfig c;
        c.num_antennas = r.int32("array.antennas");
        c.spacing = r.real("array.spacing");
        c.wavelength = r.real("array.wavelength");

        c.errors.gain_mean = r.real("errors.gain_mean");
        c.errors.gain_std = r.real("errors.gain_std");
        c.errors.phase_std_deg = r.real("errors.phase_std_deg");
        c.fixed_errors = r.boolean("errors.fixed");

        c.grid_size = r.int32("grid.size");

        c.angles_deg = r.reals("sources.angles_deg");
        c.bins = r.ints("sources.bins");
        c.amplitudes = r.reals("sources.amplitudes");
        c.coherent = r.boolean("sources.coherent");
        c.detect_bins = r.boolean("sources.detect_bins");
        c.bin_separation = r.int32("sources.bin_separation");

        c.sweep.aux_bin = r.int32("sweep.aux_bin");
        c.sweep.snapshots = r.int32("sweep.snapshots");
        c.sweep.snr_db = r.real("sweep.snr_db");
        c.sweep.repeats = r.int32("sweep.repeats");
        c.basis_cache = r.raw("sweep.cache_dir");

        c.alpha = r.real("solver.alpha");
        c.solver.tol = r.real("solver.tol");
        c.solver.max_iters = r.int32("solver.max_iters");
        c.index_separation = r.int32("solver.index_separation");

        c.search.coarse_step_deg = r.real("search.coarse_step_deg");
        c.search.refine_step_deg = r.real("search.refine_step_deg");
        c.search.condition_limit = r.real("search.condition_limit");

        c.axis = parse_axis(r.raw("experiment.axis"));
        c.snr_db = r.real("experiment.snr_db");
        c.snapshots = r.int32("experiment.snapshots");
        c.snr_list = r.reals("experiment.snr_list");
        c.snapshot_list = r.ints("experiment.snapshot_list");
        c.trials = r.int32("experiment.trials");
        c.base_seed = r.u64("experiment.seed");
        c.workers = r.int32("experiment.workers");
        c.estimators = parse_estimator_list(r.raw("experiment.estimators"));
        c.resolution_deg = r.real("experiment.resolution_deg");
        c.timing = r.boolean("experiment.timing");
        return c;
    }

    ExperimentConfig load_config(const std::filesystem::path &path, const ExperimentConfig &defaults)
    {
        pt::ptree tree;
        try
        {
            pt::read_ini(path.string(), tree);
        }
        catch (const pt::ini_parser_error &e)
        {
            throw ConfigError("cannot read config " + path.string() + ": " + e.message() + " (line " +
                              std::to_string(e.line()) + ")");
        }
        return config_from_tree(tree, defaults);
    }

    void apply_override(pt::ptree &tree, const std::string &assignment)
    {
        const auto eq = assignment.find('=');
        const auto dot = assignment.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq || dot == 0 || dot + 1 == eq)
            throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
        const std::string section = boost::algorithm::trim_copy(assignment.substr(0, dot));
        const std::string key = boost::algorithm::trim_copy(assignment.substr(dot + 1, eq - dot - 1));
        const std::string value = boost::algorithm::trim_copy(assignment.substr(eq + 1));
        tree.put(pt::ptree::path_type(section + "\x1f" + key, '\x1f'), value);
    }

    std::string format_config(const ExperimentConfig &config)
    {
        std::ostringstream out;
        pt::write_ini(out, config_to_tree(config));
        return out.str();
    }

    ExperimentConfig preset_config(Preset preset)
    {
        ExperimentConfig c;
        const std::vector<double> snr_sweep{-12.0, -8.0, -4.0, 0.0, 4.0, 8.0, 12.0, 16.0, 20.0};
        const auto benchmarks = parse_estimator_list("rsv-sr,ml:nominal,wsf:nominal,ml:error-free,wsf:error-free");
        switch (preset)
        {
        case Preset::spectrum:
            c.angles_deg = {-40.0, 20.0};
            c.axis = Axis::fixed;
            c.snr_db = 20.0;
            c.snapshots = 128;
            c.trials = 1;
            c.estimators = parse_estimator_list("rsv-sr,ml,wsf");
            break;
        case Preset::rmse_vs_snr:
            c.angles_deg = {-10.0, 32.0};
            c.axis = Axis::snr;
            c.snr_list = snr_sweep;
            c.snapshots = 512;
            c.estimators = benchmarks;
            break;
        case Preset::rmse_vs_snapshots:
            c.angles_deg = {-10.0, 32.0};
            c.axis = Axis::snapshots;
            c.snr_db = 10.0;
            c.snapshot_list = {64, 128, 256, 512};
            c.estimators = benchmarks;
            break;
        case Preset::resolution_vs_snr:
            c.angles_deg = {15.0, 20.0};
            c.axis = Axis::snr;
            c.snr_list = {-12.0, -8.0, -4.0, 0.0, 4.0, 8.0, 12.0};
            c.snapshots = 512;
            c.resolution_deg = 5.0;
            c.estimators = parse_estimator_list("rsv-sr,ml,wsf");
            break;
        }
        return c;
    }

    // ---- Validation ----------------------------------------------------------

    void ExperimentConfig::validate() const
    {
        auto fail = [](const std::string &msg) { throw ConfigError(msg); };
        if (num_antennas < 2)
            fail("array.antennas must be >= 2");
        if (!(spacing > 0.0) || !(wavelength > 0.0))
            fail("array.spacing and array.wavelength must be positive");
        if (!(errors.gain_std >= 0.0) || !(errors.phase_std_deg >= 0.0) || !(errors.gain_mean > 0.0))
            fail("errors: gain_mean must be positive and the standard deviations non-negative");
        if (grid_size < 1)
            fail("grid.size must be positive");

        const int J = static_cast<int>(angles_deg.size());
        if (J < 1 || J >= num_antennas)
            fail("sources.angles_deg must list between 1 and antennas - 1 angles");
        for (double a : angles_deg)
            if (!(std::abs(a) < 90.0))
                fail("sources.angles_deg: every angle must lie strictly inside (-90, 90)");
        if (coherent ? bins.size() != 1 && static_cast<int>(bins.size()) != J : static_cast<int>(bins.size()) != J)
            fail(coherent ? "sources.bins: coherent sources need one shared bin"
                          : "sources.bins: need one bin per source");
        if (coherent && std::adjacent_find(bins.begin(), bins.end(), std::not_equal_to<>()) != bins.end())
            fail("sources.bins: coherent sources must share one bin");
        if (!coherent && std::set<int>(bins.begin(), bins.end()).size() != bins.size())
            fail("sources.bins: non-coherent sources need distinct bins");
        if (!amplitudes.empty() && static_cast<int>(amplitudes.size()) != J)
            fail("sources.amplitudes: need one amplitude per source or none");
        if (bin_separation < 1)
            fail("sources.bin_separation must be >= 1");

        if (sweep.snapshots < 1 || sweep.aux_bin < 1 || sweep.aux_bin > sweep.snapshots)
            fail("sweep: need snapshots >= 1 and 1 <= aux_bin <= snapshots");
        if (sweep.repeats < 1)
            fail("sweep.repeats must be >= 1");

        if (!(alpha > 0.0))
            fail("solver.alpha must be positive");
        if (!(solver.tol > 0.0) || solver.max_iters < 1)
            fail("solver: tol must be positive and max_iters >= 1");
        if (index_separation < -1)
            fail("solver.index_separation must be -1 (default) or >= 0");

        if (!(search.coarse_step_deg > 0.0) || !(search.refine_step_deg > 0.0) || !(search.condition_limit > 1.0))
            fail("search: steps must be positive and condition_limit > 1");

        if (trials < 1)
            fail("experiment.trials must be >= 1");
        if (workers < 1)
            fail("experiment.workers must be >= 1");
        if (estimators.empty())
            fail("experiment.estimators must name at least one estimator");
        if (resolution_deg < 0.0)
            fail("experiment.resolution_deg must be non-negative");
        for (const auto &id : estimators)
            if (id.method != Method::rsv_sr && id.method != Method::music && J > 2)
                fail("experiment.estimators: " + id.str() + " supports at most two sources");

        std::vector<int> lengths;
        switch (axis)
        {
        case Axis::snr:
            if (snr_list.empty())
                fail("experiment.snr_list must not be empty for axis = snr");
            lengths = {snapshots};
            break;
        case Axis::snapshots:
            if (snapshot_list.empty())
                fail("experiment.snapshot_list must not be empty for axis = snapshots");
            lengths = snapshot_list;
            break;
        case Axis::fixed:
            lengths = {snapshots};
            break;
        }
        const int max_bin = *std::max_element(bins.begin(), bins.end());
        for (int L : lengths)
        {
            if (L < 1)
                fail("experiment: snapshot counts must be >= 1");
            if (max_bin > L || *std::min_element(bins.begin(), bins.end()) < 1)
                fail("sources.bins: bin " + std::to_string(max_bin) + " lies outside [1, " + std::to_string(L) + "]");
        }
    }

    std::vector<std::string> ExperimentConfig::warnings() const
    {
        std::vector<std::string> out;
        std::vector<int> lengths = axis == Axis::snapshots ? snapshot_list : std::vector<int>{snapshots};
        lengths.push_back(sweep.snapshots);
        for (int L : lengths)
            if (L > 0 && (L & (L - 1)) != 0)
                out.push_back("snapshot count " + std::to_string(L) + " is not a power of two");
        if (grid_size < num_antennas)
            out.push_back("grid.size is smaller than the number of antennas");
        return out;
    }

    ArrayConfig ExperimentConfig::array() const
    {
        ArrayConfig a;
        a.num_antennas = num_antennas;
        a.wavelength = wavelength;
        a.spacing = spacing * wavelength;
        a.errors = ErrorModel::identity(num_antennas);
        return a;
    }

    SourceSpec ExperimentConfig::sources() const
    {
        SourceSpec s;
        const int J = static_cast<int>(angles_deg.size());
        for (int j = 0; j < J; ++j)
        {
            s.angles.push_back(deg2rad(angles_deg[j]));
            s.bins.push_back(bins.size() == 1 ? bins[0] : bins[j]);
            s.amplitudes.push_back(amplitudes.empty() ? cplx(1.0, 0.0) : cplx(amplitudes[j], 0.0));
        }
        s.coherent = coherent;
        return s;
    }

    std::vector<double> ExperimentConfig::axis_values() const
    {
        switch (axis)
        {
        case Axis::snr:
            return snr_list;
        case Axis::snapshots:
            return {snapshot_list.begin(), snapshot_list.end()};
        default:
            return {snr_db};
        }
    }

    double ExperimentConfig::resolution_threshold_deg() const
    {
        if (resolution_deg > 0.0)
            return resolution_deg;
        if (angles_deg.size() < 2)
            return 1.0;
        std::vector<double> a = angles_deg;
        std::sort(a.begin(), a.end());
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < a.size(); ++i)
            gap = std::min(gap, a[i] - a[i - 1]);
        return gap;
    }
}
