// Copyright 2026 The mgte Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mgte/sampling.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "mgte/errors.hpp"

namespace mgte::dataio {

namespace {

std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform integer in [0, bound). std::uniform_int_distribution is not
// specified bit-for-bit across standard libraries; this is.
std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
    const std::uint64_t reject_below = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = gen();
        if (r >= reject_below) return r % bound;
    }
}

std::string_view axis_value(const SampleMeta& m, SubsampleAxis axis) {
    switch (axis) {
        case SubsampleAxis::Generator: return m.generator;
        case SubsampleAxis::Domain: return m.domain;
        case SubsampleAxis::Attack: return m.attack;
        case SubsampleAxis::Decoding: return m.decoding;
    }
    return {};
}

std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

}  // namespace

std::string_view to_string(SubsampleAxis axis) noexcept {
    switch (axis) {
        case SubsampleAxis::Generator: return "generator";
        case SubsampleAxis::Domain: return "domain";
        case SubsampleAxis::Attack: return "attack";
        case SubsampleAxis::Decoding: return "decoding";
    }
    return "unknown";
}

std::vector<SubsampleAxis> parse_subsample_axes(std::string_view text) {
    std::vector<SubsampleAxis> axes;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        std::string name(text.substr(start, comma - start));
        for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (name == "generator" || name == "model") {
            axes.push_back(SubsampleAxis::Generator);
        } else if (name == "domain") {
            axes.push_back(SubsampleAxis::Domain);
        } else if (name == "attack") {
            axes.push_back(SubsampleAxis::Attack);
        } else if (name == "decoding") {
            axes.push_back(SubsampleAxis::Decoding);
        } else {
            throw ConfigError("unknown subsample axis '" + name + "'");
        }
        start = comma + 1;
    }
    return axes;
}

void SubsampleSpec::validate() const {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ConfigError("subsample fraction must lie in (0, 1], got " + format_real(fraction));
    }
    if (axes.empty()) throw ConfigError("subsample needs at least one stratum axis");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        for (std::size_t j = i + 1; j < axes.size(); ++j) {
            if (axes[i] == axes[j]) throw ConfigError("subsample axis '" + std::string(to_string(axes[i])) + "' repeated");
        }
    }
}

std::uint64_t stratum_seed(std::uint64_t seed, std::string_view stratum) noexcept {
    return splitmix64(seed ^ splitmix64(fnv1a64(stratum)));
}

SubsampleResult subsample(const MetaMap& meta, const SubsampleSpec& spec) {
    spec.validate();
    if (meta.empty()) throw EmptyInputError("cannot subsample an empty dataset");

    // MetaMap iterates in id order, so each stratum's list comes out sorted.
    std::map<std::string, std::vector<std::string_view>> strata;
    std::string key;
    for (const auto& [id, m] : meta) {
        key.clear();
        for (std::size_t a = 0; a < spec.axes.size(); ++a) {
            if (a > 0) key += '|';
            key += axis_value(m, spec.axes[a]);
        }
        strata[key].push_back(id);
    }

    SubsampleResult result;
    result.manifest.reserve(strata.size());
    for (auto& [stratum, ids] : strata) {
        const std::size_t keep = std::min(ids.size(), round_half_up(spec.fraction * static_cast<double>(ids.size())));
        std::mt19937_64 gen(stratum_seed(spec.seed, stratum));
        for (std::size_t i = 0; i < keep; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(uniform_below(gen, ids.size() - i));
            std::swap(ids[i], ids[j]);
        }
        for (std::size_t i = 0; i < keep; ++i) result.selected.emplace_back(ids[i]);
        result.manifest.push_back(StratumManifestRow{stratum, ids.size(), keep});
    }
    std::sort(result.selected.begin(), result.selected.end());
    return result;
}

std::string render_manifest(const SubsampleResult& result) {
    std::ostringstream out;
    out << "stratum,total,selected\n";
    for (const StratumManifestRow& row : result.manifest) {
        if (row.stratum.find_first_of(",\"\r\n") != std::string::npos) {
            out << '"';
            for (char c : row.stratum) {
                if (c == '"') out << '"';
                out << c;
            }
            out << '"';
        } else {
            out << row.stratum;
        }
        out << ',' << row.total << ',' << row.selected << '\n';
    }
    return out.str();
}

}  // namespace mgte::dataio
