// Copyright 2026 The qtabgen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qtabgen/errors.hpp"
#include "qtabgen/rng.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

namespace qtabgen {

namespace log {
namespace {

void stderr_sink(const std::string &message) { std::cerr << "warning: " << message << '\n'; }

WarningSink &current_sink() {
    static WarningSink sink = stderr_sink;
    return sink;
}

} // namespace

void warn(const std::string &message) { current_sink()(message); }

WarningSink set_warning_sink(WarningSink sink) {
    WarningSink previous = std::move(current_sink());
    current_sink() = sink ? std::move(sink) : WarningSink(stderr_sink);
    return previous;
}

} // namespace log

std::uint64_t Rng::below(std::uint64_t n) {
    // Reject the top partial bucket so every residue is equally likely.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    std::uint64_t x = engine_();
    while (x >= limit) {
        x = engine_();
    }
    return x % n;
}

double Rng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
    // FNV-1a over the label, then a splitmix64 finaliser over master ^ hash.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    std::uint64_t z = master ^ h;
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace qtabgen
