// Copyright 2026 The dissim-knn Authors
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
//
#pragma once

#include <string>
#include <vector>

#include "dissim/dataset.hpp"

namespace dissim::fixtures {

// Three books: GoT read by u0..u99, DwD by u0..u9 (a subset of GoT's
// readers), SoE by u80..u199 (20 of them also read GoT).
inline constexpr Index kGoT = 0;
inline constexpr Index kDwD = 1;
inline constexpr Index kSoE = 2;

inline std::vector<InteractionRecord> books_records() {
    std::vector<InteractionRecord> r;
    auto add = [&](int u, const char* item) { r.push_back({"u" + std::to_string(u), item, 1.0, std::nullopt}); };
    for (int u = 0; u < 100; ++u) add(u, "GoT");
    for (int u = 0; u < 10; ++u) add(u, "DwD");
    for (int u = 80; u < 200; ++u) add(u, "SoE");
    return r;
}

inline Dataset books_dataset() { return build_dataset(books_records()); }

} // namespace dissim::fixtures
