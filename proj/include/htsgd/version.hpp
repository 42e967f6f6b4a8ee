// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace htsgd {

inline constexpr const char* kVersion = "0.1.0";

// Bumped whenever the stream derivation scheme or the generator changes;
// archived results are only comparable within one RNG epoch.
inline constexpr const char* kRngScheme = "splitmix64-keyed xoshiro256++ v1";

}  // namespace htsgd
