// Copyright 2026 The mcvd Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

namespace mcvd {

inline constexpr std::string_view kToolVersion = "0.1.0";

} // namespace mcvd
