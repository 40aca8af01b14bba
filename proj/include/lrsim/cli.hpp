// SPDX-License-Identifier: Apache-2.0
//
// lrsim - uplink simulator for reflecting-surface channels with non-ideal hardware
// Copyright (C) 2026 the lrsim authors
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

#pragma once

#include <string>
#include <vector>

namespace lrsim {

/// Command-line entry point. Exit codes: 0 success, 1 runtime failure,
/// 2 usage/configuration error.
int cli_dispatch(int argc, const char* const* argv);

/// Convenience overload for tests; `args` excludes the program name.
int cli_dispatch(const std::vector<std::string>& args);

} // namespace lrsim
