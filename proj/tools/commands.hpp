// Copyright 2026 The Panofuse Authors. All Rights Reserved.
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

// Subcommand registration. Each Register* adds a subcommand to `app` whose
// parse callback stores the command body in `run`.

#ifndef PANOFUSE_TOOLS_COMMANDS_HPP_
#define PANOFUSE_TOOLS_COMMANDS_HPP_

#include <functional>

#include "CLI11.hpp"

namespace panofuse::cli {

using Runner = std::function<int()>;

void RegisterFuse(CLI::App& app, Runner& run);
void RegisterEval(CLI::App& app, Runner& run);
void RegisterSynth(CLI::App& app, Runner& run);
void RegisterBench(CLI::App& app, Runner& run);

}  // namespace panofuse::cli

#endif  // PANOFUSE_TOOLS_COMMANDS_HPP_
