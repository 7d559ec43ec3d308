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

#include <iostream>

#include "cli_common.hpp"
#include "commands.hpp"
#include "panofuse/types.hpp"

int main(int argc, char** argv) {
  using namespace panofuse::cli;
  CLI::App app{"Panoptic fusion of semantic logits and detections"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Runner run;
  RegisterFuse(app, run);
  RegisterEval(app, run);
  RegisterSynth(app, run);
  RegisterBench(app, run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    return run();
  } catch (const UsageError& e) {
    std::cerr << "panofuse: " << e.what() << '\n';
    return kExitUsage;
  } catch (const panofuse::Error& e) {
    std::cerr << "panofuse: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "panofuse: " << e.what() << '\n';
    return kExitData;
  }
}
