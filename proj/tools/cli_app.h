// Copyright 2026 The ddiqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DDIQKD_TOOLS_CLI_APP_H
#define DDIQKD_TOOLS_CLI_APP_H

#include <ostream>
#include <string>
#include <vector>

namespace ddiqkd {

/// Exit codes of cli_main.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitMalformedConfig = 3,
    kExitInvalidParameter = 4,
    kExitRuntime = 5,
};

/// args excludes the program name.
int cli_main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace ddiqkd

#endif
