/* Copyright 2026 The PruneKit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef PRUNEKIT_TOOLS_CLI_H_
#define PRUNEKIT_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace prunekit::cli {

// Exit codes: 0 success, 1 validation or processing failure, 2 usage error.
// Failures write {"schema_version", "error": {"kind", "message"}} to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prunekit::cli

#endif  // PRUNEKIT_TOOLS_CLI_H_
