// Copyright 2026 The qpscope Authors
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

#pragma once

#include <iosfwd>

#include "app.hpp"

namespace qpscope::acceptance {

// reproduce-all: runs every criterion, prints one line each to `out`, writes
// acceptance.json and returns kExitAcceptance if any criterion fails.
int reproduce_all(const cli::Invocation& inv, cli::ArtifactWriter& w, std::ostream& out);

}  // namespace qpscope::acceptance
