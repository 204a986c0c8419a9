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

namespace qpscope {

// Exponentially scaled modified Bessel functions of the second kind,
// e^z K_n(z), for z > 0. Finite for arguments where K_n itself underflows.
double scaled_bessel_k0(double z);
double scaled_bessel_k1(double z);

}  // namespace qpscope
