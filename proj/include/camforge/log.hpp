/* Copyright 2026 The camforge Authors. All Rights Reserved.

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
#ifndef CAMFORGE_LOG_HPP_
#define CAMFORGE_LOG_HPP_

#include <string_view>

namespace camforge::log {

// Level comes from CAMFORGE_LOG (error|info|debug, default info). Messages go
// to stderr.
void error(std::string_view message);
void info(std::string_view message);
void debug(std::string_view message);

}  // namespace camforge::log

#endif  // CAMFORGE_LOG_HPP_
