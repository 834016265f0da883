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
#include "camforge/log.hpp"

#include <cstdlib>
#include <memory>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace camforge::log {
namespace {

spdlog::logger& logger() {
  static const std::shared_ptr<spdlog::logger> instance = [] {
    auto lg = std::make_shared<spdlog::logger>(
        "camforge", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    lg->set_pattern("[camforge] [%l] %v");
    const char* env = std::getenv("CAMFORGE_LOG");
    const std::string level = env ? env : "info";
    if (level == "error") {
      lg->set_level(spdlog::level::err);
    } else if (level == "debug") {
      lg->set_level(spdlog::level::debug);
    } else {
      lg->set_level(spdlog::level::info);
    }
    return lg;
  }();
  return *instance;
}

}  // namespace

void error(std::string_view message) { logger().error("{}", message); }
void info(std::string_view message) { logger().info("{}", message); }
void debug(std::string_view message) { logger().debug("{}", message); }

}  // namespace camforge::log
