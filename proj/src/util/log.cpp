/*
 * Copyright 2026 The spose Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "util/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>
#include <set>

namespace spose::log {

namespace {
std::atomic<int> g_level{static_cast<int>(Level::warn)};
std::mutex g_mutex;
}  // namespace

void set_level(Level level) { g_level = static_cast<int>(level); }
Level level() { return static_cast<Level>(g_level.load()); }

void warn(const std::string &msg) {
    if (g_level < static_cast<int>(Level::warn)) return;
    std::lock_guard lock(g_mutex);
    std::cerr << "[spose] warning: " << msg << '\n';
}

void info(const std::string &msg) {
    if (g_level < static_cast<int>(Level::info)) return;
    std::lock_guard lock(g_mutex);
    std::cerr << "[spose] " << msg << '\n';
}

void warn_once(const std::string &key, const std::string &msg) {
    static std::set<std::string> seen;
    {
        std::lock_guard lock(g_mutex);
        if (!seen.insert(key).second) return;
    }
    warn(msg);
}

}  // namespace spose::log
