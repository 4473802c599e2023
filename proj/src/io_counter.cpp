/*
 * Licensed to the Apache Software Foundation (ASF) under one
 * or more contributor license agreements.  See the NOTICE file
 * distributed with this work for additional information
 * regarding copyright ownership.  The ASF licenses this file
 * to you under the Apache License, Version 2.0 (the
 * "License"); you may not use this file except in compliance
 * with the License.  You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing,
 * software distributed under the License is distributed on an
 * "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
 * KIND, either express or implied.  See the License for the
 * specific language governing permissions and limitations
 * under the License.
 */

#include "lakedq/io_counter.hpp"

#include <atomic>
#include <sstream>

#include "lakedq/errors.hpp"

namespace lakedq {

namespace {
std::atomic<uint64_t> g_data_file_opens{0};
}

uint64_t data_file_open_count() { return g_data_file_opens.load(std::memory_order_relaxed); }

std::ifstream open_data_file(const std::filesystem::path& path) {
  g_data_file_opens.fetch_add(1, std::memory_order_relaxed);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileIoError("cannot open data file: " + path.string());
  return in;
}

std::string read_data_file(const std::filesystem::path& path) {
  std::ifstream in = open_data_file(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw FileIoError("read failed: " + path.string());
  return std::move(buf).str();
}

ZeroScanGuard::ZeroScanGuard(std::string context)
    : context_(std::move(context)), entry_count_(data_file_open_count()) {}

void ZeroScanGuard::check() const {
  uint64_t now = data_file_open_count();
  if (now != entry_count_) {
    throw ZeroScanViolation(context_ + " opened " + std::to_string(now - entry_count_) +
                            " data file(s); expected zero");
  }
}

}  // namespace lakedq
