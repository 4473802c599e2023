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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

namespace lakedq {

// Process-wide count of data file opens. Every read of a row-bearing file
// (data/ or deletes/) must go through open_data_file so that metadata-only
// code paths can prove they never touched row data. Metadata and sidecar
// reads are not counted.
uint64_t data_file_open_count();

// Opens a data or delete file for reading and bumps the counter.
std::ifstream open_data_file(const std::filesystem::path& path);

// Reads a whole data file through the counted channel.
std::string read_data_file(const std::filesystem::path& path);

// Guard for regions that must not read row data. Records the counter on
// entry; check() throws ZeroScanViolation if it moved.
class ZeroScanGuard {
 public:
  explicit ZeroScanGuard(std::string context);
  void check() const;

 private:
  std::string context_;
  uint64_t entry_count_;
};

}  // namespace lakedq
