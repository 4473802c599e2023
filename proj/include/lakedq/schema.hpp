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
#include <string>
#include <vector>

#include <json.hpp>

#include "lakedq/value.hpp"

namespace lakedq {

struct ColumnSchema {
  uint32_t column_id = 0;
  std::string name;
  ValueKind kind = ValueKind::kInt64;
  bool nullable = true;
};

// Column ids are unique and assigned once; names are unique. Ids survive
// renames so stats and sketches key on the id, not the name.
class TableSchema {
 public:
  TableSchema() = default;
  explicit TableSchema(std::vector<ColumnSchema> columns);

  const std::vector<ColumnSchema>& columns() const { return columns_; }
  size_t size() const { return columns_.size(); }

  const ColumnSchema& column_at(size_t pos) const { return columns_.at(pos); }
  // Throws UnknownColumnError.
  const ColumnSchema& by_name(const std::string& name) const;
  const ColumnSchema& by_id(uint32_t column_id) const;
  const ColumnSchema* find_name(const std::string& name) const;
  const ColumnSchema* find_id(uint32_t column_id) const;

  nlohmann::json to_json() const;
  static TableSchema from_json(const nlohmann::json& j);

 private:
  std::vector<ColumnSchema> columns_;
};

}  // namespace lakedq
