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

#include "lakedq/schema.hpp"

#include <unordered_set>

#include "lakedq/errors.hpp"

namespace lakedq {

TableSchema::TableSchema(std::vector<ColumnSchema> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw ConfigError("schema needs at least one column");
  std::unordered_set<uint32_t> ids;
  std::unordered_set<std::string> names;
  for (const auto& c : columns_) {
    if (c.name.empty()) throw ConfigError("column name must not be empty");
    if (!ids.insert(c.column_id).second)
      throw ConfigError("duplicate column id " + std::to_string(c.column_id));
    if (!names.insert(c.name).second) throw ConfigError("duplicate column name " + c.name);
  }
}

const ColumnSchema& TableSchema::by_name(const std::string& name) const {
  if (const ColumnSchema* c = find_name(name)) return *c;
  throw UnknownColumnError(name);
}

const ColumnSchema& TableSchema::by_id(uint32_t column_id) const {
  if (const ColumnSchema* c = find_id(column_id)) return *c;
  throw UnknownColumnError("#" + std::to_string(column_id));
}

const ColumnSchema* TableSchema::find_name(const std::string& name) const {
  for (const auto& c : columns_)
    if (c.name == name) return &c;
  return nullptr;
}

const ColumnSchema* TableSchema::find_id(uint32_t column_id) const {
  for (const auto& c : columns_)
    if (c.column_id == column_id) return &c;
  return nullptr;
}

nlohmann::json TableSchema::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns_) {
    cols.push_back({{"id", c.column_id},
                    {"name", c.name},
                    {"type", kind_name(c.kind)},
                    {"nullable", c.nullable}});
  }
  return cols;
}

TableSchema TableSchema::from_json(const nlohmann::json& j) {
  std::vector<ColumnSchema> cols;
  for (const auto& jc : j) {
    ColumnSchema c;
    c.column_id = jc.at("id").get<uint32_t>();
    c.name = jc.at("name").get<std::string>();
    std::string type_name = jc.at("type").get<std::string>();
    auto kind = kind_from_name(type_name);
    if (!kind) throw FormatError("unknown column type: " + type_name);
    c.kind = *kind;
    c.nullable = jc.at("nullable").get<bool>();
    cols.push_back(std::move(c));
  }
  return TableSchema(std::move(cols));
}

}  // namespace lakedq
