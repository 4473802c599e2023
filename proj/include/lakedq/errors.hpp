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
#include <stdexcept>
#include <string>

namespace lakedq {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FileIoError : Error {
  using Error::Error;
};

struct FormatError : Error {
  using Error::Error;
};

struct BadMagicError : FormatError {
  using FormatError::FormatError;
};

struct TruncatedFileError : FormatError {
  using FormatError::FormatError;
};

struct DuplicateBlobError : FormatError {
  using FormatError::FormatError;
};

struct CorruptDataFileError : Error {
  using Error::Error;
};

struct SyntaxError : Error {
  SyntaxError(const std::string& msg, size_t pos)
      : Error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
  size_t position;
};

struct UnknownColumnError : Error {
  explicit UnknownColumnError(const std::string& name)
      : Error("unknown column: " + name), column(name) {}
  std::string column;
};

struct UnknownSnapshotError : Error {
  explicit UnknownSnapshotError(int64_t id)
      : Error("unknown snapshot: " + std::to_string(id)), snapshot_id(id) {}
  int64_t snapshot_id;
};

struct MissingStatsError : Error {
  MissingStatsError(int32_t col, const std::string& file)
      : Error("no statistics for column " + std::to_string(col) + " in " + file),
        column_id(col),
        file_path(file) {}
  int32_t column_id;
  std::string file_path;
};

struct MissingSidecarError : Error {
  explicit MissingSidecarError(const std::string& file)
      : Error("no sketch sidecar for " + file), file_path(file) {}
  std::string file_path;
};

struct MixedParametersError : Error {
  using Error::Error;
};

struct EmptySketchError : Error {
  using Error::Error;
};

struct NonFiniteValueError : Error {
  using Error::Error;
};

struct TypeMismatchError : Error {
  TypeMismatchError(size_t row, const std::string& col, const std::string& detail)
      : Error("type mismatch at row " + std::to_string(row) + ", column " + col + ": " +
              detail),
        row_index(row),
        column(col) {}
  size_t row_index;
  std::string column;
};

struct NullInNonNullableError : Error {
  NullInNonNullableError(size_t row, const std::string& col)
      : Error("null value at row " + std::to_string(row) + " in non-nullable column " + col),
        row_index(row),
        column(col) {}
  size_t row_index;
  std::string column;
};

struct PositionOutOfRangeError : Error {
  using Error::Error;
};

struct DuplicateDeleteError : Error {
  using Error::Error;
};

struct StaleTableError : Error {
  using Error::Error;
};

struct ConcurrentWriterError : Error {
  using Error::Error;
};

struct ConstraintViolationError : Error {
  ConstraintViolationError(const std::string& id, const std::string& observed_repr,
                           const std::string& bound_repr, const std::string& reason)
      : Error("constraint " + id + " violated: observed " + observed_repr + ", bound " +
              bound_repr + (reason.empty() ? "" : " (" + reason + ")")),
        constraint_id(id),
        observed(observed_repr),
        bound(bound_repr) {}
  std::string constraint_id;
  std::string observed;
  std::string bound;
};

struct ConfigError : Error {
  using Error::Error;
};

// Raised by the always-on self check when a metadata-only code path touched a
// data file. Indicates a bug, not a user error.
struct ZeroScanViolation : Error {
  using Error::Error;
};

struct UnknownScenarioError : Error {
  using Error::Error;
};

}  // namespace lakedq
