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

#include "lakedq/sidecar.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "lakedq/bytes.hpp"
#include "lakedq/errors.hpp"

namespace lakedq {

namespace {

constexpr char kMagic[4] = {'Z', 'S', 'B', '1'};
constexpr uint8_t kVersion = 1;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileIoError("cannot open sidecar: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw FileIoError("sidecar read failed: " + path.string());
  return std::move(buf).str();
}

void check_duplicates(const std::vector<SketchBlob>& blobs, const std::string& what) {
  std::set<std::pair<uint8_t, uint32_t>> seen;
  for (const auto& b : blobs) {
    if (!seen.insert({b.blob_type, b.column_id}).second) {
      throw DuplicateBlobError(what + ": type " + std::to_string(b.blob_type) + " column " +
                               std::to_string(b.column_id));
    }
  }
}

}  // namespace

const SketchBlob* SketchSidecar::find(uint8_t blob_type, uint32_t column_id) const {
  for (const auto& b : blobs) {
    if (b.blob_type == blob_type && b.column_id == column_id) return &b;
  }
  return nullptr;
}

std::string sidecar_encode(const SketchSidecar& sidecar) {
  check_duplicates(sidecar.blobs, "sidecar");
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  bytes::put_u8(out, kVersion);
  bytes::put_u64(out, sidecar.seed);
  bytes::put_u32(out, static_cast<uint32_t>(sidecar.blobs.size()));
  for (const auto& b : sidecar.blobs) {
    bytes::put_u8(out, b.blob_type);
    bytes::put_u32(out, b.column_id);
    bytes::put_u32(out, static_cast<uint32_t>(b.payload.size()));
    out += b.payload;
  }
  return out;
}

SketchSidecar sidecar_decode(std::string_view data, const std::string& what) {
  bytes::Reader r(data, what);
  std::string_view magic = r.take(4);
  if (std::string_view(kMagic, 4) != magic) throw BadMagicError(what);
  uint8_t version = r.u8();
  if (version != kVersion) throw FormatError(what + ": unsupported version");
  SketchSidecar sc;
  sc.seed = r.u64();
  uint32_t count = r.u32();
  for (uint32_t i = 0; i < count; ++i) {
    SketchBlob b;
    b.blob_type = r.u8();
    b.column_id = r.u32();
    uint32_t len = r.u32();
    b.payload = std::string(r.take(len));
    sc.blobs.push_back(std::move(b));
  }
  if (r.remaining() != 0) throw FormatError(what + ": trailing bytes");
  check_duplicates(sc.blobs, what);
  return sc;
}

void sidecar_write(const std::filesystem::path& path, const SketchSidecar& sidecar) {
  std::string encoded = sidecar_encode(sidecar);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileIoError("cannot write sidecar: " + path.string());
  out.write(encoded.data(), static_cast<std::streamsize>(encoded.size()));
  out.flush();
  if (!out) throw FileIoError("sidecar write failed: " + path.string());
}

SketchSidecar sidecar_read(const std::filesystem::path& path) {
  return sidecar_decode(read_file(path), path.string());
}

std::optional<SketchBlob> sidecar_fetch(const std::filesystem::path& path, uint8_t blob_type,
                                        uint32_t column_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileIoError("cannot open sidecar: " + path.string());
  auto need = [&](char* dst, size_t n) {
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n) throw TruncatedFileError(path.string());
  };
  char header[17];
  need(header, sizeof(header));
  if (std::string_view(header, 4) != std::string_view(kMagic, 4))
    throw BadMagicError(path.string());
  if (static_cast<uint8_t>(header[4]) != kVersion)
    throw FormatError(path.string() + ": unsupported version");
  uint32_t count = 0;
  for (int i = 3; i >= 0; --i) count = (count << 8) | static_cast<uint8_t>(header[13 + i]);
  for (uint32_t i = 0; i < count; ++i) {
    char bh[9];
    need(bh, sizeof(bh));
    uint8_t type = static_cast<uint8_t>(bh[0]);
    uint32_t col = 0, len = 0;
    for (int j = 3; j >= 0; --j) col = (col << 8) | static_cast<uint8_t>(bh[1 + j]);
    for (int j = 3; j >= 0; --j) len = (len << 8) | static_cast<uint8_t>(bh[5 + j]);
    if (type == blob_type && col == column_id) {
      SketchBlob b;
      b.blob_type = type;
      b.column_id = col;
      b.payload.resize(len);
      need(b.payload.data(), len);
      return b;
    }
    in.seekg(len, std::ios::cur);  // skip this payload without reading it
    if (!in) throw TruncatedFileError(path.string());
  }
  return std::nullopt;
}

uint64_t sidecar_seed(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileIoError("cannot open sidecar: " + path.string());
  char header[13];
  in.read(header, sizeof(header));
  if (static_cast<size_t>(in.gcount()) != sizeof(header)) throw TruncatedFileError(path.string());
  if (std::string_view(header, 4) != std::string_view(kMagic, 4))
    throw BadMagicError(path.string());
  uint64_t seed = 0;
  for (int i = 7; i >= 0; --i) seed = (seed << 8) | static_cast<uint8_t>(header[5 + i]);
  return seed;
}

}  // namespace lakedq
