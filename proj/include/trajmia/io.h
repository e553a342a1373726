// Copyright 2026 The trajmia Authors
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

#ifndef TRAJMIA_IO_H_
#define TRAJMIA_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "trajmia/error.h"

namespace trajmia::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

class ByteWriter {
 public:
  void Bytes(std::string_view raw) {
    buffer_.insert(buffer_.end(), raw.begin(), raw.end());
  }
  template <typename T>
  void Put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const uint8_t*>(&value);
    buffer_.insert(buffer_.end(), p, p + sizeof(T));
  }
  template <typename T>
  void PutArray(const T* values, size_t count) {
    const auto* p = reinterpret_cast<const uint8_t*>(values);
    buffer_.insert(buffer_.end(), p, p + count * sizeof(T));
  }
  std::vector<uint8_t> Take() { return std::move(buffer_); }

 private:
  std::vector<uint8_t> buffer_;
};

class ByteReader {
 public:
  ByteReader(const std::vector<uint8_t>& bytes, std::string what)
      : bytes_(bytes), what_(std::move(what)) {}

  void Expect(std::string_view magic) {
    Need(magic.size());
    if (std::memcmp(bytes_.data() + pos_, magic.data(), magic.size()) != 0) {
      Fail(ErrorCode::kCorrupt, what_ + ": bad magic bytes");
    }
    pos_ += magic.size();
  }
  template <typename T>
  T Get() {
    Need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  template <typename T>
  void GetArray(T* out, size_t count) {
    Need(count * sizeof(T));
    std::memcpy(out, bytes_.data() + pos_, count * sizeof(T));
    pos_ += count * sizeof(T);
  }
  bool AtEnd() const { return pos_ == bytes_.size(); }
  void ExpectEnd() {
    if (!AtEnd()) Fail(ErrorCode::kCorrupt, what_ + ": trailing bytes");
  }

 private:
  void Need(size_t n) {
    if (bytes_.size() - pos_ < n) {
      Fail(ErrorCode::kCorrupt, what_ + ": truncated");
    }
  }
  const std::vector<uint8_t>& bytes_;
  std::string what_;
  size_t pos_ = 0;
};

// Missing files raise kMissingArtifact.
std::vector<uint8_t> ReadBytes(const std::filesystem::path& path);
std::string ReadText(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it into place.
void WriteBytes(const std::filesystem::path& path,
                const std::vector<uint8_t>& bytes);
void WriteText(const std::filesystem::path& path, std::string_view text);

// 16 hex digits of FNV-1a 64 over text.
std::string HexDigest(std::string_view text);

// Shortest round-trip decimal for a double ("%.17g" fallback).
std::string FormatDouble(double value);

}  // namespace trajmia::io

#endif  // TRAJMIA_IO_H_
