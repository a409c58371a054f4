// Copyright 2026 The mmxeval Authors. All Rights Reserved.
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

#include "mmxeval/tensor_io.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "mmxeval/error.h"

namespace mmxeval {
namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

std::string canonical_header(const Shape& shape) {
  std::string header =
      R"({"dtype":"float32","endianness":"little","layout":"row-major","shape":[)";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) header += ',';
    header += std::to_string(shape[i]);
  }
  header += "]}\n";
  return header;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(std::string_view in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[i])) << (8 * i);
  }
  return v;
}

Shape parse_header(std::string_view header, const std::string& source) {
  auto fail = [&](const std::string& why) -> DataError {
    return DataError(source + ": malformed header: " + why);
  };
  if (header.empty() || header.back() != '\n') throw fail("missing line terminator");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(header.substr(0, header.size() - 1));
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  }
  if (!doc.is_object()) throw fail("not an object");
  auto field = [&](const char* key) -> const nlohmann::json& {
    auto it = doc.find(key);
    if (it == doc.end()) throw fail(std::string("missing '") + key + "'");
    return *it;
  };
  if (field("dtype") != "float32") throw fail("dtype must be float32");
  if (field("endianness") != "little") throw fail("endianness must be little");
  if (field("layout") != "row-major") throw fail("layout must be row-major");
  const auto& jshape = field("shape");
  if (!jshape.is_array() || jshape.empty()) throw fail("shape must be a non-empty array");
  Shape shape;
  for (const auto& d : jshape) {
    if (!d.is_number_unsigned()) throw fail("shape entries must be unsigned integers");
    shape.push_back(d.get<std::size_t>());
  }
  if (canonical_header(shape) != header) throw fail("header is not in canonical form");
  return shape;
}

}  // namespace

std::string encode_tensor(const Tensor& tensor) {
  const std::string header = canonical_header(tensor.shape());
  std::string out;
  out.reserve(8 + header.size() + 4 * tensor.size());
  out.append(kContainerMagic);
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out.append(header);
  for (float v : tensor.values()) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    put_u32(out, bits);
  }
  return out;
}

Tensor decode_tensor(std::string_view bytes, const std::string& source) {
  if (bytes.size() < 8 || bytes.substr(0, 4) != kContainerMagic) {
    throw DataError(source + ": malformed header: not an MMXT container");
  }
  const std::uint32_t header_len = get_u32(bytes.substr(4, 4));
  if (bytes.size() < 8 + static_cast<std::size_t>(header_len)) {
    throw DataError(source + ": malformed header: truncated");
  }
  const Shape shape = parse_header(bytes.substr(8, header_len), source);
  const std::string_view payload = bytes.substr(8 + header_len);
  const std::size_t count = shape_volume(shape);
  if (payload.size() != count * 4) {
    throw DataError(source + ": byte-count mismatch: shape " + shape_to_string(shape) +
                    " needs " + std::to_string(count * 4) + " payload bytes, found " +
                    std::to_string(payload.size()));
  }
  std::vector<float> values(count);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(values.data(), payload.data(), payload.size());
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      values[i] = std::bit_cast<float>(get_u32(payload.substr(4 * i, 4)));
    }
  }
  return Tensor(shape, std::move(values));
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open tensor container");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_tensor(bytes, path.string());
}

void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  const std::string bytes = encode_tensor(tensor);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError(path.string() + ": write failed");
}

Tensor load_volume(const std::filesystem::path& path) {
  Tensor t = read_tensor(path);
  if (!t.all_finite()) throw DataError(path.string() + ": volume contains non-finite values");
  return t;
}

Tensor load_heatmap(const std::filesystem::path& path, const std::string& case_id,
                    const std::string& method) {
  Tensor t = read_tensor(path);
  if (!t.all_finite()) {
    throw DataError("heatmap for case '" + case_id + "', method '" + method +
                    "' contains NaN/Inf (" + path.string() + ")");
  }
  return t;
}

Tensor load_mask(const std::filesystem::path& path) {
  Tensor t = read_tensor(path);
  if (!t.all_finite()) throw DataError(path.string() + ": mask contains non-finite values");
  return binarize(t);
}

Tensor binarize(const Tensor& raw) {
  Tensor out(raw.shape());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] > 0.0f ? 1.0f : 0.0f;
  return out;
}

}  // namespace mmxeval
