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

/// @file tensor_io.h
/// @brief The `.mmxt` tensor container.
///
/// Byte layout:
///
///     offset 0   4 bytes   magic "MMXT"
///     offset 4   4 bytes   header length N, unsigned little-endian
///     offset 8   N bytes   UTF-8 header line, terminated by '\n'
///     offset 8+N           payload, product(shape) little-endian float32
///
/// The header is the compact JSON object
///
///     {"dtype":"float32","endianness":"little","layout":"row-major","shape":[...]}
///
/// with keys in that order and no whitespace. Only this canonical form is
/// accepted, so decoding followed by encoding reproduces the input bytes.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mmxeval/tensor.h"

namespace mmxeval {

inline constexpr std::string_view kContainerMagic = "MMXT";

std::string encode_tensor(const Tensor& tensor);

/// Decodes a container held in memory. `source` names it in error messages.
Tensor decode_tensor(std::string_view bytes, const std::string& source = "<memory>");

/// Reads a container without any value checks (values are bit-exact).
Tensor read_tensor(const std::filesystem::path& path);
void write_tensor(const std::filesystem::path& path, const Tensor& tensor);

/// Reads a volume; non-finite values are rejected.
Tensor load_volume(const std::filesystem::path& path);

/// Reads a heatmap; non-finite values are rejected with an error naming the
/// case and the attribution method.
Tensor load_heatmap(const std::filesystem::path& path, const std::string& case_id,
                    const std::string& method);

/// Reads an annotation mask and binarizes it: 1 where the stored value is
/// > 0, else 0.
Tensor load_mask(const std::filesystem::path& path);

Tensor binarize(const Tensor& raw);

}  // namespace mmxeval
