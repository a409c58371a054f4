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

/// @file protocol_oracle.h
/// @brief Client side of the oracle wire protocol.
///
/// Messages are single-line JSON objects, one per line, over either the
/// stdin/stdout of a child process or a TCP stream.
///
///     -> {"op":"info"}
///     <- {"n_classes":2,"input_shape":[4,256,256],"modalities":[...]}
///        (optional: "batch_size", "id")
///     -> {"id":"17","op":"score","tensor_uri":"/tmp/.../17.mmxt"}
///     <- {"id":"17","probs":[0.3,0.7]}          (optional: "gen_seconds")
///     <- {"id":"17","error":"..."}              (per-request failure)
///
/// Volumes are staged as tensor containers in a private work directory.
/// Up to batch_size * max_in_flight requests are outstanding at once and
/// responses may arrive in any order; they are matched by id.

#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "mmxeval/oracle.h"

namespace mmxeval {

enum class Transport { kSubprocess, kTcp };

struct OracleEndpoint {
  Transport transport = Transport::kSubprocess;
  /// argv of the child process (subprocess transport).
  std::vector<std::string> command;
  std::string host = "127.0.0.1";
  int port = 0;
  std::size_t batch_size = 8;
  std::size_t max_in_flight = 2;
  double timeout_seconds = 60.0;
  /// Staging directory for request containers; a fresh temporary directory
  /// when empty.
  std::filesystem::path work_dir;

  void validate() const;
  std::string describe() const;
};

class ProtocolOracle final : public Oracle {
 public:
  /// Connects (or spawns) and performs the handshake. Throws OracleError.
  explicit ProtocolOracle(OracleEndpoint endpoint);
  ~ProtocolOracle() override;

  ProtocolOracle(const ProtocolOracle&) = delete;
  ProtocolOracle& operator=(const ProtocolOracle&) = delete;

  const OracleInfo& info() const override { return info_; }
  std::vector<Prediction> predict(std::span<const Tensor> volumes) override;

 private:
  class Channel;

  OracleEndpoint endpoint_;
  std::unique_ptr<Channel> channel_;
  OracleInfo info_;
  std::filesystem::path work_dir_;
  bool owns_work_dir_ = false;
  std::size_t next_id_ = 1;
};

}  // namespace mmxeval
