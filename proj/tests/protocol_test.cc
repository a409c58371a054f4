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


#include "mmxeval/protocol_oracle.h"

#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "mmxeval/error.h"
#include "mmxeval/rng.h"
#include "mmxeval/score_cache.h"
#include "mmxeval/tensor_io.h"

namespace mmxeval {
namespace {

namespace fs = std::filesystem;

const Shape kShape{2, 4, 4};

OracleEndpoint stdio_endpoint(std::vector<std::string> extra = {}) {
  OracleEndpoint e;
  e.transport = Transport::kSubprocess;
  e.command = {MMXEVAL_FAKE_ORACLE};
  e.command.insert(e.command.end(), extra.begin(), extra.end());
  e.timeout_seconds = 10.0;
  return e;
}

std::vector<Tensor> random_volumes(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Tensor> out;
  for (std::size_t i = 0; i < n; ++i) {
    Tensor t(kShape);
    for (float& v : t.values()) v = static_cast<float>(rng.uniform(-0.2, 0.2));
    out.push_back(std::move(t));
  }
  return out;
}

std::string oracle_error(OracleEndpoint e, std::size_t n = 3) {
  try {
    ProtocolOracle oracle(std::move(e));
    const auto vols = random_volumes(n, 1);
    oracle.predict(vols);
  } catch (const OracleError& err) {
    return err.what();
  }
  ADD_FAILURE() << "expected OracleError";
  return {};
}

TEST(Protocol, HandshakeReportsModelInfo) {
  ProtocolOracle oracle(stdio_endpoint({"--batch", "4", "--id", "model-x"}));
  EXPECT_EQ(oracle.info().n_classes, 2u);
  EXPECT_EQ(oracle.info().input_shape, kShape);
  EXPECT_EQ(oracle.info().modalities, (std::vector<std::string>{"M0", "M1"}));
  EXPECT_EQ(oracle.info().batch_size, 4u);
  EXPECT_EQ(oracle.info().id, "model-x");
}

TEST(Protocol, MatchesInProcessLinearModel) {
  ProtocolOracle remote(stdio_endpoint({"--bias", "0.25"}));
  LinearOracle local(Tensor(kShape, 1.0f), 0.25);
  const auto vols = random_volumes(20, 2);
  const auto got = remote.predict(vols);
  const auto want = local.predict(vols);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_NEAR(got[i].probs[1], want[i].probs[1], 1e-12);
  }
}

TEST(Protocol, ZeroVolumeIsUniform) {
  ProtocolOracle remote(stdio_endpoint());
  const std::vector<Tensor> vols{Tensor(kShape)};
  const auto p = remote.predict(vols);
  EXPECT_DOUBLE_EQ(p[0].probs[0], 0.5);
  EXPECT_DOUBLE_EQ(p[0].probs[1], 0.5);
}

TEST(Protocol, OutOfOrderRepliesAreMatchedById) {
  const fs::path log = fs::temp_directory_path() / "mmxeval_protocol_reorder.log";
  fs::remove(log);
  OracleEndpoint e = stdio_endpoint({"--batch", "3", "--reorder", "3", "--log", log.string()});
  e.max_in_flight = 1;
  ProtocolOracle remote(e);
  LinearOracle local(Tensor(kShape, 1.0f), 0.0);
  const auto vols = random_volumes(3, 3);
  const auto got = remote.predict(vols);
  const auto want = local.predict(vols);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(got[i].probs[1], want[i].probs[1], 1e-12);
  const std::vector<std::string> ids{"a", "b", "c"};
  const auto recs = score(remote, ids, vols);
  EXPECT_EQ(recs[0].case_id, "a");
  EXPECT_EQ(recs[2].case_id, "c");
  EXPECT_NEAR(recs[2].probs[1], want[2].probs[1], 1e-12);

  std::ifstream in(log);
  std::string line;
  std::size_t scores = 0;
  while (std::getline(in, line)) {
    const auto req = nlohmann::json::parse(line);
    if (req.value("op", "") != "score") continue;
    ++scores;
    EXPECT_TRUE(req["id"].is_string());
    EXPECT_TRUE(req.contains("tensor_uri"));
  }
  EXPECT_EQ(scores, 6u);
}

TEST(Protocol, ReordersAcrossMultipleBatchesInFlight) {
  OracleEndpoint e = stdio_endpoint({"--batch", "2", "--reorder", "4"});
  e.max_in_flight = 2;
  ProtocolOracle remote(e);
  LinearOracle local(Tensor(kShape, 1.0f), 0.0);
  const auto vols = random_volumes(12, 4);
  const auto got = remote.predict(vols);
  const auto want = local.predict(vols);
  for (std::size_t i = 0; i < vols.size(); ++i) EXPECT_NEAR(got[i].probs[1], want[i].probs[1], 1e-12);
}

TEST(Protocol, ReportsGenerationTime) {
  ProtocolOracle remote(stdio_endpoint({"--gen-seconds", "0.5"}));
  const auto p = remote.predict(random_volumes(2, 5));
  ASSERT_TRUE(p[1].gen_seconds.has_value());
  EXPECT_DOUBLE_EQ(*p[1].gen_seconds, 0.5);
}

TEST(Protocol, MalformedResponse) {
  EXPECT_NE(oracle_error(stdio_endpoint({"--malformed"})).find("malformed response"), std::string::npos);
}

TEST(Protocol, UnknownId) {
  EXPECT_NE(oracle_error(stdio_endpoint({"--unknown-id"})).find("unknown id"), std::string::npos);
}

TEST(Protocol, ProbabilitySumViolation) {
  EXPECT_NE(oracle_error(stdio_endpoint({"--bad-sum"})).find("sum"), std::string::npos);
}

TEST(Protocol, EndpointErrorReply) {
  EXPECT_NE(oracle_error(stdio_endpoint({"--error-on", "1"})).find("endpoint error for request"),
            std::string::npos);
}

TEST(Protocol, EndpointDiesMidRun) {
  EXPECT_NE(oracle_error(stdio_endpoint({"--die-after", "2"}), 5).find("closed the connection"),
            std::string::npos);
}

TEST(Protocol, Timeout) {
  OracleEndpoint e = stdio_endpoint({"--sleep-ms", "2000"});
  e.timeout_seconds = 0.2;
  const auto start = std::chrono::steady_clock::now();
  EXPECT_NE(oracle_error(e, 1).find("timeout"), std::string::npos);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
}

TEST(Protocol, HandshakeTimeout) {
  OracleEndpoint e = stdio_endpoint({"--handshake-sleep-ms", "2000"});
  e.timeout_seconds = 0.2;
  try {
    ProtocolOracle oracle(e);
    FAIL() << "expected OracleError";
  } catch (const OracleError& err) {
    EXPECT_NE(std::string(err.what()).find("handshake failed"), std::string::npos);
  }
}

TEST(Protocol, MissingExecutable) {
  OracleEndpoint e;
  e.command = {"/nonexistent/mmxeval-model"};
  e.timeout_seconds = 5.0;
  EXPECT_THROW(ProtocolOracle{e}, OracleError);
}

TEST(Protocol, ChannelUnusableAfterFailure) {
  ProtocolOracle oracle(stdio_endpoint({"--error-on", "0"}));
  EXPECT_THROW(oracle.predict(random_volumes(1, 6)), OracleError);
  EXPECT_THROW(oracle.predict(random_volumes(1, 6)), OracleError);
}

TEST(Protocol, ShapeMismatchIsCaughtBeforeSending) {
  ProtocolOracle oracle(stdio_endpoint());
  const std::vector<std::string> ids{"x"};
  const std::vector<Tensor> vols{Tensor({2, 2, 2})};
  EXPECT_THROW(score(oracle, ids, vols), OracleError);
}

TEST(Protocol, EndpointValidation) {
  OracleEndpoint e;
  e.command = {"x"};
  e.batch_size = 0;
  EXPECT_THROW(e.validate(), ConfigError);
  e.batch_size = 1;
  e.timeout_seconds = 0.0;
  EXPECT_THROW(e.validate(), ConfigError);
  OracleEndpoint t;
  t.transport = Transport::kTcp;
  EXPECT_THROW(t.validate(), ConfigError);
}

TEST(Protocol, CachingInFrontOfEndpoint) {
  const fs::path log = fs::temp_directory_path() / "mmxeval_protocol_cache.log";
  fs::remove(log);
  ProtocolOracle remote(stdio_endpoint({"--log", log.string()}));
  CachingOracle cache(remote);
  const auto vols = random_volumes(4, 7);
  const auto a = cache.predict(vols);
  const auto b = cache.predict(vols);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(a[i].probs, b[i].probs);
  EXPECT_EQ(cache.forwarded(), 4u);
}

TEST(Protocol, TcpTransport) {
  const fs::path port_file = fs::temp_directory_path() / "mmxeval_protocol_tcp.port";
  fs::remove(port_file);
  const std::string cmd = std::string("'") + MMXEVAL_FAKE_ORACLE + "' --listen 0 --port-file '" +
                          port_file.string() + "' --batch 3 --reorder 2 &";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  for (int i = 0; i < 200 && !fs::exists(port_file); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(25));
  }
  ASSERT_TRUE(fs::exists(port_file));
  int port = 0;
  std::ifstream(port_file) >> port;
  OracleEndpoint e;
  e.transport = Transport::kTcp;
  e.port = port;
  e.timeout_seconds = 10.0;
  ProtocolOracle remote(e);
  EXPECT_EQ(remote.info().batch_size, 3u);
  LinearOracle local(Tensor(kShape, 1.0f), 0.0);
  const auto vols = random_volumes(10, 8);
  const auto got = remote.predict(vols);
  const auto want = local.predict(vols);
  for (std::size_t i = 0; i < vols.size(); ++i) EXPECT_NEAR(got[i].probs[1], want[i].probs[1], 1e-12);
}

TEST(Protocol, TcpConnectionRefused) {
  OracleEndpoint e;
  e.transport = Transport::kTcp;
  e.port = 1;
  e.timeout_seconds = 2.0;
  EXPECT_THROW(ProtocolOracle{e}, OracleError);
}

}  // namespace
}  // namespace mmxeval
