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

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <optional>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "mmxeval/error.h"
#include "mmxeval/tensor_io.h"

namespace mmxeval {

using nlohmann::json;

class ProtocolOracle::Channel {
 public:
  Channel(int read_fd, int write_fd, pid_t pid, bool is_socket)
      : read_fd_(read_fd), write_fd_(write_fd), pid_(pid), is_socket_(is_socket) {}

  ~Channel() {
    if (is_socket_) {
      ::close(read_fd_);
      return;
    }
    ::close(write_fd_);
    ::close(read_fd_);
    if (pid_ > 0) {
      // EOF on stdin is the shutdown signal; give the child a moment.
      for (int i = 0; i < 100; ++i) {
        if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
    }
  }

  Channel(const Channel&) = delete;
  Channel& operator=(const Channel&) = delete;

  static std::unique_ptr<Channel> spawn(const std::vector<std::string>& argv) {
    if (argv.empty()) throw OracleError("subprocess endpoint: empty command");
    ::signal(SIGPIPE, SIG_IGN);
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0) throw OracleError(std::string("pipe: ") + std::strerror(errno));
    if (::pipe(from_child) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw OracleError(std::string("pipe: ") + std::strerror(errno));
    }
    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    const pid_t pid = ::fork();
    if (pid < 0) throw OracleError(std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execvp(cargv[0], cargv.data());
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    ::fcntl(to_child[1], F_SETFD, FD_CLOEXEC);
    ::fcntl(from_child[0], F_SETFD, FD_CLOEXEC);
    return std::make_unique<Channel>(from_child[0], to_child[1], pid, false);
  }

  static std::unique_ptr<Channel> connect(const std::string& host, int port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
      throw OracleError("tcp endpoint " + host + ":" + service + ": " + ::gai_strerror(rc));
    }
    int fd = -1;
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
      fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
      ::close(fd);
      fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0) throw OracleError("tcp endpoint " + host + ":" + service + ": connection failed");
    return std::make_unique<Channel>(fd, fd, -1, true);
  }

  void write_all(std::string_view data) {
    while (!data.empty()) {
      const ssize_t n = is_socket_ ? ::send(write_fd_, data.data(), data.size(), MSG_NOSIGNAL)
                                   : ::write(write_fd_, data.data(), data.size());
      if (n < 0) {
        if (errno == EINTR) continue;
        throw OracleError(std::string("endpoint write failed: ") + std::strerror(errno));
      }
      data.remove_prefix(static_cast<std::size_t>(n));
    }
  }

  std::string read_line(double timeout_seconds) {
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(timeout_seconds));
    for (;;) {
      if (auto pos = buffer_.find('\n'); pos != std::string::npos) {
        std::string line = buffer_.substr(0, pos);
        buffer_.erase(0, pos + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (remaining.count() <= 0) throw OracleError("timeout waiting for endpoint response");
      pollfd pfd{read_fd_, POLLIN, 0};
      const int rc = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw OracleError(std::string("poll: ") + std::strerror(errno));
      }
      if (rc == 0) throw OracleError("timeout waiting for endpoint response");
      char chunk[4096];
      const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw OracleError(std::string("endpoint read failed: ") + std::strerror(errno));
      }
      if (n == 0) throw OracleError("endpoint closed the connection");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int read_fd_;
  int write_fd_;
  pid_t pid_;
  bool is_socket_;
  std::string buffer_;
};

void OracleEndpoint::validate() const {
  if (batch_size < 1) throw ConfigError("oracle endpoint: batch size must be >= 1");
  if (max_in_flight < 1) throw ConfigError("oracle endpoint: max in-flight batches must be >= 1");
  if (!(timeout_seconds > 0.0)) throw ConfigError("oracle endpoint: timeout must be > 0");
  if (transport == Transport::kSubprocess && command.empty()) {
    throw ConfigError("oracle endpoint: subprocess transport needs a command");
  }
  if (transport == Transport::kTcp && (port <= 0 || port > 65535)) {
    throw ConfigError("oracle endpoint: tcp transport needs a port in 1..65535");
  }
}

std::string OracleEndpoint::describe() const {
  if (transport == Transport::kTcp) return "tcp:" + host + ":" + std::to_string(port);
  std::string s = "stdio:";
  for (std::size_t i = 0; i < command.size(); ++i) s += (i ? " " : "") + command[i];
  return s;
}

namespace {

std::atomic<unsigned> g_work_dir_counter{0};

std::string id_string(const json& id) { return id.is_string() ? id.get<std::string>() : id.dump(); }

}  // namespace

ProtocolOracle::ProtocolOracle(OracleEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  try {
    endpoint_.validate();
  } catch (const ConfigError& e) {
    throw OracleError(e.what());
  }
  channel_ = endpoint_.transport == Transport::kTcp
                 ? Channel::connect(endpoint_.host, endpoint_.port)
                 : Channel::spawn(endpoint_.command);

  json reply;
  try {
    channel_->write_all(json{{"op", "info"}}.dump() + "\n");
    reply = json::parse(channel_->read_line(endpoint_.timeout_seconds));
    info_.n_classes = reply.at("n_classes").get<std::size_t>();
    info_.input_shape = reply.at("input_shape").get<Shape>();
    info_.modalities = reply.at("modalities").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw OracleError("handshake failed with " + endpoint_.describe() + ": " + e.what());
  } catch (const OracleError& e) {
    throw OracleError("handshake failed with " + endpoint_.describe() + ": " + e.what());
  }
  if (info_.n_classes < 2) throw OracleError("handshake failed: n_classes must be >= 2");
  info_.batch_size = endpoint_.batch_size;
  if (auto it = reply.find("batch_size"); it != reply.end() && it->is_number_unsigned()) {
    info_.batch_size = std::max<std::size_t>(1, std::min(info_.batch_size, it->get<std::size_t>()));
  }
  info_.id = reply.contains("id") ? id_string(reply["id"]) : endpoint_.describe();

  if (endpoint_.work_dir.empty()) {
    work_dir_ = std::filesystem::temp_directory_path() /
                ("mmxeval-" + std::to_string(::getpid()) + "-" +
                 std::to_string(g_work_dir_counter++));
    owns_work_dir_ = true;
  } else {
    work_dir_ = endpoint_.work_dir;
  }
  std::filesystem::create_directories(work_dir_);
}

ProtocolOracle::~ProtocolOracle() {
  channel_.reset();
  if (owns_work_dir_) {
    std::error_code ec;
    std::filesystem::remove_all(work_dir_, ec);
  }
}

std::vector<Prediction> ProtocolOracle::predict(std::span<const Tensor> volumes) {
  if (!channel_) throw OracleError("endpoint unusable after an earlier protocol failure");
  struct Pending {
    std::size_t index;
    std::filesystem::path file;
  };
  std::vector<std::optional<Prediction>> results(volumes.size());
  std::unordered_map<std::string, Pending> outstanding;
  const std::size_t batch = info_.batch_size;
  const std::size_t window = batch * endpoint_.max_in_flight;

  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& [id, p] : outstanding) std::filesystem::remove(p.file, ec);
  };

  try {
    std::size_t next = 0;
    while (next < volumes.size() || !outstanding.empty()) {
      const std::size_t group = std::min(batch, volumes.size() - next);
      if (next < volumes.size() && outstanding.size() + group <= window) {
        std::string payload;
        for (std::size_t k = 0; k < group; ++k, ++next) {
          const std::string id = std::to_string(next_id_++);
          const auto file = work_dir_ / (id + ".mmxt");
          write_tensor(file, volumes[next]);
          payload += json{{"id", id}, {"op", "score"}, {"tensor_uri", file.string()}}.dump();
          payload += '\n';
          outstanding.emplace(id, Pending{next, file});
        }
        channel_->write_all(payload);
        continue;
      }

      const std::string line = channel_->read_line(endpoint_.timeout_seconds);
      json reply;
      try {
        reply = json::parse(line);
      } catch (const json::exception&) {
        throw OracleError("malformed response: not JSON: " + line.substr(0, 200));
      }
      if (!reply.is_object() || !reply.contains("id")) {
        throw OracleError("malformed response: missing id: " + line.substr(0, 200));
      }
      const std::string id = id_string(reply["id"]);
      auto it = outstanding.find(id);
      if (it == outstanding.end()) throw OracleError("malformed response: unknown id " + id);
      if (reply.contains("error")) {
        throw OracleError("endpoint error for request " + id + ": " + reply["error"].dump());
      }
      Prediction p;
      try {
        p.probs = reply.at("probs").get<Probabilities>();
        if (auto g = reply.find("gen_seconds"); g != reply.end() && !g->is_null()) {
          p.gen_seconds = g->get<double>();
        }
      } catch (const json::exception& e) {
        throw OracleError(std::string("malformed response: ") + e.what());
      }
      validate_probabilities(p.probs, info_.n_classes);
      results[it->second.index] = std::move(p);
      std::error_code ec;
      std::filesystem::remove(it->second.file, ec);
      outstanding.erase(it);
    }
  } catch (...) {
    cleanup();
    channel_.reset();
    throw;
  }

  std::vector<Prediction> out;
  out.reserve(results.size());
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

}  // namespace mmxeval
