// Copyright 2026 The sflx Authors
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

#include "sflx/external_classifier.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "json.hpp"
#include "sflx/errors.h"

extern char** environ;

namespace sflx {
namespace {

using Clock = std::chrono::steady_clock;

constexpr const char* kProtocol = "sflx-bridge";
constexpr int kProtocolVersion = 1;

// Blocks SIGPIPE on the calling thread for the lifetime of the guard so a
// dead child surfaces as EPIPE instead of killing the process. A SIGPIPE that
// became pending meanwhile is consumed before unblocking.
class SigpipeGuard {
 public:
  SigpipeGuard() {
    sigemptyset(&set_);
    sigaddset(&set_, SIGPIPE);
    pthread_sigmask(SIG_BLOCK, &set_, &old_);
  }
  ~SigpipeGuard() {
    sigset_t pending;
    sigpending(&pending);
    if (sigismember(&pending, SIGPIPE)) {
      const timespec zero{0, 0};
      sigtimedwait(&set_, nullptr, &zero);
    }
    pthread_sigmask(SIG_SETMASK, &old_, nullptr);
  }

 private:
  sigset_t set_;
  sigset_t old_;
};

std::uint64_t Fnv1a(std::span<const std::uint8_t> bytes, std::uint64_t h) {
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t MixHash(std::span<const std::uint8_t> bytes, std::uint64_t h) {
  for (std::uint8_t b : bytes) {
    h = (h ^ b) * 0x9e3779b97f4a7c15ULL;
    h ^= h >> 29;
  }
  return h;
}

std::string EncodeRequest(std::uint64_t id, const Raster& image) {
  std::string line;
  line.reserve(64 + image.data().size() * 4);
  line += "{\"id\":" + std::to_string(id) +
          ",\"width\":" + std::to_string(image.width()) +
          ",\"height\":" + std::to_string(image.height()) +
          ",\"channels\":" + std::to_string(image.channels()) + ",\"pixels\":[";
  bool first = true;
  for (std::uint8_t v : image.data()) {
    if (!first) line += ',';
    first = false;
    line += std::to_string(v);
  }
  line += "]}\n";
  return line;
}

}  // namespace

ExternalProcessClassifier::ExternalProcessClassifier(std::string command)
    : ExternalProcessClassifier(std::move(command), Options{}) {}

ExternalProcessClassifier::ExternalProcessClassifier(std::string command,
                                                     Options options)
    : command_(std::move(command)), options_(options) {
  Spawn();
}

ExternalProcessClassifier::~ExternalProcessClassifier() { Shutdown(); }

void ExternalProcessClassifier::Fail(const std::string& message) {
  Shutdown();
  throw Error(ErrorCode::kClassifierIo, "external classifier: " + message);
}

void ExternalProcessClassifier::Spawn() {
  int in_pipe[2];
  int out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw Error(ErrorCode::kClassifierIo, "pipe: " + std::string(strerror(errno)));
  }
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw Error(ErrorCode::kClassifierIo, "pipe: " + std::string(strerror(errno)));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  const char* argv[] = {"/bin/sh", "-c", command_.c_str(), nullptr};
  const int rc = posix_spawn(&pid_, "/bin/sh", &actions, nullptr,
                             const_cast<char* const*>(argv), environ);
  posix_spawn_file_actions_destroy(&actions);
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  if (rc != 0) {
    pid_ = -1;
    Fail("cannot spawn '" + command_ + "': " + strerror(rc));
  }
  fcntl(to_child_, F_SETFL, fcntl(to_child_, F_GETFL) | O_NONBLOCK);
  fcntl(from_child_, F_SETFL, fcntl(from_child_, F_GETFL) | O_NONBLOCK);

  const std::string line = ReadLine(options_.timeout_ms);
  nlohmann::json hello;
  try {
    hello = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    Fail("handshake is not JSON: '" + line + "'");
  }
  if (!hello.is_object() || hello.value("protocol", "") != kProtocol ||
      hello.value("version", -1) != kProtocolVersion ||
      hello.value("labels_are", "") != "string") {
    Fail("unexpected handshake: " + line);
  }
}

void ExternalProcessClassifier::Shutdown() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    // Give the child a moment to exit on EOF before killing it.
    const auto deadline = Clock::now() + std::chrono::seconds(2);
    int status = 0;
    while (waitpid(pid_, &status, WNOHANG) == 0) {
      if (Clock::now() > deadline) {
        kill(pid_, SIGKILL);
        waitpid(pid_, &status, 0);
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    pid_ = -1;
  }
}

std::string ExternalProcessClassifier::ReadLine(int timeout_ms) {
  const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
  for (;;) {
    const auto nl = read_buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = read_buffer_.substr(0, nl);
      read_buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (left.count() <= 0) Fail("timed out waiting for the child");
    pollfd fd{from_child_, POLLIN, 0};
    const int rc = poll(&fd, 1, static_cast<int>(left.count()));
    if (rc < 0 && errno != EINTR) Fail(std::string("poll: ") + strerror(errno));
    if (rc <= 0) continue;
    char buf[65536];
    const ssize_t got = read(from_child_, buf, sizeof buf);
    if (got == 0) Fail("child closed its output");
    if (got < 0) {
      if (errno == EAGAIN || errno == EINTR) continue;
      Fail(std::string("read: ") + strerror(errno));
    }
    read_buffer_.append(buf, static_cast<std::size_t>(got));
  }
}

void ExternalProcessClassifier::Exchange(
    const std::vector<std::string>& requests,
    const std::vector<std::uint64_t>& ids, std::vector<Label>& labels) {
  if (pid_ < 0) Fail("channel is closed after an earlier failure");
  SigpipeGuard guard;
  const auto deadline =
      Clock::now() + std::chrono::milliseconds(options_.timeout_ms);
  std::size_t request = 0;
  std::size_t offset = 0;
  std::size_t answered = 0;
  std::vector<bool> done(ids.size(), false);
  const std::uint64_t first_id = ids.empty() ? 0 : ids.front();

  auto handle_line = [&](const std::string& line) {
    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      Fail("response is not JSON: '" + line.substr(0, 200) + "'");
    }
    if (!reply.is_object()) Fail("response is not an object");
    if (reply.contains("error")) Fail("child reported: " + reply["error"].dump());
    if (!reply.contains("id") || !reply["id"].is_number_unsigned()) {
      Fail("response without a valid id: " + line.substr(0, 200));
    }
    if (!reply.contains("label") || !reply["label"].is_string()) {
      Fail("response without a string label: " + line.substr(0, 200));
    }
    const std::uint64_t id = reply["id"].get<std::uint64_t>();
    if (id < first_id || id - first_id >= ids.size()) {
      Fail("response for unknown id " + std::to_string(id));
    }
    const std::size_t slot = id - first_id;
    if (done[slot]) Fail("duplicate response for id " + std::to_string(id));
    done[slot] = true;
    labels[slot] = reply["label"].get<std::string>();
    if (reply.contains("score") && reply["score"].is_number()) {
      last_score_ = reply["score"].get<double>();
    } else {
      last_score_.reset();
    }
    ++answered;
  };

  while (answered < ids.size()) {
    std::size_t nl;
    while ((nl = read_buffer_.find('\n')) != std::string::npos) {
      const std::string line = read_buffer_.substr(0, nl);
      read_buffer_.erase(0, nl + 1);
      handle_line(line);
    }
    if (answered == ids.size()) break;

    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (left.count() <= 0) Fail("timed out waiting for responses");
    pollfd fds[2] = {{from_child_, POLLIN, 0}, {to_child_, POLLOUT, 0}};
    const bool writing = request < requests.size();
    const int rc = poll(fds, writing ? 2 : 1, static_cast<int>(left.count()));
    if (rc < 0 && errno != EINTR) Fail(std::string("poll: ") + strerror(errno));
    if (rc <= 0) continue;

    if (writing && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const std::string& text = requests[request];
      const ssize_t put =
          write(to_child_, text.data() + offset, text.size() - offset);
      if (put < 0) {
        if (errno != EAGAIN && errno != EINTR) {
          Fail(std::string("child stopped reading requests: ") + strerror(errno));
        }
      } else {
        offset += static_cast<std::size_t>(put);
        if (offset == text.size()) {
          ++request;
          offset = 0;
        }
      }
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      char buf[65536];
      const ssize_t got = read(from_child_, buf, sizeof buf);
      if (got == 0) Fail("child exited before answering all requests");
      if (got < 0 && errno != EAGAIN && errno != EINTR) {
        Fail(std::string("read: ") + strerror(errno));
      }
      if (got > 0) read_buffer_.append(buf, static_cast<std::size_t>(got));
    }
  }
}

Label ExternalProcessClassifier::Classify(const Raster& image) {
  return ClassifyBatch(std::span<const Raster>(&image, 1)).front();
}

std::vector<Label> ExternalProcessClassifier::ClassifyBatch(
    std::span<const Raster> images) {
  std::vector<Label> labels(images.size());
  std::vector<Key> keys(images.size());
  std::vector<std::string> requests;
  std::vector<std::uint64_t> ids;
  std::vector<std::size_t> slots;  // request -> position in `images`
  std::unordered_map<Key, std::size_t, KeyHash> pending;
  std::vector<std::pair<std::size_t, std::size_t>> duplicates;

  for (std::size_t i = 0; i < images.size(); ++i) {
    const Raster& image = images[i];
    const std::uint8_t dims[] = {
        static_cast<std::uint8_t>(image.width()),
        static_cast<std::uint8_t>(image.width() >> 8),
        static_cast<std::uint8_t>(image.height()),
        static_cast<std::uint8_t>(image.height() >> 8),
        static_cast<std::uint8_t>(image.channels())};
    keys[i] = {Fnv1a(image.data(), Fnv1a(dims, 0xcbf29ce484222325ULL)),
               MixHash(image.data(), MixHash(dims, 0x2545f4914f6cdd1dULL))};
    if (options_.memoize) {
      if (const auto hit = memo_.find(keys[i]); hit != memo_.end()) {
        labels[i] = hit->second;
        continue;
      }
      if (const auto dup = pending.find(keys[i]); dup != pending.end()) {
        duplicates.emplace_back(i, dup->second);
        continue;
      }
      pending.emplace(keys[i], i);
    }
    ids.push_back(next_id_++);
    requests.push_back(EncodeRequest(ids.back(), image));
    slots.push_back(i);
  }

  std::vector<Label> answers(ids.size());
  Exchange(requests, ids, answers);
  for (std::size_t r = 0; r < slots.size(); ++r) {
    labels[slots[r]] = answers[r];
    if (options_.memoize) memo_.emplace(keys[slots[r]], answers[r]);
  }
  for (const auto& [i, source] : duplicates) labels[i] = labels[source];
  return labels;
}

}  // namespace sflx
