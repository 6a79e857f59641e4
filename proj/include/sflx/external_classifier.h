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

#ifndef SFLX_EXTERNAL_CLASSIFIER_H_
#define SFLX_EXTERNAL_CLASSIFIER_H_

#include <sys/types.h>

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sflx/classifier.h"

namespace sflx {

// Client side of the sflx-bridge protocol: newline-delimited JSON over the
// child's stdin/stdout.
//
//   child -> parent, first line:
//     {"protocol":"sflx-bridge","version":1,"labels_are":"string"}
//   request:  {"id":<u64>,"width":w,"height":h,"channels":c,"pixels":[...]}
//   response: {"id":<u64>,"label":"<token>","score":<float, optional>}
//
// Responses may come back in any order and are matched by id. The child is
// expected to exit on stdin EOF. Any crash, timeout, or protocol violation
// raises kClassifierIo. Not thread safe: one owner drives the channel.
class ExternalProcessClassifier final : public Classifier {
 public:
  struct Options {
    bool memoize = true;
    int timeout_ms = 60000;  // per batch, while waiting on the child
  };

  // Runs `command` through /bin/sh -c and waits for the handshake.
  explicit ExternalProcessClassifier(std::string command);
  ExternalProcessClassifier(std::string command, Options options);
  ~ExternalProcessClassifier() override;

  ExternalProcessClassifier(const ExternalProcessClassifier&) = delete;
  ExternalProcessClassifier& operator=(const ExternalProcessClassifier&) = delete;

  Label Classify(const Raster& image) override;
  std::vector<Label> ClassifyBatch(std::span<const Raster> images) override;
  bool thread_safe() const override { return false; }
  std::string_view kind() const override { return "external-process"; }

  // Number of requests actually sent to the child (memo hits excluded).
  std::uint64_t requests_sent() const { return next_id_; }
  // Score reported with the most recent response, if any. Diagnostic only.
  std::optional<double> last_score() const { return last_score_; }

 private:
  struct Key {
    std::uint64_t a;
    std::uint64_t b;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return k.a ^ (k.b * 31); }
  };

  void Spawn();
  void Shutdown();
  std::string ReadLine(int timeout_ms);
  void Exchange(const std::vector<std::string>& requests,
                const std::vector<std::uint64_t>& ids,
                std::vector<Label>& labels);
  [[noreturn]] void Fail(const std::string& message);

  std::string command_;
  Options options_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string read_buffer_;
  std::uint64_t next_id_ = 0;
  std::optional<double> last_score_;
  std::unordered_map<Key, Label, KeyHash> memo_;
};

}  // namespace sflx

#endif  // SFLX_EXTERNAL_CLASSIFIER_H_
