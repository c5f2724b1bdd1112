// Copyright 2026 The vacaug Authors
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

#include "vacaug/external_model.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <mutex>
#include <optional>
#include <regex>

#include "json.hpp"
#include "vacaug/errors.hpp"

namespace vacaug {

namespace {

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

class ChildProcess {
 public:
  explicit ChildProcess(const std::vector<std::string>& command) {
    if (command.empty()) throw ProtocolError("external model: empty command");
    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0 || ::pipe2(out_pipe, O_CLOEXEC) != 0) {
      throw ProtocolError(std::string("external model: pipe failed: ") + std::strerror(errno));
    }
    std::vector<char*> argv;
    for (const auto& a : command) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);

    pid_ = ::fork();
    if (pid_ < 0) throw ProtocolError(std::string("external model: fork failed: ") + std::strerror(errno));
    if (pid_ == 0) {
      ::dup2(in_pipe[0], STDIN_FILENO);
      ::dup2(out_pipe[1], STDOUT_FILENO);
      ::execvp(argv[0], argv.data());
      ::_exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    stdin_fd_ = in_pipe[1];
    stdout_fd_ = out_pipe[0];
    ::fcntl(stdin_fd_, F_SETFL, ::fcntl(stdin_fd_, F_GETFL) | O_NONBLOCK);
    ::fcntl(stdout_fd_, F_SETFL, ::fcntl(stdout_fd_, F_GETFL) | O_NONBLOCK);
  }

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  ~ChildProcess() {
    close_stdin();
    if (stdout_fd_ >= 0) ::close(stdout_fd_);
    if (pid_ > 0) {
      // Give a well-behaved child a moment to exit on EOF before killing it.
      for (int i = 0; i < 50; ++i) {
        if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
        ::usleep(2000);
      }
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
    }
  }

  void close_stdin() {
    if (stdin_fd_ >= 0) {
      ::close(stdin_fd_);
      stdin_fd_ = -1;
    }
  }

  /// Writes `payload` while collecting complete stdout lines until
  /// `expected_lines` have arrived. Returns the lines.
  std::vector<std::string> exchange(const std::string& payload, std::size_t expected_lines,
                                    std::chrono::milliseconds timeout, long first_id) {
    using clock = std::chrono::steady_clock;
    const auto deadline = clock::now() + timeout;
    std::size_t written = 0;
    std::vector<std::string> lines;
    while (lines.size() < expected_lines) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
      if (left.count() <= 0) {
        throw ProtocolError("external model: timed out waiting for reply to request id " +
                            std::to_string(first_id + static_cast<long>(lines.size())));
      }
      pollfd fds[2];
      nfds_t count = 0;
      fds[count++] = {stdout_fd_, POLLIN, 0};
      const bool writing = written < payload.size() && stdin_fd_ >= 0;
      if (writing) fds[count++] = {stdin_fd_, POLLOUT, 0};
      const int ready = ::poll(fds, count, static_cast<int>(std::min<long>(left.count(), 1000)));
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(std::string("external model: poll failed: ") + std::strerror(errno));
      }
      if (writing && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
        const ssize_t n = ::write(stdin_fd_, payload.data() + written, payload.size() - written);
        if (n > 0) {
          written += static_cast<std::size_t>(n);
        } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
          throw ProtocolError("external model: process closed its input before request id " +
                              std::to_string(first_id + static_cast<long>(lines.size())));
        }
      }
      if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
        char buf[65536];
        const ssize_t n = ::read(stdout_fd_, buf, sizeof buf);
        if (n > 0) {
          pending_.append(buf, static_cast<std::size_t>(n));
          std::size_t pos;
          while ((pos = pending_.find('\n')) != std::string::npos) {
            std::string line = pending_.substr(0, pos);
            pending_.erase(0, pos + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) lines.push_back(std::move(line));
          }
        } else if (n == 0) {
          throw ProtocolError("external model: process exited before replying to request id " +
                              std::to_string(first_id + static_cast<long>(lines.size())));
        } else if (errno != EAGAIN && errno != EINTR) {
          throw ProtocolError(std::string("external model: read failed: ") + std::strerror(errno));
        }
      }
    }
    return lines;
  }

 private:
  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  std::string pending_;
};

}  // namespace

std::vector<double> external_predict_batch(const ExternalEndpoint& endpoint,
                                           std::span<const FeatureVector> inputs) {
  ignore_sigpipe();
  std::vector<double> out(inputs.size());
  if (inputs.empty()) return out;
  ChildProcess child(endpoint.command);
  const std::size_t batch = std::max<std::size_t>(1, endpoint.max_batch);

  for (std::size_t start = 0; start < inputs.size(); start += batch) {
    const std::size_t len = std::min(batch, inputs.size() - start);
    std::string payload;
    for (std::size_t i = 0; i < len; ++i) {
      const nlohmann::json req = {{"id", start + i},
                                  {"features", std::vector<double>(inputs[start + i].begin(),
                                                                   inputs[start + i].end())}};
      payload += req.dump();
      payload += '\n';
    }
    payload += "{\"end\":true}\n";

    const auto lines = child.exchange(payload, len, endpoint.timeout, static_cast<long>(start));
    std::vector<bool> seen(len, false);
    for (const auto& line : lines) {
      nlohmann::json reply;
      try {
        reply = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception&) {
        // Overflowing numbers land here too; name the id when it is legible.
        static const std::regex id_field(R"re("id"\s*:\s*(-?[0-9]+))re");
        std::smatch m;
        if (std::regex_search(line, m, id_field)) {
          throw ProtocolError("external model: malformed or non-finite reply for request id " + m[1].str());
        }
        throw ProtocolError("external model: malformed reply '" + line.substr(0, 80) + "'");
      }
      if (!reply.is_object() || !reply.contains("id") || !reply["id"].is_number_integer()) {
        throw ProtocolError("external model: reply without integer id: '" + line.substr(0, 80) + "'");
      }
      const auto id = reply["id"].get<long long>();
      const std::string id_text = std::to_string(id);
      if (id < static_cast<long long>(start) || id >= static_cast<long long>(start + len)) {
        throw ProtocolError("external model: unexpected reply id " + id_text);
      }
      const auto slot = static_cast<std::size_t>(id) - start;
      if (seen[slot]) throw ProtocolError("external model: duplicate reply for request id " + id_text);
      if (!reply.contains("prediction") || !reply["prediction"].is_number()) {
        throw ProtocolError("external model: missing or non-numeric prediction for request id " + id_text);
      }
      const double value = reply["prediction"].get<double>();
      if (!std::isfinite(value)) {
        throw ProtocolError("external model: non-finite prediction for request id " + id_text);
      }
      seen[slot] = true;
      out[start + slot] = value;
    }
  }
  child.close_stdin();
  return out;
}

double ExternalModel::predict(std::span<const double> features) const {
  if (features.size() != kFeatureLength) {
    throw std::invalid_argument("expected " + std::to_string(kFeatureLength) + " features");
  }
  FeatureVector row{};
  std::copy(features.begin(), features.end(), row.begin());
  return external_predict_batch(endpoint_, std::span<const FeatureVector>(&row, 1)).front();
}

std::vector<double> ExternalModel::predict_batch(std::span<const FeatureVector> inputs,
                                                 std::size_t /*workers*/) const {
  return external_predict_batch(endpoint_, inputs);
}

}  // namespace vacaug
