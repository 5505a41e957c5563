#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "simdoc/backend.hpp"
#include "simdoc/error.hpp"

namespace simdoc {

using nlohmann::json;

std::string wire_text(const Document& doc) {
  std::string out;
  for (const auto& s : doc.sentences) {
    if (s.is_pad) continue;
    if (!out.empty()) out += '\n';
    out += s.text;
  }
  return out;
}

Document from_wire_text(const std::string& text, std::size_t frame, std::string id) {
  if (text.find('\n') == std::string::npos) return make_document(text, frame, std::move(id));
  std::vector<Sentence> sentences;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    const auto line = text.substr(start, nl - start);
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      for (auto& s : split_sentences(line)) sentences.push_back(std::move(s));
    }
    start = nl + 1;
  }
  if (sentences.empty()) fail(ErrorCode::EmptyText, "backend returned empty text");
  return frame_document(sentences, frame, std::move(id));
}

ExternalBackend::ExternalBackend(const std::string& command, ExternalOptions options) : options_(std::move(options)) {
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0) fail(ErrorCode::BackendUnavailable, std::string("pipe: ") + std::strerror(errno));
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    fail(ErrorCode::BackendUnavailable, std::string("pipe: ") + std::strerror(errno));
  }
  // A dead child must surface as an error on write, not terminate us.
  signal(SIGPIPE, SIG_IGN);

  pid_ = fork();
  if (pid_ < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
    fail(ErrorCode::BackendUnavailable, std::string("fork: ") + std::strerror(errno));
  }
  if (pid_ == 0) {
    // Own process group, so a kill also reaches whatever the shell spawned.
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid_, pid_);  // also from the parent, so the group exists before any kill
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];

  try {
    json hello = {{"id", 0}, {"op", "hello"}, {"version", kProtocolVersion}};
    send_line(hello.dump());
    const auto line = read_line(options_.handshake_timeout);
    json resp;
    try {
      resp = json::parse(line);
    } catch (const json::exception&) {
      fail(ErrorCode::ProtocolViolation, "handshake response is not JSON");
    }
    if (!resp.is_object() || !resp.contains("version") || !resp["version"].is_number_integer()) {
      fail(ErrorCode::ProtocolViolation, "handshake response lacks a version");
    }
    remote_version_ = resp["version"].get<int>();
    if (remote_version_ != kProtocolVersion) {
      fail(ErrorCode::ProtocolViolation, "protocol version mismatch: local " + std::to_string(kProtocolVersion) +
                                             ", backend " + std::to_string(remote_version_));
    }
    if (resp.value("id", -1) != 0) fail(ErrorCode::ProtocolViolation, "handshake id not echoed");
    if (resp.contains("ops") && resp["ops"].is_array()) {
      for (const auto& op : resp["ops"]) {
        if (op.is_string()) ops_.push_back(op.get<std::string>());
      }
    }
  } catch (...) {
    shutdown();
    throw;
  }
}

ExternalBackend::~ExternalBackend() { shutdown(); }

void ExternalBackend::shutdown() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (waitpid(pid_, &status, WNOHANG) == pid_) {
        kill(-pid_, SIGKILL);  // stragglers left behind by the shell
        pid_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    kill(-pid_, SIGKILL);
    waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

void ExternalBackend::send_line(const std::string& line) {
  if (to_child_ < 0) fail(ErrorCode::BackendUnavailable, "backend is closed");
  std::string data = line + '\n';
  std::size_t off = 0;
  while (off < data.size()) {
    const auto n = write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::BackendUnavailable, std::string("write to backend failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string ExternalBackend::read_line(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      auto line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) fail(ErrorCode::BackendUnavailable, "backend timed out");
    pollfd pfd{from_child_, POLLIN, 0};
    const int rc = poll(&pfd, 1, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::BackendUnavailable, std::string("poll failed: ") + std::strerror(errno));
    }
    if (rc == 0) fail(ErrorCode::BackendUnavailable, "backend timed out");
    char chunk[4096];
    const auto n = read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::BackendUnavailable, std::string("read failed: ") + std::strerror(errno));
    }
    if (n == 0) fail(ErrorCode::BackendUnavailable, "backend closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

json ExternalBackend::request(const std::string& op, Task task, const std::string& input, const json& target,
                              const json& extra_config) {
  const long id = next_id_++;
  json config = options_.config;
  for (const auto& [k, v] : extra_config.items()) config[k] = v;
  json req;
  req["id"] = id;
  req["op"] = op;
  req["task"] = task_name(task);
  req["input"] = input;
  req["target"] = target;
  req["config"] = config;
  send_line(req.dump());

  json resp;
  try {
    resp = json::parse(read_line(options_.request_timeout));
  } catch (const json::exception&) {
    fail(ErrorCode::ProtocolViolation, "response to request " + std::to_string(id) + " is not JSON");
  }
  if (!resp.is_object() || !resp.contains("id") || !resp["id"].is_number_integer() || !resp.contains("ok") ||
      !resp["ok"].is_boolean()) {
    fail(ErrorCode::ProtocolViolation, "malformed response to request " + std::to_string(id));
  }
  if (resp["id"].get<long>() != id) {
    fail(ErrorCode::ProtocolViolation,
         "response id " + std::to_string(resp["id"].get<long>()) + " does not match request " + std::to_string(id));
  }
  if (!resp["ok"].get<bool>()) {
    const auto err = resp.contains("error") && resp["error"].is_string() ? resp["error"].get<std::string>() : "unknown";
    fail(ErrorCode::ProtocolViolation, "backend rejected " + op + ": " + err);
  }
  return resp;
}

Document ExternalBackend::generate(const Document& doc) {
  require(doc.real_sentence_count() > 0, "cannot simplify an empty document");
  const auto resp = request("generate", Task::Simplify, format_control_input(Task::Simplify, wire_text(doc)), nullptr);
  if (!resp.contains("output") || !resp["output"].is_string()) {
    fail(ErrorCode::ProtocolViolation, "generate response has no output text");
  }
  return from_wire_text(resp["output"].get<std::string>(), options_.frame, doc.id);
}

double ExternalBackend::score(Task task, const Document& input, const ScoreTarget& target) {
  json t;
  if (const auto* d = std::get_if<Document>(&target)) {
    t = wire_text(*d);
  } else {
    t = std::get<int>(target);
  }
  const auto resp = request("score", task, format_control_input(task, wire_text(input)), t);
  if (!resp.contains("loss") || !resp["loss"].is_number()) fail(ErrorCode::ProtocolViolation, "score response has no loss");
  const double loss = resp["loss"].get<double>();
  if (!(loss >= 0.0)) fail(ErrorCode::ProtocolViolation, "score response has a negative loss");
  return loss;
}

int ExternalBackend::classify(const Document& doc) {
  const auto resp =
      request("classify", Task::ReadClassify, format_control_input(Task::ReadClassify, wire_text(doc)), nullptr);
  if (!resp.contains("label") || !resp["label"].is_number_integer()) {
    fail(ErrorCode::ProtocolViolation, "classify response has no integer label");
  }
  const int label = resp["label"].get<int>();
  if (label < 1 || label > 4) fail(ErrorCode::ProtocolViolation, "label " + std::to_string(label) + " outside [1,4]");
  return label;
}

void ExternalBackend::update(const SimplificationInstance& sample, double gate, const LossConfig& config) {
  json extra = {{"gate", gate}, {"mode", loss_mode_name(config.mode)}, {"delta", config.delta}};
  extra["readability_label"] = sample.readability_label ? json(*sample.readability_label) : json(nullptr);
  request("train_step", Task::Simplify, format_control_input(Task::Simplify, wire_text(sample.source)),
          wire_text(sample.target), extra);
}

void ExternalBackend::reset() { request("reset", Task::Simplify, "simplify: reset", nullptr); }

std::unique_ptr<Backend> spawn_external(const std::string& command, ExternalOptions options) {
  return std::make_unique<ExternalBackend>(command, std::move(options));
}

}  // namespace simdoc
