// Test double for the external backend protocol. Generates by echoing the
// input text, scores 0 for a target equal to the input and 1 otherwise,
// always classifies as level 1. Flags provoke the failure paths:
//   --version N   announce protocol version N in the handshake
//   --misorder    answer every request with the wrong id
//   --hang        never answer anything
//   --garbage     answer requests with a non-JSON line
//   --fail-op OP  answer OP with ok=false

#include <iostream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

std::string strip_prefix(const std::string& input) {
  for (const char* p : {"simplify: ", "read classify: "}) {
    const std::string prefix(p);
    if (input.compare(0, prefix.size(), prefix) == 0) return input.substr(prefix.size());
  }
  return input;
}

}  // namespace

int main(int argc, char** argv) {
  int version = 1;
  bool misorder = false, hang = false, garbage = false;
  std::string fail_op;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--version" && i + 1 < argc) version = std::stoi(argv[++i]);
    else if (arg == "--misorder") misorder = true;
    else if (arg == "--hang") hang = true;
    else if (arg == "--garbage") garbage = true;
    else if (arg == "--fail-op" && i + 1 < argc) fail_op = argv[++i];
    else {
      std::cerr << "echo_backend: unknown argument " << arg << '\n';
      return 2;
    }
  }
  if (hang) {
    // Drain stdin so the parent never blocks on write; reply to nothing and
    // leave once the parent hangs up.
    std::string ignored;
    while (std::getline(std::cin, ignored)) {
    }
    return 0;
  }

  std::string line;
  while (std::getline(std::cin, line)) {
    json req;
    try {
      req = json::parse(line);
    } catch (const json::exception&) {
      std::cout << json{{"id", nullptr}, {"ok", false}, {"error", "bad_request"}}.dump() << std::endl;
      continue;
    }
    const auto op = req.value("op", std::string{});
    json resp = {{"id", req.value("id", -1)}, {"ok", true}, {"output", nullptr}, {"loss", nullptr},
                 {"label", nullptr},          {"error", nullptr}};
    if (op == "hello") {
      resp = {{"id", req.value("id", -1)},
              {"op", "hello"},
              {"version", version},
              {"ops", {"generate", "score", "classify", "train_step", "reset"}}};
      std::cout << resp.dump() << std::endl;
      continue;
    }
    if (garbage) {
      std::cout << "this is not json" << std::endl;
      continue;
    }
    if (misorder) resp["id"] = req.value("id", 0) + 1;

    const auto input = strip_prefix(req.value("input", std::string{}));
    if (op == fail_op) {
      resp["ok"] = false;
      resp["error"] = "forced_failure";
    } else if (op == "generate") {
      resp["output"] = input;
    } else if (op == "score") {
      const auto& t = req["target"];
      resp["loss"] = t.is_string() && t.get<std::string>() == input ? 0.0 : 1.0;
    } else if (op == "classify") {
      resp["label"] = 1;
    } else if (op == "train_step") {
      const auto& t = req["target"];
      resp["loss"] = t.is_string() && t.get<std::string>() == input ? 0.0 : 1.0;
    } else if (op == "reset") {
    } else {
      resp["ok"] = false;
      resp["error"] = "unsupported_op";
    }
    std::cout << resp.dump() << std::endl;
  }
  return 0;
}
