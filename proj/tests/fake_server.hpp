/* Copyright 2026 The tibadv Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// In-process model server for HTTP tests. Serves the built-in mocks over the
// wire protocol, with switches for misbehaviour.

#ifndef TIBADV_TESTS_FAKE_SERVER_HPP_
#define TIBADV_TESTS_FAKE_SERVER_HPP_

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "tibadv/oracle.hpp"

namespace tibadv::testing {

class FakeModelServer {
 public:
  struct Faults {
    bool skew_probs = false;      // probabilities sum to 0.8
    bool echo_original = false;   // fill-mask returns the masked token first
    bool ascending_scores = false;
    bool extra_candidates = false;
    int classify_status = 200;    // non-200 returns an error envelope
    bool bad_json = false;
  };

  FakeModelServer() : FakeModelServer(Faults()) {}
  explicit FakeModelServer(Faults faults)
      : faults_(faults),
        classifier_(DefaultUnigramMockSpec()),
        masked_lm_(DefaultTableMockSpec()) {
    using nlohmann::json;
    server_.Get("/v1/info", [this](const httplib::Request&,
                                   httplib::Response& res) {
      ++info_calls;
      json info = InfoToJson(classifier_.Info());
      info["mask_literal"] = "[MASK]";
      res.set_content(info.dump(), "application/json");
    });
    server_.Post("/v1/classify", [this](const httplib::Request& req,
                                        httplib::Response& res) {
      ++classify_calls;
      if (faults_.classify_status != 200) {
        res.status = faults_.classify_status;
        res.set_content(
            R"({"error":{"code":"overloaded","message":"try later"}})",
            "application/json");
        return;
      }
      if (faults_.bad_json) {
        res.set_content("{not json", "application/json");
        return;
      }
      const json body = json::parse(req.body);
      json results = json::array();
      for (const json& text : body.at("texts")) {
        LabelDistribution dist =
            classifier_.ClassifyOne(text.get<std::string>());
        if (faults_.skew_probs) {
          for (double& p : dist.probs) p *= 0.8;
        }
        results.push_back({{"labels", dist.labels}, {"probs", dist.probs}});
      }
      last_batch_size = body.at("texts").size();
      res.set_content(json{{"results", results}}.dump(), "application/json");
    });
    server_.Post("/v1/fill-mask", [this](const httplib::Request& req,
                                         httplib::Response& res) {
      ++fill_mask_calls;
      const json body = json::parse(req.body);
      last_masked_text = body.at("text_with_mask").get<std::string>();
      const std::size_t k = body.at("top_k").get<std::size_t>();
      json candidates = json::array();
      if (faults_.echo_original) {
        candidates.push_back({{"token", echo_token}, {"score", 0.99}});
      }
      double score = 0.5;
      for (const WeightedToken& entry : masked_lm_.spec().syllables) {
        if (candidates.size() >= k) break;
        candidates.push_back({{"token", entry.token}, {"score", score}});
        score = faults_.ascending_scores ? score + 0.1 : score / 2;
      }
      if (faults_.extra_candidates) {
        candidates.push_back({{"token", "x"}, {"score", 0.0}});
      }
      res.set_content(json{{"candidates", candidates}}.dump(),
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FakeModelServer() {
    server_.stop();
    thread_.join();
  }

  FakeModelServer(const FakeModelServer&) = delete;
  FakeModelServer& operator=(const FakeModelServer&) = delete;

  std::string url() const {
    return "http://127.0.0.1:" + std::to_string(port_);
  }

  std::atomic<int> info_calls{0};
  std::atomic<int> classify_calls{0};
  std::atomic<int> fill_mask_calls{0};
  std::atomic<std::size_t> last_batch_size{0};
  std::string last_masked_text;
  // The first syllable of the probe text.
  std::string echo_token = "བཀྲ";

 private:
  Faults faults_;
  UnigramMockClassifier classifier_;
  TableMockMaskedLanguageModel masked_lm_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

// A port that had a listener a moment ago and now refuses connections.
inline int UnusedPort() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  socklen_t len = sizeof addr;
  int port = 0;
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0 &&
      ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0) {
    port = ntohs(addr.sin_port);
  }
  ::close(fd);
  return port;
}

}  // namespace tibadv::testing

#endif  // TIBADV_TESTS_FAKE_SERVER_HPP_
