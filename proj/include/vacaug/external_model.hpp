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

#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "vacaug/models.hpp"

namespace vacaug {

/// How to start an external model process.
struct ExternalEndpoint {
  std::vector<std::string> command;  // argv; command[0] is looked up on PATH
  std::chrono::milliseconds timeout{30000};  // per batch
  std::size_t max_batch = 1024;
};

/// Sends `inputs` to a freshly started process, in batches of at most
/// `max_batch` request lines each followed by {"end": true}, and returns one
/// prediction per input in input order. Any misbehaviour (early exit,
/// timeout, malformed or non-finite reply, id mismatch) throws ProtocolError
/// naming the offending request id where one is known.
std::vector<double> external_predict_batch(const ExternalEndpoint& endpoint,
                                           std::span<const FeatureVector> inputs);

/// Regressor view over an external process.
class ExternalModel final : public Regressor {
 public:
  explicit ExternalModel(ExternalEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

  [[nodiscard]] std::string kind_name() const override { return "external"; }
  [[nodiscard]] double predict(std::span<const double> features) const override;
  [[nodiscard]] std::vector<double> predict_batch(std::span<const FeatureVector> inputs,
                                                  std::size_t workers = 1) const override;
  [[nodiscard]] const ExternalEndpoint& endpoint() const { return endpoint_; }

 private:
  ExternalEndpoint endpoint_;
};

}  // namespace vacaug
