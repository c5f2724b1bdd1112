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

#include "vacaug/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "vacaug/data_io.hpp"

namespace fs = std::filesystem;

namespace vacaug {

nlohmann::json to_json(const RobustnessReport& r) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& e : r.entries) {
    nlohmann::json block = {{"model", e.model},
                            {"regime", e.regime},
                            {"kind", e.kind},
                            {"hyperparams", e.hyperparams},
                            {"train_rows", e.train_rows},
                            {"test_rows", e.test_rows},
                            {"metrics", e.results},
                            {"verdict", e.verdict}};
    if (e.transfer) {
      block["transfer"] = {{"mae", e.transfer->mae}, {"r2", e.transfer->r2}, {"linf", e.transfer->linf_gt}};
    }
    models.push_back(std::move(block));
  }
  nlohmann::json ranking = nlohmann::json::array();
  for (const auto& m : r.ranking) {
    ranking.push_back({{"model", m.name}, {"rank", m.rank}, {"main", m.verdict.main ? "pass" : "fail"}});
  }
  return {{"thresholds", r.thresholds},
          {"dictionary_hash", r.dictionary_hash},
          {"seeds", r.seeds},
          {"models", std::move(models)},
          {"ranking", std::move(ranking)}};
}

void write_report(const fs::path& out_dir, const RobustnessReport& r) {
  write_json(out_dir / "report.json", to_json(r));
  const fs::path plots = out_dir / "plots";
  fs::create_directories(plots);
  for (const auto& e : r.entries) {
    std::ofstream out(plots / (e.model + "_" + e.regime + ".csv"));
    out << "actual,predicted\n";
    for (std::size_t i = 0; i < e.actual.size(); ++i) {
      out << format_decimal(e.actual[i]) << ',' << format_decimal(e.predicted[i]) << '\n';
    }
  }
}

void print_report(const nlohmann::json& report, std::ostream& out) {
  std::map<std::string, int> rank;
  for (const auto& r : report.at("ranking")) rank[r.at("model").get<std::string>()] = r.at("rank").get<int>();

  char line[256];
  std::snprintf(line, sizeof line, "%-24s %8s %7s %8s %8s %10s %4s  %-4s %-4s %-4s  %-4s %4s\n", "model",
                "MAE", "R2", "linf", "aug linf", "log10 Vt", "d", "O1", "O2", "O3", "main", "rank");
  out << line;
  for (const auto& m : report.at("models")) {
    const auto& x = m.at("metrics");
    const auto& v = m.at("verdict");
    const std::string key = m.at("model").get<std::string>() + " (" + m.at("regime").get<std::string>() + ")";
    const auto& lv = x.at("log10_v_t");
    const int rk = rank.count(key) ? rank[key] : 0;
    std::snprintf(line, sizeof line, "%-24s %8.3f %7.3f %8.3f %8.3f %10s %4d  %-4s %-4s %-4s  %-4s %4s\n",
                  key.c_str(), x.at("mae").get<double>(), x.at("r2").get<double>(),
                  x.at("linf_gt").get<double>(), x.at("linf_aug").get<double>(),
                  lv.is_null() ? "-inf" : std::to_string(lv.get<double>()).substr(0, 9).c_str(),
                  x.at("d_effective").get<int>(), v.at("oracle1").get<std::string>().c_str(),
                  v.at("oracle2").get<std::string>().c_str(), v.at("oracle3").get<std::string>().c_str(),
                  v.at("main").get<std::string>().c_str(), rk > 0 ? std::to_string(rk).c_str() : "-");
    out << line;
  }
}

}  // namespace vacaug
