// Copyright 2026 The mccal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mccal/io.h"

#include <fstream>
#include <sstream>

#include "mccal/errors.h"

namespace mccal {
namespace {

std::vector<ProbVector> RowsFromJson(const nlohmann::json& rows,
                                     const char* field) {
  if (!rows.is_array()) {
    throw InvalidArgument(std::string(field) + " must be an array of rows");
  }
  std::vector<ProbVector> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    out.emplace_back(row.get<std::vector<double>>());
  }
  return out;
}

nlohmann::json RowsToJson(const std::vector<ProbVector>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : rows) out.push_back(row.coords());
  return out;
}

}  // namespace

nlohmann::json WorldToJson(const World& world, const Predictor* predictor) {
  nlohmann::json doc;
  doc["k"] = world.k();
  doc["masses"] = world.masses();
  doc["conditionals"] = RowsToJson(world.conditionals());
  if (predictor) doc["predictor"] = RowsToJson(predictor->table());
  return doc;
}

World WorldFromJson(const nlohmann::json& doc) {
  try {
    World world(doc.at("masses").get<std::vector<double>>(),
                RowsFromJson(doc.at("conditionals"), "conditionals"));
    if (doc.contains("k") && doc.at("k").get<size_t>() != world.k()) {
      throw InvalidArgument("declared k does not match the conditionals");
    }
    return world;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed world document: ") + e.what());
  }
}

Predictor PredictorFromJson(const nlohmann::json& doc) {
  if (!doc.contains("predictor")) {
    throw InvalidArgument("document has no predictor table");
  }
  try {
    return Predictor(RowsFromJson(doc.at("predictor"), "predictor"));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed predictor: ") + e.what());
  }
}

nlohmann::json PredictorToJson(const Predictor& predictor) {
  nlohmann::json doc;
  doc["k"] = predictor.k();
  doc["predictor"] = RowsToJson(predictor.table());
  return doc;
}

nlohmann::json ReportToJson(const ErrorReport& report) {
  nlohmann::json doc;
  doc["lambda"] = report.lambda;
  nlohmann::json norms = nlohmann::json::object();
  for (const auto& [p, value] : report.norms) norms[p.ToString()] = value;
  doc["err_p"] = norms;
  doc["max_bin_error"] = report.MaxError();
  doc["sq_error_h"] = report.sq_error_h;
  if (report.sq_error_f) doc["sq_error_f"] = *report.sq_error_f;
  nlohmann::json table = nlohmann::json::array();
  for (const auto& e : report.table) {
    table.push_back({{"bin", e.bin.numerators()}, {"class", e.j}, {"error", e.error}});
  }
  doc["table"] = table;
  return doc;
}

nlohmann::json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("cannot parse " + path + ": " + e.what());
  }
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
}

void WriteJsonFile(const std::string& path, const nlohmann::json& doc) {
  WriteTextFile(path, doc.dump(2) + "\n");
}

}  // namespace mccal
