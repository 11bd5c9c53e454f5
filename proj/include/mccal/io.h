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

#ifndef MCCAL_IO_H_
#define MCCAL_IO_H_

#include <optional>
#include <string>

#include "json.hpp"
#include "mccal/evaluator.h"
#include "mccal/world.h"

namespace mccal {

// World document: {"k", "masses": [...], "conditionals": [[...]],
// "predictor": [[...]]}. "predictor" is optional on input.
nlohmann::json WorldToJson(const World& world, const Predictor* predictor);
World WorldFromJson(const nlohmann::json& doc);
// Reads the "predictor" table; throws InvalidArgument when absent.
Predictor PredictorFromJson(const nlohmann::json& doc);
nlohmann::json PredictorToJson(const Predictor& predictor);

nlohmann::json ReportToJson(const ErrorReport& report);

nlohmann::json ReadJsonFile(const std::string& path);
// Writes `doc.dump(2)` plus a trailing newline.
void WriteJsonFile(const std::string& path, const nlohmann::json& doc);
void WriteTextFile(const std::string& path, const std::string& text);

}  // namespace mccal

#endif  // MCCAL_IO_H_
