// Copyright 2026 The sagald Authors.
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

#include <iosfwd>
#include <string_view>

#include <nlohmann/json.hpp>

#include "sagald/coupling.hpp"
#include "sagald/stats.hpp"

namespace sagald {

// CSV writers. Each file opens with "# config_hash=<hex>" when a hash is
// given, then a header row; numbers use 17 significant digits.

void write_moments_csv(std::ostream& os, const MomentSeries& s,
                       std::string_view config_hash = {});
void write_coupling_csv(std::ostream& os, const MeetProbReport& r,
                        std::string_view config_hash = {});
void write_mixing_csv(std::ostream& os, const MixingReport& r,
                      std::string_view config_hash = {});
void write_lln_csv(std::ostream& os, const LlnReport& r,
                   std::string_view config_hash = {});
void write_tv_csv(std::ostream& os, const TvScanReport& r,
                  std::string_view config_hash = {});

nlohmann::json to_json(const MomentSeries& s);
nlohmann::json to_json(const MeetProbReport& r);
nlohmann::json to_json(const RecursionCheck& c);
nlohmann::json to_json(const NZero& n);
nlohmann::json to_json(const MixingReport& r);
nlohmann::json to_json(const LlnReport& r);
nlohmann::json to_json(const TvScanReport& r);
nlohmann::json to_json(const MinorizationReport& r);
nlohmann::json to_json(const AssumptionReport& r);

/// Quantiles of the meeting step over replications that met, keyed "q10",
/// "q50", "q90"; null when fewer than one replication met.
nlohmann::json meet_quantiles(const MeetProbReport& r);

}  // namespace sagald
