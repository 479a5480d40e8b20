/*
 * Copyright 2026 The pregtte Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pregtte/design.hpp"
#include "pregtte/observation.hpp"
#include "pregtte/scm.hpp"

namespace pregtte {

// Tab-separated dataset files. Each starts with `# schema: <name>/<version>`
// followed by a fixed header row. Reals use round-trip precision and missing
// values are written as `NA`, so write -> read reproduces the records exactly.

inline constexpr const char* kTrajectoriesFile = "trajectories.tsv";
inline constexpr const char* kEncountersFile = "encounters.tsv";
inline constexpr const char* kObservedRecordsFile = "observed_records.tsv";
inline constexpr const char* kObservedEncountersFile = "observed_encounters.tsv";
inline constexpr const char* kWorldFile = "world.conf";

void write_trajectories(std::ostream& out, std::span<const Trajectory> trajectories);
void write_encounters(std::ostream& out, std::span<const Trajectory> trajectories);
void write_observed_records(std::ostream& out, std::span<const ObservedRecord> records);
void write_observed_encounters(std::ostream& out, std::span<const ObservedRecord> records);

/// Rebuilds trajectories from the person file and its encounter file.
/// Throws SchemaError with the offending line on malformed input.
std::vector<Trajectory> read_trajectories(std::istream& persons, const std::string& persons_source,
                                          std::istream& encounters, const std::string& encounters_source);
std::vector<ObservedRecord> read_observed(std::istream& records, const std::string& records_source,
                                          std::istream& encounters, const std::string& encounters_source);

/// Person-week rows of an analytic cohort (one line per member-week at risk).
void write_cohort_rows(std::ostream& out, const AnalyticCohort& cohort);

// Directory-level helpers.

std::string read_text_file(const std::filesystem::path& path);
/// Throws IoError when `path` exists and `force` is false, or on write failure.
void write_text_file(const std::filesystem::path& path, const std::string& content, bool force);

std::vector<Trajectory> load_trajectories(const std::filesystem::path& dir);
std::vector<ObservedRecord> load_observed(const std::filesystem::path& dir);
bool has_trajectories(const std::filesystem::path& dir);

}  // namespace pregtte
