// Copyright 2026 The SKIM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SKIM_FILE_UTIL_H_
#define SKIM_FILE_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace skim {

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partial file. Throws IoError.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view contents);

// Throws IoError when the file cannot be read.
std::string ReadFile(const std::filesystem::path& path);

// printf("%.9g").
std::string FormatFloat(double value);

}  // namespace skim

#endif  // SKIM_FILE_UTIL_H_
