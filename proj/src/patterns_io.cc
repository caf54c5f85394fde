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

#include <algorithm>
#include <charconv>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "skim/errors.h"
#include "skim/file_util.h"
#include "skim/patterns.h"

namespace skim {

namespace {

// Line-oriented tokenizer that tracks line numbers and skips blank lines.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Tokens of the next non-blank line; false at end of input.
  bool Next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      tokens.clear();
      std::istringstream ss(line);
      std::string tok;
      while (ss >> tok) tokens.push_back(tok);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  void Expect(std::vector<std::string>& tokens, const char* what) {
    if (!Next(tokens)) {
      throw ParseError(std::string("unexpected end of input, expected ") +
                           what,
                       line_ + 1);
    }
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
};

int ToInt(const std::string& token, int line) {
  int value = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("expected an integer, got '" + token + "'", line);
  }
  return value;
}

void ExpectCount(const std::vector<std::string>& tokens, size_t n,
                 const char* form, int line) {
  if (tokens.size() != n) {
    throw ParseError(std::string("expected '") + form + "'", line);
  }
}

void ExpectKeyword(const std::string& token, const char* keyword, int line) {
  if (token != keyword) {
    throw ParseError(std::string("expected '") + keyword + "', got '" + token +
                         "'",
                     line);
  }
}

std::vector<SpikeEvent> ReadEvents(LineReader& reader, int count,
                                   int num_channels, int num_steps) {
  std::vector<SpikeEvent> events;
  std::vector<std::string> tokens;
  for (int n = 0; n < count; ++n) {
    reader.Expect(tokens, "an event line");
    ExpectCount(tokens, 2, "channel time", reader.line());
    const SpikeEvent e{ToInt(tokens[0], reader.line()),
                       ToInt(tokens[1], reader.line())};
    if (e.channel < 0 || e.channel >= num_channels || e.time < 0 ||
        e.time >= num_steps) {
      throw ValidationError("line " + std::to_string(reader.line()) +
                            ": event (" + tokens[0] + ", " + tokens[1] +
                            ") outside " + std::to_string(num_channels) +
                            " channels x " + std::to_string(num_steps) +
                            " steps");
    }
    events.push_back(e);
  }
  std::vector<SpikeEvent> sorted = events;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("line " + std::to_string(reader.line()) +
                          ": duplicate spike event");
  }
  return events;
}

void WriteEvents(const SpikeRaster& raster, std::ostream& out) {
  for (const SpikeEvent& e : raster.events()) {
    out << e.channel << ' ' << e.time << '\n';
  }
}

void RequireNoTrailing(LineReader& reader) {
  std::vector<std::string> tokens;
  if (reader.Next(tokens)) {
    throw ParseError("unexpected trailing content", reader.line());
  }
}

}  // namespace

SpikeRaster ReadRaster(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string> tokens;
  reader.Expect(tokens, "header 'L K'");
  ExpectCount(tokens, 2, "L K", reader.line());
  const int channels = ToInt(tokens[0], reader.line());
  const int steps = ToInt(tokens[1], reader.line());
  if (channels < 1 || steps < 0) {
    throw ParseError("header needs L >= 1 and K >= 0", reader.line());
  }
  std::vector<SpikeEvent> events;
  while (reader.Next(tokens)) {
    ExpectCount(tokens, 2, "channel time", reader.line());
    const SpikeEvent e{ToInt(tokens[0], reader.line()),
                       ToInt(tokens[1], reader.line())};
    if (e.channel < 0 || e.channel >= channels || e.time < 0 ||
        e.time >= steps) {
      throw ValidationError("line " + std::to_string(reader.line()) +
                            ": event (" + tokens[0] + ", " + tokens[1] +
                            ") outside raster bounds");
    }
    events.push_back(e);
  }
  return SpikeRaster(channels, steps, std::move(events));
}

void WriteRaster(const SpikeRaster& raster, std::ostream& out) {
  out << raster.num_channels() << ' ' << raster.num_steps() << '\n';
  WriteEvents(raster, out);
}

SpikeRaster LoadRaster(const std::filesystem::path& path) {
  std::istringstream in(ReadFile(path));
  return ReadRaster(in);
}

void SaveRaster(const SpikeRaster& raster, const std::filesystem::path& path) {
  std::ostringstream out;
  WriteRaster(raster, out);
  WriteFileAtomic(path, out.str());
}

LabeledRasterSet ReadRasterSet(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string> tokens;
  reader.Expect(tokens, "header 'L K count'");
  ExpectCount(tokens, 3, "L K count", reader.line());
  const int channels = ToInt(tokens[0], reader.line());
  const int default_steps = ToInt(tokens[1], reader.line());
  const int count = ToInt(tokens[2], reader.line());
  if (channels < 1 || default_steps < 0 || count < 0) {
    throw ParseError("header needs L >= 1, K >= 0, count >= 0", reader.line());
  }
  LabeledRasterSet set;
  for (int r = 0; r < count; ++r) {
    reader.Expect(tokens, "a raster line");
    const int line = reader.line();
    if (tokens.size() != 8 && tokens.size() != 10) {
      throw ParseError(
          "expected 'raster <idx> label <c> ref <t> events <n> [steps <k>]'",
          line);
    }
    ExpectKeyword(tokens[0], "raster", line);
    ExpectKeyword(tokens[2], "label", line);
    ExpectKeyword(tokens[4], "ref", line);
    ExpectKeyword(tokens[6], "events", line);
    if (ToInt(tokens[1], line) != r) {
      throw ParseError("raster index out of sequence", line);
    }
    const int label = ToInt(tokens[3], line);
    const int ref = ToInt(tokens[5], line);
    const int n = ToInt(tokens[7], line);
    int steps = default_steps;
    if (tokens.size() == 10) {
      ExpectKeyword(tokens[8], "steps", line);
      steps = ToInt(tokens[9], line);
    }
    if (n < 0 || steps < 0) throw ParseError("negative count", line);
    std::vector<SpikeEvent> events = ReadEvents(reader, n, channels, steps);
    set.rasters.emplace_back(channels, steps, std::move(events));
    set.labels.push_back(label);
    set.reference_times.push_back(ref);
  }
  RequireNoTrailing(reader);
  ValidateSet(set);
  return set;
}

void WriteRasterSet(const LabeledRasterSet& set, std::ostream& out) {
  ValidateSet(set);
  int default_steps = 0;
  for (const SpikeRaster& r : set.rasters) {
    default_steps = std::max(default_steps, r.num_steps());
  }
  const int channels = set.empty() ? 1 : set.num_channels();
  out << channels << ' ' << default_steps << ' ' << set.size() << '\n';
  for (size_t r = 0; r < set.size(); ++r) {
    const SpikeRaster& raster = set.rasters[r];
    out << "raster " << r << " label " << set.labels[r] << " ref "
        << set.reference_times[r] << " events " << raster.events().size();
    if (raster.num_steps() != default_steps) {
      out << " steps " << raster.num_steps();
    }
    out << '\n';
    WriteEvents(raster, out);
  }
}

LabeledRasterSet LoadRasterSet(const std::filesystem::path& path) {
  std::istringstream in(ReadFile(path));
  return ReadRasterSet(in);
}

void SaveRasterSet(const LabeledRasterSet& set,
                   const std::filesystem::path& path) {
  std::ostringstream out;
  WriteRasterSet(set, out);
  WriteFileAtomic(path, out.str());
}

}  // namespace skim
