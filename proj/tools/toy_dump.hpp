// Copyright 2026 The mpa-eval Authors.
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

// Synthetic attention dumps for tests and demos. A toy "model" translates
// word by word into pseudo-Italian, choosing the profession's gender from the
// pronoun cue or from the stereotype, and emits row-stochastic attention with
// a few planted cue-attending heads.

#ifndef MPA_TOOLS_TOY_DUMP_HPP_
#define MPA_TOOLS_TOY_DUMP_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mpa/corpus.hpp"

namespace mpa::toy {

/// splitmix64.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();

 private:
  std::uint64_t state_;
};

/// Stable 64-bit hash of (seed, text).
std::uint64_t hash(std::uint64_t seed, std::string_view text);

struct Profession {
  std::string english;
  std::string masculine;
  std::string feminine;
};

/// Italian forms of the fixture professions.
const std::vector<Profession>& professions();

struct ModelSpec {
  std::string name = "toy-mt";
  std::size_t enc_layers = 3;
  std::size_t enc_heads = 4;
  std::size_t dec_layers = 3;
  std::size_t dec_heads = 4;
  double follow_cue = 0.6;  // chance of taking the gender from the cue
  double omit_rate = 0.0;   // chance of dropping the profession noun
  std::size_t piece_len = 4;  // characters per subword piece
  bool cross = true;
  std::uint64_t seed = 1;
};

/// Stereotypical gender of each profession: the gold gender of its pro-set
/// instances.
std::map<std::string, Gender> stereotypes(std::span<const corpus::WinoInstance> pro_set);

struct Translation {
  std::string text;
  std::size_t noun_word = static_cast<std::size_t>(-1);  // npos when omitted
  Gender noun_gender = Gender::Unknown;
};

/// The toy model's translation of one instance.
Translation translate(const corpus::WinoInstance& instance,
                      const std::map<std::string, Gender>& stereotypes, const ModelSpec& spec);

/// Writes manifest.json, sentences.jsonl and tensor files for every distinct
/// sentence in `instances`, in first-seen order.
void write_dump(const std::filesystem::path& dir,
                std::span<const corpus::WinoInstance> instances,
                const std::map<std::string, Gender>& stereotypes, const ModelSpec& spec);

/// Scales one encoder attention row of record `record` so it no longer sums
/// to one.
void corrupt_row(const std::filesystem::path& dir, std::size_t record);

}  // namespace mpa::toy

#endif  // MPA_TOOLS_TOY_DUMP_HPP_
