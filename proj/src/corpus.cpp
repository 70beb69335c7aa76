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

#include "mpa/corpus.hpp"

#include <charconv>
#include <map>

#include <json.hpp>

#include "mpa/text.hpp"

namespace mpa {

std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::Masculine:
      return "masculine";
    case Gender::Feminine:
      return "feminine";
    case Gender::Unknown:
      break;
  }
  return "unknown";
}

namespace corpus {
namespace {

constexpr std::string_view kCuePlaceholder = "#CUE#";

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string gender_field(Gender g) {
  return g == Gender::Masculine ? "male" : "female";
}

std::optional<Gender> pronoun_gender(std::string_view lowered) {
  if (lowered == "he" || lowered == "him" || lowered == "his") return Gender::Masculine;
  if (lowered == "she" || lowered == "her") return Gender::Feminine;
  return std::nullopt;
}

// Head word of a profession string with leading articles removed.
std::string profession_head(std::string_view profession) {
  auto words = text::split_words(text::lower(profession));
  std::size_t first = 0;
  while (first + 1 < words.size() &&
         (words[first] == "the" || words[first] == "a" || words[first] == "an"))
    ++first;
  if (first >= words.size()) return {};
  return text::strip_punct(words.back());
}

std::string pair_key(const WinoInstance& inst, const CueSpan& cue) {
  std::string key = cue_template(inst, cue);
  key += '\x1f';
  key += std::to_string(inst.entity_index);
  key += '\x1f';
  key += inst.profession;
  return key;
}

}  // namespace

std::vector<WinoInstance> parse_winomt(std::string_view text, Diagnostics* diag) {
  std::vector<WinoInstance> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const auto fields = split_tabs(line);
    if (fields.size() != 4)
      throw ParseError("expected 4 tab-separated fields, found " + std::to_string(fields.size()),
                       line_no);

    WinoInstance inst;
    inst.line_no = line_no;
    if (fields[0] == "male") {
      inst.gold_gender = Gender::Masculine;
    } else if (fields[0] == "female") {
      inst.gold_gender = Gender::Feminine;
    } else {
      throw ParseError("gender must be 'male' or 'female', got '" + std::string(fields[0]) + "'",
                       line_no);
    }

    const auto& idx = fields[1];
    const auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), inst.entity_index);
    if (idx.empty() || ec != std::errc() || ptr != idx.data() + idx.size())
      throw ParseError("entity index is not a non-negative integer: '" + std::string(idx) + "'",
                       line_no);

    inst.sentence = std::string(fields[2]);
    inst.profession = std::string(fields[3]);

    const auto words = text::split_words(inst.sentence);
    if (inst.entity_index >= words.size())
      throw ValidationError("line " + std::to_string(line_no) + ": entity index " +
                            std::to_string(inst.entity_index) + " out of range for " +
                            std::to_string(words.size()) + " words");

    if (diag != nullptr) {
      const std::string word = text::strip_punct(text::lower(words[inst.entity_index]));
      if (word != profession_head(inst.profession))
        diag->add("line " + std::to_string(line_no) + ": word '" + words[inst.entity_index] +
                  "' at index " + std::to_string(inst.entity_index) +
                  " does not match profession '" + inst.profession + "'");
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::string serialize_winomt(std::span<const WinoInstance> instances) {
  std::string out;
  for (const auto& inst : instances) {
    out += gender_field(inst.gold_gender);
    out += '\t';
    out += std::to_string(inst.entity_index);
    out += '\t';
    out += inst.sentence;
    out += '\t';
    out += inst.profession;
    out += '\n';
  }
  return out;
}

std::optional<CueSpan> find_cue(const WinoInstance& instance) {
  const auto words = text::split_words(instance.sentence);
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::string core = text::lower(text::strip_punct(words[i]));
    if (auto g = pronoun_gender(core)) return CueSpan{std::move(core), i, *g};
  }
  return std::nullopt;
}

CueSpan detect_cue(const WinoInstance& instance) {
  if (auto cue = find_cue(instance)) return *cue;
  throw NoCueError("line " + std::to_string(instance.line_no) +
                   ": no gender cue (he/she/him/her/his) in sentence");
}

std::string cue_template(const WinoInstance& instance, const CueSpan& cue) {
  auto words = text::split_words(instance.sentence);
  if (cue.cue_index >= words.size()) throw UsageError("cue index out of range");
  std::string& word = words[cue.cue_index];
  const std::string core = text::strip_punct(word);
  const std::size_t at = word.find(core);
  word.replace(at, core.size(), kCuePlaceholder);
  return text::join(words);
}

PairingResult build_minimal_pairs(std::span<const WinoInstance> pro_set,
                                  std::span<const WinoInstance> anti_set) {
  struct Keyed {
    std::map<std::string, std::size_t> index;  // key -> position in set
    std::vector<std::optional<CueSpan>> cues;
  };
  auto key_set = [](std::span<const WinoInstance> set, std::string_view name) {
    Keyed keyed;
    keyed.cues.reserve(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
      keyed.cues.push_back(find_cue(set[i]));
      if (!keyed.cues.back()) continue;
      auto [it, inserted] = keyed.index.emplace(pair_key(set[i], *keyed.cues.back()), i);
      if (!inserted)
        throw ValidationError("ambiguous " + std::string(name) + " set: lines " +
                              std::to_string(set[it->second].line_no) + " and " +
                              std::to_string(set[i].line_no) + " share a pairing key");
    }
    return keyed;
  };

  const Keyed pro = key_set(pro_set, "pro");
  const Keyed anti = key_set(anti_set, "anti");

  PairingResult result;
  std::vector<bool> anti_used(anti_set.size(), false);
  for (std::size_t i = 0; i < pro_set.size(); ++i) {
    const WinoInstance& p = pro_set[i];
    if (!pro.cues[i]) {
      result.unmatched.push_back({PairSide::Pro, p.line_no, "no gender cue"});
      continue;
    }
    const auto it = anti.index.find(pair_key(p, *pro.cues[i]));
    if (it == anti.index.end()) {
      result.unmatched.push_back({PairSide::Pro, p.line_no, "no anti counterpart"});
      continue;
    }
    const WinoInstance& a = anti_set[it->second];
    const CueSpan& acue = *anti.cues[it->second];
    if (a.gold_gender == p.gold_gender) {
      result.unmatched.push_back(
          {PairSide::Pro, p.line_no,
           "counterpart line " + std::to_string(a.line_no) + " has the same gold gender"});
      continue;
    }
    if (acue.pronoun == pro.cues[i]->pronoun) {
      result.unmatched.push_back(
          {PairSide::Pro, p.line_no,
           "counterpart line " + std::to_string(a.line_no) + " has the same pronoun"});
      continue;
    }
    anti_used[it->second] = true;
    MinimalPair pair;
    pair.pair_id = result.pairs.size();
    pair.pro = {p, *pro.cues[i]};
    pair.anti = {a, acue};
    pair.profession = p.profession;
    pair.stereotype_gender = p.gold_gender;
    result.pairs.push_back(std::move(pair));
  }
  for (std::size_t j = 0; j < anti_set.size(); ++j) {
    if (anti_used[j]) continue;
    result.unmatched.push_back({PairSide::Anti, anti_set[j].line_no,
                                anti.cues[j] ? "no pro counterpart" : "no gender cue"});
  }
  return result;
}

std::string serialize_pairs(std::span<const MinimalPair> pairs) {
  std::string out;
  for (const auto& pair : pairs) {
    nlohmann::ordered_json rec;
    rec["pair_id"] = pair.pair_id;
    rec["pro_line_no"] = pair.pro.instance.line_no;
    rec["anti_line_no"] = pair.anti.instance.line_no;
    rec["profession"] = pair.profession;
    rec["stereotype_gender"] = to_string(pair.stereotype_gender);
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::string serialize_unmatched(std::span<const Unmatched> unmatched) {
  std::string out;
  for (const auto& u : unmatched) {
    nlohmann::ordered_json rec;
    rec["side"] = u.side == PairSide::Pro ? "pro" : "anti";
    rec["line_no"] = u.line_no;
    rec["reason"] = u.reason;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

double mean_pair_length(std::span<const MinimalPair> pairs) {
  if (pairs.empty()) return 0.0;
  std::size_t words = 0;
  for (const auto& pair : pairs) {
    words += text::split_words(pair.pro.instance.sentence).size();
    words += text::split_words(pair.anti.instance.sentence).size();
  }
  return static_cast<double>(words) / static_cast<double>(2 * pairs.size());
}

}  // namespace corpus
}  // namespace mpa
