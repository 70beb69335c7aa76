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

// Dump directory layout:
//   manifest.json     {model_name, n_layers_enc, n_heads_enc, n_layers_dec,
//                      n_heads_dec, dtype:"f32", endianness:"little", version:1}
//   sentences.jsonl   one record per sentence (see SentenceRecord)
//   enc_<id>.bin      raw f32 [layer][head][query][key], no header
//   xattn_<id>.bin    same layout, [layer][head][target][source]

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mpa/attn.hpp"
#include "mpa/text.hpp"

namespace mpa::attn {
namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t shape_volume(const std::array<std::size_t, 4>& shape) {
  return shape[0] * shape[1] * shape[2] * shape[3];
}

std::array<std::size_t, 4> parse_shape(const json& j, std::string_view what) {
  if (!j.is_array() || j.size() != 4)
    throw ValidationError(std::string(what) + " must be a 4-element array");
  std::array<std::size_t, 4> shape{};
  for (std::size_t d = 0; d < 4; ++d) shape[d] = j[d].get<std::size_t>();
  return shape;
}

std::vector<Span> parse_spans(const json& rec, const char* key) {
  std::vector<Span> spans;
  if (!rec.contains(key) || rec[key].is_null()) return spans;
  for (const auto& s : rec[key]) {
    if (!s.is_array() || s.size() != 2)
      throw ValidationError(std::string(key) + " entries must be [start, end) pairs");
    spans.push_back({s[0].get<std::size_t>(), s[1].get<std::size_t>()});
  }
  return spans;
}

void check_spans(const std::vector<Span>& spans, std::span<const std::string> subwords,
                 std::size_t n_words, const std::string& id, const char* what) {
  if (spans.size() != n_words)
    throw ValidationError("sentence " + id + ": " + what + " has " +
                          std::to_string(spans.size()) + " spans for " +
                          std::to_string(n_words) + " words");
  std::vector<bool> covered(subwords.size(), false);
  std::size_t prev_end = 0;
  for (const auto& s : spans) {
    if (s.empty() || s.end > subwords.size() || s.begin < prev_end)
      throw ValidationError("sentence " + id + ": " + what +
                            " spans must be non-empty, in range and non-overlapping");
    for (std::size_t i = s.begin; i < s.end; ++i) covered[i] = true;
    prev_end = s.end;
  }
  for (std::size_t i = 0; i < subwords.size(); ++i)
    if (!covered[i] && !is_special_token(subwords[i]))
      throw ValidationError("sentence " + id + ": " + what + " leaves subword '" + subwords[i] +
                            "' uncovered");
}

void resolve_spans(SentenceRecord& rec, std::vector<Span>& spans,
                   const std::vector<std::string>& subwords, const std::string& text,
                   const char* what) {
  const auto words = text::split_words(text);
  if (!spans.empty()) {
    check_spans(spans, subwords, words.size(), rec.sentence_id, what);
    return;
  }
  try {
    spans = map_words_to_subwords(words, subwords, detect_marker_scheme(subwords));
  } catch (const MappingFailure& e) {
    spans.assign(words.size(), Span{});
    rec.mapping_error = std::string(what) + ": " + e.what();
  }
}

}  // namespace

Tensor4 read_tensor(const std::filesystem::path& file, const std::array<std::size_t, 4>& shape) {
  const std::string bytes = read_file(file);
  const std::size_t n = shape_volume(shape);
  if (bytes.size() != n * sizeof(float))
    throw ValidationError(file.string() + ": expected " + std::to_string(n * sizeof(float)) +
                          " bytes, found " + std::to_string(bytes.size()));
  Tensor4 t;
  t.shape = shape;
  t.data.resize(n);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(t.data.data(), bytes.data(), bytes.size());
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t v = 0;
      for (int b = 0; b < 4; ++b)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i * 4 + b])) << (8 * b);
      t.data[i] = std::bit_cast<float>(v);
    }
  }
  return t;
}

void write_tensor(const std::filesystem::path& file, const Tensor4& tensor) {
  std::string bytes(tensor.data.size() * sizeof(float), '\0');
  for (std::size_t i = 0; i < tensor.data.size(); ++i) {
    const auto v = std::bit_cast<std::uint32_t>(tensor.data[i]);
    for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<char>((v >> (8 * b)) & 0xFF);
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + file.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Dump Dump::open(const std::filesystem::path& dir) {
  Dump dump;
  dump.dir_ = dir;

  json manifest;
  try {
    manifest = json::parse(read_file(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw ParseError((dir / "manifest.json").string() + ": " + e.what());
  }
  try {
    Manifest& m = dump.manifest_;
    m.model_name = manifest.at("model_name").get<std::string>();
    m.n_layers_enc = manifest.at("n_layers_enc").get<std::size_t>();
    m.n_heads_enc = manifest.at("n_heads_enc").get<std::size_t>();
    m.n_layers_dec = manifest.value("n_layers_dec", std::size_t{0});
    m.n_heads_dec = manifest.value("n_heads_dec", std::size_t{0});
    m.spans = manifest.value("spans", std::string("exact"));
    if (manifest.value("dtype", std::string("f32")) != "f32")
      throw ValidationError("manifest: only dtype f32 is supported");
    if (manifest.value("endianness", std::string("little")) != "little")
      throw ValidationError("manifest: only little-endian dumps are supported");
    if (manifest.value("version", 1) != 1)
      throw ValidationError("manifest: unsupported version");
  } catch (const json::exception& e) {
    throw ValidationError((dir / "manifest.json").string() + ": " + e.what());
  }

  const std::string lines = read_file(dir / "sentences.jsonl");
  std::size_t line_no = 0, pos = 0;
  while (pos < lines.size()) {
    std::size_t eol = lines.find('\n', pos);
    if (eol == std::string::npos) eol = lines.size();
    const std::string_view line(lines.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    SentenceRecord rec;
    try {
      const json j = json::parse(line);
      const json& id = j.at("sentence_id");
      rec.sentence_id = id.is_string() ? id.get<std::string>() : id.dump();
      rec.source_text = j.at("source_text").get<std::string>();
      rec.translation_text = j.at("translation_text").get<std::string>();
      rec.src_subwords = j.at("src_subwords").get<std::vector<std::string>>();
      rec.tgt_subwords = j.at("tgt_subwords").get<std::vector<std::string>>();
      rec.src_word_spans = parse_spans(j, "src_word_spans");
      rec.tgt_word_spans = parse_spans(j, "tgt_word_spans");
      rec.enc_file = j.at("enc_file").get<std::string>();
      rec.enc_shape = parse_shape(j.at("enc_shape"), "enc_shape");
      if (j.contains("xattn_file") && j["xattn_file"].is_string()) {
        rec.xattn_file = j["xattn_file"].get<std::string>();
        rec.xattn_shape = parse_shape(j.at("xattn_shape"), "xattn_shape");
      }
    } catch (const json::exception& e) {
      throw ParseError("sentences.jsonl: " + std::string(e.what()), line_no);
    }

    const Manifest& m = dump.manifest_;
    const std::size_t s = rec.src_subwords.size(), t = rec.tgt_subwords.size();
    if (rec.enc_shape != std::array<std::size_t, 4>{m.n_layers_enc, m.n_heads_enc, s, s})
      throw ValidationError("sentence " + rec.sentence_id +
                            ": enc_shape does not match manifest and subword count");
    if (!rec.xattn_file.empty() &&
        rec.xattn_shape != std::array<std::size_t, 4>{m.n_layers_dec, m.n_heads_dec, t, s})
      throw ValidationError("sentence " + rec.sentence_id +
                            ": xattn_shape does not match manifest and subword counts");
    for (const auto* file : {&rec.enc_file, &rec.xattn_file}) {
      if (file->empty()) continue;
      if (!std::filesystem::exists(dir / *file))
        throw UsageError("sentence " + rec.sentence_id + ": missing tensor file " +
                         (dir / *file).string());
    }

    resolve_spans(rec, rec.src_word_spans, rec.src_subwords, rec.source_text, "src_word_spans");
    resolve_spans(rec, rec.tgt_word_spans, rec.tgt_subwords, rec.translation_text,
                  "tgt_word_spans");
    dump.sentences_.push_back(std::move(rec));
  }

  dump.by_source_.reserve(dump.sentences_.size());
  for (std::size_t i = 0; i < dump.sentences_.size(); ++i)
    dump.by_source_.emplace_back(dump.sentences_[i].source_text, i);
  std::stable_sort(dump.by_source_.begin(), dump.by_source_.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return dump;
}

std::optional<std::size_t> Dump::find_source(std::string_view text) const {
  const auto it = std::lower_bound(
      by_source_.begin(), by_source_.end(), text,
      [](const auto& entry, std::string_view key) { return entry.first < key; });
  if (it == by_source_.end() || it->first != text) return std::nullopt;
  return it->second;
}

Tensor4 Dump::load(std::size_t record, Kind kind) const {
  const SentenceRecord& rec = sentences_.at(record);
  if (kind == Kind::CrossAttention && rec.xattn_file.empty())
    throw UsageError("sentence " + rec.sentence_id + " has no cross-attention tensor");
  const bool self = kind == Kind::SelfAttention;
  Tensor4 t = read_tensor(dir_ / (self ? rec.enc_file : rec.xattn_file),
                          self ? rec.enc_shape : rec.xattn_shape);
  validate_rows(t, rec.sentence_id);
  return t;
}

}  // namespace mpa::attn
