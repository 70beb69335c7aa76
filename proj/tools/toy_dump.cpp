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

#include "toy_dump.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "mpa/attn.hpp"
#include "mpa/io.hpp"
#include "mpa/text.hpp"

namespace mpa::toy {
namespace {

using ordered_json = nlohmann::ordered_json;
constexpr std::size_t npos = static_cast<std::size_t>(-1);

bool is_vowel(char c) {
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
    case 'A': case 'E': case 'I': case 'O': case 'U':
      return true;
    default:
      return false;
  }
}

// "lo" before s + consonant and z.
bool takes_lo(std::string_view noun) {
  if (noun.empty()) return false;
  if (noun[0] == 'z') return true;
  return noun.size() > 1 && noun[0] == 's' && !is_vowel(noun[1]);
}

std::string article(std::string_view noun, Gender g, bool capital) {
  std::string a;
  if (is_vowel(noun.front())) {
    a = "l'";
  } else if (g == Gender::Feminine) {
    a = "la";
  } else {
    a = takes_lo(noun) ? "lo" : "il";
  }
  if (capital) a[0] = static_cast<char>(a[0] - 'a' + 'A');
  return a;
}

std::string pronoun(std::string_view w) {
  if (w == "he" || w == "him") return "lui";
  if (w == "she") return "lei";
  if (w == "her") return "lei";
  if (w == "his") return "suo";
  return std::string(w);
}

std::size_t trailing_punct(std::string_view w) {
  std::size_t n = 0;
  while (n < w.size()) {
    const char c = w[w.size() - 1 - n];
    if (c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':') {
      ++n;
    } else {
      break;
    }
  }
  return n;
}

const Profession* find_profession(std::string_view word) {
  const std::string w = text::lower(word);
  for (const auto& p : professions())
    if (text::lower(p.english) == w) return &p;
  return nullptr;
}

struct Segmented {
  std::vector<std::string> pieces;
  std::vector<attn::Span> spans;
};

Segmented segment(const std::vector<std::string>& words, std::size_t piece_len) {
  Segmented s;
  for (const auto& word : words) {
    const std::size_t begin = s.pieces.size();
    const std::size_t tp = trailing_punct(word);
    const std::string core = word.substr(0, word.size() - tp);
    if (core.empty()) {
      s.pieces.push_back("\xe2\x96\x81" + word);
    } else {
      for (std::size_t i = 0; i < core.size();) {
        std::size_t n = std::min(piece_len, core.size() - i);
        while (i + n < core.size() && (static_cast<unsigned char>(core[i + n]) & 0xC0) == 0x80)
          ++n;
        s.pieces.push_back((i == 0 ? "\xe2\x96\x81" : "") + core.substr(i, n));
        i += n;
      }
      for (std::size_t i = word.size() - tp; i < word.size(); ++i)
        s.pieces.push_back(word.substr(i, 1));
    }
    s.spans.push_back({begin, s.pieces.size()});
  }
  s.pieces.push_back("</s>");
  return s;
}

// Row-stochastic tensor from uniform noise plus `bias(l, h, q, k)`.
template <class Bias>
attn::Tensor4 make_tensor(std::array<std::size_t, 4> shape, SplitMix& rng, Bias bias) {
  attn::Tensor4 t;
  t.shape = shape;
  t.data.resize(shape[0] * shape[1] * shape[2] * shape[3]);
  std::vector<double> row(shape[3]);
  for (std::size_t l = 0; l < shape[0]; ++l)
    for (std::size_t h = 0; h < shape[1]; ++h)
      for (std::size_t q = 0; q < shape[2]; ++q) {
        double z = 0.0;
        for (std::size_t k = 0; k < shape[3]; ++k) {
          row[k] = std::exp(2.0 * rng.uniform() - 1.0 + bias(l, h, q, k));
          z += row[k];
        }
        for (std::size_t k = 0; k < shape[3]; ++k)
          t.data[t.index(l, h, q, k)] = static_cast<float>(row[k] / z);
      }
  return t;
}

bool in(const attn::Span& s, std::size_t i) { return i >= s.begin && i < s.end; }

}  // namespace

std::uint64_t SplitMix::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t hash(std::uint64_t seed, std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return SplitMix(h).next();
}

const std::vector<Profession>& professions() {
  static const std::vector<Profession> table = {
      {"driver", "autista", "autista"},
      {"supervisor", "supervisore", "supervisora"},
      {"janitor", "bidello", "bidella"},
      {"cook", "cuoco", "cuoca"},
      {"mover", "traslocatore", "traslocatrice"},
      {"laborer", "operaio", "operaia"},
      {"builder", "costruttore", "costruttrice"},
      {"chief", "capo", "capo"},
      {"developer", "sviluppatore", "sviluppatrice"},
      {"carpenter", "falegname", "falegname"},
      {"manager", "manager", "manager"},
      {"lawyer", "avvocato", "avvocatessa"},
      {"farmer", "contadino", "contadina"},
      {"salesperson", "commesso", "commessa"},
      {"physician", "medico", "medica"},
      {"guard", "guardia", "guardia"},
      {"analyst", "analista", "analista"},
      {"mechanic", "meccanico", "meccanica"},
      {"sheriff", "sceriffo", "sceriffa"},
      {"CEO", "amministratore", "amministratrice"},
      {"attendant", "inserviente", "inserviente"},
      {"cashier", "cassiere", "cassiera"},
      {"teacher", "insegnante", "insegnante"},
      {"nurse", "infermiere", "infermiera"},
      {"assistant", "assistente", "assistente"},
      {"secretary", "segretario", "segretaria"},
      {"auditor", "revisore", "revisora"},
      {"cleaner", "addetto", "addetta"},
      {"receptionist", "receptionist", "receptionist"},
      {"clerk", "impiegato", "impiegata"},
      {"counselor", "consulente", "consulente"},
      {"designer", "designer", "designer"},
      {"hairdresser", "parrucchiere", "parrucchiera"},
      {"writer", "scrittore", "scrittrice"},
      {"housekeeper", "governante", "governante"},
      {"baker", "fornaio", "fornaia"},
      {"accountant", "contabile", "contabile"},
      {"editor", "redattore", "redattrice"},
      {"librarian", "bibliotecario", "bibliotecaria"},
      {"tailor", "sarto", "sarta"},
  };
  return table;
}

std::map<std::string, Gender> stereotypes(std::span<const corpus::WinoInstance> pro_set) {
  std::map<std::string, Gender> out;
  for (const auto& inst : pro_set) out.emplace(text::lower(inst.profession), inst.gold_gender);
  return out;
}

Translation translate(const corpus::WinoInstance& instance,
                      const std::map<std::string, Gender>& stereotypes, const ModelSpec& spec) {
  const auto words = text::split_words(instance.sentence);
  const auto cue = corpus::find_cue(instance);
  auto stereotype_of = [&](std::string_view w) {
    const auto it = stereotypes.find(text::lower(w));
    return it == stereotypes.end() ? Gender::Masculine : it->second;
  };

  const double follow = SplitMix(hash(spec.seed, "follow|" + instance.sentence)).uniform();
  const double omit = SplitMix(hash(spec.seed, "omit|" + instance.sentence)).uniform();

  Translation tr;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string& w = words[i];
    const std::size_t tp = trailing_punct(w);
    const std::string core = w.substr(0, w.size() - tp), punct = w.substr(w.size() - tp);

    const bool next_is_noun =
        i + 1 < words.size() && find_profession(words[i + 1]) != nullptr &&
        (text::lower(core) == "the") && tp == 0;
    if (next_is_noun) continue;  // the article is produced with the noun

    if (const Profession* p = find_profession(core)) {
      const bool entity = i == instance.entity_index;
      Gender g = stereotype_of(core);
      if (entity && cue && follow < spec.follow_cue) g = cue->cue_gender;
      if (entity && omit < spec.omit_rate) continue;
      const std::string& noun = g == Gender::Feminine ? p->feminine : p->masculine;
      std::string word = noun;
      if (i > 0 && text::lower(words[i - 1]) == "the") {
        const bool capital = words[i - 1][0] == 'T';
        const std::string art = article(noun, g, capital);
        if (art.back() == '\'') {
          word = art + noun;
        } else {
          out.push_back(art);
        }
      }
      if (entity) {
        tr.noun_word = out.size();
        tr.noun_gender = g;
      }
      out.push_back(word + punct);
      continue;
    }
    out.push_back(pronoun(core) + punct);
  }
  tr.text = text::join(out);
  return tr;
}

void write_dump(const std::filesystem::path& dir,
                std::span<const corpus::WinoInstance> instances,
                const std::map<std::string, Gender>& stereotypes, const ModelSpec& spec) {
  std::filesystem::create_directories(dir);

  ordered_json manifest;
  manifest["model_name"] = spec.name;
  manifest["n_layers_enc"] = spec.enc_layers;
  manifest["n_heads_enc"] = spec.enc_heads;
  manifest["n_layers_dec"] = spec.dec_layers;
  manifest["n_heads_dec"] = spec.dec_heads;
  manifest["dtype"] = "f32";
  manifest["endianness"] = "little";
  manifest["version"] = 1;
  {
    std::ofstream f(dir / "manifest.json", std::ios::binary);
    f << manifest.dump(2) << '\n';
  }

  std::ofstream lines(dir / "sentences.jsonl", std::ios::binary);
  std::set<std::string> seen;
  std::size_t n = 0;
  for (const auto& inst : instances) {
    if (!seen.insert(inst.sentence).second) continue;
    const std::string id = fmt::format("s{:05d}", n++);
    const Translation tr = translate(inst, stereotypes, spec);

    const auto src_words = text::split_words(inst.sentence);
    const auto tgt_words = text::split_words(tr.text);
    const Segmented src = segment(src_words, spec.piece_len);
    const Segmented tgt = segment(tgt_words, spec.piece_len);
    const std::size_t S = src.pieces.size(), T = tgt.pieces.size();

    const auto cue = corpus::find_cue(inst);
    const attn::Span none{0, 0};
    const attn::Span entity = src.spans[inst.entity_index];
    const attn::Span cue_span = cue ? src.spans[cue->cue_index] : none;
    const bool feminine = cue && cue->cue_gender == Gender::Feminine;
    const attn::Span noun = tr.noun_word == npos ? none : tgt.spans[tr.noun_word];

    SplitMix rng(hash(spec.seed, "attn|" + inst.sentence));
    const std::size_t L = spec.enc_layers, H = spec.enc_heads;
    const auto enc = make_tensor({L, H, S, S}, rng, [&](auto l, auto h, auto q, auto k) {
      double b = 0.0;
      if (h == 1 % H && q == k) b += 2.0;
      if (l + 1 == L && h == 0 && in(entity, q) && in(cue_span, k)) b += feminine ? 3.0 : 2.0;
      if (l == 0 && h == 2 % H && in(entity, q) && in(cue_span, k)) b += 1.0;
      return b;
    });
    attn::write_tensor(dir / ("enc_" + id + ".bin"), enc);

    ordered_json j;
    j["sentence_id"] = id;
    j["source_text"] = inst.sentence;
    j["translation_text"] = tr.text;
    j["src_subwords"] = src.pieces;
    j["tgt_subwords"] = tgt.pieces;
    auto spans_json = [](const std::vector<attn::Span>& spans) {
      ordered_json a = ordered_json::array();
      for (const auto& s : spans) a.push_back({s.begin, s.end});
      return a;
    };
    j["src_word_spans"] = spans_json(src.spans);
    j["tgt_word_spans"] = spans_json(tgt.spans);
    j["enc_file"] = "enc_" + id + ".bin";
    if (spec.cross) {
      const std::size_t DL = spec.dec_layers, DH = spec.dec_heads;
      const auto x = make_tensor({DL, DH, T, S}, rng, [&](auto l, auto h, auto q, auto k) {
        double b = 0.0;
        // Rough monotone alignment.
        if (h == 0 && (k * T) / S == q) b += 2.0;
        if (l + 1 == DL && h == 1 % DH && in(noun, q) && in(cue_span, k))
          b += feminine ? 3.5 : 2.5;
        return b;
      });
      attn::write_tensor(dir / ("xattn_" + id + ".bin"), x);
      j["xattn_file"] = "xattn_" + id + ".bin";
    } else {
      j["xattn_file"] = nullptr;
    }
    j["enc_shape"] = {L, H, S, S};
    if (spec.cross) {
      j["xattn_shape"] = {spec.dec_layers, spec.dec_heads, T, S};
    } else {
      j["xattn_shape"] = nullptr;
    }
    lines << j.dump() << '\n';
  }
}

void corrupt_row(const std::filesystem::path& dir, std::size_t record) {
  const auto dump = attn::Dump::open(dir);
  const auto& rec = dump.sentences().at(record);
  auto t = attn::read_tensor(dir / rec.enc_file, rec.enc_shape);
  const std::size_t row = t.index(0, 0, 0, 0);
  for (std::size_t k = 0; k < t.shape[3]; ++k) t.data[row + k] *= 1.5f;
  attn::write_tensor(dir / rec.enc_file, t);
}

}  // namespace mpa::toy
