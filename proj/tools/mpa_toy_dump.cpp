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

// Writes a synthetic dump directory for the given challenge sets.

#include <iostream>

#include <CLI11.hpp>

#include "mpa/io.hpp"
#include "toy_dump.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic attention dump generator", "mpa-toy-dump"};
  std::string pro, anti, regular, out;
  mpa::toy::ModelSpec spec;
  std::optional<std::size_t> corrupt;
  app.add_option("--pro", pro, "Pro-stereotypical set")->required();
  app.add_option("--anti", anti, "Anti-stereotypical set")->required();
  app.add_option("--regular", regular, "Additional set to translate");
  app.add_option("--out", out, "Dump directory")->required();
  app.add_option("--name", spec.name, "Model name")->capture_default_str();
  app.add_option("--follow-cue", spec.follow_cue, "Chance of using the cue's gender")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--omit-rate", spec.omit_rate, "Chance of dropping the profession")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--layers", spec.enc_layers, "Encoder and decoder layers")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--heads", spec.enc_heads, "Attention heads per layer")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
  bool no_cross = false;
  app.add_flag("--no-cross", no_cross, "Omit cross-attention tensors");
  app.add_option("--corrupt", corrupt, "Break one attention row of this record");
  CLI11_PARSE(app, argc, argv);
  spec.dec_layers = spec.enc_layers;
  spec.dec_heads = spec.enc_heads;
  spec.cross = !no_cross;

  try {
    namespace corpus = mpa::corpus;
    const auto pro_set = corpus::parse_winomt(mpa::io::read_text_file(pro));
    auto all = pro_set;
    const auto anti_set = corpus::parse_winomt(mpa::io::read_text_file(anti));
    all.insert(all.end(), anti_set.begin(), anti_set.end());
    if (!regular.empty()) {
      const auto reg = corpus::parse_winomt(mpa::io::read_text_file(regular));
      all.insert(all.end(), reg.begin(), reg.end());
    }
    mpa::toy::write_dump(out, all, mpa::toy::stereotypes(pro_set), spec);
    if (corrupt) mpa::toy::corrupt_row(out, *corrupt);
  } catch (const std::exception& e) {
    std::cerr << "mpa-toy-dump: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
