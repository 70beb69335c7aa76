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

#include "mpa/io.hpp"

#include <unistd.h>

#include <fstream>
#include <sstream>

#include "mpa/errors.hpp"

namespace mpa::io {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

OutputDir::OutputDir(std::filesystem::path destination) : destination_(std::move(destination)) {
  std::error_code ec;
  std::filesystem::create_directories(destination_, ec);
  if (ec) throw UsageError("cannot create output directory " + destination_.string());
  staging_ = destination_ / (".staging-" + std::to_string(::getpid()));
  std::filesystem::remove_all(staging_, ec);
  std::filesystem::create_directories(staging_, ec);
  if (ec) throw UsageError("cannot create staging directory " + staging_.string());
}

OutputDir::~OutputDir() {
  std::error_code ec;
  std::filesystem::remove_all(staging_, ec);
}

void OutputDir::write(const std::filesystem::path& relative, std::string_view contents) {
  const auto path = staging_ / relative;
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw UsageError("write failed: " + path.string());
  files_.push_back(relative);
}

void OutputDir::commit() {
  for (const auto& rel : files_) {
    const auto target = destination_ / rel;
    std::filesystem::create_directories(target.parent_path());
    std::filesystem::rename(staging_ / rel, target);
  }
  committed_ = true;
  std::error_code ec;
  std::filesystem::remove_all(staging_, ec);
}

}  // namespace mpa::io
