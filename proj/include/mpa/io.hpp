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

#ifndef MPA_IO_HPP_
#define MPA_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mpa::io {

/// Whole file as bytes. Throws UsageError naming the path when unreadable.
std::string read_text_file(const std::filesystem::path& path);

/// Collects output files in a staging directory next to the destination
/// and moves them into place on commit(), one rename per file. Nothing is
/// left behind if commit() is never reached.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path destination);
  ~OutputDir();
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;

  void write(const std::filesystem::path& relative, std::string_view contents);
  void commit();

  const std::filesystem::path& destination() const { return destination_; }

 private:
  std::filesystem::path destination_;
  std::filesystem::path staging_;
  std::vector<std::filesystem::path> files_;
  bool committed_ = false;
};

}  // namespace mpa::io

#endif  // MPA_IO_HPP_
