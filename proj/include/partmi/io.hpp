#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "partmi/core.hpp"

namespace partmi::io {

/// Raw contents of a labeling file: one label per object, plus object ids
/// when the file is in two-column `id,label` form.
struct LabelFile {
  std::vector<std::string> labels;
  std::optional<std::vector<std::string>> ids;
};

// Blank lines and lines starting with '#' are skipped. A first line of
// exactly "id,label" is treated as a header.
LabelFile parse_labels(std::istream& in, const std::string& source = "<stream>");
LabelFile read_labels(const std::filesystem::path& path);

/// Reorders `file` to follow the object order of `reference`. Both must carry
/// ids, or neither; mismatched id sets are an InputError.
LabelFile align_to(const LabelFile& reference, const LabelFile& file);

Labeling to_labeling(const LabelFile& file);

}  // namespace partmi::io
