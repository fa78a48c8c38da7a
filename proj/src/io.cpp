#include "partmi/io.hpp"

#include <fstream>
#include <istream>
#include <unordered_map>

namespace partmi::io {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

LabelFile parse_labels(std::istream& in, const std::string& source) {
  LabelFile out;
  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  std::optional<bool> csv;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (first_content && text == "id,label") {
      first_content = false;
      csv = true;
      continue;
    }
    first_content = false;
    const auto comma = text.find(',');
    const bool is_csv = comma != std::string::npos;
    if (csv && *csv != is_csv)
      throw InputError(source + ":" + std::to_string(lineno) + ": mixed single-column and id,label lines");
    csv = is_csv;
    if (!is_csv) {
      out.labels.push_back(text);
      continue;
    }
    std::string id = trim(text.substr(0, comma));
    std::string label = trim(text.substr(comma + 1));
    if (id.empty() || label.empty() || label.find(',') != std::string::npos)
      throw InputError(source + ":" + std::to_string(lineno) + ": expected `id,label`");
    if (!out.ids) out.ids.emplace();
    out.ids->push_back(std::move(id));
    out.labels.push_back(std::move(label));
  }
  if (out.labels.empty()) throw InputError(source + ": no labels found");
  if (out.ids) {
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < out.ids->size(); ++i)
      if (!seen.emplace((*out.ids)[i], i).second)
        throw InputError(source + ": duplicate id `" + (*out.ids)[i] + "`");
  }
  return out;
}

LabelFile read_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_labels(in, path.string());
}

LabelFile align_to(const LabelFile& reference, const LabelFile& file) {
  if (reference.ids.has_value() != file.ids.has_value())
    throw InputError("one file has object ids and the other does not");
  if (reference.labels.size() != file.labels.size())
    throw InputError("files list different numbers of objects (" + std::to_string(reference.labels.size()) +
                     " vs " + std::to_string(file.labels.size()) + ")");
  if (!file.ids) return file;

  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < file.ids->size(); ++i) position.emplace((*file.ids)[i], i);
  LabelFile out;
  out.ids = reference.ids;
  out.labels.reserve(file.labels.size());
  for (const auto& id : *reference.ids) {
    auto it = position.find(id);
    if (it == position.end()) throw InputError("id `" + id + "` missing from candidate file");
    out.labels.push_back(file.labels[it->second]);
  }
  return out;
}

Labeling to_labeling(const LabelFile& file) { return Labeling(std::span<const std::string>(file.labels)); }

}  // namespace partmi::io
