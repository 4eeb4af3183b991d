#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace deckhand::zip {

struct Entry {
  std::string name;
  std::string data;
};

// Loads a whole archive into memory. Throws NotAZip when the bytes are not a
// ZIP container, MalformedPackage on a structurally broken one.
std::vector<Entry> read_archive_bytes(std::string_view bytes);
std::vector<Entry> read_archive(const std::filesystem::path& path);

// Writes entries in the given order, deflate-compressed (stored when deflate
// does not help). Timestamps are fixed so identical input produces identical
// archives. Throws IoError.
std::string write_archive_bytes(const std::vector<Entry>& entries);
void write_archive(const std::filesystem::path& path,
                   const std::vector<Entry>& entries);

}  // namespace deckhand::zip
