#ifndef PHENOID_COMMON_IO_H_
#define PHENOID_COMMON_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace phenoid {

std::string ReadFile(const std::filesystem::path& path);

// Writes to a sibling temp file, then renames over `path`, so readers never
// observe a partially written file.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents);

// Appends one line (a trailing newline is added) and flushes to disk.
void AppendLine(const std::filesystem::path& path, std::string_view line);

std::string_view Trim(std::string_view s);
std::vector<std::string_view> Split(std::string_view s, char delim);
std::string ToLower(std::string_view s);

// Location of a shipped data file (ontology, lexicon, catalog, profiles).
// PHENOID_DATA in the environment overrides the build-time directory.
std::filesystem::path DataPath(std::string_view relative);

// Shortest decimal form that round-trips to the same double.
std::string FormatDouble(double v);

}  // namespace phenoid

#endif  // PHENOID_COMMON_IO_H_
