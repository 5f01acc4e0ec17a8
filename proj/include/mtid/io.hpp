#ifndef MTID_IO_HPP
#define MTID_IO_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mtid {

/// Locale-independent decimal formatting, 17 significant digits
/// (round-trips any double exactly).
std::string format_g17(double x);
double parse_double(const std::string& s);

/// FNV-1a 64-bit digest, hex-encoded. Used for manifest integrity records.
std::string digest_hex(const std::string& bytes);
std::string file_digest(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Columnar text block: '#'-prefixed "key: value" metadata lines, one header
/// line of column names, then one whitespace-separated record per line.
struct ColumnarFile {
    std::map<std::string, std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string serialize(const std::string& format_tag) const;
    static ColumnarFile parse(const std::string& content, const std::string& expect_tag);
};

struct Manifest {
    std::string config_digest;
    std::string tool_version;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, double>> stage_seconds;
    struct FileEntry {
        std::string name;
        std::string digest;
        std::uint64_t bytes;
    };
    std::vector<FileEntry> files;

    void add_file(const std::string& dir, const std::string& name);
    void write(const std::string& path) const;
};

} // namespace mtid

#endif
