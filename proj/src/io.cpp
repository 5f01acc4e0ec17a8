#include "mtid/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mtid {

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw std::runtime_error("bad numeric field: '" + s + "'");
    return v;
}

std::string digest_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("short write: " + path);
}

std::string file_digest(const std::string& path) {
    return digest_hex(read_file(path));
}

std::string ColumnarFile::serialize(const std::string& format_tag) const {
    std::ostringstream out;
    out << "# " << format_tag << "\n";
    for (const auto& [k, v] : meta) out << "# " << k << ": " << v << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << (c ? " " : "") << columns[c];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? " " : "") << row[c];
        out << "\n";
    }
    return out.str();
}

ColumnarFile ColumnarFile::parse(const std::string& content, const std::string& expect_tag) {
    ColumnarFile f;
    std::istringstream in(content);
    std::string line;
    bool tag_seen = false;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            while (!body.empty() && body.front() == ' ') body.erase(body.begin());
            if (!tag_seen) {
                if (body != expect_tag)
                    throw std::runtime_error("unexpected file format: wanted '" + expect_tag +
                                             "', found '" + body + "'");
                tag_seen = true;
                continue;
            }
            const auto colon = body.find(':');
            if (colon != std::string::npos) {
                std::string key = body.substr(0, colon);
                std::string val = body.substr(colon + 1);
                while (!val.empty() && val.front() == ' ') val.erase(val.begin());
                f.meta[key] = val;
            }
            continue;
        }
        std::istringstream ls(line);
        std::vector<std::string> fields;
        std::string tok;
        while (ls >> tok) fields.push_back(tok);
        if (!header_seen) {
            f.columns = std::move(fields);
            header_seen = true;
        } else {
            f.rows.push_back(std::move(fields));
        }
    }
    if (!tag_seen) throw std::runtime_error("missing format tag '" + expect_tag + "'");
    return f;
}

void Manifest::add_file(const std::string& dir, const std::string& name) {
    const std::string content = read_file(dir + "/" + name);
    files.push_back({name, digest_hex(content), content.size()});
}

void Manifest::write(const std::string& path) const {
    nlohmann::json j;
    j["config_digest"] = config_digest;
    j["tool_version"] = tool_version;
    j["seed"] = seed;
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& [name, sec] : stage_seconds)
        stages.push_back({{"stage", name}, {"seconds", sec}});
    j["timings"] = stages;
    nlohmann::json fl = nlohmann::json::array();
    for (const auto& f : files)
        fl.push_back({{"name", f.name}, {"digest", f.digest}, {"bytes", f.bytes}});
    j["files"] = fl;
    write_file(path, j.dump(2) + "\n");
}

} // namespace mtid
