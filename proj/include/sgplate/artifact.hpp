#pragma once

// CSV and JSON artifact emission. Every file starts with the config hash,
// numbers are printed with 17 significant digits through one code path,
// and nothing time- or pointer-dependent is ever written, so reruns of
// the same configuration produce byte-identical output.

#include <cstdio>
#include <fstream>
#include <string>

#include "sgplate/config.hpp"
#include "sgplate/error.hpp"

namespace sgp {

inline std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvFile {
  public:
    CsvFile(const std::string& path, std::uint64_t config_hash, const std::string& header)
        : os_(path), path_(path) {
        if (!os_) throw ConfigError("artifact: cannot open " + path + " for writing");
        os_ << "# config_hash=" << hash_hex(config_hash) << "\n" << header << "\n";
    }

    template <typename... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        (put(cells, first), ...);
        os_ << "\n";
    }

    void close() {
        os_.close();
        if (!os_) throw ConfigError("artifact: write to " + path_ + " failed");
    }

  private:
    void sep(bool& first) {
        if (!first) os_ << ",";
        first = false;
    }
    void put(double v, bool& first) {
        sep(first);
        os_ << g17(v);
    }
    void put(int v, bool& first) {
        sep(first);
        os_ << v;
    }
    void put(const std::string& s, bool& first) {
        sep(first);
        os_ << s;
    }
    void put(const char* s, bool& first) {
        sep(first);
        os_ << s;
    }

    std::ofstream os_;
    std::string path_;
};

// JSON summaries carry the hash as a field. The canonical dump sorts keys,
// so the byte stream is a pure function of the content.
inline void write_json_file(const std::string& path, Json j, std::uint64_t config_hash) {
    j["config_hash"] = hash_hex(config_hash);
    std::ofstream os(path);
    if (!os) throw ConfigError("artifact: cannot open " + path + " for writing");
    os << j.dump(2) << "\n";
    os.close();
    if (!os) throw ConfigError("artifact: write to " + path + " failed");
}

}  // namespace sgp
