#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>

/* Minimal CSV writer. Doubles are formatted with to_chars (shortest
 * round-trip), so the same data always produces the same bytes; files are
 * opened in binary mode so line endings don't vary by platform. */

namespace karlsim::csv {

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

class Writer {
public:
    Writer(const std::filesystem::path& path, std::string_view header)
        : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("csv: cannot open " + path.string());
        out_ << header << '\n';
    }

    template <typename... Ts>
    void row(const Ts&... vals) {
        bool first = true;
        ((out_ << (first ? "" : ","), first = false, out_ << field(vals)), ...);
        out_ << '\n';
    }

private:
    static std::string field(double v) { return format_double(v); }
    static std::string field(int v) { return std::to_string(v); }
    static std::string field(long v) { return std::to_string(v); }
    static std::string field(long long v) { return std::to_string(v); }
    static std::string field(unsigned long v) { return std::to_string(v); }
    static std::string field(bool v) { return v ? "1" : "0"; }
    static std::string field(const char* s) { return s; }
    static std::string field(const std::string& s) { return s; }

    std::ofstream out_;
};

}  // namespace karlsim::csv
