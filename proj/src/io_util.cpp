#include "rande/io_util.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rande/rng.hpp"

namespace rande {

std::string format_double(double v) {
    char buf[40];
    // Try the shortest representation that round-trips.
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        out.flush();
        if (!out) {
            throw std::runtime_error("short write to " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_matrix_csv(const std::filesystem::path& path,
                      const std::vector<double>& values, std::size_t n_rows,
                      std::size_t n_cols) {
    if (values.size() != n_rows * n_cols) {
        throw std::invalid_argument("write_matrix_csv: size mismatch");
    }
    std::string text;
    text.reserve(values.size() * 20);
    for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (c != 0) text += ',';
            text += format_double(values[r * n_cols + c]);
        }
        text += '\n';
    }
    atomic_write_text(path, text);
}

std::vector<double> read_matrix_csv(const std::filesystem::path& path,
                                    std::size_t expected_rows,
                                    std::size_t expected_cols) {
    std::string text = read_text(path);
    std::vector<double> values;
    values.reserve(expected_rows * expected_cols);
    std::size_t rows = 0;
    const char* p = text.c_str();
    const char* end = p + text.size();
    while (p < end) {
        const char* line_end = p;
        while (line_end < end && *line_end != '\n') ++line_end;
        if (line_end != p) {
            std::size_t cols = 0;
            const char* q = p;
            while (q < line_end) {
                char* after = nullptr;
                double v = std::strtod(q, &after);
                if (after == q) {
                    throw std::runtime_error("bad number in " + path.string());
                }
                values.push_back(v);
                ++cols;
                q = after;
                if (q < line_end && *q == ',') ++q;
            }
            if (cols != expected_cols) {
                throw std::runtime_error("row with " + std::to_string(cols) +
                                         " columns in " + path.string() + ", expected " +
                                         std::to_string(expected_cols));
            }
            ++rows;
        }
        p = line_end + 1;
    }
    if (rows != expected_rows) {
        throw std::runtime_error(path.string() + " has " + std::to_string(rows) +
                                 " rows, expected " + std::to_string(expected_rows));
    }
    return values;
}

std::string hash_bytes(const std::string& bytes) {
    std::uint64_t h = fnv1a64(bytes);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hash_file(const std::filesystem::path& path) {
    return hash_bytes(read_text(path));
}

}  // namespace rande
