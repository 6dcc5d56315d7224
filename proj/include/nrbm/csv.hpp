#pragma once

// CSV output.  Floating-point cells are printed with 17 significant digits
// so identical runs produce byte-identical files and values round-trip
// exactly through text.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nrbm {

inline std::string format_double_17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns) : out_(path) {
        if (!out_) throw std::runtime_error("csv: cannot open " + path + " for writing");
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out_ << ',';
            out_ << columns[i];
        }
        out_ << '\n';
        width_ = columns.size();
    }

    class Row {
    public:
        explicit Row(CsvWriter& w) : w_(w) {}
        Row& operator<<(double x) {
            sep();
            w_.out_ << format_double_17(x);
            return *this;
        }
        Row& operator<<(std::uint64_t x) {
            sep();
            w_.out_ << x;
            return *this;
        }
        Row& operator<<(const std::string& s) {
            sep();
            w_.out_ << s;
            return *this;
        }
        ~Row() {
            w_.out_ << '\n';
            if (n_ != w_.width_) w_.short_row_ = true;
        }

    private:
        void sep() {
            if (n_++) w_.out_ << ',';
        }
        CsvWriter& w_;
        std::size_t n_ = 0;
    };

    Row row() { return Row(*this); }

    void close() {
        out_.close();
        if (short_row_) throw std::logic_error("csv: a row did not match the header width");
    }

private:
    friend class Row;
    std::ofstream out_;
    std::size_t width_ = 0;
    bool short_row_ = false;
};

} // namespace nrbm
