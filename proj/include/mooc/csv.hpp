#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mooc::csv {

// One parsed record and the 1-based physical line it starts on.
struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

// RFC-4180 reader: quoted fields may contain commas, doubled quotes and line
// breaks; CRLF and LF terminators are both accepted. A trailing empty line is
// not a record.
class Reader {
public:
    Reader(std::istream& in, std::string source_name);

    bool next(Row& row);

    const std::string& source() const noexcept { return source_; }

private:
    std::istream& in_;
    std::string source_;
    std::size_t line_ = 1;
};

// Reads the header row and checks it matches `expected` exactly.
void expect_header(Reader& reader, const std::vector<std::string_view>& expected);

std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace mooc::csv
