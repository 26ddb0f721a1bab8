#include "mooc/csv.hpp"

#include <istream>
#include <ostream>

#include "mooc/error.hpp"

namespace mooc::csv {

Reader::Reader(std::istream& in, std::string source_name) : in_(in), source_(std::move(source_name)) {}

bool Reader::next(Row& row) {
    row.fields.clear();
    row.line = line_;

    int c = in_.get();
    if (c == std::char_traits<char>::eof()) return false;

    std::string field;
    bool in_quotes = false;
    bool was_quoted = false;
    for (;; c = in_.get()) {
        if (c == std::char_traits<char>::eof()) {
            if (in_quotes) throw ParseError(source_, row.line, "<record>", "unterminated quoted field");
            row.fields.push_back(std::move(field));
            return true;
        }
        const char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++line_;
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                if (!field.empty() || was_quoted) {
                    throw ParseError(source_, row.line, "<record>", "quote inside unquoted field");
                }
                in_quotes = true;
                was_quoted = true;
                break;
            case ',':
                row.fields.push_back(std::move(field));
                field.clear();
                was_quoted = false;
                break;
            case '\r':
                if (in_.peek() == '\n') in_.get();
                [[fallthrough]];
            case '\n':
                ++line_;
                row.fields.push_back(std::move(field));
                return true;
            default:
                if (was_quoted) throw ParseError(source_, row.line, "<record>", "text after closing quote");
                field.push_back(ch);
        }
    }
}

void expect_header(Reader& reader, const std::vector<std::string_view>& expected) {
    Row row;
    if (!reader.next(row)) throw ParseError(reader.source(), 1, "<header>", "file is empty");
    // Tolerate a UTF-8 byte order mark on the first field.
    if (!row.fields.empty() && row.fields[0].starts_with("\xEF\xBB\xBF")) row.fields[0].erase(0, 3);
    bool ok = row.fields.size() == expected.size();
    for (std::size_t i = 0; ok && i < expected.size(); ++i) ok = row.fields[i] == expected[i];
    if (!ok) {
        std::string want;
        for (auto e : expected) {
            if (!want.empty()) want += ',';
            want += e;
        }
        throw ParseError(reader.source(), row.line, "<header>", "expected header '" + want + "'");
    }
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << escape(fields[i]);
    }
    out << '\n';
}

}  // namespace mooc::csv
