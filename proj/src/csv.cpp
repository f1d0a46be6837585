#include "bpnn/csv.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "bpnn/errors.hpp"

namespace bpnn {

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
    enum class State { FieldStart, Unquoted, Quoted, AfterQuoted };

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    State state = State::FieldStart;
    std::size_t line = 1;

    const auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        state = State::FieldStart;
    };
    const auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };

    for (int ci = in.get(); ci != std::char_traits<char>::eof(); ci = in.get()) {
        const char c = static_cast<char>(ci);
        if (c == '\r' && in.peek() == '\n' && state != State::Quoted) {
            continue;  // CRLF: let the LF drive the state machine
        }
        switch (state) {
            case State::FieldStart:
                if (c == '"') {
                    state = State::Quoted;
                } else if (c == ',') {
                    end_field();
                } else if (c == '\n') {
                    if (!row.empty()) end_row();  // blank lines are skipped
                    ++line;
                } else {
                    field.push_back(c);
                    state = State::Unquoted;
                }
                break;
            case State::Unquoted:
                if (c == '"') {
                    throw MalformedCsv("line " + std::to_string(line) +
                                       ": quote inside unquoted field");
                } else if (c == ',') {
                    end_field();
                } else if (c == '\n') {
                    end_row();
                    ++line;
                } else {
                    field.push_back(c);
                }
                break;
            case State::Quoted:
                if (c == '"') {
                    if (in.peek() == '"') {
                        field.push_back('"');
                        in.get();
                    } else {
                        state = State::AfterQuoted;
                    }
                } else {
                    if (c == '\n') ++line;
                    field.push_back(c);
                }
                break;
            case State::AfterQuoted:
                if (c == ',') {
                    end_field();
                } else if (c == '\n') {
                    end_row();
                    ++line;
                } else {
                    throw MalformedCsv("line " + std::to_string(line) +
                                       ": content after closing quote");
                }
                break;
        }
    }
    if (state == State::Quoted) {
        throw MalformedCsv("unterminated quoted field at end of input");
    }
    if (state != State::FieldStart || !row.empty()) {
        end_row();
    }
    return rows;
}

namespace {

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\r\n") != std::string::npos;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
    for (const std::vector<std::string>& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out << ',';
            if (needs_quoting(row[i])) {
                out << '"';
                for (char c : row[i]) {
                    if (c == '"') out << "\"\"";
                    else out << c;
                }
                out << '"';
            } else {
                out << row[i];
            }
        }
        out << '\n';
    }
}

}  // namespace bpnn
