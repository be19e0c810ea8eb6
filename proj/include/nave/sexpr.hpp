#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nave {

/// A parsed s-expression: an atom (symbol, numeral, or quoted string kept
/// verbatim) or a list.
struct Sexpr {
    bool is_list{false};
    std::string atom;
    std::vector<Sexpr> items;

    bool is_atom() const { return !is_list; }

    static Sexpr make_atom(std::string a) {
        Sexpr s;
        s.atom = std::move(a);
        return s;
    }

    static Sexpr make_list(std::vector<Sexpr> items) {
        Sexpr s;
        s.is_list = true;
        s.items = std::move(items);
        return s;
    }

    friend bool operator==(const Sexpr&, const Sexpr&) = default;
};

class SexprParseError : public std::runtime_error {
  public:
    SexprParseError(std::size_t offset, const std::string& what)
        : std::runtime_error("s-expression error at offset " + std::to_string(offset) + ": " +
                             what),
          offset_(offset) {}

    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

namespace detail {

class SexprReader {
  public:
    explicit SexprReader(std::string_view text) : text_(text) {}

    std::vector<Sexpr> read_all() {
        std::vector<Sexpr> out;
        skip_trivia();
        while (pos_ < text_.size()) {
            out.push_back(read_one());
            skip_trivia();
        }
        return out;
    }

  private:
    void skip_trivia() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') {
                    ++pos_;
                }
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos_;
            } else {
                break;
            }
        }
    }

    Sexpr read_one() {
        char c = text_[pos_];
        if (c == '(') {
            std::size_t open = pos_;
            ++pos_;
            std::vector<Sexpr> items;
            while (true) {
                skip_trivia();
                if (pos_ >= text_.size()) {
                    throw SexprParseError(open, "unterminated list");
                }
                if (text_[pos_] == ')') {
                    ++pos_;
                    return Sexpr::make_list(std::move(items));
                }
                items.push_back(read_one());
            }
        }
        if (c == ')') {
            throw SexprParseError(pos_, "unmatched ')'");
        }
        if (c == '"') {
            return read_string();
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() && !is_delimiter(text_[pos_])) {
            ++pos_;
        }
        return Sexpr::make_atom(std::string(text_.substr(start, pos_ - start)));
    }

    // SMT-LIB strings escape a quote by doubling it. The atom keeps the
    // surrounding quotes so strings stay distinguishable from symbols.
    Sexpr read_string() {
        std::size_t start = pos_;
        ++pos_;
        while (true) {
            if (pos_ >= text_.size()) {
                throw SexprParseError(start, "unterminated string");
            }
            if (text_[pos_] == '"') {
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
                    pos_ += 2;
                    continue;
                }
                ++pos_;
                return Sexpr::make_atom(std::string(text_.substr(start, pos_ - start)));
            }
            ++pos_;
        }
    }

    static bool is_delimiter(char c) {
        return c == '(' || c == ')' || c == ';' || c == '"' || c == ' ' || c == '\t' ||
               c == '\r' || c == '\n';
    }

    std::string_view text_;
    std::size_t pos_{0};
};

}  // namespace detail

inline std::vector<Sexpr> parse_sexprs(std::string_view text) {
    return detail::SexprReader(text).read_all();
}

}  // namespace nave
