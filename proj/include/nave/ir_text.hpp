#pragma once

#include <cctype>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nave/ir.hpp"

// Textual IR documents, one opcode per line:
//
//   circuit modulus=<decimal|bn254> witnesses=<N>
//   public <idx> <idx> ...
//   assert_zero q=<int> lin=[(s,c),...] quad=[(r,a,b),...]
//   range w=<idx> bits=<n>
//   mem_init block=<id> [<idx>,<idx>,...]
//   mem_op block=<id> kind=read|write index={<expr>} value={<expr>}
//   brillig fn=<name> inputs=[{<expr>},...] outputs=[<idx>,...]
//
// <expr> repeats the q/lin/quad fields. Integers may be negative and are
// reduced modulo the circuit modulus; '#' starts a comment. serialize_circuit
// emits the canonical form (single spaces, canonical residues, all fields
// present), and parsing a canonical document reproduces it byte for byte.

namespace nave {

class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(std::vector<Diagnostic> diagnostics)
        : std::runtime_error(render(diagnostics)), diagnostics_(std::move(diagnostics)) {}

    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

  private:
    static std::string render(const std::vector<Diagnostic>& ds) {
        std::ostringstream os;
        os << "invalid circuit";
        for (const Diagnostic& d : ds) {
            os << "\n  ";
            if (d.opcode_index) {
                os << "opcode " << *d.opcode_index << ": ";
            }
            os << d.message;
        }
        return os.str();
    }

    std::vector<Diagnostic> diagnostics_;
};

namespace detail {

// Cursor over one line, tracking the column for error messages.
class LineCursor {
  public:
    LineCursor(std::string_view text, std::size_t line_no) : text_(text), line_(line_no) {}

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) {
            ++pos_;
        }
    }

    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void expect(char c) {
        if (pos_ >= text_.size() || text_[pos_] != c) {
            fail(std::string("expected '") + c + "'");
        }
        ++pos_;
    }

    bool consume(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    // keyword followed by '=' (e.g. "bits=")
    void expect_field(std::string_view name) {
        skip_ws();
        if (text_.substr(pos_).substr(0, name.size()) != name) {
            fail("expected field '" + std::string(name) + "'");
        }
        pos_ += name.size();
        expect('=');
    }

    std::string parse_identifier() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
        }
        if (start == pos_) {
            fail("expected identifier");
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    BigInt parse_int() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < text_.size() && text_[pos_] == '-') {
            ++pos_;
        }
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        if (start == pos_ || (text_[start] == '-' && pos_ == start + 1)) {
            fail("expected integer");
        }
        return BigInt(std::string(text_.substr(start, pos_ - start)));
    }

    std::uint32_t parse_u32(const char* what) {
        skip_ws();
        std::size_t col = pos_ + 1;
        BigInt v = parse_int();
        if (v < 0 || v > BigInt(UINT32_MAX)) {
            throw ParseError(line_, col, std::string(what) + " out of 32-bit range");
        }
        return static_cast<std::uint32_t>(v);
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(line_, pos_ + 1, what);
    }

    std::size_t line() const { return line_; }

  private:
    std::string_view text_;
    std::size_t line_;
    std::size_t pos_{0};
};

inline Expression parse_expression_fields(LineCursor& cur, const PrimeField& f) {
    Expression e;
    cur.expect_field("q");
    e.constant = f.reduce(cur.parse_int());
    cur.expect_field("lin");
    cur.skip_ws();
    cur.expect('[');
    while (!cur.consume(']')) {
        cur.skip_ws();
        cur.expect('(');
        LinTerm t;
        t.coeff = f.reduce(cur.parse_int());
        cur.skip_ws();
        cur.expect(',');
        t.witness.index = cur.parse_u32("witness index");
        cur.skip_ws();
        cur.expect(')');
        e.linear.push_back(t);
        cur.skip_ws();
        if (cur.peek() != ']') {
            cur.expect(',');
        }
    }
    cur.expect_field("quad");
    cur.skip_ws();
    cur.expect('[');
    while (!cur.consume(']')) {
        cur.skip_ws();
        cur.expect('(');
        QuadTerm t;
        t.coeff = f.reduce(cur.parse_int());
        cur.skip_ws();
        cur.expect(',');
        t.left.index = cur.parse_u32("witness index");
        cur.skip_ws();
        cur.expect(',');
        t.right.index = cur.parse_u32("witness index");
        cur.skip_ws();
        cur.expect(')');
        e.quadratic.push_back(t);
        cur.skip_ws();
        if (cur.peek() != ']') {
            cur.expect(',');
        }
    }
    return e;
}

inline Expression parse_braced_expression(LineCursor& cur, const PrimeField& f) {
    cur.skip_ws();
    cur.expect('{');
    Expression e = parse_expression_fields(cur, f);
    cur.skip_ws();
    cur.expect('}');
    return e;
}

inline std::vector<WitnessIndex> parse_index_list(LineCursor& cur) {
    std::vector<WitnessIndex> out;
    cur.skip_ws();
    cur.expect('[');
    while (!cur.consume(']')) {
        out.push_back({cur.parse_u32("witness index")});
        cur.skip_ws();
        if (cur.peek() != ']') {
            cur.expect(',');
        }
    }
    return out;
}

}  // namespace detail

/// Parse a textual IR document. Throws ParseError on malformed syntax and
/// ValidationError when the parsed circuit breaks a structural invariant.
inline Circuit parse_circuit(std::string_view text) {
    Circuit circuit;
    bool saw_header = false;
    bool saw_public = false;
    std::size_t line_no = 0;
    std::size_t start = 0;

    while (start <= text.size()) {
        std::size_t eol = text.find('\n', start);
        std::string_view raw =
            text.substr(start, eol == std::string_view::npos ? text.size() - start : eol - start);
        start = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        std::string_view line = raw.substr(0, raw.find('#'));
        detail::LineCursor cur(line, line_no);
        if (cur.at_end()) {
            continue;
        }

        if (!saw_header) {
            cur.expect_field("circuit modulus");
            cur.skip_ws();
            if (std::isalpha(static_cast<unsigned char>(cur.peek())) || cur.peek() == '_') {
                std::string name = cur.parse_identifier();
                if (name != "bn254") {
                    cur.fail("unknown modulus name '" + name + "'");
                }
                circuit.modulus = bn254_modulus();
            } else {
                circuit.modulus = cur.parse_int();
                if (circuit.modulus < 2) {
                    cur.fail("modulus must be >= 2");
                }
            }
            cur.expect_field("witnesses");
            circuit.num_witnesses = cur.parse_u32("witness count");
            if (!cur.at_end()) {
                cur.fail("trailing input after circuit header");
            }
            saw_header = true;
            continue;
        }

        PrimeField field(circuit.modulus);
        std::string keyword = cur.parse_identifier();

        if (keyword == "public") {
            if (saw_public || !circuit.opcodes.empty()) {
                cur.fail("'public' must appear once, directly after the header");
            }
            saw_public = true;
            while (!cur.at_end()) {
                circuit.public_inputs.push_back(cur.parse_u32("public input index"));
            }
        } else if (keyword == "assert_zero") {
            AssertZero op;
            op.expr = detail::parse_expression_fields(cur, field);
            if (!cur.at_end()) {
                cur.fail("trailing input after assert_zero");
            }
            circuit.opcodes.emplace_back(std::move(op));
        } else if (keyword == "range") {
            RangeCheck op;
            cur.expect_field("w");
            op.witness.index = cur.parse_u32("witness index");
            cur.expect_field("bits");
            op.bits = cur.parse_u32("bit count");
            if (!cur.at_end()) {
                cur.fail("trailing input after range");
            }
            circuit.opcodes.emplace_back(op);
        } else if (keyword == "mem_init") {
            MemoryInit op;
            cur.expect_field("block");
            op.block_id = cur.parse_u32("block id");
            op.witnesses = detail::parse_index_list(cur);
            if (!cur.at_end()) {
                cur.fail("trailing input after mem_init");
            }
            circuit.opcodes.emplace_back(std::move(op));
        } else if (keyword == "mem_op") {
            MemoryOp op;
            cur.expect_field("block");
            op.block_id = cur.parse_u32("block id");
            cur.expect_field("kind");
            std::string kind = cur.parse_identifier();
            if (kind == "read") {
                op.kind = MemoryOpKind::Read;
            } else if (kind == "write") {
                op.kind = MemoryOpKind::Write;
            } else {
                cur.fail("kind must be 'read' or 'write'");
            }
            cur.expect_field("index");
            op.index = detail::parse_braced_expression(cur, field);
            cur.expect_field("value");
            op.value = detail::parse_braced_expression(cur, field);
            if (!cur.at_end()) {
                cur.fail("trailing input after mem_op");
            }
            circuit.opcodes.emplace_back(std::move(op));
        } else if (keyword == "brillig") {
            BrilligCall op;
            cur.expect_field("fn");
            op.function = cur.parse_identifier();
            cur.expect_field("inputs");
            cur.skip_ws();
            cur.expect('[');
            while (!cur.consume(']')) {
                op.inputs.push_back(detail::parse_braced_expression(cur, field));
                cur.skip_ws();
                if (cur.peek() != ']') {
                    cur.expect(',');
                }
            }
            cur.expect_field("outputs");
            op.outputs = detail::parse_index_list(cur);
            if (!cur.at_end()) {
                cur.fail("trailing input after brillig");
            }
            circuit.opcodes.emplace_back(std::move(op));
        } else {
            cur.fail("unknown opcode '" + keyword + "'");
        }
    }

    if (!saw_header) {
        throw ParseError(line_no, 1, "missing circuit header");
    }

    std::vector<Diagnostic> diagnostics = validate(circuit);
    if (!diagnostics.empty()) {
        throw ValidationError(std::move(diagnostics));
    }
    return circuit;
}

namespace detail {

inline void write_expression_fields(std::ostream& os, const Expression& e) {
    os << "q=" << e.constant.value() << " lin=[";
    for (std::size_t i = 0; i < e.linear.size(); ++i) {
        if (i) {
            os << ',';
        }
        os << '(' << e.linear[i].coeff.value() << ',' << e.linear[i].witness.index << ')';
    }
    os << "] quad=[";
    for (std::size_t i = 0; i < e.quadratic.size(); ++i) {
        if (i) {
            os << ',';
        }
        os << '(' << e.quadratic[i].coeff.value() << ',' << e.quadratic[i].left.index << ','
           << e.quadratic[i].right.index << ')';
    }
    os << ']';
}

}  // namespace detail

/// Canonical textual form; parse_circuit(serialize_circuit(c)) == c.
inline std::string serialize_circuit(const Circuit& c) {
    std::ostringstream os;
    os << "circuit modulus=";
    if (c.modulus == bn254_modulus()) {
        os << "bn254";
    } else {
        os << c.modulus;
    }
    os << " witnesses=" << c.num_witnesses << '\n';
    if (!c.public_inputs.empty()) {
        os << "public";
        for (std::uint32_t w : c.public_inputs) {
            os << ' ' << w;
        }
        os << '\n';
    }
    for (const Opcode& op : c.opcodes) {
        if (const auto* az = std::get_if<AssertZero>(&op)) {
            os << "assert_zero ";
            detail::write_expression_fields(os, az->expr);
        } else if (const auto* rc = std::get_if<RangeCheck>(&op)) {
            os << "range w=" << rc->witness.index << " bits=" << rc->bits;
        } else if (const auto* mi = std::get_if<MemoryInit>(&op)) {
            os << "mem_init block=" << mi->block_id << " [";
            for (std::size_t i = 0; i < mi->witnesses.size(); ++i) {
                if (i) {
                    os << ',';
                }
                os << mi->witnesses[i].index;
            }
            os << ']';
        } else if (const auto* mo = std::get_if<MemoryOp>(&op)) {
            os << "mem_op block=" << mo->block_id << " kind="
               << (mo->kind == MemoryOpKind::Read ? "read" : "write") << " index={";
            detail::write_expression_fields(os, mo->index);
            os << "} value={";
            detail::write_expression_fields(os, mo->value);
            os << '}';
        } else if (const auto* bc = std::get_if<BrilligCall>(&op)) {
            os << "brillig fn=" << bc->function << " inputs=[";
            for (std::size_t i = 0; i < bc->inputs.size(); ++i) {
                if (i) {
                    os << ',';
                }
                os << '{';
                detail::write_expression_fields(os, bc->inputs[i]);
                os << '}';
            }
            os << "] outputs=[";
            for (std::size_t i = 0; i < bc->outputs.size(); ++i) {
                if (i) {
                    os << ',';
                }
                os << bc->outputs[i].index;
            }
            os << ']';
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace nave
