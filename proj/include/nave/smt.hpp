#pragma once

#include <initializer_list>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nave/field.hpp"

namespace nave {

/// An SMT-LIB term as an s-expression tree: either an atom or a list.
class Term {
  public:
    Term() = default;

    static Term sym(std::string name) {
        Term t;
        t.atom_ = std::move(name);
        return t;
    }

    static Term num(const BigInt& v) {
        std::ostringstream os;
        os << v;
        return sym(os.str());
    }

    /// Field constant: (as ffN F).
    static Term ff(const BigInt& residue, const std::string& sort = "F") {
        std::ostringstream os;
        os << "ff" << residue;
        return list({sym("as"), sym(os.str()), sym(sort)});
    }

    static Term list(std::vector<Term> items) {
        Term t;
        t.is_list_ = true;
        t.items_ = std::move(items);
        return t;
    }

    static Term list(std::initializer_list<Term> items) {
        return list(std::vector<Term>(items));
    }

    bool is_atom() const { return !is_list_; }
    const std::string& atom() const { return atom_; }
    const std::vector<Term>& items() const { return items_; }

    void append(Term t) { items_.push_back(std::move(t)); }

    void write(std::ostream& os) const {
        if (!is_list_) {
            os << atom_;
            return;
        }
        os << '(';
        for (std::size_t i = 0; i < items_.size(); ++i) {
            if (i) {
                os << ' ';
            }
            items_[i].write(os);
        }
        os << ')';
    }

    std::string str() const {
        std::ostringstream os;
        write(os);
        return os.str();
    }

    friend bool operator==(const Term&, const Term&) = default;

  private:
    bool is_list_{false};
    std::string atom_;
    std::vector<Term> items_;
};

struct Declaration {
    std::string symbol;
    std::string sort;  // "F" or "Int"

    friend bool operator==(const Declaration&, const Declaration&) = default;
};

/// An ordered SMT-LIB2 script: logic, declarations, assertions, and the
/// symbols whose values a model should report. Serialization is
/// deterministic; identical circuits produce byte-identical text.
struct SmtScript {
    std::string logic;
    /// Set for field scripts; emits the sort alias (define-sort F ...).
    std::optional<BigInt> field_modulus;
    /// Modulus for normalizing model values into canonical residues. Not
    /// serialized; required whenever goal_symbols is nonempty.
    std::optional<BigInt> value_modulus;
    std::vector<Declaration> declarations;
    std::vector<Term> assertions;
    std::vector<std::string> goal_symbols;

    friend bool operator==(const SmtScript&, const SmtScript&) = default;
};

/// Render the script as SMT-LIB2 text, ending with (check-sat) and, when goal
/// symbols are present, (get-value ...).
inline std::string to_smtlib2(const SmtScript& script) {
    std::ostringstream os;
    os << "(set-logic " << script.logic << ")\n";
    if (script.field_modulus) {
        os << "(define-sort F () (_ FiniteField " << *script.field_modulus << "))\n";
    }
    for (const Declaration& d : script.declarations) {
        os << "(declare-const " << d.symbol << ' ' << d.sort << ")\n";
    }
    for (const Term& a : script.assertions) {
        os << "(assert ";
        a.write(os);
        os << ")\n";
    }
    os << "(check-sat)\n";
    if (!script.goal_symbols.empty()) {
        os << "(get-value (";
        for (std::size_t i = 0; i < script.goal_symbols.size(); ++i) {
            if (i) {
                os << ' ';
            }
            os << script.goal_symbols[i];
        }
        os << "))\n";
    }
    return os.str();
}

}  // namespace nave
