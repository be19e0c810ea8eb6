#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nave/field.hpp"
#include "nave/sexpr.hpp"

namespace nave {
namespace smtsolve {

/// Raised when a script steps outside the supported fragment. The engine
/// answers unknown rather than guessing.
class Unsupported : public std::runtime_error {
  public:
    explicit Unsupported(const std::string& what) : std::runtime_error(what) {}
};

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

inline BigInt ceil_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    if ((a % b) != 0 && ((a < 0) == (b < 0))) {
        ++q;
    }
    return q;
}

/// SMT-LIB mod is Euclidean: the result lies in [0, |b|).
inline BigInt euclid_mod(const BigInt& a, const BigInt& b) {
    BigInt r = a % b;
    if (r < 0) {
        r += (b < 0 ? -b : b);
    }
    return r;
}

inline std::optional<BigInt> inverse_mod(const BigInt& a, const BigInt& m) {
    BigInt old_r = euclid_mod(a, m), r = m;
    BigInt old_s = 1, s = 0;
    while (r != 0) {
        BigInt q = old_r / r;
        BigInt tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
    }
    if (old_r != 1) {
        return std::nullopt;
    }
    return euclid_mod(old_s, m);
}

inline BigInt pow_mod(BigInt base, BigInt exp, const BigInt& m) {
    BigInt result = 1;
    base = euclid_mod(base, m);
    while (exp > 0) {
        if ((exp & 1) != 0) {
            result = result * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    return result;
}

/// Tonelli-Shanks square root; expects an odd prime modulus.
inline std::optional<BigInt> sqrt_mod_prime(const BigInt& a_in, const BigInt& p) {
    BigInt a = euclid_mod(a_in, p);
    if (a == 0) {
        return BigInt(0);
    }
    if (pow_mod(a, (p - 1) / 2, p) != 1) {
        return std::nullopt;
    }
    if (p % 4 == 3) {
        return pow_mod(a, (p + 1) / 4, p);
    }
    BigInt q = p - 1;
    unsigned s = 0;
    while ((q & 1) == 0) {
        q >>= 1;
        ++s;
    }
    BigInt z = 2;
    while (pow_mod(z, (p - 1) / 2, p) != p - 1) {
        ++z;
    }
    BigInt m = s;
    BigInt c = pow_mod(z, q, p);
    BigInt t = pow_mod(a, q, p);
    BigInt r = pow_mod(a, (q + 1) / 2, p);
    while (t != 1) {
        BigInt i = 0;
        BigInt probe = t;
        while (probe != 1) {
            probe = probe * probe % p;
            ++i;
            if (i == m) {
                return std::nullopt;
            }
        }
        BigInt b = pow_mod(c, pow_mod(2, m - i - 1, p - 1), p);
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    return r;
}

/// Monomials order by total degree, then lexicographically, so the map's
/// last entry is the leading term.
struct MonoLess {
    bool operator()(const std::vector<std::uint32_t>& a,
                    const std::vector<std::uint32_t>& b) const {
        if (a.size() != b.size()) {
            return a.size() < b.size();
        }
        return a < b;
    }
};

/// Multivariate polynomial with integer coefficients. Monomials are sorted
/// variable-index vectors with multiplicity.
struct Poly {
    std::map<std::vector<std::uint32_t>, BigInt, MonoLess> terms;

    static constexpr std::size_t kMaxTerms = 4096;
    static constexpr std::size_t kMaxDegree = 8;

    static Poly constant(BigInt v) {
        Poly p;
        if (v != 0) {
            p.terms[{}] = std::move(v);
        }
        return p;
    }

    static Poly variable(std::uint32_t v) {
        Poly p;
        p.terms[{v}] = 1;
        return p;
    }

    bool is_zero() const { return terms.empty(); }

    bool is_constant() const { return terms.empty() || (terms.size() == 1 && terms.begin()->first.empty()); }

    BigInt constant_value() const {
        auto it = terms.find({});
        return it == terms.end() ? BigInt(0) : it->second;
    }

    std::size_t degree() const { return terms.empty() ? 0 : terms.rbegin()->first.size(); }

    void add_term(std::vector<std::uint32_t> mono, const BigInt& coeff) {
        if (coeff == 0) {
            return;
        }
        auto [it, inserted] = terms.try_emplace(std::move(mono), coeff);
        if (!inserted) {
            it->second += coeff;
            if (it->second == 0) {
                terms.erase(it);
            }
        }
        if (terms.size() > kMaxTerms) {
            throw Unsupported("polynomial too large");
        }
    }

    Poly add(const Poly& o) const {
        Poly r = *this;
        for (const auto& [m, c] : o.terms) {
            r.add_term(m, c);
        }
        return r;
    }

    Poly negate() const {
        Poly r;
        for (const auto& [m, c] : terms) {
            r.terms[m] = -c;
        }
        return r;
    }

    Poly sub(const Poly& o) const { return add(o.negate()); }

    Poly scale(const BigInt& k) const {
        Poly r;
        if (k == 0) {
            return r;
        }
        for (const auto& [m, c] : terms) {
            r.terms[m] = c * k;
        }
        return r;
    }

    Poly mul(const Poly& o) const {
        Poly r;
        for (const auto& [ma, ca] : terms) {
            for (const auto& [mb, cb] : o.terms) {
                std::vector<std::uint32_t> mono;
                mono.reserve(ma.size() + mb.size());
                std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(mono));
                if (mono.size() > kMaxDegree) {
                    throw Unsupported("polynomial degree too high");
                }
                r.add_term(std::move(mono), ca * cb);
            }
        }
        return r;
    }

    /// Coefficients reduced into [0, m); zero terms dropped. m = 0 keeps
    /// integer coefficients and only drops zeros.
    Poly reduced(const BigInt& m) const {
        Poly r;
        for (const auto& [mono, c] : terms) {
            BigInt v = m == 0 ? c : euclid_mod(c, m);
            if (v != 0) {
                r.terms[mono] = std::move(v);
            }
        }
        return r;
    }

    std::vector<std::uint32_t> vars() const {
        std::vector<std::uint32_t> out;
        for (const auto& [mono, c] : terms) {
            for (std::uint32_t v : mono) {
                if (std::find(out.begin(), out.end(), v) == out.end()) {
                    out.push_back(v);
                }
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    Poly substitute(std::uint32_t var, const BigInt& value) const {
        Poly r;
        for (const auto& [mono, c] : terms) {
            std::vector<std::uint32_t> rest;
            BigInt coeff = c;
            for (std::uint32_t v : mono) {
                if (v == var) {
                    coeff *= value;
                } else {
                    rest.push_back(v);
                }
            }
            r.add_term(std::move(rest), coeff);
        }
        return r;
    }

    BigInt evaluate(const std::vector<BigInt>& values) const {
        BigInt total = 0;
        for (const auto& [mono, c] : terms) {
            BigInt t = c;
            for (std::uint32_t v : mono) {
                t *= values.at(v);
            }
            total += t;
        }
        return total;
    }

    std::string repr() const {
        std::ostringstream os;
        for (const auto& [mono, c] : terms) {
            os << c << ':';
            for (std::uint32_t v : mono) {
                os << 'x' << v << '.';
            }
            os << ';';
        }
        return os.str();
    }
};

/// Cong: poly == 0 (mod m), with m = 0 meaning over the integers.
/// Cmp: poly <= 0 over the integers (strict: poly < 0). Cmp literals are
/// polarity-normalized at construction, so only Cong literals can be negated.
struct Atom {
    enum class Kind { Cong, Cmp };
    Kind kind;
    Poly poly;
    BigInt modulus;
    bool strict{false};
};

struct Lit {
    std::uint32_t atom;
    bool positive;
};

struct Clause {
    std::vector<Lit> lits;
};

enum class Answer { Sat, Unsat, Unknown };

struct SolveResult {
    Answer answer{Answer::Unknown};
    std::string reason;
    /// Values per declared symbol, present when sat.
    std::map<std::string, BigInt> model;
};

namespace detail {

struct VarInfo {
    std::string name;
    bool is_field{false};
};

/// Candidate values for one variable. An absent bound means unbounded; a
/// materialized finite set overrides the interval.
struct Domain {
    std::optional<BigInt> lo;
    std::optional<BigInt> hi;
    std::set<BigInt> exclusions;
    std::optional<std::set<BigInt>> finite;

    bool contains(const BigInt& v) const {
        if (finite) {
            return finite->count(v) != 0;
        }
        if (lo && v < *lo) {
            return false;
        }
        if (hi && v > *hi) {
            return false;
        }
        return exclusions.count(v) == 0;
    }

    friend bool operator==(const Domain&, const Domain&) = default;
};

struct SearchState {
    std::vector<std::optional<BigInt>> values;
    std::vector<Domain> domains;
    /// Per-atom decided truth: -1 unknown, 0 false, 1 true.
    std::vector<signed char> forced;
};

enum class Tri { False, True, Unknown };

inline Tri tri_of(bool b) { return b ? Tri::True : Tri::False; }

}  // namespace detail

/// Decision procedure for the script fragment the encoders emit: QF_FF terms
/// (ff.add, ff.mul, ff.bitsum, ff constants) and QF_NIA terms (+, *, -, mod,
/// comparisons) over declared constants. Assertions become clauses over
/// polynomial congruence and comparison atoms; the search combines unit
/// propagation, univariate root finding, interval reasoning, and bitsum
/// decomposition, branching only over finite candidate sets. Sat answers are
/// always re-checked by evaluating the original assertions under the full
/// model; unsat is only reported when the search space was covered exactly.
class Engine {
  public:
    static constexpr std::size_t kEnumerationLimit = 4096;
    static constexpr std::size_t kNodeBudget = 200000;
    static constexpr std::size_t kCandidateLimit = 64;

    SolveResult run(const std::string& text) {
        SolveResult result;
        result.answer = Answer::Unknown;
        std::vector<Sexpr> commands;
        try {
            commands = parse_sexprs(text);
        } catch (const SexprParseError& e) {
            result.reason = e.what();
            return result;
        }
        try {
            for (const Sexpr& cmd : commands) {
                process(cmd, result);
            }
        } catch (const Unsupported& e) {
            result.answer = Answer::Unknown;
            result.reason = e.what();
            result.model.clear();
        }
        return result;
    }

    /// Goal symbols listed by the script's get-value command, in order.
    const std::vector<std::string>& goal_symbols() const { return goal_symbols_; }

    const std::optional<BigInt>& field_modulus() const { return field_modulus_; }

    bool is_field_symbol(const std::string& name) const {
        auto it = var_ids_.find(name);
        return it != var_ids_.end() && vars_[it->second].is_field;
    }

    const std::string& field_sort_name() const { return field_sort_; }

  private:
    // ---- script processing ----

    void process(const Sexpr& cmd, SolveResult& result) {
        if (!cmd.is_list || cmd.items.empty() || !cmd.items[0].is_atom()) {
            throw Unsupported("malformed command");
        }
        const std::string& head = cmd.items[0].atom;
        if (head == "set-logic" || head == "set-info" || head == "set-option" || head == "exit" ||
            head == "echo") {
            return;
        }
        if (head == "define-sort") {
            process_define_sort(cmd);
            return;
        }
        if (head == "declare-const") {
            if (cmd.items.size() != 3 || !cmd.items[1].is_atom()) {
                throw Unsupported("malformed declare-const");
            }
            declare(cmd.items[1].atom, cmd.items[2]);
            return;
        }
        if (head == "declare-fun") {
            if (cmd.items.size() != 4 || !cmd.items[1].is_atom() || !cmd.items[2].is_list ||
                !cmd.items[2].items.empty()) {
                throw Unsupported("only zero-arity declare-fun is supported");
            }
            declare(cmd.items[1].atom, cmd.items[3]);
            return;
        }
        if (head == "assert") {
            if (cmd.items.size() != 2) {
                throw Unsupported("malformed assert");
            }
            asserted_.push_back(cmd.items[1]);
            add_assertion(cmd.items[1]);
            return;
        }
        if (head == "check-sat") {
            solve(result);
            return;
        }
        if (head == "get-value") {
            if (cmd.items.size() != 2 || !cmd.items[1].is_list) {
                throw Unsupported("malformed get-value");
            }
            goal_symbols_.clear();
            for (const Sexpr& s : cmd.items[1].items) {
                if (!s.is_atom() || !var_ids_.count(s.atom)) {
                    throw Unsupported("get-value of undeclared symbol");
                }
                goal_symbols_.push_back(s.atom);
            }
            return;
        }
        throw Unsupported("unsupported command " + head);
    }

    void process_define_sort(const Sexpr& cmd) {
        // (define-sort F () (_ FiniteField p))
        if (cmd.items.size() != 4 || !cmd.items[1].is_atom() || !cmd.items[2].is_list ||
            !cmd.items[2].items.empty() || !cmd.items[3].is_list ||
            cmd.items[3].items.size() != 3 || cmd.items[3].items[0].atom != "_" ||
            cmd.items[3].items[1].atom != "FiniteField" || !cmd.items[3].items[2].is_atom()) {
        throw Unsupported("unsupported define-sort");
        }
        BigInt p = parse_bigint(cmd.items[3].items[2].atom);
        if (p < 2) {
            throw Unsupported("field modulus must be at least 2");
        }
        if (field_modulus_ && *field_modulus_ != p) {
            throw Unsupported("conflicting field sorts");
        }
        field_modulus_ = p;
        field_sort_ = cmd.items[1].atom;
    }

    void declare(const std::string& name, const Sexpr& sort) {
        if (var_ids_.count(name)) {
            throw Unsupported("redeclared symbol " + name);
        }
        detail::VarInfo info;
        info.name = name;
        if (sort.is_atom() && sort.atom == "Int") {
            info.is_field = false;
        } else if (sort.is_atom() && field_modulus_ && sort.atom == field_sort_) {
            info.is_field = true;
        } else {
            throw Unsupported("unsupported sort for " + name);
        }
        var_ids_[name] = static_cast<std::uint32_t>(vars_.size());
        vars_.push_back(std::move(info));
    }

    // ---- formula construction ----

    struct Node {
        enum class Kind { True, False, Leaf, And, Or };
        Kind kind;
        Lit lit{};
        std::vector<Node> kids;

        static Node boolean(bool b) {
            Node n;
            n.kind = b ? Kind::True : Kind::False;
            return n;
        }

        static Node leaf(Lit l) {
            Node n;
            n.kind = Kind::Leaf;
            n.lit = l;
            return n;
        }

        static Node gate(Kind k, std::vector<Node> kids) {
            Node n;
            n.kind = k;
            n.kids = std::move(kids);
            return n;
        }
    };

    /// Typed arithmetic value of a term: a polynomial plus whether it came
    /// from field arithmetic, and the modulus of an outermost (mod _ m).
    struct Arith {
        Poly poly;
        bool is_field{false};
        std::optional<BigInt> wrapped_mod;
    };

    std::uint32_t intern_atom(Atom a) {
        a.poly = canonicalize(a);
        std::ostringstream key;
        key << (a.kind == Atom::Kind::Cong ? 'C' : 'L') << a.modulus << '|' << a.strict << '|'
            << a.poly.repr();
        auto it = atom_ids_.find(key.str());
        if (it != atom_ids_.end()) {
            return it->second;
        }
        std::uint32_t id = static_cast<std::uint32_t>(atoms_.size());
        atoms_.push_back(std::move(a));
        atom_ids_[key.str()] = id;
        return id;
    }

    /// Scale congruences to a canonical representative (unit leading
    /// coefficient mod a prime-like modulus, or content/sign-normalized over
    /// the integers) so equivalent assertions share one atom.
    Poly canonicalize(const Atom& a) const {
        Poly p = a.poly.reduced(a.modulus);
        if (a.kind == Atom::Kind::Cmp || p.terms.empty()) {
            return p;
        }
        if (a.modulus == 0) {
            BigInt content = 0;
            for (const auto& [m, c] : p.terms) {
                content = boost::multiprecision::gcd(content, c < 0 ? BigInt(-c) : c);
            }
            if (content > 1) {
                Poly q;
                for (const auto& [m, c] : p.terms) {
                    q.terms[m] = c / content;
                }
                p = std::move(q);
            }
            if (p.terms.rbegin()->second < 0) {
                p = p.negate();
            }
            return p;
        }
        const BigInt& lead = p.terms.rbegin()->second;
        if (lead == 1) {
            return p;
        }
        auto inv = inverse_mod(lead, a.modulus);
        if (!inv) {
            return p;
        }
        return p.scale(*inv).reduced(a.modulus);
    }

    Node make_cong(Poly poly, const BigInt& modulus, bool positive) {
        Poly r = poly.reduced(modulus);
        if (r.is_constant()) {
            bool zero = r.constant_value() == 0;
            return Node::boolean(zero == positive);
        }
        Atom a;
        a.kind = Atom::Kind::Cong;
        a.poly = std::move(r);
        a.modulus = modulus;
        return Node::leaf({intern_atom(std::move(a)), positive});
    }

    /// poly <= 0 (or < 0). A negative polarity becomes the flipped positive
    /// atom, so Cmp literals never carry negation.
    Node make_cmp(Poly poly, bool strict, bool positive) {
        if (!positive) {
            return make_cmp(poly.negate(), !strict, true);
        }
        if (poly.is_constant()) {
            BigInt c = poly.constant_value();
            return Node::boolean(strict ? c < 0 : c <= 0);
        }
        Atom a;
        a.kind = Atom::Kind::Cmp;
        a.poly = std::move(poly);
        a.modulus = 0;
        a.strict = strict;
        return Node::leaf({intern_atom(std::move(a)), true});
    }

    Arith eval_arith(const Sexpr& t) {
        if (t.is_atom()) {
            const std::string& s = t.atom;
            if (!s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) != 0)) {
                return {Poly::constant(parse_bigint(s)), false, std::nullopt};
            }
            auto it = var_ids_.find(s);
            if (it == var_ids_.end()) {
                throw Unsupported("unknown symbol " + s);
            }
            return {Poly::variable(it->second), vars_[it->second].is_field, std::nullopt};
        }
        if (t.items.empty() || !t.items[0].is_atom()) {
            throw Unsupported("malformed term");
        }
        const std::string& head = t.items[0].atom;
        if (head == "as") {
            // (as ffN F)
            if (t.items.size() != 3 || !t.items[1].is_atom() || !t.items[2].is_atom() ||
                t.items[1].atom.rfind("ff", 0) != 0 || !field_modulus_ ||
                t.items[2].atom != field_sort_) {
                throw Unsupported("unsupported as-expression");
            }
            BigInt v = parse_bigint(t.items[1].atom.substr(2));
            return {Poly::constant(euclid_mod(v, *field_modulus_)), true, std::nullopt};
        }
        if (head == "ff.add" || head == "ff.mul" || head == "ff.neg" || head == "ff.bitsum") {
            if (!field_modulus_) {
                throw Unsupported("field operation without field sort");
            }
            std::vector<Poly> args;
            for (std::size_t i = 1; i < t.items.size(); ++i) {
                Arith a = eval_arith(t.items[i]);
                if (a.wrapped_mod) {
                    throw Unsupported("mod inside field term");
                }
                args.push_back(std::move(a.poly));
            }
            if (args.empty()) {
                throw Unsupported(head + " needs arguments");
            }
            Poly out;
            if (head == "ff.add") {
                for (Poly& a : args) {
                    out = out.add(a);
                }
            } else if (head == "ff.mul") {
                out = Poly::constant(1);
                for (Poly& a : args) {
                    out = out.mul(a);
                }
            } else if (head == "ff.neg") {
                if (args.size() != 1) {
                    throw Unsupported("ff.neg needs one argument");
                }
                out = args[0].negate();
            } else {
                BigInt weight = 1;
                for (Poly& a : args) {
                    out = out.add(a.scale(weight));
                    weight <<= 1;
                }
            }
            return {out.reduced(*field_modulus_), true, std::nullopt};
        }
        if (head == "+" || head == "*" || head == "-") {
            std::vector<Poly> args;
            for (std::size_t i = 1; i < t.items.size(); ++i) {
                Arith a = eval_arith(t.items[i]);
                if (a.is_field || a.wrapped_mod) {
                    throw Unsupported("mixed or mod operand under " + head);
                }
                args.push_back(std::move(a.poly));
            }
            if (args.empty()) {
                throw Unsupported(head + " needs arguments");
            }
            Poly out;
            if (head == "+") {
                for (Poly& a : args) {
                    out = out.add(a);
                }
            } else if (head == "*") {
                out = Poly::constant(1);
                for (Poly& a : args) {
                    out = out.mul(a);
                }
            } else if (args.size() == 1) {
                out = args[0].negate();
            } else {
                out = args[0];
                for (std::size_t i = 1; i < args.size(); ++i) {
                    out = out.sub(args[i]);
                }
            }
            return {std::move(out), false, std::nullopt};
        }
        if (head == "mod") {
            if (t.items.size() != 3) {
                throw Unsupported("malformed mod");
            }
            Arith a = eval_arith(t.items[1]);
            Arith b = eval_arith(t.items[2]);
            if (a.is_field || b.is_field || !b.poly.is_constant() || b.poly.constant_value() <= 0) {
                throw Unsupported("unsupported mod");
            }
            BigInt m = b.poly.constant_value();
            if (a.wrapped_mod && *a.wrapped_mod != m) {
                throw Unsupported("nested mod with a different modulus");
            }
            if (a.poly.is_constant()) {
                return {Poly::constant(euclid_mod(a.poly.constant_value(), m)), false,
                        std::nullopt};
            }
            return {std::move(a.poly), false, m};
        }
        throw Unsupported("unsupported operator " + head);
    }

    Node build_equality(const Sexpr& lhs_t, const Sexpr& rhs_t, bool positive) {
        Arith lhs = eval_arith(lhs_t);
        Arith rhs = eval_arith(rhs_t);
        if (lhs.is_field != rhs.is_field) {
            if (lhs.poly.is_constant() || rhs.poly.is_constant()) {
                // A bare numeral adapts to the field side.
                lhs.is_field = rhs.is_field = true;
            } else {
                throw Unsupported("equality between sorts");
            }
        }
        if (lhs.is_field) {
            return make_cong(lhs.poly.sub(rhs.poly), *field_modulus_, positive);
        }
        if (!lhs.wrapped_mod && !rhs.wrapped_mod) {
            return make_cong(lhs.poly.sub(rhs.poly), 0, positive);
        }
        BigInt m = lhs.wrapped_mod ? *lhs.wrapped_mod : *rhs.wrapped_mod;
        if (lhs.wrapped_mod && rhs.wrapped_mod && *lhs.wrapped_mod != *rhs.wrapped_mod) {
            throw Unsupported("equality between different moduli");
        }
        // (mod e m) = t  <=>  e == t (mod m)  and  0 <= t < m for a plain t.
        std::vector<Node> parts;
        parts.push_back(make_cong(lhs.poly.sub(rhs.poly), m, positive));
        for (const Arith* side : {&lhs, &rhs}) {
            if (side->wrapped_mod) {
                continue;
            }
            parts.push_back(make_cmp(side->poly.negate(), false, positive));
            parts.push_back(make_cmp(side->poly.sub(Poly::constant(m)), true, positive));
        }
        if (parts.size() == 1) {
            return std::move(parts[0]);
        }
        return Node::gate(positive ? Node::Kind::And : Node::Kind::Or, std::move(parts));
    }

    Node build_formula(const Sexpr& t, bool positive) {
        if (t.is_atom()) {
            if (t.atom == "true") {
                return Node::boolean(positive);
            }
            if (t.atom == "false") {
                return Node::boolean(!positive);
            }
            throw Unsupported("boolean symbol " + t.atom);
        }
        if (t.items.empty() || !t.items[0].is_atom()) {
            throw Unsupported("malformed formula");
        }
        const std::string& head = t.items[0].atom;
        if (head == "not") {
            if (t.items.size() != 2) {
                throw Unsupported("malformed not");
            }
            return build_formula(t.items[1], !positive);
        }
        if (head == "and" || head == "or") {
            bool conj = (head == "and") == positive;
            std::vector<Node> kids;
            for (std::size_t i = 1; i < t.items.size(); ++i) {
                kids.push_back(build_formula(t.items[i], positive));
            }
            return Node::gate(conj ? Node::Kind::And : Node::Kind::Or, std::move(kids));
        }
        if (head == "=>") {
            if (t.items.size() != 3) {
                throw Unsupported("malformed =>");
            }
            std::vector<Node> kids;
            kids.push_back(build_formula(t.items[1], !positive));
            kids.push_back(build_formula(t.items[2], positive));
            return Node::gate(positive ? Node::Kind::Or : Node::Kind::And, std::move(kids));
        }
        if (head == "=") {
            if (t.items.size() != 3) {
                throw Unsupported("only binary = is supported");
            }
            return build_equality(t.items[1], t.items[2], positive);
        }
        if (head == "<=" || head == "<" || head == ">=" || head == ">") {
            if (t.items.size() != 3) {
                throw Unsupported("malformed comparison");
            }
            Arith a = eval_arith(t.items[1]);
            Arith b = eval_arith(t.items[2]);
            if (a.is_field || b.is_field || a.wrapped_mod || b.wrapped_mod) {
                throw Unsupported("comparison outside integer terms");
            }
            Poly diff = (head == "<=" || head == "<") ? a.poly.sub(b.poly) : b.poly.sub(a.poly);
            bool strict = head == "<" || head == ">";
            return make_cmp(std::move(diff), strict, positive);
        }
        throw Unsupported("unsupported connective " + head);
    }

    void add_assertion(const Sexpr& t) {
        Node n = build_formula(t, true);
        std::vector<Clause> clauses;
        to_clauses(n, clauses);
        for (Clause& c : clauses) {
            clauses_.push_back(std::move(c));
        }
    }

    static constexpr std::size_t kMaxClauseLits = 100000;

    void to_clauses(const Node& n, std::vector<Clause>& out) const {
        switch (n.kind) {
            case Node::Kind::True:
                return;
            case Node::Kind::False:
                out.push_back(Clause{});
                return;
            case Node::Kind::Leaf:
                out.push_back(Clause{{n.lit}});
                return;
            case Node::Kind::And:
                for (const Node& k : n.kids) {
                    to_clauses(k, out);
                }
                return;
            case Node::Kind::Or: {
                std::vector<Clause> acc{Clause{}};
                for (const Node& k : n.kids) {
                    std::vector<Clause> kid;
                    to_clauses(k, kid);
                    if (kid.empty()) {
                        // Child is true, so the disjunction is true.
                        return;
                    }
                    std::vector<Clause> next;
                    std::size_t total = 0;
                    for (const Clause& a : acc) {
                        for (const Clause& b : kid) {
                            Clause merged = a;
                            merged.lits.insert(merged.lits.end(), b.lits.begin(), b.lits.end());
                            total += merged.lits.size();
                            if (total > kMaxClauseLits) {
                                throw Unsupported("clause expansion too large");
                            }
                            next.push_back(std::move(merged));
                        }
                    }
                    acc = std::move(next);
                }
                for (Clause& c : acc) {
                    out.push_back(std::move(c));
                }
                return;
            }
        }
    }

    // ---- search ----

    void solve(SolveResult& result) {
        detail::SearchState st;
        st.values.resize(vars_.size());
        st.domains.resize(vars_.size());
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (vars_[i].is_field) {
                st.domains[i].lo = 0;
                st.domains[i].hi = *field_modulus_ - 1;
            }
        }
        st.forced.assign(atoms_.size(), -1);
        nodes_ = 0;
        model_.clear();
        Answer a = search(st);
        result.answer = a;
        result.model.clear();
        if (a == Answer::Sat) {
            for (std::size_t i = 0; i < vars_.size(); ++i) {
                result.model[vars_[i].name] = model_[i];
            }
        } else if (a == Answer::Unknown && result.reason.empty()) {
            result.reason = unknown_reason_;
        }
    }

    Answer search(detail::SearchState& st) {
        if (++nodes_ > kNodeBudget) {
            unknown_reason_ = "search budget exhausted";
            return Answer::Unknown;
        }
        if (!propagate(st)) {
            return Answer::Unsat;
        }
        std::optional<std::uint32_t> branch_var;
        std::vector<BigInt> candidates;
        bool all_assigned = true;
        for (std::uint32_t v = 0; v < vars_.size(); ++v) {
            if (st.values[v]) {
                continue;
            }
            all_assigned = false;
            auto cand = enumerable_candidates(st.domains[v]);
            if (!cand) {
                continue;
            }
            if (!branch_var || cand->size() < candidates.size()) {
                branch_var = v;
                candidates = std::move(*cand);
            }
        }
        if (all_assigned) {
            return check_full_assignment(st) ? Answer::Sat : Answer::Unsat;
        }
        if (branch_var) {
            if (candidates.empty()) {
                return Answer::Unsat;
            }
            bool saw_unknown = false;
            for (const BigInt& v : candidates) {
                detail::SearchState child = st;
                if (!assign(child, *branch_var, v)) {
                    continue;
                }
                Answer a = search(child);
                if (a == Answer::Sat) {
                    return a;
                }
                if (a == Answer::Unknown) {
                    saw_unknown = true;
                }
            }
            return saw_unknown ? Answer::Unknown : Answer::Unsat;
        }
        // No variable has an enumerable domain; try a few promising values
        // for the first unassigned one. Failure here proves nothing.
        std::uint32_t var = 0;
        while (var < vars_.size() && st.values[var]) {
            ++var;
        }
        for (const BigInt& v : heuristic_candidates(st, var)) {
            detail::SearchState child = st;
            if (!assign(child, var, v)) {
                continue;
            }
            if (search(child) == Answer::Sat) {
                return Answer::Sat;
            }
        }
        unknown_reason_ = "no enumerable domain for " + vars_[var].name;
        return Answer::Unknown;
    }

    std::optional<std::vector<BigInt>> enumerable_candidates(const detail::Domain& d) const {
        if (d.finite) {
            return std::vector<BigInt>(d.finite->begin(), d.finite->end());
        }
        if (!d.lo || !d.hi) {
            return std::nullopt;
        }
        if (*d.hi - *d.lo >= BigInt(kEnumerationLimit)) {
            return std::nullopt;
        }
        std::vector<BigInt> out;
        for (BigInt v = *d.lo; v <= *d.hi; ++v) {
            if (!d.exclusions.count(v)) {
                out.push_back(v);
            }
        }
        return out;
    }

    std::vector<BigInt> heuristic_candidates(const detail::SearchState& st,
                                             std::uint32_t var) const {
        const detail::Domain& d = st.domains[var];
        std::set<BigInt> tries;
        auto offer = [&](BigInt v) {
            if (tries.size() < kCandidateLimit && d.contains(v)) {
                tries.insert(std::move(v));
            }
        };
        offer(0);
        offer(1);
        offer(2);
        if (d.hi) {
            offer(*d.hi);
        }
        for (const BigInt& e : d.exclusions) {
            offer(e + 1);
            if (e > 0) {
                offer(e - 1);
            }
        }
        return std::vector<BigInt>(tries.begin(), tries.end());
    }

    bool assign(detail::SearchState& st, std::uint32_t var, const BigInt& value) const {
        if (!st.domains[var].contains(value)) {
            return false;
        }
        st.values[var] = value;
        return true;
    }

    /// Propagation to fixpoint; false means conflict.
    bool propagate(detail::SearchState& st) const {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const Clause& clause : clauses_) {
                bool satisfied = false;
                std::size_t unknown_count = 0;
                Lit unit{};
                for (const Lit& lit : clause.lits) {
                    detail::Tri t = literal_truth(st, lit);
                    if (t == detail::Tri::True) {
                        satisfied = true;
                        break;
                    }
                    if (t == detail::Tri::Unknown) {
                        ++unknown_count;
                        unit = lit;
                    }
                }
                if (satisfied) {
                    continue;
                }
                if (unknown_count == 0) {
                    return false;
                }
                if (unknown_count == 1) {
                    if (!force_literal(st, unit)) {
                        return false;
                    }
                    changed = true;
                }
            }
            if (!bitsum_pass(st, changed)) {
                return false;
            }
            if (!collapse_domains(st, changed)) {
                return false;
            }
            // Assignments made above can turn a previously multivariate
            // forced atom univariate; re-derive its domain consequences.
            auto values_before = st.values;
            auto domains_before = st.domains;
            for (std::size_t i = 0; i < atoms_.size(); ++i) {
                if (st.forced[i] == -1) {
                    continue;
                }
                if (!apply_consequence(st, atoms_[i], st.forced[i] == 1)) {
                    return false;
                }
            }
            if (st.values != values_before || st.domains != domains_before) {
                changed = true;
            }
        }
        return true;
    }

    detail::Tri literal_truth(const detail::SearchState& st, const Lit& lit) const {
        if (st.forced[lit.atom] != -1) {
            bool value = st.forced[lit.atom] == 1;
            return detail::tri_of(value == lit.positive);
        }
        detail::Tri t = atom_truth(st, atoms_[lit.atom]);
        if (t == detail::Tri::Unknown) {
            return t;
        }
        return detail::tri_of((t == detail::Tri::True) == lit.positive);
    }

    Poly residual(const detail::SearchState& st, const Poly& p) const {
        Poly r = p;
        for (std::uint32_t v : p.vars()) {
            if (st.values[v]) {
                r = r.substitute(v, *st.values[v]);
            }
        }
        return r;
    }

    detail::Tri atom_truth(const detail::SearchState& st, const Atom& a) const {
        Poly r = residual(st, a.poly);
        if (r.is_constant()) {
            BigInt c = r.constant_value();
            if (a.kind == Atom::Kind::Cong) {
                bool zero = a.modulus == 0 ? c == 0 : euclid_mod(c, a.modulus) == 0;
                return detail::tri_of(zero);
            }
            return detail::tri_of(a.strict ? c < 0 : c <= 0);
        }
        auto rv = r.vars();
        if (rv.size() != 1) {
            return detail::Tri::Unknown;
        }
        std::uint32_t var = rv[0];
        const detail::Domain& d = st.domains[var];
        if (a.kind == Atom::Kind::Cong) {
            auto cand = enumerable_candidates(d);
            if (cand) {
                bool any_true = false;
                bool any_false = false;
                for (const BigInt& v : *cand) {
                    (root_matches(r, a.modulus, v) ? any_true : any_false) = true;
                    if (any_true && any_false) {
                        break;
                    }
                }
                if (!any_true) {
                    return detail::Tri::False;
                }
                if (!any_false) {
                    return detail::Tri::True;
                }
                return detail::Tri::Unknown;
            }
            auto roots = univariate_roots(r, a.modulus);
            if (!roots) {
                return detail::Tri::Unknown;
            }
            if (a.modulus != 0 && !(d.lo && d.hi && *d.lo >= 0 && *d.hi < a.modulus)) {
                // Roots are residues; a domain reaching outside [0, m) may
                // hold shifted copies.
                return detail::Tri::Unknown;
            }
            for (const BigInt& root : *roots) {
                if (d.contains(root)) {
                    return detail::Tri::Unknown;
                }
            }
            return detail::Tri::False;
        }
        // Cmp over one variable: decide when the whole interval agrees.
        auto lin = linear_parts(r);
        if (!lin) {
            return detail::Tri::Unknown;
        }
        auto [coeff, constant] = *lin;
        if (d.lo && d.hi) {
            BigInt at_lo = coeff * *d.lo + constant;
            BigInt at_hi = coeff * *d.hi + constant;
            BigInt lo_val = coeff > 0 ? at_lo : at_hi;
            BigInt hi_val = coeff > 0 ? at_hi : at_lo;
            if (a.strict ? hi_val < 0 : hi_val <= 0) {
                return detail::Tri::True;
            }
            if (a.strict ? lo_val >= 0 : lo_val > 0) {
                return detail::Tri::False;
            }
        }
        return detail::Tri::Unknown;
    }

    static bool root_matches(const Poly& univariate, const BigInt& modulus, const BigInt& v) {
        std::vector<BigInt> point;
        std::uint32_t var = univariate.vars()[0];
        point.resize(var + 1, 0);
        point[var] = v;
        BigInt val = univariate.evaluate(point);
        return modulus == 0 ? val == 0 : euclid_mod(val, modulus) == 0;
    }

    static std::optional<std::pair<BigInt, BigInt>> linear_parts(const Poly& p) {
        if (p.degree() > 1) {
            return std::nullopt;
        }
        BigInt coeff = 0, constant = 0;
        for (const auto& [mono, c] : p.terms) {
            if (mono.empty()) {
                constant = c;
            } else {
                coeff = c;
            }
        }
        return std::make_pair(coeff, constant);
    }

    /// Roots of a univariate polynomial. Scans small moduli; solves linear
    /// and quadratic congruences for prime-sized ones.
    std::optional<std::vector<BigInt>> univariate_roots(const Poly& p, const BigInt& m) const {
        std::map<std::size_t, BigInt> coeffs;  // by exponent
        for (const auto& [mono, c] : p.terms) {
            coeffs[mono.size()] = m == 0 ? c : euclid_mod(c, m);
        }
        if (m == 0) {
            // Integer roots of a linear polynomial only.
            if (p.degree() != 1) {
                return std::nullopt;
            }
            BigInt a = coeffs.count(1) ? coeffs[1] : BigInt(0);
            BigInt b = coeffs.count(0) ? coeffs[0] : BigInt(0);
            std::vector<BigInt> out;
            if (a != 0 && (-b) % a == 0) {
                out.push_back(-b / a);
            }
            return out;
        }
        if (m <= BigInt(kEnumerationLimit)) {
            std::vector<BigInt> out;
            for (BigInt v = 0; v < m; ++v) {
                if (root_matches(p, m, v)) {
                    out.push_back(v);
                }
            }
            return out;
        }
        std::size_t deg = p.degree();
        if (deg == 1) {
            BigInt a = coeffs.count(1) ? coeffs[1] : BigInt(0);
            BigInt b = coeffs.count(0) ? coeffs[0] : BigInt(0);
            auto inv = inverse_mod(a, m);
            if (!inv) {
                return std::nullopt;
            }
            return std::vector<BigInt>{euclid_mod(-b * *inv, m)};
        }
        if (deg == 2 && is_probable_prime(m)) {
            BigInt a = coeffs.count(2) ? coeffs[2] : BigInt(0);
            BigInt b = coeffs.count(1) ? coeffs[1] : BigInt(0);
            BigInt c = coeffs.count(0) ? coeffs[0] : BigInt(0);
            BigInt disc = euclid_mod(b * b - 4 * a * c, m);
            auto s = sqrt_mod_prime(disc, m);
            if (!s) {
                return std::vector<BigInt>{};
            }
            auto inv2a = inverse_mod(2 * a, m);
            if (!inv2a) {
                return std::nullopt;
            }
            std::vector<BigInt> out;
            out.push_back(euclid_mod((-b + *s) * *inv2a, m));
            BigInt second = euclid_mod((-b - *s) * *inv2a, m);
            if (second != out[0]) {
                out.push_back(second);
            }
            std::sort(out.begin(), out.end());
            return out;
        }
        return std::nullopt;
    }

    bool force_literal(detail::SearchState& st, const Lit& lit) const {
        st.forced[lit.atom] = lit.positive ? 1 : 0;
        return apply_consequence(st, atoms_[lit.atom], lit.positive);
    }

    bool apply_consequence(detail::SearchState& st, const Atom& a, bool want_true) const {
        Poly r = residual(st, a.poly);
        if (r.is_constant()) {
            BigInt c = r.constant_value();
            bool actual;
            if (a.kind == Atom::Kind::Cong) {
                actual = a.modulus == 0 ? c == 0 : euclid_mod(c, a.modulus) == 0;
            } else {
                actual = a.strict ? c < 0 : c <= 0;
            }
            return actual == want_true;
        }
        auto rv = r.vars();
        if (rv.size() != 1) {
            return true;  // nothing to refine yet; leaf evaluation is exact
        }
        std::uint32_t var = rv[0];
        detail::Domain& d = st.domains[var];
        if (a.kind == Atom::Kind::Cong) {
            if (d.finite) {
                // Filter the candidate set by direct evaluation; exact for
                // any value range.
                for (auto it = d.finite->begin(); it != d.finite->end();) {
                    if (root_matches(r, a.modulus, *it) == want_true) {
                        ++it;
                    } else {
                        it = d.finite->erase(it);
                    }
                }
                return !d.finite->empty();
            }
            auto roots = univariate_roots(r, a.modulus);
            if (!roots) {
                return true;
            }
            if (want_true) {
                if (a.modulus != 0 &&
                    !(d.lo && d.hi && *d.lo >= 0 && *d.hi < a.modulus)) {
                    // Roots are residues; a domain reaching outside [0, m)
                    // may hold shifted copies, so no restriction applies.
                    return true;
                }
                std::set<BigInt> keep;
                for (const BigInt& root : *roots) {
                    if (d.contains(root)) {
                        keep.insert(root);
                    }
                }
                d.finite = std::move(keep);
                d.exclusions.clear();
                return !d.finite->empty();
            }
            // Excluding a genuine root is sound regardless of the domain's
            // range; shifted copies merely stay unpruned.
            for (const BigInt& root : *roots) {
                d.exclusions.insert(root);
            }
            return true;
        }
        auto lin = linear_parts(r);
        if (!lin) {
            return true;
        }
        auto [coeff, constant] = *lin;
        // coeff * var + constant <= 0 (or < 0); want_true always holds for
        // Cmp literals since negation was normalized away.
        BigInt rhs = -constant;
        if (coeff > 0) {
            BigInt bound = a.strict ? ceil_div(rhs, coeff) - 1 : floor_div(rhs, coeff);
            if (!d.hi || *d.hi > bound) {
                d.hi = bound;
            }
        } else {
            BigInt bound = a.strict ? floor_div(rhs, coeff) + 1 : ceil_div(rhs, coeff);
            if (!d.lo || *d.lo < bound) {
                d.lo = bound;
            }
        }
        if (d.finite) {
            for (auto it = d.finite->begin(); it != d.finite->end();) {
                if ((d.lo && *it < *d.lo) || (d.hi && *it > *d.hi)) {
                    it = d.finite->erase(it);
                } else {
                    ++it;
                }
            }
            if (d.finite->empty()) {
                return false;
            }
        } else if (d.lo && d.hi && *d.lo > *d.hi) {
            return false;
        }
        return true;
    }

    /// Forced-true linear congruences over {0,1}-domain variables whose
    /// coefficients are distinct powers of two pin every bit of the target.
    /// Interning rescales congruences to a unit leading coefficient, so the
    /// weights are usually hidden behind a constant factor; scaling by the
    /// inverse of the coefficient that played the role of 2^0 restores them,
    /// and trying every coefficient as that candidate finds it when it exists.
    bool bitsum_pass(detail::SearchState& st, bool& changed) const {
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if (st.forced[i] != 1 || atoms_[i].kind != Atom::Kind::Cong ||
                atoms_[i].modulus == 0) {
                continue;
            }
            const BigInt& m = atoms_[i].modulus;
            Poly r = residual(st, atoms_[i].poly);
            if (r.is_constant() || r.degree() != 1) {
                continue;
            }
            BigInt constant = 0;
            std::vector<std::pair<std::uint32_t, BigInt>> vars;  // var, raw coeff
            bool boolean_vars = true;
            for (const auto& [mono, c] : r.terms) {
                if (mono.empty()) {
                    constant = c;
                    continue;
                }
                const detail::Domain& d = st.domains[mono[0]];
                bool boolean = d.finite
                                   ? std::all_of(d.finite->begin(), d.finite->end(),
                                                 [](const BigInt& v) { return v == 0 || v == 1; })
                                   : (d.lo && d.hi && *d.lo >= 0 && *d.hi <= 1);
                if (!boolean) {
                    boolean_vars = false;
                    break;
                }
                vars.emplace_back(mono[0], euclid_mod(c, m));
            }
            if (!boolean_vars || vars.empty()) {
                continue;
            }

            std::vector<std::pair<std::uint32_t, BigInt>> bits;  // var, weight
            BigInt target = 0;
            bool matched = false;
            for (std::size_t k = 0; !matched && k < vars.size(); ++k) {
                auto inv = inverse_mod(vars[k].second, m);
                if (!inv) {
                    continue;
                }
                bits.clear();
                BigInt max_sum = 0;
                std::set<BigInt> weights;
                bool shaped = true;
                for (const auto& [var, c] : vars) {
                    BigInt w = euclid_mod(c * *inv, m);
                    if (w == 0 || (w & (w - 1)) != 0 || !weights.insert(w).second) {
                        shaped = false;
                        break;
                    }
                    bits.emplace_back(var, w);
                    max_sum += w;
                }
                if (!shaped || max_sum >= m) {
                    continue;
                }
                target = euclid_mod(-constant * *inv, m);
                if (target > max_sum) {
                    // the rescaled congruence is equivalent and has no
                    // boolean solution, so the branch is dead
                    return false;
                }
                matched = true;
            }
            if (!matched) {
                continue;
            }

            // Greedy from the heaviest weight; unique because weights are
            // distinct powers of two summing below the modulus.
            std::sort(bits.begin(), bits.end(),
                      [](const auto& a, const auto& b) { return a.second > b.second; });
            std::map<std::uint32_t, BigInt> assignment;
            BigInt rest = target;
            for (const auto& [var, w] : bits) {
                if (rest >= w) {
                    assignment[var] = 1;
                    rest -= w;
                } else {
                    assignment[var] = 0;
                }
            }
            if (rest != 0) {
                return false;
            }
            for (const auto& [var, value] : assignment) {
                if (!st.values[var]) {
                    if (!assign_checked(st, var, value)) {
                        return false;
                    }
                    changed = true;
                }
            }
        }
        return true;
    }

    bool assign_checked(detail::SearchState& st, std::uint32_t var, const BigInt& value) const {
        if (!st.domains[var].contains(value)) {
            return false;
        }
        st.values[var] = value;
        return true;
    }

    bool collapse_domains(detail::SearchState& st, bool& changed) const {
        for (std::uint32_t v = 0; v < vars_.size(); ++v) {
            if (st.values[v]) {
                continue;
            }
            detail::Domain& d = st.domains[v];
            if (d.finite) {
                if (d.finite->empty()) {
                    return false;
                }
                if (d.finite->size() == 1) {
                    st.values[v] = *d.finite->begin();
                    changed = true;
                }
                continue;
            }
            if (d.lo && d.hi) {
                if (*d.lo > *d.hi) {
                    return false;
                }
                if (*d.lo == *d.hi) {
                    if (d.exclusions.count(*d.lo)) {
                        return false;
                    }
                    st.values[v] = *d.lo;
                    changed = true;
                }
            }
        }
        return true;
    }

    // ---- exact model check ----

    bool check_full_assignment(detail::SearchState& st) {
        std::vector<BigInt> values(vars_.size());
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            values[i] = *st.values[i];
        }
        for (const Sexpr& a : asserted_) {
            if (!eval_bool(a, values)) {
                return false;
            }
        }
        model_ = values;
        return true;
    }

    BigInt eval_value(const Sexpr& t, const std::vector<BigInt>& values) const {
        if (t.is_atom()) {
            const std::string& s = t.atom;
            if (!s.empty() && std::isdigit(static_cast<unsigned char>(s[0])) != 0) {
                return parse_bigint(s);
            }
            auto it = var_ids_.find(s);
            if (it == var_ids_.end()) {
                throw Unsupported("unknown symbol " + s);
            }
            return values[it->second];
        }
        const std::string& head = t.items.at(0).atom;
        if (head == "as") {
            return euclid_mod(parse_bigint(t.items.at(1).atom.substr(2)), *field_modulus_);
        }
        if (head == "ff.add" || head == "ff.mul" || head == "ff.neg" || head == "ff.bitsum") {
            const BigInt& p = *field_modulus_;
            if (head == "ff.neg") {
                return euclid_mod(-eval_value(t.items.at(1), values), p);
            }
            BigInt acc = head == "ff.mul" ? 1 : 0;
            BigInt weight = 1;
            for (std::size_t i = 1; i < t.items.size(); ++i) {
                BigInt v = eval_value(t.items[i], values);
                if (head == "ff.add") {
                    acc += v;
                } else if (head == "ff.mul") {
                    acc = acc * v % p;
                } else {
                    acc += weight * v;
                    weight <<= 1;
                }
            }
            return euclid_mod(acc, p);
        }
        if (head == "+") {
            BigInt acc = 0;
            for (std::size_t i = 1; i < t.items.size(); ++i) {
                acc += eval_value(t.items[i], values);
            }
            return acc;
        }
        if (head == "*") {
            BigInt acc = 1;
            for (std::size_t i = 1; i < t.items.size(); ++i) {
                acc *= eval_value(t.items[i], values);
            }
            return acc;
        }
        if (head == "-") {
            if (t.items.size() == 2) {
                return -eval_value(t.items[1], values);
            }
            BigInt acc = eval_value(t.items.at(1), values);
            for (std::size_t i = 2; i < t.items.size(); ++i) {
                acc -= eval_value(t.items[i], values);
            }
            return acc;
        }
        if (head == "mod") {
            return euclid_mod(eval_value(t.items.at(1), values),
                              eval_value(t.items.at(2), values));
        }
        throw Unsupported("unsupported value operator " + head);
    }

    bool eval_bool(const Sexpr& t, const std::vector<BigInt>& values) const {
        if (t.is_atom()) {
            if (t.atom == "true") {
                return true;
            }
            if (t.atom == "false") {
                return false;
            }
            throw Unsupported("boolean symbol " + t.atom);
        }
        const std::string& head = t.items.at(0).atom;
        if (head == "not") {
            return !eval_bool(t.items.at(1), values);
        }
        if (head == "and") {
            for (std::size_t i = 1; i < t.items.size(); ++i) {
                if (!eval_bool(t.items[i], values)) {
                    return false;
                }
            }
            return true;
        }
        if (head == "or") {
            for (std::size_t i = 1; i < t.items.size(); ++i) {
                if (eval_bool(t.items[i], values)) {
                    return true;
                }
            }
            return false;
        }
        if (head == "=>") {
            return !eval_bool(t.items.at(1), values) || eval_bool(t.items.at(2), values);
        }
        if (head == "=") {
            return eval_value(t.items.at(1), values) == eval_value(t.items.at(2), values);
        }
        if (head == "<=") {
            return eval_value(t.items.at(1), values) <= eval_value(t.items.at(2), values);
        }
        if (head == "<") {
            return eval_value(t.items.at(1), values) < eval_value(t.items.at(2), values);
        }
        if (head == ">=") {
            return eval_value(t.items.at(1), values) >= eval_value(t.items.at(2), values);
        }
        if (head == ">") {
            return eval_value(t.items.at(1), values) > eval_value(t.items.at(2), values);
        }
        throw Unsupported("unsupported connective " + head);
    }

    std::map<std::string, std::uint32_t> var_ids_;
    std::vector<detail::VarInfo> vars_;
    std::optional<BigInt> field_modulus_;
    std::string field_sort_{"F"};
    std::vector<Atom> atoms_;
    std::map<std::string, std::uint32_t> atom_ids_;
    std::vector<Clause> clauses_;
    std::vector<Sexpr> asserted_;
    std::vector<std::string> goal_symbols_;
    std::vector<BigInt> model_;
    std::size_t nodes_{0};
    std::string unknown_reason_;
};

/// Run a whole script and render the answer the way a solver binary would:
/// first line sat/unsat/unknown, then one get-value response line when the
/// script requested values after a sat answer.
struct ScriptOutput {
    SolveResult result;
    std::string stdout_text;
};

inline ScriptOutput run_script(const std::string& text) {
    Engine engine;
    ScriptOutput out;
    out.result = engine.run(text);
    std::ostringstream os;
    switch (out.result.answer) {
        case Answer::Sat:
            os << "sat\n";
            break;
        case Answer::Unsat:
            os << "unsat\n";
            break;
        case Answer::Unknown:
            os << "unknown\n";
            break;
    }
    if (out.result.answer == Answer::Sat && !engine.goal_symbols().empty()) {
        os << '(';
        bool first = true;
        for (const std::string& name : engine.goal_symbols()) {
            if (!first) {
                os << ' ';
            }
            first = false;
            const BigInt& v = out.result.model.at(name);
            os << '(' << name << ' ';
            if (engine.is_field_symbol(name)) {
                os << "(as ff" << v << ' ' << engine.field_sort_name() << ')';
            } else {
                os << v;
            }
            os << ')';
        }
        os << ")\n";
    }
    out.stdout_text = os.str();
    return out;
}

}  // namespace smtsolve
}  // namespace nave
