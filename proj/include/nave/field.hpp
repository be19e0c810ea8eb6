#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/miller_rabin.hpp>

#include <random>
#include <stdexcept>
#include <string>

namespace nave {

using BigInt = boost::multiprecision::cpp_int;

/// Scalar field of the Grumpkin curve (base field of BN254); the default
/// modulus for circuits that declare `modulus=bn254`.
inline const BigInt& bn254_modulus() {
    static const BigInt p(
        "21888242871839275222246405745257275088548364400416034343698204186575808495617");
    return p;
}

/// A canonical residue in [0, p). Construction goes through PrimeField so the
/// invariant cannot be sidestepped by accident; the raw value is read-only.
class FieldElement {
  public:
    FieldElement() = default;

    const BigInt& value() const { return value_; }

    bool is_zero() const { return value_ == 0; }
    bool is_one() const { return value_ == 1; }

    friend bool operator==(const FieldElement&, const FieldElement&) = default;
    friend bool operator<(const FieldElement& a, const FieldElement& b) {
        return a.value_ < b.value_;
    }

  private:
    friend class PrimeField;
    explicit FieldElement(BigInt v) : value_(std::move(v)) {}

    BigInt value_{0};
};

/// Arithmetic context for a prime modulus p. All element operations reduce
/// into [0, p).
class PrimeField {
  public:
    explicit PrimeField(BigInt modulus) : p_(std::move(modulus)) {
        if (p_ < 2) {
            throw std::invalid_argument("field modulus must be >= 2");
        }
    }

    const BigInt& modulus() const { return p_; }

    /// Number of bits needed to write p; range checks must use fewer.
    unsigned bit_length() const { return static_cast<unsigned>(boost::multiprecision::msb(p_)) + 1; }

    /// Reduce any integer (negative included) to its canonical residue.
    FieldElement reduce(const BigInt& k) const {
        BigInt r = k % p_;
        if (r < 0) {
            r += p_;
        }
        return FieldElement(std::move(r));
    }

    FieldElement zero() const { return FieldElement(BigInt(0)); }
    FieldElement one() const { return reduce(1); }

    FieldElement add(const FieldElement& a, const FieldElement& b) const {
        BigInt r = a.value() + b.value();
        if (r >= p_) {
            r -= p_;
        }
        return FieldElement(std::move(r));
    }

    FieldElement sub(const FieldElement& a, const FieldElement& b) const {
        BigInt r = a.value() - b.value();
        if (r < 0) {
            r += p_;
        }
        return FieldElement(std::move(r));
    }

    FieldElement neg(const FieldElement& a) const { return sub(zero(), a); }

    FieldElement mul(const FieldElement& a, const FieldElement& b) const {
        return FieldElement(a.value() * b.value() % p_);
    }

    FieldElement pow(const FieldElement& base, const BigInt& exp) const {
        return FieldElement(boost::multiprecision::powm(base.value(), exp, p_));
    }

    /// Multiplicative inverse; p must be prime. Throws on zero.
    FieldElement inv(const FieldElement& a) const {
        if (a.is_zero()) {
            throw std::domain_error("zero has no multiplicative inverse");
        }
        return pow(a, p_ - 2);
    }

  private:
    BigInt p_;
};

/// 64-round Miller-Rabin with a fixed seed, so load-time validation is
/// deterministic. Known named primes (bn254) are accepted without testing.
inline bool is_probable_prime(const BigInt& n) {
    if (n == bn254_modulus()) {
        return true;
    }
    if (n < 2) {
        return false;
    }
    std::mt19937_64 gen(0x6e617665u);  // fixed seed
    return boost::multiprecision::miller_rabin_test(n, 64, gen);
}

/// Parse a decimal integer (optional leading '-'). Throws std::invalid_argument
/// on anything else.
inline BigInt parse_bigint(const std::string& text) {
    if (text.empty()) {
        throw std::invalid_argument("empty integer literal");
    }
    std::size_t start = text[0] == '-' ? 1 : 0;
    if (start == text.size()) {
        throw std::invalid_argument("bare '-' is not an integer literal");
    }
    for (std::size_t i = start; i < text.size(); ++i) {
        if (text[i] < '0' || text[i] > '9') {
            throw std::invalid_argument("bad digit in integer literal: " + text);
        }
    }
    return BigInt(text);
}

}  // namespace nave
