#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>

#include "sympd/arena.hpp"

namespace sympd {

// Exponent vector of a term, one slot per arena variable. Exponents are
// stored inline (no heap) and capped at 255; unused slots stay zero so
// comparison and hashing can work on the raw bytes.
class Monomial {
public:
    using Exp = std::uint8_t;
    static constexpr std::size_t kMaxVars = VariableArena::kMaxVars;

    Monomial() = default;

    explicit Monomial(std::size_t size) : size_(static_cast<std::uint8_t>(size)) {
        if (size > kMaxVars) throw std::invalid_argument("monomial: too many variables");
    }

    Monomial(std::initializer_list<unsigned> exps) : Monomial(std::span<const unsigned>(exps.begin(), exps.size())) {}

    explicit Monomial(std::span<const unsigned> exps) : size_(static_cast<std::uint8_t>(exps.size())) {
        if (exps.size() > kMaxVars) throw std::invalid_argument("monomial: too many variables");
        for (std::size_t i = 0; i < exps.size(); ++i) set(i, exps[i]);
    }

    std::size_t size() const { return size_; }
    unsigned degree() const { return degree_; }

    unsigned operator[](std::size_t i) const { return exp_[i]; }

    void set(std::size_t i, unsigned e) {
        if (i >= size_) throw std::out_of_range("monomial: variable index");
        if (e > 255) throw std::overflow_error("monomial: exponent exceeds 255");
        degree_ = degree_ - exp_[i] + e;
        exp_[i] = static_cast<Exp>(e);
    }

    bool is_constant() const { return degree_ == 0; }

    // Product m1*m2 (exponent sum); overflow past 255 throws.
    friend Monomial operator*(const Monomial& a, const Monomial& b) {
        Monomial r(a.size_);
        for (std::size_t i = 0; i < a.size_; ++i) {
            unsigned e = static_cast<unsigned>(a.exp_[i]) + b.exp_[i];
            if (e > 255) throw std::overflow_error("monomial: exponent exceeds 255");
            r.exp_[i] = static_cast<Exp>(e);
        }
        r.degree_ = a.degree_ + b.degree_;
        return r;
    }

    bool operator==(const Monomial& o) const {
        return size_ == o.size_ && std::memcmp(exp_.data(), o.exp_.data(), kMaxVars) == 0;
    }
    bool operator!=(const Monomial& o) const { return !(*this == o); }

    // Graded lexicographic order: total degree first, ties broken by the
    // arena's variable order (larger exponent on an earlier variable wins).
    friend bool grlex_less(const Monomial& a, const Monomial& b) {
        if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
        return std::memcmp(a.exp_.data(), b.exp_.data(), kMaxVars) < 0;
    }

    std::size_t hash() const {
        // FNV-1a over the exponent bytes; size folded in at the end.
        std::uint64_t h = 1469598103934665603ull;
        for (std::size_t i = 0; i < kMaxVars; ++i) {
            h ^= exp_[i];
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h ^ size_);
    }

private:
    std::array<Exp, kMaxVars> exp_{};
    std::uint16_t degree_ = 0;
    std::uint8_t size_ = 0;
};

struct MonomialHash {
    std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

struct GrlexGreater {
    bool operator()(const Monomial& a, const Monomial& b) const { return grlex_less(b, a); }
};

}  // namespace sympd
