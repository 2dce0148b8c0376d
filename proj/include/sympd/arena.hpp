#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace sympd {

class ArenaMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Ordered set of formal symbols. The order is fixed at creation and is the
// tie-break of the monomial order. Barred symbols (mb1, etab1, ...) are
// independent variables, never derived from their unbarred partners.
//
// Cheap to copy: arenas share immutable name lists. Two arenas are
// interchangeable iff their name lists are equal.
class VariableArena {
public:
    static constexpr std::size_t kMaxVars = 16;

    VariableArena() = default;

    explicit VariableArena(std::vector<std::string> names)
        : names_(std::make_shared<const std::vector<std::string>>(std::move(names))) {
        if (names_->empty()) throw std::invalid_argument("arena: no variables");
        if (names_->size() > kMaxVars)
            throw std::invalid_argument("arena: more than " + std::to_string(kMaxVars) + " variables");
        std::unordered_set<std::string> seen;
        for (const auto& n : *names_) {
            if (n.empty()) throw std::invalid_argument("arena: empty variable name");
            if (!seen.insert(n).second)
                throw std::invalid_argument("arena: duplicate variable '" + n + "'");
        }
    }

    // "l1..ln" style block builder: prefix + 1-based index.
    static VariableArena indexed(const std::string& prefix, std::size_t count) {
        std::vector<std::string> names;
        names.reserve(count);
        for (std::size_t i = 1; i <= count; ++i) names.push_back(prefix + std::to_string(i));
        return VariableArena(std::move(names));
    }

    static VariableArena indexed(const std::string& prefix_a, const std::string& prefix_b,
                                 std::size_t count_each) {
        std::vector<std::string> names;
        names.reserve(2 * count_each);
        for (std::size_t i = 1; i <= count_each; ++i) names.push_back(prefix_a + std::to_string(i));
        for (std::size_t i = 1; i <= count_each; ++i) names.push_back(prefix_b + std::to_string(i));
        return VariableArena(std::move(names));
    }

    std::size_t size() const { return names_ ? names_->size() : 0; }

    const std::string& name(std::size_t i) const {
        if (!names_ || i >= names_->size()) throw std::out_of_range("arena: variable index");
        return (*names_)[i];
    }

    const std::vector<std::string>& names() const {
        static const std::vector<std::string> empty;
        return names_ ? *names_ : empty;
    }

    // Index of a named variable, or npos.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t index_of(const std::string& name) const {
        if (!names_) return npos;
        auto it = std::find(names_->begin(), names_->end(), name);
        return it == names_->end() ? npos : static_cast<std::size_t>(it - names_->begin());
    }

    bool operator==(const VariableArena& other) const {
        if (names_ == other.names_) return true;
        if (!names_ || !other.names_) return false;
        return *names_ == *other.names_;
    }
    bool operator!=(const VariableArena& other) const { return !(*this == other); }

private:
    std::shared_ptr<const std::vector<std::string>> names_;
};

inline void require_same_arena(const VariableArena& a, const VariableArena& b, const char* op) {
    if (a != b) throw ArenaMismatchError(std::string(op) + ": operands live in different arenas");
}

}  // namespace sympd
