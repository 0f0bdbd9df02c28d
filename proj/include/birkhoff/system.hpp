#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "birkhoff/errors.hpp"

namespace birkhoff {

using Symbol = int;

// A finite orbit segment; admissibility is checked against a system where
// operations require it.
using Word = std::vector<Symbol>;

enum class SystemKind { Full, Sft, Beta };

struct TransitionGap {
    int m;  // minimal power with entrywise positive transition matrix
};

// Unvalidated system description as read from a definition file.
struct RawSystem {
    std::string kind;
    int alphabet_size = 0;
    std::vector<std::pair<Symbol, Symbol>> transitions;  // sft only
    Word beta_expansion;                                 // beta only
    int expansion_depth = 0;                             // beta only
};

// One-sided shift space: full shift, mixing SFT (depth-2 constraints), or
// beta-shift given by a truncated quasi-greedy expansion of 1.
//
// Only primitive (mixing) SFTs are accepted; construction rejects anything
// else. All values are immutable after construction.
class SymbolicSystem {
  public:
    static SymbolicSystem full_shift(int alphabet_size);
    static SymbolicSystem sft(int alphabet_size,
                              const std::vector<std::pair<Symbol, Symbol>>& allowed);
    static SymbolicSystem beta(Word expansion, int expansion_depth);

    SystemKind kind() const { return kind_; }
    int alphabet_size() const { return alphabet_; }
    bool is_shift_of_finite_type() const { return kind_ != SystemKind::Beta; }

    // sft/full only
    bool allows(Symbol a, Symbol b) const { return (adjacency_[a] >> b) & 1u; }
    std::uint64_t row_mask(Symbol a) const { return adjacency_[a]; }
    std::vector<std::pair<Symbol, Symbol>> edges() const;
    TransitionGap transition_gap() const;

    // beta only
    const Word& beta_expansion() const { return beta_expansion_; }
    int expansion_depth() const { return expansion_depth_; }

    // Admissibility of a finite word under this system's constraints.
    // Throws WordTooLong for beta words longer than the expansion depth.
    bool is_admissible(const Word& w) const;

    std::string describe() const;

  private:
    SymbolicSystem() = default;

    SystemKind kind_ = SystemKind::Full;
    int alphabet_ = 0;
    std::vector<std::uint64_t> adjacency_;  // row bit masks (sft/full)
    Word beta_expansion_;
    int expansion_depth_ = 0;
    int gap_ = 0;  // minimal m with A^m > 0 (sft/full)
};

// Checks a raw description and builds the system, or throws a diagnostic
// (NonPrimitive, EmptyAlphabet, BadBetaExpansion, InvalidInput).
SymbolicSystem validate_system(const RawSystem& raw);

// Shortest connector w such that from.w.to is admissible; lexicographically
// smallest among shortest. Length is always < transition_gap().m.
Word connector_word(const SymbolicSystem& sys, Symbol from, Symbol to);

// Higher-block recode: alphabet = admissible (k-1)-words, transitions by
// overlap. Word counts are preserved: every admissible n-word of the original
// corresponds to exactly one (n-k+2)-word of the recode.
struct Recoding {
    SymbolicSystem system;
    std::vector<Word> blocks;  // recoded symbol -> original (k-1)-word, lex order
    int k = 2;

    Symbol symbol_of(const Word& block) const;
    // Expands a recoded word back to an original word of length n + k - 2.
    Word expand(const Word& recoded) const;
};

Recoding higher_block_recode(const SymbolicSystem& sys, int k);

// Parry criterion: true iff every suffix of w is lexicographically <= the
// expansion of 1. Throws WordTooLong when w is longer than the stored depth.
bool beta_admissible(const SymbolicSystem& sys, const Word& w);

// Quasi-greedy expansion of 1 for beta the positive root of x^2 = p x + q,
// computed in exact arithmetic and truncated to `depth` digits.
Word quasi_greedy_expansion_quadratic(long long p, long long q, int depth);

// Same for beta supplied as a decimal string, evaluated in high-precision
// floating point (100 digits).
Word quasi_greedy_expansion_decimal(const std::string& beta, int depth);

}  // namespace birkhoff
