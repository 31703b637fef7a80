#pragma once

// Alphabets, words, spheres and Markov measures on cylinder sets.

#include <cstdint>
#include <iterator>
#include <optional>
#include <vector>

#include "ncerg/channel.hpp"

namespace ncerg {

class Alphabet {
 public:
  enum class Kind { group, semigroup };

  /// Letters -m..-1, 1..m.
  static Alphabet group(int m);
  /// Letters 1..m.
  static Alphabet semigroup(int m);

  Kind kind() const { return kind_; }
  bool is_group() const { return kind_ == Kind::group; }
  int m() const { return m_; }
  std::size_t size() const { return is_group() ? 2 * static_cast<std::size_t>(m_) : static_cast<std::size_t>(m_); }

  /// Position of a letter in the order -m < ... < -1 < 1 < ... < m.
  std::size_t index(int letter) const;
  int letter(std::size_t index) const;
  bool contains(int letter) const;
  std::vector<int> letters() const;

  bool operator==(const Alphabet&) const = default;

 private:
  Alphabet(Kind kind, int m) : kind_(kind), m_(m) {}
  Kind kind_;
  int m_;
};

class Word {
 public:
  Word() = default;
  Word(const Alphabet& alphabet, std::vector<int> letters);

  const std::vector<int>& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  /// No letter is followed by its inverse (always true for semigroup words).
  bool reduced() const { return reduced_; }

  bool operator==(const Word& other) const { return letters_ == other.letters_; }

 private:
  std::vector<int> letters_;
  bool reduced_ = true;
};

/// All words of length n in lexicographic order; only reduced ones for a
/// group alphabet unless `reduced_only` is false.
class Sphere {
 public:
  Sphere(Alphabet alphabet, int n, bool reduced_only = true);

  class Iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Word;
    using difference_type = std::ptrdiff_t;
    using pointer = const Word*;
    using reference = const Word&;

    Iterator() = default;
    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }
    Iterator& operator++();
    void operator++(int) { ++*this; }
    bool operator==(std::default_sentinel_t) const { return done_; }

   private:
    friend class Sphere;
    Iterator(const Sphere* sphere);
    bool allowed(std::size_t pos, std::size_t idx) const;
    void fill_from(std::size_t pos);
    void refresh();

    const Sphere* sphere_ = nullptr;
    std::vector<std::size_t> idx_;
    Word current_;
    bool done_ = true;
  };

  Iterator begin() const { return Iterator(this); }
  std::default_sentinel_t end() const { return {}; }

  const Alphabet& alphabet() const { return alphabet_; }
  int radius() const { return n_; }
  /// Exact count; throws ResourceError on overflow.
  std::uint64_t size() const;
  /// Eager list; throws ResourceError above `limit` words.
  std::vector<Word> materialize(std::uint64_t limit = 1'000'000) const;

 private:
  Alphabet alphabet_;
  int n_;
  bool reduced_only_;
};

/// 2m(2m-1)^{n-1} reduced words for a group alphabet, m^n for a semigroup one.
std::uint64_t sphere_size(const Alphabet& alphabet, int n);

/// Stochastic matrix on the alphabet with a strictly positive stationary law.
class SphereChain {
 public:
  /// Validates stochasticity and stationarity (1e-12) and p_i > 0.
  SphereChain(Alphabet alphabet, RealMatrix transition, RealVector stationary);

  const Alphabet& alphabet() const { return alphabet_; }
  const RealMatrix& transition() const { return p_; }
  const RealVector& stationary() const { return pi_; }
  double p(int from, int to) const { return p_(idx(from), idx(to)); }
  double stationary(int letter) const { return pi_(idx(letter)); }
  /// p_{i,-i} = 0 for every i, so only reduced words carry mass.
  bool forbids_backtracking() const;

 private:
  Eigen::Index idx(int letter) const { return static_cast<Eigen::Index>(alphabet_.index(letter)); }
  Alphabet alphabet_;
  RealMatrix p_;
  RealVector pi_;
};

SphereChain free_group_chain(int m);
SphereChain uniform_semigroup_chain(int m);

/// mu(i1) p_{i1 i2} ... p_{i(n-1) in}. Throws DomainError for the empty word.
double markov_measure(const SphereChain& chain, const Word& word);

/// Operators alpha_i indexed by the letters of an alphabet.
class Action {
 public:
  /// alpha_1..alpha_m must be automorphisms. Inverses default to adjoints,
  /// which requires trace preservation; supplied inverses are checked.
  static Action group(const Alphabet& alphabet, const TraceAlgebra& alg, std::vector<ChannelOperator> generators,
                      std::optional<std::vector<ChannelOperator>> inverses = std::nullopt);
  /// One Markov operator per letter.
  static Action semigroup(const Alphabet& alphabet, const TraceAlgebra& alg, std::vector<ChannelOperator> maps);

  const Alphabet& alphabet() const { return alphabet_; }
  const TraceAlgebra& algebra() const { return alg_; }
  const ChannelOperator& map(int letter) const { return maps_[alphabet_.index(letter)]; }
  const ChannelOperator& at(std::size_t index) const { return maps_[index]; }
  const std::vector<ChannelOperator>& maps() const { return maps_; }

 private:
  Action(Alphabet alphabet, TraceAlgebra alg, std::vector<ChannelOperator> maps)
      : alphabet_(alphabet), alg_(std::move(alg)), maps_(std::move(maps)) {}
  Alphabet alphabet_;
  TraceAlgebra alg_;
  std::vector<ChannelOperator> maps_;  // by alphabet index
};

/// alpha_w = alpha_{w_n} o ... o alpha_{w_1}; the empty word gives id.
ChannelOperator word_operator(const Action& action, const Word& word);
/// alpha_w(x) without forming the composite matrix.
Vector apply_word(const Action& action, const Word& word, const Vector& coords);

struct IrreducibilityProbe {
  bool irreducible = false;
  int power = 0;  // first n with (P P^t)^n > 0 entrywise
};

/// Some power (P P^t)^n, n <= horizon, is entrywise positive.
IrreducibilityProbe is_strictly_irreducible(const SphereChain& chain, int horizon);

}  // namespace ncerg
