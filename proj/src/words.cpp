#include "ncerg/words.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ncerg {

Alphabet Alphabet::group(int m) {
  if (m < 1) throw DomainError("alphabet needs m >= 1");
  return Alphabet(Kind::group, m);
}

Alphabet Alphabet::semigroup(int m) {
  if (m < 1) throw DomainError("alphabet needs m >= 1");
  return Alphabet(Kind::semigroup, m);
}

bool Alphabet::contains(int letter) const {
  if (letter == 0) return false;
  if (letter < 0) return is_group() && letter >= -m_;
  return letter <= m_;
}

std::size_t Alphabet::index(int letter) const {
  if (!contains(letter)) throw DomainError("letter " + std::to_string(letter) + " is not in the alphabet");
  if (!is_group()) return static_cast<std::size_t>(letter - 1);
  return letter < 0 ? static_cast<std::size_t>(letter + m_) : static_cast<std::size_t>(letter + m_ - 1);
}

int Alphabet::letter(std::size_t index) const {
  if (index >= size()) throw DomainError("alphabet index out of range");
  const int i = static_cast<int>(index);
  if (!is_group()) return i + 1;
  return i < m_ ? i - m_ : i - m_ + 1;
}

std::vector<int> Alphabet::letters() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back(letter(i));
  return out;
}

Word::Word(const Alphabet& alphabet, std::vector<int> letters) : letters_(std::move(letters)) {
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (!alphabet.contains(letters_[i])) throw DomainError("word uses a letter outside the alphabet");
    if (i > 0 && alphabet.is_group() && letters_[i] == -letters_[i - 1]) reduced_ = false;
  }
}

Sphere::Sphere(Alphabet alphabet, int n, bool reduced_only)
    : alphabet_(alphabet), n_(n), reduced_only_(reduced_only) {
  if (n < 0) throw DomainError("sphere radius must be >= 0");
}

Sphere::Iterator::Iterator(const Sphere* sphere) : sphere_(sphere), done_(false) {
  idx_.assign(static_cast<std::size_t>(sphere->n_), 0);
  fill_from(0);
  refresh();
}

bool Sphere::Iterator::allowed(std::size_t pos, std::size_t idx) const {
  const auto& a = sphere_->alphabet_;
  if (pos == 0 || !sphere_->reduced_only_ || !a.is_group()) return true;
  return a.letter(idx) != -a.letter(idx_[pos - 1]);
}

void Sphere::Iterator::fill_from(std::size_t pos) {
  for (std::size_t k = pos; k < idx_.size(); ++k) {
    std::size_t v = 0;
    while (!allowed(k, v)) ++v;
    idx_[k] = v;
  }
}

void Sphere::Iterator::refresh() {
  std::vector<int> letters;
  letters.reserve(idx_.size());
  for (auto i : idx_) letters.push_back(sphere_->alphabet_.letter(i));
  current_ = Word(sphere_->alphabet_, std::move(letters));
}

Sphere::Iterator& Sphere::Iterator::operator++() {
  const std::size_t a = sphere_->alphabet_.size();
  std::size_t k = idx_.size();
  while (k > 0) {
    --k;
    std::size_t v = idx_[k] + 1;
    while (v < a && !allowed(k, v)) ++v;
    if (v < a) {
      idx_[k] = v;
      fill_from(k + 1);
      refresh();
      return *this;
    }
  }
  done_ = true;
  return *this;
}

std::uint64_t sphere_size(const Alphabet& alphabet, int n) {
  if (n < 0) throw DomainError("sphere radius must be >= 0");
  if (n == 0) return 1;
  const std::uint64_t first = alphabet.size();
  const std::uint64_t rest = alphabet.is_group() ? alphabet.size() - 1 : alphabet.size();
  std::uint64_t count = first;
  for (int i = 1; i < n; ++i) {
    if (rest != 0 && count > std::numeric_limits<std::uint64_t>::max() / rest)
      throw ResourceError("sphere size overflows 64 bits");
    count *= rest;
  }
  return count;
}

std::uint64_t Sphere::size() const {
  if (reduced_only_ || !alphabet_.is_group()) return sphere_size(alphabet_, n_);
  std::uint64_t count = 1;
  for (int i = 0; i < n_; ++i) {
    if (count > std::numeric_limits<std::uint64_t>::max() / alphabet_.size())
      throw ResourceError("sphere size overflows 64 bits");
    count *= alphabet_.size();
  }
  return count;
}

std::vector<Word> Sphere::materialize(std::uint64_t limit) const {
  const auto count = size();
  if (count > limit)
    throw ResourceError("sphere of radius " + std::to_string(n_) + " has " + std::to_string(count) +
                        " words, above the limit " + std::to_string(limit));
  std::vector<Word> out;
  out.reserve(count);
  for (const auto& w : *this) out.push_back(w);
  return out;
}

SphereChain::SphereChain(Alphabet alphabet, RealMatrix transition, RealVector stationary)
    : alphabet_(alphabet), p_(std::move(transition)), pi_(std::move(stationary)) {
  const auto n = static_cast<Eigen::Index>(alphabet_.size());
  if (p_.rows() != n || p_.cols() != n || pi_.size() != n)
    throw StructuralError("chain dimensions do not match the alphabet");
  if ((p_.array() < 0.0).any()) throw DomainError("transition matrix has negative entries");
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(p_.row(i).sum() - 1.0) > 1e-12) throw DomainError("transition matrix rows must sum to 1");
  if ((pi_.array() <= 0.0).any()) throw DomainError("stationary weights must be strictly positive");
  if (std::abs(pi_.sum() - 1.0) > 1e-12) throw DomainError("stationary weights must sum to 1");
  const RealVector moved = p_.transpose() * pi_;
  if ((moved - pi_).cwiseAbs().maxCoeff() > 1e-12) throw DomainError("weights are not stationary for the chain");
}

bool SphereChain::forbids_backtracking() const {
  if (!alphabet_.is_group()) return false;
  for (int l : alphabet_.letters())
    if (p(l, -l) != 0.0) return false;
  return true;
}

SphereChain free_group_chain(int m) {
  if (m < 1) throw DomainError("free group chain needs m >= 1");
  const auto a = Alphabet::group(m);
  const auto n = static_cast<Eigen::Index>(a.size());
  RealMatrix p = RealMatrix::Constant(n, n, 1.0 / (2.0 * m - 1.0));
  for (int l : a.letters())
    p(static_cast<Eigen::Index>(a.index(l)), static_cast<Eigen::Index>(a.index(-l))) = 0.0;
  return SphereChain(a, std::move(p), RealVector::Constant(n, 1.0 / (2.0 * m)));
}

SphereChain uniform_semigroup_chain(int m) {
  const auto a = Alphabet::semigroup(m);
  return SphereChain(a, RealMatrix::Constant(m, m, 1.0 / m), RealVector::Constant(m, 1.0 / m));
}

double markov_measure(const SphereChain& chain, const Word& word) {
  if (word.empty()) throw DomainError("Markov measure of the empty word is undefined");
  const auto& l = word.letters();
  double mu = chain.stationary(l[0]);
  for (std::size_t i = 1; i < l.size(); ++i) mu *= chain.p(l[i - 1], l[i]);
  return mu;
}

Action Action::group(const Alphabet& alphabet, const TraceAlgebra& alg, std::vector<ChannelOperator> generators,
                     std::optional<std::vector<ChannelOperator>> inverses) {
  if (!alphabet.is_group()) throw DomainError("group action needs a group alphabet");
  const auto m = static_cast<std::size_t>(alphabet.m());
  if (generators.size() != m) throw StructuralError("group action needs one generator per letter 1..m");
  if (inverses && inverses->size() != m) throw StructuralError("one inverse per generator is required");

  std::vector<ChannelOperator> maps(alphabet.size());
  for (std::size_t i = 0; i < m; ++i) {
    const int letter = static_cast<int>(i) + 1;
    auto& g = generators[i];
    if (!(g.domain() == alg) || !g.is_endomorphism()) throw StructuralError("generator does not act on the algebra");
    if (!g.is_automorphism())
      throw DomainError("generator " + std::to_string(letter) + " is not a *-automorphism");
    ChannelOperator inv;
    if (inverses) {
      inv = (*inverses)[i];
      const auto d = static_cast<Eigen::Index>(alg.dimension());
      if (!(inv.domain() == alg) || max_abs_diff((inv * g).matrix(), Matrix::Identity(d, d)) > tol::kMultiplicative ||
          max_abs_diff((g * inv).matrix(), Matrix::Identity(d, d)) > tol::kMultiplicative)
        throw DomainError("supplied inverse of generator " + std::to_string(letter) + " is wrong");
    } else {
      if (!g.is_trace_preserving())
        throw DomainError("inverse missing for generator " + std::to_string(letter) +
                          " (not trace preserving, so the adjoint is not its inverse)");
      inv = g.adjoint();
    }
    maps[alphabet.index(letter)] = g;
    maps[alphabet.index(-letter)] = inv;
  }
  return Action(alphabet, alg, std::move(maps));
}

Action Action::semigroup(const Alphabet& alphabet, const TraceAlgebra& alg, std::vector<ChannelOperator> maps) {
  if (alphabet.is_group()) throw DomainError("semigroup action needs a semigroup alphabet");
  if (maps.size() != alphabet.size()) throw StructuralError("semigroup action needs one map per letter");
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (!(maps[i].domain() == alg) || !maps[i].is_endomorphism())
      throw StructuralError("semigroup map does not act on the algebra");
    if (!maps[i].is_markov()) throw DomainError("semigroup map " + std::to_string(i + 1) + " is not Markov");
  }
  return Action(alphabet, alg, std::move(maps));
}

ChannelOperator word_operator(const Action& action, const Word& word) {
  auto out = ChannelOperator::identity(action.algebra());
  for (int l : word.letters()) out = action.map(l) * out;
  return out;
}

Vector apply_word(const Action& action, const Word& word, const Vector& coords) {
  Vector v = coords;
  for (int l : word.letters()) v = action.map(l).apply(v);
  return v;
}

IrreducibilityProbe is_strictly_irreducible(const SphereChain& chain, int horizon) {
  const RealMatrix q = chain.transition() * chain.transition().transpose();
  RealMatrix power = q;
  for (int n = 1; n <= horizon; ++n) {
    if ((power.array() > 0.0).all()) return {true, n};
    power = power * q;
  }
  return {false, 0};
}

}  // namespace ncerg
