#include "hyperwind/group.hpp"

#include <algorithm>
#include <cctype>

#include "hyperwind/error.hpp"

namespace hyperwind {

Word Word::prefix(std::size_t n) const {
  Word w;
  w.letters_.assign(letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(std::min(n, size())));
  return w;
}

Word Word::suffix_from(std::size_t start) const {
  Word w;
  if (start < size()) w.letters_.assign(letters_.begin() + static_cast<std::ptrdiff_t>(start), letters_.end());
  return w;
}

bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Word reduce(std::span<const Letter> letters) {
  Word w;
  w.append(letters);
  return w;
}

Word multiply(const Word& a, const Word& b) {
  Word w = a;
  w.append(b.letters());
  return w;
}

Word invert(const Word& w) {
  Word out;
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) out.push_back(it->inverse());
  return out;
}

Word power(const Word& w, std::size_t n) {
  Word out;
  for (std::size_t i = 0; i < n; ++i) out.append(w.letters());
  return out;
}

Projection Projection::canonical(std::size_t k) {
  Projection p;
  p.dim = k;
  p.images.assign(k, AbelianVector(k, 0));
  for (std::size_t g = 0; g < k; ++g) p.images[g][g] = 1;
  return p;
}

void Projection::validate(std::size_t k) const {
  if (images.size() != k)
    throw SchemaError("projection", "expected " + std::to_string(k) + " generator images, got " +
                                        std::to_string(images.size()));
  for (const auto& v : images)
    if (v.size() != dim) throw SchemaError("projection", "inconsistent image dimension");
}

AbelianVector abelianize(std::span<const Letter> letters, const Projection& pi) {
  AbelianVector out(pi.dim, 0);
  for (Letter l : letters) {
    const auto& img = pi.images.at(static_cast<std::size_t>(l.generator() - 1));
    for (std::size_t i = 0; i < pi.dim; ++i) out[i] += l.sign() * img[i];
  }
  return out;
}

AbelianVector abelianize(const Word& w, const Projection& pi) { return abelianize(w.letters(), pi); }

std::size_t stable_length(const Word& w) {
  if (w.empty()) return 0;
  std::size_t i = 0;
  std::size_t j = w.size() - 1;
  while (i < j && w[i].cancels(w[j])) {
    ++i;
    --j;
  }
  return j - i + 1;
}

Alphabet::Alphabet(std::size_t rank) {
  if (rank == 0 || rank > 26) throw DomainError("alphabet rank must be in [1, 26]");
  static constexpr std::string_view kSmall = "uvw";
  if (rank <= kSmall.size())
    names_ = std::string(kSmall.substr(0, rank));
  else
    for (std::size_t i = 0; i < rank; ++i) names_.push_back(static_cast<char>('a' + i));
}

Word Alphabet::parse(std::string_view text) const {
  Word w;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '.' || c == '*') continue;
    if (c == 'e' && names_.find('e') == std::string::npos) continue;
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const auto pos = names_.find(lower);
    if (pos == std::string::npos) throw SchemaError("word", std::string("unknown letter '") + c + "'");
    w.push_back(Letter(static_cast<int>(pos) + 1, std::isupper(static_cast<unsigned char>(c)) ? -1 : 1));
  }
  return w;
}

char Alphabet::name(Letter l) const {
  const char c = names_.at(static_cast<std::size_t>(l.generator() - 1));
  return l.sign() < 0 ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
}

std::string Alphabet::format(const Word& w) const {
  if (w.empty()) return "e";
  std::string s;
  s.reserve(w.size());
  for (Letter l : w) s.push_back(name(l));
  return s;
}

}  // namespace hyperwind
