#include "hyperwind/measure.hpp"

#include <cmath>
#include <set>

#include "hyperwind/error.hpp"

namespace hyperwind {

StepMeasure::StepMeasure(std::size_t rank, std::vector<Atom> atoms) : rank_(rank), atoms_(std::move(atoms)) {
  if (rank_ < 2) throw MeasureError("free group rank must be at least 2");
  if (atoms_.empty()) throw MeasureError("measure has empty support");
  long double total = 0.0L;
  Rational exact_total(0);
  bool all_exact = true;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    auto& a = atoms_[i];
    if (a.exact) {
      if (*a.exact <= Rational(0)) throw MeasureError("atom " + std::to_string(i) + " has non-positive probability");
      a.probability = boost::rational_cast<double>(*a.exact);
      exact_total += *a.exact;
    } else {
      all_exact = false;
    }
    if (!(a.probability > 0.0) || !std::isfinite(a.probability))
      throw MeasureError("atom " + std::to_string(i) + " has non-positive probability");
    for (Letter l : a.word)
      if (l.generator() < 1 || static_cast<std::size_t>(l.generator()) > rank_)
        throw MeasureError("atom " + std::to_string(i) + " uses a generator outside the alphabet");
    a.word = reduce(a.word.letters());
    if (a.word.empty()) throw MeasureError("atom " + std::to_string(i) + " is the identity");
    total += a.probability;
    max_length_ = std::max(max_length_, a.word.size());
  }
  if (all_exact && exact_total != Rational(1)) throw MeasureError("probabilities do not sum to 1");
  if (std::fabs(static_cast<double>(total) - 1.0) > 1e-12) throw MeasureError("probabilities do not sum to 1");

  long double cum = 0.0L;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    cum += atoms_[i].probability;
    const long double scaled = std::round(cum * 4294967296.0L);
    thresholds_.push_back(i + 1 == atoms_.size() ? (std::uint64_t{1} << 32)
                                                 : static_cast<std::uint64_t>(scaled));
  }
}

StepMeasure StepMeasure::uniform(std::size_t rank, const std::vector<Word>& support) {
  std::vector<Atom> atoms;
  const Rational p(1, static_cast<std::int64_t>(support.size()));
  for (const auto& w : support) atoms.push_back(Atom{w, 0.0, p});
  return StepMeasure(rank, std::move(atoms));
}

StepMeasure StepMeasure::simple(std::size_t rank) {
  std::vector<Word> support;
  for (std::size_t g = 1; g <= rank; ++g)
    for (int s : {1, -1}) {
      Word w;
      w.push_back(Letter(static_cast<int>(g), s));
      support.push_back(w);
    }
  return uniform(rank, support);
}

bool StepMeasure::exact() const {
  for (const auto& a : atoms_)
    if (!a.exact) return false;
  return true;
}

std::vector<Word> semigroup_products(const StepMeasure& mu, std::size_t max_length, std::size_t limit) {
  std::vector<Word> out;
  std::set<std::vector<std::int8_t>> seen;
  auto key = [](const Word& w) {
    std::vector<std::int8_t> k;
    for (Letter l : w) k.push_back(l.code());
    return k;
  };
  std::vector<Word> frontier{Word{}};
  for (std::size_t len = 1; len <= max_length && out.size() < limit; ++len) {
    std::vector<Word> next;
    for (const auto& w : frontier) {
      for (const auto& a : mu.atoms()) {
        Word p = multiply(w, a.word);
        next.push_back(p);
        if (!p.empty() && seen.insert(key(p)).second) {
          out.push_back(p);
          if (out.size() >= limit) return out;
        }
      }
    }
    frontier = std::move(next);
    if (frontier.size() > limit) frontier.resize(limit);
  }
  return out;
}

MeasureReport validate_measure(const StepMeasure& mu, const plane::SchottkyModel* model, std::size_t search_length) {
  MeasureReport report;
  long double total = 0.0L;
  for (const auto& a : mu.atoms()) {
    if (!(a.probability > 0.0)) throw MeasureError("non-positive probability");
    total += a.probability;
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > 1e-12) throw MeasureError("probabilities do not sum to 1");
  report.probabilities_ok = true;

  auto hyperbolic = [&](const Word& w) {
    if (model) {
      const auto g = model->evaluate(w);
      return std::abs(g.trace()) > 2.0 + 1e-9;
    }
    return stable_length(w) > 0;
  };
  std::vector<Word> hyp;
  for (auto& w : semigroup_products(mu, search_length, 512))
    if (hyperbolic(w)) hyp.push_back(std::move(w));
  // In a free group two hyperbolic elements share their fixed points exactly
  // when they commute.
  for (std::size_t i = 0; i < hyp.size() && !report.certified; ++i)
    for (std::size_t j = i + 1; j < hyp.size(); ++j)
      if (multiply(hyp[i], hyp[j]) != multiply(hyp[j], hyp[i])) {
        report.certified = true;
        report.witness = std::make_pair(hyp[i], hyp[j]);
        break;
      }
  if (!report.certified)
    report.warnings.push_back("no non-elementary certificate among semigroup products of length <= " +
                              std::to_string(search_length));
  return report;
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(text));
    return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  } catch (const std::exception&) {
    throw MeasureError("cannot parse rational '" + text + "'");
  }
}

}  // namespace hyperwind
