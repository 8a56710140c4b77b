#pragma once

#include <charconv>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rcga/error.hpp"
#include "rcga/model.hpp"

namespace rcga {

/// Length of the all-zero prefix of x.
inline std::size_t r_leading_ones(const Individual& x) noexcept {
  std::size_t k = 0;
  while (k < x.size() && x[k] == 0) ++k;
  return k;
}

/// All-zero prefix length, counted inside the first `length` positions.
/// `length` must be in [1, n].
inline std::size_t prefix_fitness(const Individual& x, std::size_t length) {
  if (length < 1 || length > x.size()) {
    throw ParameterError("prefix length must be in [1, n]");
  }
  std::size_t k = 0;
  while (k < length && x[k] == 0) ++k;
  return k;
}

/// Optimum string `a` and position order `sigma`, a permutation of 0..n-1.
/// The i-th position inspected by the fitness is sigma[i].
class GeneralizedTarget {
 public:
  GeneralizedTarget(Individual optimum, std::vector<std::size_t> sigma)
      : a_(std::move(optimum)), sigma_(std::move(sigma)) {
    if (a_.size() != sigma_.size()) {
      throw ParameterError("optimum and permutation must have the same length");
    }
    std::vector<char> seen(sigma_.size(), 0);
    for (std::size_t s : sigma_) {
      if (s >= sigma_.size() || seen[s]) throw ParameterError("sigma is not a permutation");
      seen[s] = 1;
    }
  }

  std::size_t n() const noexcept { return a_.size(); }
  const Individual& optimum() const noexcept { return a_; }
  const std::vector<std::size_t>& sigma() const noexcept { return sigma_; }

 private:
  Individual a_;
  std::vector<std::size_t> sigma_;
};

inline std::size_t r_leading_ones_general(const Individual& x, const GeneralizedTarget& t) {
  if (x.size() != t.n()) throw ParameterError("individual length does not match target");
  std::size_t k = 0;
  while (k < x.size() && x[t.sigma()[k]] == t.optimum()[t.sigma()[k]]) ++k;
  return k;
}

inline std::size_t constant_fitness(const Individual&) noexcept { return 0; }

struct LeadingOnes {};
struct Constant {};

/// A fitness function plus its serialisable descriptor:
/// `leadingones`, `leadingones-general(a=<csv>,sigma=<csv>)`, `constant`.
/// In the descriptor `sigma` is 1-based, as a permutation of {1,...,n}.
class Fitness {
 public:
  using Kind = std::variant<LeadingOnes, GeneralizedTarget, Constant>;

  Fitness() : kind_(LeadingOnes{}) {}
  Fitness(Kind kind) : kind_(std::move(kind)) {}  // NOLINT(implicit)

  static Fitness leading_ones() { return Fitness(LeadingOnes{}); }
  static Fitness constant() { return Fitness(Constant{}); }
  static Fitness general(GeneralizedTarget t) { return Fitness(std::move(t)); }

  std::size_t operator()(const Individual& x) const {
    return std::visit(
        [&](const auto& k) -> std::size_t {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, LeadingOnes>) {
            return r_leading_ones(x);
          } else if constexpr (std::is_same_v<K, GeneralizedTarget>) {
            return r_leading_ones_general(x, k);
          } else {
            return constant_fitness(x);
          }
        },
        kind_);
  }

  /// Fitness of the optimum for length-n strings; nullopt when it cannot be
  /// reached (constant function), so runs end only at the horizon.
  std::optional<std::size_t> optimum(std::size_t n) const {
    if (std::holds_alternative<Constant>(kind_)) return std::nullopt;
    return n;
  }

  /// Checks the fitness is usable with strings of length n over r values.
  void validate(std::size_t n, std::size_t r) const {
    if (const auto* t = std::get_if<GeneralizedTarget>(&kind_)) {
      if (t->n() != n) throw ParameterError("generalized target length does not match n");
      for (Value v : t->optimum()) {
        if (v >= r) throw ParameterError("generalized target value out of range");
      }
    }
  }

  const Kind& kind() const noexcept { return kind_; }

  std::string descriptor() const {
    if (std::holds_alternative<LeadingOnes>(kind_)) return "leadingones";
    if (std::holds_alternative<Constant>(kind_)) return "constant";
    const auto& t = std::get<GeneralizedTarget>(kind_);
    std::ostringstream os;
    os << "leadingones-general(a=";
    for (std::size_t i = 0; i < t.n(); ++i) os << (i ? "," : "") << t.optimum()[i];
    os << ",sigma=";
    for (std::size_t i = 0; i < t.n(); ++i) os << (i ? "," : "") << t.sigma()[i] + 1;
    os << ")";
    return os.str();
  }

  static Fitness parse(std::string_view text) {
    if (text == "leadingones") return leading_ones();
    if (text == "constant") return constant();

    constexpr std::string_view head = "leadingones-general(a=";
    constexpr std::string_view mid = ",sigma=";
    if (text.starts_with(head) && text.ends_with(")")) {
      const auto body = text.substr(head.size(), text.size() - head.size() - 1);
      const auto cut = body.find(mid);
      if (cut != std::string_view::npos) {
        const auto a = parse_csv(body.substr(0, cut));
        const auto s = parse_csv(body.substr(cut + mid.size()));
        std::vector<Value> av(a.begin(), a.end());
        std::vector<std::size_t> sv;
        sv.reserve(s.size());
        for (auto v : s) {
          if (v == 0) throw ParameterError("sigma entries are 1-based");
          sv.push_back(static_cast<std::size_t>(v - 1));
        }
        return general(GeneralizedTarget(Individual(std::move(av)), std::move(sv)));
      }
    }
    throw ParameterError("unknown fitness descriptor: " + std::string(text));
  }

 private:
  static std::vector<unsigned long> parse_csv(std::string_view s) {
    std::vector<unsigned long> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
      const auto comma = s.find(',', pos);
      const auto tok = s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos);
      if (tok.empty()) throw ParameterError("empty entry in fitness descriptor");
      unsigned long v = 0;
      const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || end != tok.data() + tok.size()) {
        throw ParameterError("bad number in fitness descriptor");
      }
      out.push_back(v);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    return out;
  }

  Kind kind_;
};

}  // namespace rcga
