#pragma once

// Signed (closest-integer) continued fractions over exact rationals:
// expansion, evaluation, convergents, growth-condition checks, and the
// block bookkeeping (kappa word, cumulative periods) used by towers.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pararenorm/errors.hpp"
#include "pararenorm/numerics.hpp"

namespace pararenorm::mcf {

struct SignedPair {
  std::int64_t b = 2;  // >= 2
  int eps = +1;        // +1 or -1
  friend bool operator==(const SignedPair&, const SignedPair&) = default;
};

// Validity: every partial quotient >= 2, every sign in {-1,+1}, and for each
// adjacent pair b_j = 2 forces eps_{j+1} = +1.  The last condition is exactly
// what keeps every suffix value inside [-1/2, 1/2]: a suffix starting with
// b = 2 and a following minus sign would evaluate beyond 1/2 in modulus.
class SignedCF {
 public:
  SignedCF() = default;
  explicit SignedCF(std::vector<SignedPair> pairs) : pairs_(std::move(pairs)) {
    validate();
  }

  const std::vector<SignedPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const SignedPair& operator[](std::size_t i) const { return pairs_[i]; }

  // Remaining pairs after dropping the first one, kept verbatim.
  SignedCF tail() const {
    if (pairs_.empty()) fail(ErrorCode::OutOfRange, "tail of empty expansion");
    return SignedCF(std::vector<SignedPair>(pairs_.begin() + 1, pairs_.end()));
  }
  SignedCF prefix(std::size_t n) const {
    if (n > pairs_.size()) fail(ErrorCode::InvalidPrefix, "prefix too long");
    return SignedCF(std::vector<SignedPair>(pairs_.begin(), pairs_.begin() + n));
  }

  friend bool operator==(const SignedCF&, const SignedCF&) = default;

 private:
  void validate() const {
    for (std::size_t j = 0; j < pairs_.size(); ++j) {
      if (pairs_[j].b < 2)
        fail(ErrorCode::OutOfRange, "partial quotient below 2");
      if (pairs_[j].eps != 1 && pairs_[j].eps != -1)
        fail(ErrorCode::OutOfRange, "sign must be +1 or -1");
      if (j + 1 < pairs_.size() && pairs_[j].b == 2 && pairs_[j + 1].eps != 1)
        fail(ErrorCode::OutOfRange,
             "b = 2 must be followed by a plus sign (suffix leaves [-1/2,1/2])");
    }
  }
  std::vector<SignedPair> pairs_;
};

// Exact evaluation eps_1/(b_1 + eps_2/(b_2 + ... + eps_n/b_n)).
inline Rational evaluate(const SignedCF& cf) {
  Rational t = 0;
  for (std::size_t j = cf.size(); j-- > 0;) {
    Rational denom = Rational(cf[j].b) + t;
    if (denom == 0) fail(ErrorCode::DivisionByZero, "vanishing denominator");
    t = Rational(cf[j].eps) / denom;
  }
  return t;
}

// Signed expansion of a rational in [-1/2, 1/2].  The orbit is
// x_{i+1} = -1/x_i - [-1/x_i]; the bracket value is -eps'_i b_i where
// eps'_i = sign(x_i), and the normalized signs are eps_1 = eps'_1,
// eps_i = -eps'_{i-1} eps'_i.  Denominators strictly decrease, so the loop
// terminates in at most den(x) steps.
inline SignedCF expand(const Rational& x) {
  if (x > Rational(1, 2) || x < Rational(-1, 2))
    fail(ErrorCode::OutOfRange, "expand input outside [-1/2, 1/2]");
  std::vector<SignedPair> pairs;
  std::vector<int> eps_prime;
  Rational xi = x;
  while (xi != 0) {
    int sign = (xi > 0) ? +1 : -1;
    Rational y = Rational(-1) / xi;
    BigInt k = closest_integer(y);
    BigInt b = sign > 0 ? -k : k;
    if (b > BigInt(std::int64_t(1) << 62))
      fail(ErrorCode::OutOfRange, "partial quotient exceeds int64 range");
    pairs.push_back({b.convert_to<std::int64_t>(), +1});
    eps_prime.push_back(sign);
    xi = y - Rational(k);
  }
  for (std::size_t i = 0; i < pairs.size(); ++i)
    pairs[i].eps = (i == 0) ? eps_prime[0] : -eps_prime[i - 1] * eps_prime[i];
  return SignedCF(std::move(pairs));
}

// --- convergents -----------------------------------------------------------

struct Convergents {
  // Entries for l = 0..n with p_0/q_0 = 0/1; recursion
  // q_{l+1} = b_{l+1} q_l + eps_{l+1} q_{l-1} (same for p, seeded p_{-1} = 1).
  std::vector<BigInt> p, q;
  Rational final_value() const {
    if (q.empty() || q.back() == 0)
      fail(ErrorCode::RecursionMismatch, "empty convergents");
    return Rational(p.back()) / Rational(q.back());
  }
};

inline Convergents convergents(const SignedCF& cf) {
  Convergents out;
  BigInt p_prev = 1, q_prev = 0;  // l = -1
  BigInt p_cur = 0, q_cur = 1;    // l = 0
  out.p.push_back(p_cur);
  out.q.push_back(q_cur);
  for (std::size_t l = 0; l < cf.size(); ++l) {
    BigInt p_next = cf[l].b * p_cur + cf[l].eps * p_prev;
    BigInt q_next = cf[l].b * q_cur + cf[l].eps * q_prev;
    if (q_next <= q_cur)
      fail(ErrorCode::RecursionMismatch, "denominators not increasing");
    p_prev = std::exchange(p_cur, p_next);
    q_prev = std::exchange(q_cur, q_next);
    out.p.push_back(p_cur);
    out.q.push_back(q_cur);
  }
  return out;
}

// |product over k of evaluate(suffix starting at k)|; equals 1/q_n exactly.
inline Rational tail_product(const SignedCF& cf) {
  Rational prod = 1;
  SignedCF suffix = cf;
  for (std::size_t k = 0; k < cf.size(); ++k) {
    prod *= evaluate(suffix);
    if (k + 1 < cf.size()) suffix = suffix.tail();
  }
  return prod < 0 ? Rational(-prod) : prod;
}

// --- block sequences ---------------------------------------------------------

// A tower prefix: one signed expansion per block.
using RationalSeq = std::vector<SignedCF>;

inline BigInt block_denominator(const SignedCF& cf) {
  return convergents(cf).q.back();
}

struct QgCheckResult {
  bool pass = true;
  // 1-based block/position of the first violated bound; 0 when pass.
  std::size_t i = 0, j = 0;
  std::string reason;
};

// Growth-condition gate: b_{1,1} >= N; within each block b_{i,j+1} >= b_{i,j}^2;
// across blocks b_{i+1,1} >= q_{i,m_i}^2.  First violation wins.
inline QgCheckResult qg_check(const RationalSeq& seq, std::int64_t N) {
  if (seq.empty()) fail(ErrorCode::InvalidPrefix, "empty block sequence");
  for (const auto& blk : seq)
    if (blk.empty()) fail(ErrorCode::InvalidPrefix, "empty block");
  if (N < 1) fail(ErrorCode::OutOfRange, "N must be >= 1");
  if (seq[0][0].b < N)
    return {false, 1, 1, "first entry below N"};
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& blk = seq[i];
    for (std::size_t j = 0; j + 1 < blk.size(); ++j) {
      BigInt lhs = blk[j + 1].b, rhs = BigInt(blk[j].b) * blk[j].b;
      if (lhs < rhs)
        return {false, i + 1, j + 2, "in-block growth bound violated"};
    }
    if (i + 1 < seq.size()) {
      BigInt qi = block_denominator(blk);
      if (BigInt(seq[i + 1][0].b) < qi * qi)
        return {false, i + 2, 1, "cross-block growth bound violated"};
    }
  }
  return {};
}

struct KappaPrefix {
  std::string word;                  // 'b' / 't' per level, length n
  std::vector<std::int64_t> l_values;  // l_1 = 0, l_k = m_1 + ... + m_{k-1}
};

// Level types: level l_k + 1 opens block k (a 'b' step); the remaining
// m_k - 1 levels of the block are 't' steps.
inline KappaPrefix kappa_type(const RationalSeq& seq, std::size_t n) {
  std::vector<std::int64_t> l{0};
  std::int64_t total = 0;
  for (const auto& blk : seq) {
    if (blk.empty()) fail(ErrorCode::InvalidPrefix, "empty block");
    total += static_cast<std::int64_t>(blk.size());
    l.push_back(total);
  }
  if (static_cast<std::int64_t>(n) > total)
    fail(ErrorCode::DepthExceedsPrefix, "kappa prefix beyond provided blocks");
  KappaPrefix out;
  out.l_values = l;
  out.word.reserve(n);
  std::size_t k = 0;  // block index
  for (std::size_t lev = 1; lev <= n; ++lev) {
    if (k + 1 < l.size() && static_cast<std::int64_t>(lev) == l[k] + 1) {
      out.word.push_back('b');
    } else {
      out.word.push_back('t');
    }
    if (k + 1 < l.size() && static_cast<std::int64_t>(lev) == l[k + 1]) ++k;
  }
  return out;
}

// k_1 = 1 and k_j = q_1 q_2 ... q_{j-1}; needs j-1 blocks for entry j.
inline std::vector<BigInt> periods_k(const RationalSeq& seq, std::size_t n) {
  if (n < 1) fail(ErrorCode::OutOfRange, "periods_k needs n >= 1");
  if (n - 1 > seq.size())
    fail(ErrorCode::DepthExceedsPrefix, "periods_k beyond provided blocks");
  std::vector<BigInt> out{1};
  BigInt acc = 1;
  for (std::size_t j = 1; j < n; ++j) {
    acc *= block_denominator(seq[j - 1]);
    out.push_back(acc);
  }
  return out;
}

// --- parsing / formatting ----------------------------------------------------

inline Rational parse_rational(const std::string& s) {
  auto bad = [&] { fail(ErrorCode::InvalidFraction, "cannot parse '" + s + "'"); };
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  if (t.empty()) bad();
  auto slash = t.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(t));
    BigInt p(t.substr(0, slash)), q(t.substr(slash + 1));
    if (q == 0) bad();
    return Rational(p) / Rational(q);
  } catch (const std::exception&) {
    bad();
  }
  return 0;  // unreachable
}

inline std::string format_rational(const Rational& r) {
  if (den(r) == 1) return num(r).str();
  return num(r).str() + "/" + den(r).str();
}

// Compact syntax: "(3,+)(2,-)(2,+)"; also accepts "+1"/"-1" for the signs.
inline SignedCF parse_signed_cf(const std::string& s) {
  auto bad = [&] { fail(ErrorCode::InvalidFraction, "cannot parse cf '" + s + "'"); };
  std::vector<SignedPair> pairs;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  skip_ws();
  while (i < s.size()) {
    if (s[i] != '(') bad();
    ++i;
    std::size_t close = s.find(')', i);
    if (close == std::string::npos) bad();
    std::string body = s.substr(i, close - i);
    auto comma = body.find(',');
    if (comma == std::string::npos) bad();
    std::string bs = body.substr(0, comma), es = body.substr(comma + 1);
    int eps = 0;
    if (es == "+" || es == "+1") eps = +1;
    else if (es == "-" || es == "-1") eps = -1;
    else bad();
    try {
      pairs.push_back({std::stoll(bs), eps});
    } catch (const std::exception&) {
      bad();
    }
    i = close + 1;
    skip_ws();
  }
  if (pairs.empty()) bad();
  return SignedCF(std::move(pairs));
}

inline std::string format_signed_cf(const SignedCF& cf) {
  std::string out;
  for (const auto& pr : cf.pairs()) {
    out += "(" + std::to_string(pr.b) + "," + (pr.eps > 0 ? "+" : "-") + ")";
  }
  return out;
}

// Blocks either as ';'-separated compact expansions or as ','-separated
// rationals (each expanded).
inline RationalSeq parse_rational_seq(const std::string& s) {
  RationalSeq seq;
  char sep = s.find(';') != std::string::npos ? ';' : ',';
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find(sep, start);
    std::string piece = s.substr(start, end == std::string::npos ? std::string::npos
                                                                 : end - start);
    std::string trimmed;
    for (char c : piece)
      if (!std::isspace(static_cast<unsigned char>(c))) trimmed.push_back(c);
    if (!trimmed.empty()) {
      if (trimmed.front() == '(')
        seq.push_back(parse_signed_cf(trimmed));
      else
        seq.push_back(expand(parse_rational(trimmed)));
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  if (seq.empty()) fail(ErrorCode::InvalidPrefix, "empty block sequence");
  return seq;
}

}  // namespace pararenorm::mcf
