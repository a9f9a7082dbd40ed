#include "xtinct/symop.hpp"

#include <Eigen/LU>

#include <cctype>
#include <cstdint>
#include <numeric>
#include <tuple>

namespace xtinct {

namespace {

int mod_den(int v) {
  int r = v % kTranslationDen;
  return r < 0 ? r + kTranslationDen : r;
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
    ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
    --e;
  return std::string(s.substr(b, e - b));
}

// Reads an unsigned number at s[pos]: "3", "1/2", ".25", "0.5".
// Returns its value as a numerator over kTranslationDen.
int read_constant(const std::string& term, const std::string& s, size_t& pos) {
  auto digits = [&](std::int64_t& value, int& count) {
    value = 0;
    count = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      if (count > 9)
        throw SymOpParseError(term, "number too long");
      value = value * 10 + (s[pos++] - '0');
      ++count;
    }
  };
  std::int64_t whole = 0;
  int nwhole = 0;
  digits(whole, nwhole);
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::int64_t frac = 0;
    int nfrac = 0;
    digits(frac, nfrac);
    if (nwhole == 0 && nfrac == 0)
      throw SymOpParseError(term, "expected digits");
    std::int64_t scale = 1;
    for (int i = 0; i < nfrac; ++i)
      scale *= 10;
    std::int64_t num = (whole * scale + frac) * kTranslationDen;
    if (num % scale != 0)
      throw SymOpParseError(term, "decimal is not a multiple of 1/12");
    return mod_den(static_cast<int>((num / scale) % kTranslationDen));
  }
  if (nwhole == 0)
    throw SymOpParseError(term, "expected a number");
  std::int64_t den = 1;
  if (pos < s.size() && s[pos] == '/') {
    ++pos;
    int nden = 0;
    digits(den, nden);
    if (nden == 0 || den == 0)
      throw SymOpParseError(term, "bad denominator");
    if (den != 1 && den != 2 && den != 3 && den != 4 && den != 6 && den != 12)
      throw SymOpParseError(term, "denominator " + std::to_string(den) +
                                      " not in {2,3,4,6,12}");
  }
  std::int64_t num = whole * kTranslationDen;
  if (num % den != 0)
    throw SymOpParseError(term, "fraction is not a multiple of 1/12");
  return mod_den(static_cast<int>((num / den) % kTranslationDen));
}

// One row of the triplet: signed sum of x/y/z with at most one constant.
void parse_term(const std::string& raw, IntMatrix3::RowXpr row, int& shift) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c)))
      s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s.empty())
    throw SymOpParseError(raw, "empty term");
  row.setZero();
  bool have_constant = false;
  size_t pos = 0;
  while (pos < s.size()) {
    int sign = 1;
    if (s[pos] == '+' || s[pos] == '-') {
      sign = s[pos] == '-' ? -1 : 1;
      ++pos;
    } else if (pos != 0) {
      throw SymOpParseError(raw, "expected '+' or '-'");
    }
    if (pos >= s.size())
      throw SymOpParseError(raw, "dangling sign");
    char c = s[pos];
    if (c == 'x' || c == 'y' || c == 'z') {
      row(c - 'x') += sign;
      ++pos;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      int value = read_constant(raw, s, pos);
      if (pos < s.size() && (s[pos] == '*' || (s[pos] >= 'x' && s[pos] <= 'z')))
        throw SymOpParseError(raw, "coefficient outside {-1,0,1}");
      if (have_constant)
        throw SymOpParseError(raw, "more than one constant");
      have_constant = true;
      shift = mod_den(sign * value);
    } else {
      throw SymOpParseError(raw, std::string("unexpected character '") + c + "'");
    }
  }
  if ((row.array().abs() > 1).any())
    throw SymOpParseError(raw, "coefficient outside {-1,0,1}");
}

}  // namespace

IntVector3 wrap_translation(const IntVector3& t) {
  return t.unaryExpr([](int v) { return mod_den(v); });
}

SymOp SymOp::operator*(const SymOp& other) const {
  SymOp r;
  r.rotation = rotation * other.rotation;
  r.translation = wrap_translation(rotation * other.translation + translation);
  return r;
}

SymOp SymOp::inverse() const {
  // Integer adjugate; det is +-1 for every valid op.
  const IntMatrix3& m = rotation;
  IntMatrix3 adj;
  adj(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  adj(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  adj(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  adj(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  adj(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  adj(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  adj(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  adj(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  adj(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  int d = det();
  if (d != 1 && d != -1)
    throw std::domain_error("symmetry operation is not invertible over Z");
  SymOp r;
  r.rotation = adj * d;
  r.translation = wrap_translation(-(r.rotation * translation));
  return r;
}

std::strong_ordering SymOp::operator<=>(const SymOp& o) const {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (auto c = rotation(i, j) <=> o.rotation(i, j); c != 0)
        return c;
  for (int i = 0; i < 3; ++i)
    if (auto c = translation(i) <=> o.translation(i); c != 0)
      return c;
  return std::strong_ordering::equal;
}

SymOp parse_symop(std::string_view text) {
  std::string terms[3];
  size_t start = 0;
  int n = 0;
  for (size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      if (n == 3)
        throw SymOpParseError(std::string(text), "more than three terms");
      terms[n++] = trim(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (n != 3)
    throw SymOpParseError(std::string(text), "expected three comma-separated terms");
  SymOp op;
  for (int i = 0; i < 3; ++i) {
    int shift = 0;
    parse_term(terms[i], op.rotation.row(i), shift);
    op.translation(i) = shift;
  }
  int d = op.det();
  if (d != 1 && d != -1)
    throw SymOpParseError(std::string(text),
                          "rotation determinant " + std::to_string(d));
  return op;
}

std::string format_symop(const SymOp& op) {
  static const char axes[] = "xyz";
  std::string out;
  for (int i = 0; i < 3; ++i) {
    if (i)
      out += ',';
    std::string term;
    for (int j = 0; j < 3; ++j) {
      int c = op.rotation(i, j);
      if (c == 0)
        continue;
      if (c < 0)
        term += '-';
      else if (!term.empty())
        term += '+';
      term += axes[j];
    }
    if (int t = op.translation(i); t != 0) {
      int g = std::gcd(t, kTranslationDen);
      term += (term.empty() ? "" : "+") + std::to_string(t / g) + "/" +
              std::to_string(kTranslationDen / g);
    }
    out += term.empty() ? "0" : term;
  }
  return out;
}

}  // namespace xtinct
