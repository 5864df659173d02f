#include "sphdist/region_parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <variant>
#include <vector>

#include "sphdist/distribution.hpp"
#include "sphdist/errors.hpp"

namespace sphdist {

namespace {

using Kind = Region::Kind;
using Vector = std::vector<double>;
using Value = std::variant<Region, double, Vector>;

struct Location {
  std::size_t line;
  std::size_t column;
};

struct Argument {
  std::optional<std::string> name;
  Value value;
  Location where;
};

// Parameter names of each constructor, in positional order.
const std::map<std::string, std::vector<std::string>, std::less<>> kSignatures = {
    {"full", {}},
    {"empty", {}},
    {"cap", {"center", "theta"}},
    {"ball", {"center", "radius"}},
    {"hemisphere", {"normal"}},
    {"band", {"axis", "zlo", "zhi"}},
    {"anglesum", {"lo", "hi"}},
};

bool is_variadic(std::string_view name) {
  return name == "union" || name == "intersection" || name == "product" || name == "complement" ||
         name == "difference";
}

std::optional<double (*)(double)> math_function(std::string_view name) {
  if (name == "sqrt") return [](double x) { return std::sqrt(x); };
  if (name == "sin") return [](double x) { return std::sin(x); };
  if (name == "cos") return [](double x) { return std::cos(x); };
  if (name == "asin") return [](double x) { return std::asin(x); };
  if (name == "acos") return [](double x) { return std::acos(x); };
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view text, const RegionBindings& bindings, std::size_t line, std::size_t column)
      : text_(text), bindings_(bindings), line_(line), column_(column) {}

  Region parse() {
    skip_space();
    const Location where = here();
    Value v = value();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "' after expression");
    if (!std::holds_alternative<Region>(v)) fail_at(where, "expected a region expression");
    return std::get<Region>(std::move(v));
  }

  double parse_number() {
    const double v = number();
    finish();
    return v;
  }

  SpherePoint parse_point() {
    skip_space();
    Argument arg{std::nullopt, 0.0, here()};
    arg.value = vector();
    finish();
    return as_point(arg);
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { fail_at(here(), message); }
  [[noreturn]] static void fail_at(Location where, const std::string& message) {
    throw ParseError(message, where.line, where.column);
  }

  Location here() const { return {line_, column_}; }

  void finish() {
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        advance();
      } else if (text_[pos_] == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  bool accept(char c) {
    skip_space();
    if (peek() != c) return false;
    advance();
    return true;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string identifier() {
    std::string out;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
      out += peek();
      advance();
    }
    return out;
  }

  /// Identifier at the cursor without consuming it, and the character after it.
  std::pair<std::string, char> lookahead_identifier() const {
    std::size_t p = pos_;
    while (p < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[p])) || text_[p] == '_')) ++p;
    std::size_t q = p;
    while (q < text_.size() && std::isspace(static_cast<unsigned char>(text_[q]))) ++q;
    return {std::string(text_.substr(pos_, p - pos_)), q < text_.size() ? text_[q] : '\0'};
  }

  Value value() {
    skip_space();
    if (peek() == '[') return vector();
    if (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_') {
      const auto [name, next] = lookahead_identifier();
      if (kSignatures.contains(name) || is_variadic(name)) return region_call();
      if (bindings_.contains(name)) {
        const Location where = here();
        identifier();
        if (accept('(')) fail_at(where, "'" + name + "' names a region, not a constructor");
        return bindings_.find(name)->second;
      }
      if (next == '(' && !math_function(name)) fail("unknown region constructor '" + name + "'");
    }
    return number();
  }

  Vector vector() {
    expect('[');
    Vector out;
    if (accept(']')) fail("empty point");
    do {
      out.push_back(number());
    } while (accept(','));
    expect(']');
    return out;
  }

  // number := term (('+' | '-') term)*
  double number() {
    double v = term();
    while (true) {
      if (accept('+')) {
        v += term();
      } else if (accept('-')) {
        v -= term();
      } else {
        return v;
      }
    }
  }

  double term() {
    double v = unary();
    while (true) {
      if (accept('*')) {
        v *= unary();
      } else if (accept('/')) {
        v /= unary();
      } else {
        return v;
      }
    }
  }

  double unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return primary();
  }

  double primary() {
    skip_space();
    if (accept('(')) {
      const double v = number();
      expect(')');
      return v;
    }
    const Location where = here();
    if (std::isalpha(static_cast<unsigned char>(peek()))) {
      const std::string name = identifier();
      if (name == "pi") return kPi;
      if (const auto f = math_function(name)) {
        expect('(');
        const double v = number();
        expect(')');
        return (*f)(v);
      }
      if (bindings_.contains(name)) fail_at(where, "region '" + name + "' used where a number is expected");
      fail_at(where, "unknown name '" + name + "'");
    }
    std::size_t end = pos_;
    while (end < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.' ||
                                  text_[end] == 'e' || text_[end] == 'E' ||
                                  ((text_[end] == '-' || text_[end] == '+') && end > pos_ &&
                                   (text_[end - 1] == 'e' || text_[end - 1] == 'E')))) {
      ++end;
    }
    double v = 0.0;
    const auto res = std::from_chars(text_.data() + pos_, text_.data() + end, v);
    if (end == pos_ || res.ec != std::errc() || res.ptr != text_.data() + end) fail("expected a number");
    while (pos_ < end) advance();
    return v;
  }

  Region region_call() {
    const Location where = here();
    const std::string name = identifier();
    std::vector<Argument> args;
    if (accept('(')) {
      if (!accept(')')) {
        do {
          args.push_back(argument());
        } while (accept(','));
        expect(')');
      }
    } else if (name != "full" && name != "empty") {
      fail("expected '(' after '" + name + "'");
    }
    try {
      return build(name, args, where);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      fail_at(where, name + ": " + e.what());
    }
  }

  Argument argument() {
    skip_space();
    Argument arg{std::nullopt, 0.0, here()};
    const auto [name, next] = lookahead_identifier();
    if (!name.empty() && next == '=') {
      identifier();
      expect('=');
      arg.name = name;
    }
    skip_space();
    arg.where = here();
    arg.value = value();
    return arg;
  }

  Region build(const std::string& name, const std::vector<Argument>& args, Location where) {
    if (is_variadic(name)) {
      std::vector<Region> parts;
      for (const auto& a : args) {
        if (a.name) fail_at(a.where, name + " takes positional regions only");
        parts.push_back(as_region(a));
      }
      if (name == "complement") {
        if (parts.size() != 1) fail_at(where, "complement takes one region");
        return Region::complement(parts[0]);
      }
      if (name == "difference") {
        if (parts.size() != 2) fail_at(where, "difference takes two regions");
        return Region::difference(parts[0], parts[1]);
      }
      if (parts.empty()) fail_at(where, name + " needs at least one region");
      if (name == "union") return Region::union_of(std::move(parts));
      if (name == "intersection") return Region::intersection_of(std::move(parts));
      return Region::product(std::move(parts));
    }

    const auto& params = kSignatures.at(name);
    std::vector<const Argument*> slot(params.size(), nullptr);
    std::size_t next_positional = 0;
    for (const auto& a : args) {
      std::size_t i = 0;
      if (a.name) {
        while (i < params.size() && params[i] != *a.name) ++i;
        if (i == params.size()) fail_at(a.where, name + " has no parameter '" + *a.name + "'");
      } else {
        i = next_positional++;
        if (i >= params.size()) fail_at(a.where, "too many arguments to " + name);
      }
      if (slot[i]) fail_at(a.where, "parameter '" + params[i] + "' given twice");
      slot[i] = &a;
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!slot[i]) fail_at(where, name + " is missing '" + params[i] + "'");
    }

    if (name == "full") return Region::full();
    if (name == "empty") return Region::empty();
    if (name == "cap") return Region::cap(as_point(*slot[0]), as_number(*slot[1]));
    if (name == "ball") return Region::ball(as_point(*slot[0]), as_number(*slot[1]));
    if (name == "hemisphere") return Region::hemisphere(as_point(*slot[0]));
    if (name == "band") return Region::band(as_point(*slot[0]), as_number(*slot[1]), as_number(*slot[2]));
    return Region::angle_sum(as_number(*slot[0]), as_number(*slot[1]));
  }

  static Region as_region(const Argument& a) {
    if (const auto* r = std::get_if<Region>(&a.value)) return *r;
    fail_at(a.where, "expected a region");
  }

  static double as_number(const Argument& a) {
    if (const auto* d = std::get_if<double>(&a.value)) return *d;
    fail_at(a.where, "expected a number");
  }

  static SpherePoint as_point(const Argument& a) {
    const auto* v = std::get_if<Vector>(&a.value);
    if (!v) fail_at(a.where, "expected a point [x, y, ...]");
    if (v->size() < 2) fail_at(a.where, "a point needs at least two coordinates");
    double norm2 = 0.0;
    for (double x : *v) norm2 += x * x;
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) fail_at(a.where, "a point must be a finite nonzero vector");
    if (std::abs(std::sqrt(norm2) - 1.0) <= kUnitNormTolerance) return SpherePoint(*v);
    return SpherePoint::normalized(*v);
  }

  std::string_view text_;
  const RegionBindings& bindings_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t column_;
};

void format_point(std::ostream& out, const SpherePoint& p) {
  out << '[';
  for (std::size_t i = 0; i < p.size(); ++i) out << (i ? ", " : "") << format_double(p[i]);
  out << ']';
}

void format_into(std::ostream& out, const Region& r) {
  const auto list = [&](const char* name) {
    out << name << '(';
    for (std::size_t i = 0; i < r.children().size(); ++i) {
      if (i) out << ", ";
      format_into(out, r.children()[i]);
    }
    out << ')';
  };
  switch (r.kind()) {
    case Kind::full: out << "full"; return;
    case Kind::empty: out << "empty"; return;
    case Kind::cap:
      out << "cap(center=";
      format_point(out, r.point());
      out << ", theta=" << format_double(r.theta()) << ')';
      return;
    case Kind::hemisphere:
      out << "hemisphere(normal=";
      format_point(out, r.point());
      out << ')';
      return;
    case Kind::band:
      out << "band(axis=";
      format_point(out, r.point());
      out << ", zlo=" << format_double(r.lower()) << ", zhi=" << format_double(r.upper()) << ')';
      return;
    case Kind::angle_sum:
      out << "anglesum(lo=" << format_double(r.lower()) << ", hi=" << format_double(r.upper()) << ')';
      return;
    case Kind::union_of: list("union"); return;
    case Kind::intersection: list("intersection"); return;
    case Kind::complement: list("complement"); return;
    case Kind::difference: list("difference"); return;
    case Kind::product: list("product"); return;
  }
}

}  // namespace

Region parse_region(std::string_view text, const RegionBindings& bindings, std::size_t line, std::size_t column) {
  return Parser(text, bindings, line, column).parse();
}

double parse_number(std::string_view text, std::size_t line, std::size_t column) {
  return Parser(text, {}, line, column).parse_number();
}

SpherePoint parse_point(std::string_view text, std::size_t line, std::size_t column) {
  return Parser(text, {}, line, column).parse_point();
}

std::string format_region(const Region& region) {
  std::ostringstream out;
  format_into(out, region);
  return out.str();
}

bool structurally_equal(const Region& a, const Region& b) {
  if (a.same_node(b)) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Kind::full:
    case Kind::empty:
      return true;
    case Kind::cap:
      return a.point() == b.point() && a.theta() == b.theta();
    case Kind::hemisphere:
      return a.point() == b.point();
    case Kind::band:
      return a.point() == b.point() && a.lower() == b.lower() && a.upper() == b.upper();
    case Kind::angle_sum:
      return a.lower() == b.lower() && a.upper() == b.upper();
    default:
      break;
  }
  const auto& ca = a.children();
  const auto& cb = b.children();
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (!structurally_equal(ca[i], cb[i])) return false;
  }
  return true;
}

}  // namespace sphdist
