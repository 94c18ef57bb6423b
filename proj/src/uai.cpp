#include "maxpers/uai.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace maxpers {

namespace {

class Tokenizer {
 public:
  explicit Tokenizer(const std::string& text) : text_(text) {}

  // Returns false at end of input; skips whitespace and '#' comments.
  bool next(std::string& tok) {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ >= text_.size()) return false;
    size_t start = pos_;
    while (pos_ < text_.size() &&
           !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '#')
      ++pos_;
    tok = text_.substr(start, pos_ - start);
    return true;
  }

  std::string expect(const char* what) {
    std::string tok;
    if (!next(tok)) throw UaiParseError(std::string("unexpected end of input, expected ") + what, line_);
    return tok;
  }

  long long expect_int(const char* what) {
    std::string tok = expect(what);
    char* end = nullptr;
    long long v = std::strtoll(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0')
      throw UaiParseError("expected integer for " + std::string(what) + ", got '" + tok + "'", line_);
    return v;
  }

  double expect_number(const char* what) {
    std::string tok = expect(what);
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      throw UaiParseError("expected number for " + std::string(what) + ", got '" + tok + "'", line_);
    return v;
  }

  int line() const { return line_; }

 private:
  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
};

void format_number(std::string& out, double v) {
  char buf[40];
  if (std::rint(v) == v && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
  } else {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
  }
  out += buf;
}

}  // namespace

GraphicalModel parse_uai(const std::string& text) {
  Tokenizer tk(text);
  std::string header = tk.expect("header");
  if (header != "MARKOV")
    throw UaiParseError("expected MARKOV header, got '" + header + "'", tk.line());

  long long n = tk.expect_int("node count");
  if (n < 0) throw UaiParseError("negative node count", tk.line());
  std::vector<int> labels(n);
  for (long long v = 0; v < n; ++v) {
    long long k = tk.expect_int("cardinality");
    if (k < 1) throw UaiParseError("cardinality must be >= 1", tk.line());
    labels[v] = static_cast<int>(k);
  }
  GraphicalModel f(labels);

  long long nfactors = tk.expect_int("factor count");
  if (nfactors < 0) throw UaiParseError("negative factor count", tk.line());

  struct Scope {
    int arity;
    int a = -1, b = -1;
  };
  std::vector<Scope> scopes;
  scopes.reserve(nfactors);
  // Maps a factor's scope to the model edge, with a flip when the file
  // orientation opposes the stored one.
  std::vector<std::pair<int, bool>> scope_edge(nfactors, {-1, false});

  for (long long k = 0; k < nfactors; ++k) {
    long long arity = tk.expect_int("factor arity");
    if (arity > 2)
      throw UaiParseError("factor arity " + std::to_string(arity) +
                              " not supported (unary/pairwise only)",
                          tk.line());
    if (arity < 0) throw UaiParseError("negative factor arity", tk.line());
    Scope s;
    s.arity = static_cast<int>(arity);
    if (arity >= 1) {
      long long a = tk.expect_int("variable index");
      if (a < 0 || a >= n) throw UaiParseError("variable index out of range", tk.line());
      s.a = static_cast<int>(a);
    }
    if (arity == 2) {
      long long b = tk.expect_int("variable index");
      if (b < 0 || b >= n) throw UaiParseError("variable index out of range", tk.line());
      if (b == s.a) throw UaiParseError("pairwise factor repeats a variable", tk.line());
      s.b = static_cast<int>(b);
      bool found = false;
      for (const EdgeRef& r : f.adjacent(s.a)) {
        if (r.other == s.b) {
          scope_edge[k] = {r.edge, !r.is_u};
          found = true;
          break;
        }
      }
      if (!found) scope_edge[k] = {f.add_edge(s.a, s.b), false};
    }
    scopes.push_back(s);
  }

  for (long long k = 0; k < nfactors; ++k) {
    const Scope& s = scopes[k];
    long long expected = 1;
    if (s.arity == 1) expected = f.num_labels(s.a);
    if (s.arity == 2)
      expected = static_cast<long long>(f.num_labels(s.a)) * f.num_labels(s.b);
    long long count = tk.expect_int("table size");
    if (count != expected)
      throw UaiParseError("table size " + std::to_string(count) + " does not match scope (expected " +
                              std::to_string(expected) + ")",
                          tk.line());
    if (s.arity == 0) {
      f.set_constant(f.constant() + tk.expect_number("table entry"));
    } else if (s.arity == 1) {
      for (int i = 0; i < f.num_labels(s.a); ++i)
        f.unary_table(s.a)[i] += tk.expect_number("table entry");
    } else {
      auto [e, flipped] = scope_edge[k];
      int rows = f.num_labels(s.a), cols = f.num_labels(s.b);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
          double v = tk.expect_number("table entry");
          if (flipped)
            f.set_pairwise(e, j, i, f.pairwise(e, j, i) + v);
          else
            f.set_pairwise(e, i, j, f.pairwise(e, i, j) + v);
        }
    }
  }
  std::string extra;
  if (tk.next(extra))
    throw UaiParseError("trailing content '" + extra + "'", tk.line());
  if (f.all_costs_integral()) f.set_integer_costs(true);
  return f;
}

std::string serialize_uai(const GraphicalModel& f) {
  std::string out = "MARKOV\n";
  out += std::to_string(f.num_nodes());
  out += '\n';
  for (int v = 0; v < f.num_nodes(); ++v) {
    if (v) out += ' ';
    out += std::to_string(f.num_labels(v));
  }
  if (f.num_nodes()) out += '\n';

  int nfactors = f.num_nodes() + f.num_edges() + (f.constant() != 0.0 ? 1 : 0);
  out += std::to_string(nfactors);
  out += '\n';
  for (int v = 0; v < f.num_nodes(); ++v) {
    out += "1 ";
    out += std::to_string(v);
    out += '\n';
  }
  for (int e = 0; e < f.num_edges(); ++e) {
    out += "2 ";
    out += std::to_string(f.edge(e).u);
    out += ' ';
    out += std::to_string(f.edge(e).v);
    out += '\n';
  }
  if (f.constant() != 0.0) out += "0\n";

  out += '\n';
  for (int v = 0; v < f.num_nodes(); ++v) {
    out += std::to_string(f.num_labels(v));
    out += '\n';
    for (int i = 0; i < f.num_labels(v); ++i) {
      if (i) out += ' ';
      format_number(out, f.unary(v, i));
    }
    out += '\n';
  }
  for (int e = 0; e < f.num_edges(); ++e) {
    int rows = f.num_labels(f.edge(e).u), cols = f.num_labels(f.edge(e).v);
    out += std::to_string(rows * cols);
    out += '\n';
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        if (j) out += ' ';
        format_number(out, f.pairwise(e, i, j));
      }
      out += '\n';
    }
  }
  if (f.constant() != 0.0) {
    out += "1\n";
    format_number(out, f.constant());
    out += '\n';
  }
  return out;
}

GraphicalModel load_uai_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_uai(ss.str());
}

void save_uai_file(const GraphicalModel& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open " + path + " for writing");
  out << serialize_uai(f);
  require(out.good(), "write failed for " + path);
}

}  // namespace maxpers
