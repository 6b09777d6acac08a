#include "slantgeo/scenario.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "slantgeo/errors.hpp"

namespace slantgeo {

namespace {

struct Entry {
  std::string key;
  std::string value;
  bool quoted = false;
  int line = 0;
  int column = 0;  // 1-based column of the first value character
};

struct Section {
  std::string kind;
  std::string arg;
  int line = 0;
  std::vector<Entry> entries;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<Section> lex(std::string_view text) {
  std::vector<Section> sections;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    // Strip a comment that starts outside quotes.
    bool in_quote = false;
    std::size_t cut = raw.size();
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '"') in_quote = !in_quote;
      if (raw[i] == '#' && !in_quote) {
        cut = i;
        break;
      }
    }
    const std::string_view body = raw.substr(0, cut);
    const std::string t = trim(body);
    if (t.empty()) continue;

    if (t.front() == '[') {
      if (t.back() != ']') throw InputError("section header is missing ']'", line_no);
      const std::string inner = trim(std::string_view(t).substr(1, t.size() - 2));
      const auto sp = inner.find_first_of(" \t");
      Section s;
      s.kind = sp == std::string::npos ? inner : inner.substr(0, sp);
      s.arg = sp == std::string::npos ? "" : trim(std::string_view(inner).substr(sp));
      s.line = line_no;
      sections.push_back(std::move(s));
      continue;
    }
    if (sections.empty()) throw InputError("key outside of any section", line_no);

    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw InputError("expected key = value", line_no);
    Entry e;
    e.key = trim(body.substr(0, eq));
    e.line = line_no;
    if (e.key.empty()) throw InputError("empty key", line_no);
    std::size_t vstart = eq + 1;
    while (vstart < body.size() && (body[vstart] == ' ' || body[vstart] == '\t')) ++vstart;
    std::string_view rest = body.substr(vstart);
    if (!rest.empty() && rest.front() == '"') {
      const auto close = rest.find('"', 1);
      if (close == std::string_view::npos) throw InputError("unterminated quoted value", line_no);
      if (!trim(rest.substr(close + 1)).empty()) throw InputError("unexpected text after quoted value", line_no);
      e.value = std::string(rest.substr(1, close - 1));
      e.quoted = true;
      e.column = static_cast<int>(vstart) + 2;
    } else {
      e.value = trim(rest);
      e.column = static_cast<int>(vstart) + 1;
      if (e.value.empty()) throw InputError("missing value for '" + e.key + "'", line_no);
    }
    for (const Entry& prev : sections.back().entries) {
      if (prev.key == e.key) throw InputError("duplicate key '" + e.key + "'", line_no);
    }
    sections.back().entries.push_back(std::move(e));
  }
  return sections;
}

std::optional<double> to_number(std::string_view s) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

double number(const Entry& e) {
  const auto v = to_number(e.value);
  if (!v || !std::isfinite(*v)) throw InputError("'" + e.key + "' expects a number, got '" + e.value + "'", e.line);
  return *v;
}

long long integer(const Entry& e) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc() || ptr != e.value.data() + e.value.size()) {
    throw InputError("'" + e.key + "' expects an integer, got '" + e.value + "'", e.line);
  }
  return v;
}

bool boolean(const Entry& e) {
  if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "no" || e.value == "0") return false;
  throw InputError("'" + e.key + "' expects true or false", e.line);
}

// Splits "k.i.j" into integer indices after the prefix; returns false when the prefix differs.
bool indexed_key(const std::string& key, std::string_view prefix, int count, std::vector<int>& out, int line) {
  if (key.size() <= prefix.size() + 1 || key.compare(0, prefix.size(), prefix) != 0 || key[prefix.size()] != '.') {
    return false;
  }
  out.clear();
  std::size_t pos = prefix.size() + 1;
  while (pos <= key.size()) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) {
      throw InputError("malformed index in key '" + key + "'", line);
    }
    out.push_back(v);
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  if (static_cast<int>(out.size()) != count) {
    throw InputError("key '" + key + "' needs " + std::to_string(count) + " index(es)", line);
  }
  return true;
}

class Builder {
 public:
  Builder(const ParamMap& params, const BindingMap& bindings) : params_(params), bindings_(bindings) {}

  ScalarExpr expr(const Entry& e, int dim) const { return expr_at(e.value, e.line, e.column, dim, e.quoted); }

  ScalarExpr expr_at(const std::string& text, int line, int column, int dim, bool quoted) const {
    if (!quoted) throw InputError("expression values must be quoted", line);
    try {
      return parse(text, dim, params_, bindings_);
    } catch (const ParseError& err) {
      throw InputError("malformed expression: " + std::string(err.what()) + " (column " +
                           std::to_string(column + static_cast<int>(err.offset())) + ")",
                       line);
    }
  }

  // Comma-separated expression list inside one quoted value.
  std::vector<ScalarExpr> list(const Entry& e, int dim) const {
    if (!e.quoted) throw InputError("expression lists must be quoted", e.line);
    std::vector<ScalarExpr> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= e.value.size(); ++i) {
      const char c = i < e.value.size() ? e.value[i] : ',';
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (c == ',' && depth == 0) {
        const std::string part = e.value.substr(start, i - start);
        const auto lead = part.find_first_not_of(" \t");
        if (lead == std::string::npos) throw InputError("empty entry in list '" + e.key + "'", e.line);
        out.push_back(expr_at(part, e.line, e.column + static_cast<int>(start), dim, true));
        start = i + 1;
      }
    }
    return out;
  }

 private:
  const ParamMap& params_;
  const BindingMap& bindings_;
};

std::vector<double> number_list(const Entry& e) {
  std::vector<double> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= e.value.size(); ++i) {
    if (i == e.value.size() || e.value[i] == ',') {
      const std::string part = trim(std::string_view(e.value).substr(start, i - start));
      const auto v = to_number(part);
      if (!v || !std::isfinite(*v)) throw InputError("'" + e.key + "' expects comma-separated numbers", e.line);
      out.push_back(*v);
      start = i + 1;
    }
  }
  return out;
}

[[noreturn]] void unknown(const Entry& e, const Section& s) {
  throw InputError("unknown key '" + e.key + "' in [" + s.kind + "]", e.line);
}

std::shared_ptr<const ChartManifold> build_manifold(const Section& s, const Builder& b) {
  const Entry* dim_entry = nullptr;
  for (const Entry& e : s.entries) {
    if (e.key == "dim") dim_entry = &e;
  }
  if (!dim_entry) throw InputError("[manifold " + s.arg + "] needs 'dim'", s.line);
  const long long dim = integer(*dim_entry);
  if (dim < 1 || dim > 32) throw InputError("dim must be between 1 and 32", dim_entry->line);
  const int n = static_cast<int>(dim);

  bool identity = false;
  std::vector<ChartManifold::MetricEntry> metric;
  std::optional<std::vector<ScalarExpr>> j;
  std::vector<int> idx;
  for (const Entry& e : s.entries) {
    if (e.key == "dim") continue;
    if (e.key == "metric") {
      if (e.value != "identity") throw InputError("metric must be 'identity' or given by g.i.j entries", e.line);
      identity = true;
    } else if (indexed_key(e.key, "g", 2, idx, e.line)) {
      if (idx[0] < 1 || idx[1] < 1 || idx[0] > n || idx[1] > n) {
        throw InputError("metric index out of range for dim " + std::to_string(n), e.line);
      }
      if (idx[0] > idx[1]) throw InputError("lower-triangle metric entry; declare i ≤ j", e.line);
      metric.push_back({idx[0] - 1, idx[1] - 1, b.expr(e, n)});
    } else if (indexed_key(e.key, "J", 2, idx, e.line)) {
      if (idx[0] < 1 || idx[1] < 1 || idx[0] > n || idx[1] > n) {
        throw InputError("J index out of range for dim " + std::to_string(n), e.line);
      }
      if (!j) j = std::vector<ScalarExpr>(static_cast<std::size_t>(n * n), ScalarExpr::constant(0.0, n));
      (*j)[static_cast<std::size_t>((idx[0] - 1) * n + idx[1] - 1)] = b.expr(e, n);
    } else {
      unknown(e, s);
    }
  }
  if (identity && !metric.empty()) throw InputError("metric = identity conflicts with g.i.j entries", s.line);
  if (!identity && metric.empty()) throw InputError("[manifold " + s.arg + "] needs a metric", s.line);
  if (identity) {
    for (int i = 0; i < n; ++i) metric.push_back({i, i, ScalarExpr::constant(1.0, n)});
  }
  try {
    return std::make_shared<const ChartManifold>(n, metric, j);
  } catch (const GeometryError& err) {
    throw InputError(err.what(), s.line);
  }
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Scenario parse_scenario(std::string_view text, const ParamOverrides& overrides, std::string name) {
  const std::vector<Section> sections = lex(text);
  Scenario sc;
  sc.name = std::move(name);

  std::string digest_input(text);
  for (const auto& [k, v] : overrides.values) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    digest_input += "\n" + k + "=" + buf;
  }
  for (const auto& [k, v] : overrides.bindings) digest_input += "\n" + k + "=\"" + v + "\"";
  sc.digest = fnv1a_hex(digest_input);

  static const std::set<std::string, std::less<>> kinds{"params", "manifold", "map", "sample", "checks", "printed"};
  for (const Section& s : sections) {
    if (!kinds.contains(s.kind)) throw InputError("unknown section [" + s.kind + "]", s.line);
    if (s.kind == "manifold" && s.arg.empty()) throw InputError("[manifold] needs a name", s.line);
    if (s.kind != "manifold" && !s.arg.empty()) throw InputError("[" + s.kind + "] takes no name", s.line);
  }
  auto single = [&](const std::string& kind) -> const Section* {
    const Section* found = nullptr;
    for (const Section& s : sections) {
      if (s.kind != kind) continue;
      if (found) throw InputError("section [" + kind + "] appears twice", s.line);
      found = &s;
    }
    return found;
  };

  if (const Section* p = single("params")) {
    for (const Entry& e : p->entries) {
      if (e.quoted) {
        sc.bindings[e.key] = e.value;
      } else {
        sc.params[e.key] = number(e);
      }
    }
  }
  for (const auto& [k, v] : overrides.values) {
    sc.bindings.erase(k);
    sc.params[k] = v;
  }
  for (const auto& [k, v] : overrides.bindings) {
    sc.params.erase(k);
    sc.bindings[k] = v;
  }
  const Builder b(sc.params, sc.bindings);

  for (const Section& s : sections) {
    if (s.kind != "manifold") continue;
    if (sc.manifolds.contains(s.arg)) throw InputError("manifold '" + s.arg + "' declared twice", s.line);
    sc.manifolds[s.arg] = build_manifold(s, b);
  }

  const Section* map = single("map");
  if (!map) throw InputError("scenario needs a [map] section");
  std::map<int, const Entry*> comps;
  const Entry* lambda = nullptr;
  const Entry* theta = nullptr;
  std::vector<int> idx;
  for (const Entry& e : map->entries) {
    if (e.key == "source") {
      sc.source_name = e.value;
    } else if (e.key == "target") {
      sc.target_name = e.value;
    } else if (e.key == "side") {
      if (e.value == "domain" || e.value == "domain-slant") {
        sc.side = Side::domain;
      } else if (e.value == "range" || e.value == "range-slant") {
        sc.side = Side::range;
      } else {
        throw InputError("side must be domain or range", e.line);
      }
    } else if (e.key == "lambda") {
      lambda = &e;
    } else if (e.key == "theta") {
      theta = &e;
    } else if (e.key == "allow_full_rank") {
      sc.split.allow_full_rank = boolean(e);
    } else if (e.key == "rank_threshold") {
      sc.split.rank_threshold = number(e);
      if (!(sc.split.rank_threshold > 0.0)) throw InputError("rank_threshold must be positive", e.line);
    } else if (indexed_key(e.key, "F", 1, idx, e.line)) {
      comps[idx[0]] = &e;
    } else {
      unknown(e, *map);
    }
  }
  auto manifold = [&](const std::string& which, const std::string& n) {
    if (n.empty()) throw InputError("[map] needs '" + which + "'", map->line);
    const auto it = sc.manifolds.find(n);
    if (it == sc.manifolds.end()) throw InputError("unknown manifold '" + n + "'", map->line);
    return it->second;
  };
  const auto src = manifold("source", sc.source_name);
  const auto tgt = manifold("target", sc.target_name);
  std::vector<ScalarExpr> components;
  for (int a = 1; a <= tgt->dim(); ++a) {
    const auto it = comps.find(a);
    if (it == comps.end()) {
      throw InputError("[map] is missing component F." + std::to_string(a) + " for target dim " +
                           std::to_string(tgt->dim()),
                       map->line);
    }
    components.push_back(b.expr(*it->second, src->dim()));
  }
  for (const auto& [a, e] : comps) {
    if (a < 1 || a > tgt->dim()) {
      throw InputError("component F." + std::to_string(a) + " exceeds target dim " + std::to_string(tgt->dim()), e->line);
    }
  }
  sc.map = std::make_shared<const SmoothMap>(src, tgt, std::move(components));
  if (lambda) sc.declared_lambda = b.expr(*lambda, src->dim());
  if (theta) sc.declared_theta = b.expr(*theta, sc.side == Side::domain ? src->dim() : tgt->dim());

  const int m = src->dim();
  sc.sample.box.assign(static_cast<std::size_t>(m), {-1.0, 1.0});
  if (const Section* s = single("sample")) {
    std::map<int, std::pair<const Entry*, Vec>> pts;
    for (const Entry& e : s->entries) {
      if (e.key == "box") {
        const auto v = number_list(e);
        if (v.size() != 2) throw InputError("box expects 'lo, hi'", e.line);
        sc.sample.box.assign(static_cast<std::size_t>(m), {v[0], v[1]});
      } else if (e.key == "points") {
        const long long n = integer(e);
        if (n < 1 || n > 100000) throw InputError("points must be between 1 and 100000", e.line);
        sc.sample.points = static_cast<int>(n);
      } else if (e.key == "seed") {
        const long long sd = integer(e);
        if (sd < 0) throw InputError("seed must be nonnegative", e.line);
        sc.sample.seed = static_cast<std::uint64_t>(sd);
      } else if (indexed_key(e.key, "box", 1, idx, e.line)) {
        if (idx[0] < 1 || idx[0] > m) throw InputError("box index out of range for source dim " + std::to_string(m), e.line);
        const auto v = number_list(e);
        if (v.size() != 2) throw InputError("box expects 'lo, hi'", e.line);
        sc.sample.box[static_cast<std::size_t>(idx[0] - 1)] = {v[0], v[1]};
      } else if (indexed_key(e.key, "point", 1, idx, e.line)) {
        const auto v = number_list(e);
        if (static_cast<int>(v.size()) != m) {
          throw InputError("point has " + std::to_string(v.size()) + " coordinates; source dim is " + std::to_string(m),
                           e.line);
        }
        pts[idx[0]] = {&e, Eigen::Map<const Vec>(v.data(), m)};
      } else {
        unknown(e, *s);
      }
    }
    for (const auto& [lo, hi] : sc.sample.box) {
      if (!(lo <= hi)) throw InputError("box bounds must satisfy lo <= hi", s->line);
    }
    for (const auto& [k, pe] : pts) {
      for (int i = 0; i < m; ++i) {
        const auto& [lo, hi] = sc.sample.box[static_cast<std::size_t>(i)];
        if (pe.second(i) < lo || pe.second(i) > hi) throw InputError("point lies outside the sample box", pe.first->line);
      }
      sc.sample.explicit_points.push_back(pe.second);
    }
  }

  if (const Section* s = single("checks")) {
    for (const Entry& e : s->entries) {
      if (e.key == "v") {
        sc.v = number(e);
      } else if (e.key == "probes") {
        const long long n = integer(e);
        if (n < 16 || n > 10000) throw InputError("probes must be between 16 and 10000", e.line);
        sc.probe_pairs = static_cast<int>(n);
      } else if (e.key == "only") {
        std::size_t start = 0;
        for (std::size_t i = 0; i <= e.value.size(); ++i) {
          if (i == e.value.size() || e.value[i] == ',') {
            const std::string id = trim(std::string_view(e.value).substr(start, i - start));
            if (!id.empty()) {
              if (!is_known_selector(id)) throw InputError("unknown check id '" + id + "'", e.line);
              sc.only.push_back(id);
            }
            start = i + 1;
          }
        }
      } else if (e.key.rfind("tol.", 0) == 0) {
        const std::string id = e.key.substr(4);
        try {
          default_tolerance(id);
        } catch (const Error&) {
          throw InputError("unknown check id '" + id + "'", e.line);
        }
        const double t = number(e);
        if (t < 0.0) throw InputError("tolerance must be nonnegative", e.line);
        sc.tolerances[id] = t;
      } else {
        unknown(e, *s);
      }
    }
  }

  if (const Section* s = single("printed")) {
    for (const Entry& e : s->entries) {
      PrintedVector pv;
      if (e.key.rfind("kernel.", 0) == 0) {
        pv.kind = PrintedVector::Kind::kernel;
        pv.label = e.key.substr(7);
      } else if (e.key.rfind("horizontal.", 0) == 0) {
        pv.kind = PrintedVector::Kind::horizontal;
        pv.label = e.key.substr(11);
      } else {
        unknown(e, *s);
      }
      pv.components = b.list(e, m);
      if (static_cast<int>(pv.components.size()) != m) {
        throw InputError("printed vector needs " + std::to_string(m) + " components", e.line);
      }
      sc.printed.push_back(std::move(pv));
    }
  }
  return sc;
}

std::vector<Vec> sample_points(const SampleSpec& sample, int dim) {
  if (!sample.explicit_points.empty()) return sample.explicit_points;
  static constexpr std::array<int, 32> primes{2,  3,  5,  7,  11, 13, 17, 19, 23, 29,  31,  37,  41,  43,  47,  53,
                                              59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};
  if (dim > static_cast<int>(primes.size())) throw InputError("sampling supports at most 32 dimensions");
  if (static_cast<int>(sample.box.size()) != dim) throw InputError("sample box does not match the source dimension");
  std::mt19937_64 rng(sample.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> shift(static_cast<std::size_t>(dim));
  for (double& s : shift) s = unit(rng);
  std::vector<Vec> out;
  for (int k = 1; k <= sample.points; ++k) {
    Vec p(dim);
    for (int i = 0; i < dim; ++i) {
      const int base = primes[static_cast<std::size_t>(i)];
      double f = 1.0;
      double r = 0.0;
      for (int n = k; n > 0; n /= base) {
        f /= base;
        r += f * (n % base);
      }
      double u = r + shift[static_cast<std::size_t>(i)];
      u -= std::floor(u);
      const auto& [lo, hi] = sample.box[static_cast<std::size_t>(i)];
      p(i) = lo + u * (hi - lo);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace slantgeo
