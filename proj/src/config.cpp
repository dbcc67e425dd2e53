#include "minkbvp/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace minkbvp {

namespace {

struct Token {
  enum Kind { ident, number, lbrace, rbrace, lbracket, rbracket, equals, comma, sep, end };
  Kind kind = end;
  std::string text;
  double num = 0.0;
  int line = 0;
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '/' ||
         c == '-' || c == '+';
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  auto push = [&](Token::Kind k, std::string s = {}) {
    Token t;
    t.kind = k;
    t.text = std::move(s);
    t.line = line;
    out.push_back(std::move(t));
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      push(Token::sep, "\n");
      ++line;
      ++i;
    } else if (c == '\r' || c == ' ' || c == '\t') {
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == ';') {
      push(Token::sep, ";");
      ++i;
    } else if (c == '{') {
      push(Token::lbrace);
      ++i;
    } else if (c == '}') {
      push(Token::rbrace);
      ++i;
    } else if (c == '[') {
      push(Token::lbracket);
      ++i;
    } else if (c == ']') {
      push(Token::rbracket);
      ++i;
    } else if (c == '=') {
      push(Token::equals);
      ++i;
    } else if (c == ',') {
      push(Token::comma);
      ++i;
    } else if (ident_char(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      std::string word = text.substr(i, j - i);
      char* endp = nullptr;
      double v = std::strtod(word.c_str(), &endp);
      Token t;
      t.line = line;
      if (endp && *endp == '\0' && endp != word.c_str()) {
        t.kind = Token::number;
        t.num = v;
      } else {
        t.kind = Token::ident;
      }
      t.text = std::move(word);
      out.push_back(std::move(t));
      i = j;
    } else {
      throw config_error("unexpected character '" + std::string(1, c) + "' at line " +
                         std::to_string(line));
    }
  }
  push(Token::end);
  return out;
}

struct Value {
  bool is_list = false;
  bool is_number = false;
  double num = 0.0;
  std::vector<double> list;
  std::string word;
  int line = 0;
};

struct Entry {
  Value value;
  int line = 0;
  bool used = false;
};

// Flattened entries keyed "block.key" (top-level keys use "" as block).
using EntryMap = std::map<std::string, Entry>;

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(tokenize(text)) {}

  EntryMap run() {
    EntryMap entries;
    skip_seps();
    while (peek().kind != Token::end) {
      Token name = expect(Token::ident, "a key or block name");
      skip_seps_not_newline();
      if (peek().kind == Token::lbrace) {
        get();
        parse_block(name.text, entries);
      } else if (peek().kind == Token::equals) {
        get();
        add_entry(entries, "", name, parse_value());
        expect_separator();
      } else {
        throw config_error("expected '=' or '{' after '" + name.text + "' at line " +
                           std::to_string(name.line));
      }
      skip_seps();
    }
    return entries;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token get() { return toks_[pos_++]; }
  void skip_seps() {
    while (peek().kind == Token::sep) ++pos_;
  }
  void skip_seps_not_newline() {}  // block brace must follow on the same logical statement
  Token expect(Token::Kind k, const char* what) {
    if (peek().kind != k)
      throw config_error(std::string("expected ") + what + " at line " +
                         std::to_string(peek().line));
    return get();
  }
  void expect_separator() {
    if (peek().kind == Token::sep || peek().kind == Token::end ||
        peek().kind == Token::rbrace) {
      if (peek().kind == Token::sep) get();
      return;
    }
    throw config_error("expected end of entry at line " + std::to_string(peek().line));
  }

  void parse_block(const std::string& block, EntryMap& entries) {
    skip_seps();
    while (peek().kind != Token::rbrace) {
      if (peek().kind == Token::end)
        throw config_error("unterminated block '" + block + "'");
      Token key = expect(Token::ident, "a key");
      expect(Token::equals, "'='");
      add_entry(entries, block, key, parse_value());
      expect_separator();
      skip_seps();
    }
    get();  // consume '}'
  }

  Value parse_value() {
    Value v;
    Token t = get();
    v.line = t.line;
    if (t.kind == Token::number) {
      v.is_number = true;
      v.num = t.num;
      v.word = t.text;
    } else if (t.kind == Token::ident) {
      v.word = t.text;
    } else if (t.kind == Token::lbracket) {
      v.is_list = true;
      skip_seps();
      while (peek().kind != Token::rbracket) {
        Token n = expect(Token::number, "a number in the list");
        v.list.push_back(n.num);
        skip_seps();
        if (peek().kind == Token::comma) {
          get();
          skip_seps();
        }
      }
      get();  // consume ']'
    } else {
      throw config_error("expected a value at line " + std::to_string(t.line));
    }
    return v;
  }

  void add_entry(EntryMap& entries, const std::string& block, const Token& key, Value v) {
    std::string full = block.empty() ? key.text : block + "." + key.text;
    if (entries.count(full))
      throw config_error("duplicate key '" + full + "' at line " + std::to_string(key.line));
    Entry e;
    e.value = std::move(v);
    e.line = key.line;
    entries.emplace(full, std::move(e));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

class Reader {
 public:
  explicit Reader(EntryMap entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  double number(const std::string& key) {
    Entry& e = fetch(key);
    if (!e.value.is_number)
      throw config_error("key '" + key + "' needs a numeric value (line " +
                         std::to_string(e.line) + ")");
    return e.value.num;
  }
  int integer(const std::string& key) {
    double v = number(key);
    if (v != std::floor(v))
      throw config_error("key '" + key + "' needs an integer value (line " +
                         std::to_string(entries_.at(key).line) + ")");
    return static_cast<int>(v);
  }
  std::vector<double> list(const std::string& key) {
    Entry& e = fetch(key);
    if (!e.value.is_list)
      throw config_error("key '" + key + "' needs a bracketed list (line " +
                         std::to_string(e.line) + ")");
    return e.value.list;
  }
  std::string word(const std::string& key) {
    Entry& e = fetch(key);
    if (e.value.is_list)
      throw config_error("key '" + key + "' needs a plain value (line " +
                         std::to_string(e.line) + ")");
    return e.value.word;
  }
  int line(const std::string& key) const { return entries_.at(key).line; }

  void reject_unknown() const {
    for (const auto& [key, e] : entries_)
      if (!e.used)
        throw config_error("unknown key '" + key + "' at line " + std::to_string(e.line));
  }

 private:
  Entry& fetch(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw config_error("missing required key '" + key + "'");
    it->second.used = true;
    return it->second;
  }
  EntryMap entries_;
};

void resolve_scan_defaults(ProblemConfig& cfg) {
  if (cfg.weight_sampled && cfg.T <= 0.0) return;  // period not known yet
  if (cfg.scan_max <= 0.0) cfg.scan_max = 10.0 + cfg.T;
  if (cfg.scan_points <= 0)
    cfg.scan_points = static_cast<int>(std::lround(600.0 * (cfg.scan_max - cfg.scan_min)));
  if (!(cfg.scan_min > 0.0 && cfg.scan_min < cfg.scan_max))
    throw config_error("solver.scan_min must lie in (0, scan_max)");
  if (cfg.scan_points < 2) throw config_error("solver.scan_points must be at least 2");
}

}  // namespace

ProblemConfig parse_config(const std::string& text) {
  Reader r(Parser(text).run());
  ProblemConfig cfg;

  // weight block
  bool step_form = r.has("weight.T") || r.has("weight.breaks") || r.has("weight.values");
  bool sampled_form = r.has("weight.samples_file");
  if (!step_form && !sampled_form)
    throw config_error("missing required block 'weight' (keys weight.T/breaks/values "
                       "or weight.samples_file)");
  if (step_form && sampled_form)
    throw config_error("weight block mixes the step form (T/breaks/values) with "
                       "samples_file (line " +
                       std::to_string(r.line("weight.samples_file")) + ")");
  if (sampled_form) {
    cfg.weight_sampled = true;
    cfg.samples_file = r.word("weight.samples_file");
  } else {
    cfg.T = r.number("weight.T");
    if (!(cfg.T > 0.0))
      throw config_error("weight.T must be positive (line " + std::to_string(r.line("weight.T")) +
                         ")");
    cfg.breaks = r.list("weight.breaks");
    cfg.values = r.list("weight.values");
    if (cfg.values.size() != cfg.breaks.size() + 1)
      throw config_error("weight.values needs exactly one more entry than weight.breaks "
                         "(line " +
                         std::to_string(r.line("weight.values")) + ")");
    double prev = 0.0;
    for (double b : cfg.breaks) {
      if (!(b > prev && b < cfg.T))
        throw config_error("weight.breaks must be strictly increasing inside (0, T) (line " +
                           std::to_string(r.line("weight.breaks")) + ")");
      prev = b;
    }
  }

  // nonlinearity block
  std::string kind = r.has("nonlinearity.kind") ? r.word("nonlinearity.kind") : "exp_power";
  if (kind == "power")
    cfg.kind = NonlinearityKind::power;
  else if (kind == "exp_power")
    cfg.kind = NonlinearityKind::exp_power;
  else if (kind == "power_exp")
    cfg.kind = NonlinearityKind::power_exp;
  else
    throw config_error("nonlinearity.kind must be power, exp_power, or power_exp (line " +
                       std::to_string(r.line("nonlinearity.kind")) + ")");
  if (r.has("nonlinearity.p")) {
    int line = r.line("nonlinearity.p");
    cfg.p = r.number("nonlinearity.p");
    if (!(cfg.p > 1.0))
      throw config_error("nonlinearity.p must exceed 1 (line " + std::to_string(line) + ")");
  }
  if (r.has("nonlinearity.kappa")) {
    int line = r.line("nonlinearity.kappa");
    if (cfg.kind != NonlinearityKind::power_exp)
      throw config_error("nonlinearity.kappa only applies to kind power_exp (line " +
                         std::to_string(line) + ")");
    cfg.kappa = r.number("nonlinearity.kappa");
    if (!(cfg.kappa > 0.0))
      throw config_error("nonlinearity.kappa must be positive (line " + std::to_string(line) +
                         ")");
  } else if (cfg.kind == NonlinearityKind::power_exp) {
    throw config_error("missing required key 'nonlinearity.kappa' for kind power_exp");
  }
  if (r.has("nonlinearity.lambda")) {
    cfg.lambda = r.number("nonlinearity.lambda");
    if (!(cfg.lambda > 0.0))
      throw config_error("nonlinearity.lambda must be positive (line " +
                         std::to_string(r.line("nonlinearity.lambda")) + ")");
  }

  // top-level bc
  if (r.has("bc")) {
    std::string bc = r.word("bc");
    if (bc == "neumann")
      cfg.bc = BoundaryCondition::neumann;
    else if (bc == "periodic")
      cfg.bc = BoundaryCondition::periodic;
    else
      throw config_error("bc must be neumann or periodic (line " + std::to_string(r.line("bc")) +
                         ")");
  }

  // solver block
  auto positive = [&](const char* key, double& slot) {
    if (!r.has(key)) return;
    slot = r.number(key);
    if (!(slot > 0.0))
      throw config_error(std::string(key) + " must be positive (line " +
                         std::to_string(r.line(key)) + ")");
  };
  positive("solver.rel_tol", cfg.rel_tol);
  positive("solver.abs_tol", cfg.abs_tol);
  positive("solver.scan_min", cfg.scan_min);
  positive("solver.scan_max", cfg.scan_max);
  if (r.has("solver.scan_points")) {
    cfg.scan_points = r.integer("solver.scan_points");
    if (cfg.scan_points < 2)
      throw config_error("solver.scan_points must be at least 2 (line " +
                         std::to_string(r.line("solver.scan_points")) + ")");
  }
  positive("solver.branch_step", cfg.branch_step);
  positive("solver.sup_ceiling", cfg.sup_ceiling);

  // output block
  if (r.has("output.directory")) cfg.out_dir = r.word("output.directory");
  if (r.has("output.grid_points")) {
    cfg.grid_points = r.integer("output.grid_points");
    if (cfg.grid_points < 2)
      throw config_error("output.grid_points must be at least 2 (line " +
                         std::to_string(r.line("output.grid_points")) + ")");
  }

  r.reject_unknown();
  resolve_scan_defaults(cfg);
  return cfg;
}

ProblemConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  ProblemConfig cfg = parse_config(ss.str());
  if (cfg.weight_sampled) {
    namespace fs = std::filesystem;
    fs::path sp(cfg.samples_file);
    if (sp.is_relative()) sp = fs::path(path).parent_path() / sp;
    if (!fs::exists(sp))
      throw config_error("weight.samples_file '" + sp.string() + "' does not exist");
    cfg.samples_file = sp.string();
    WeightFunction w = make_weight(cfg);  // validates the samples
    cfg.T = w.period();
    resolve_scan_defaults(cfg);
  }
  return cfg;
}

std::string serialize_config(const ProblemConfig& cfg) {
  auto num = [](double x) { return format_double(x, 17); };
  std::ostringstream out;
  out << "bc = " << (cfg.bc == BoundaryCondition::neumann ? "neumann" : "periodic") << "\n";
  out << "weight {\n";
  if (cfg.weight_sampled) {
    out << "  samples_file = " << cfg.samples_file << "\n";
  } else {
    out << "  T = " << num(cfg.T) << "\n";
    out << "  breaks = [";
    for (std::size_t i = 0; i < cfg.breaks.size(); ++i)
      out << (i ? ", " : "") << num(cfg.breaks[i]);
    out << "]\n  values = [";
    for (std::size_t i = 0; i < cfg.values.size(); ++i)
      out << (i ? ", " : "") << num(cfg.values[i]);
    out << "]\n";
  }
  out << "}\n";
  out << "nonlinearity {\n  kind = ";
  switch (cfg.kind) {
    case NonlinearityKind::power: out << "power"; break;
    case NonlinearityKind::exp_power: out << "exp_power"; break;
    case NonlinearityKind::power_exp: out << "power_exp"; break;
    case NonlinearityKind::custom: out << "custom"; break;
  }
  out << "\n  p = " << num(cfg.p) << "\n";
  if (cfg.kind == NonlinearityKind::power_exp) out << "  kappa = " << num(cfg.kappa) << "\n";
  out << "  lambda = " << num(cfg.lambda) << "\n}\n";
  out << "solver {\n";
  out << "  rel_tol = " << num(cfg.rel_tol) << "\n";
  out << "  abs_tol = " << num(cfg.abs_tol) << "\n";
  out << "  scan_min = " << num(cfg.scan_min) << "\n";
  if (cfg.scan_max > 0.0) out << "  scan_max = " << num(cfg.scan_max) << "\n";
  if (cfg.scan_points > 0) out << "  scan_points = " << cfg.scan_points << "\n";
  out << "  branch_step = " << num(cfg.branch_step) << "\n";
  out << "  sup_ceiling = " << num(cfg.sup_ceiling) << "\n}\n";
  out << "output {\n  directory = " << cfg.out_dir << "\n  grid_points = " << cfg.grid_points
      << "\n}\n";
  return out.str();
}

WeightFunction make_weight(const ProblemConfig& cfg) {
  if (!cfg.weight_sampled) return WeightFunction::step(cfg.T, cfg.breaks, cfg.values);
  std::ifstream in(cfg.samples_file);
  if (!in) throw config_error("cannot open samples file '" + cfg.samples_file + "'");
  std::vector<double> ts, vs;
  std::string linetext;
  int lineno = 0;
  while (std::getline(in, linetext)) {
    ++lineno;
    auto hash = linetext.find('#');
    if (hash != std::string::npos) linetext.erase(hash);
    for (char& ch : linetext)
      if (ch == ',') ch = ' ';
    std::istringstream ls(linetext);
    double t, v;
    if (ls >> t >> v) {
      ts.push_back(t);
      vs.push_back(v);
    } else if (!linetext.empty() && linetext.find_first_not_of(" \t\r") != std::string::npos) {
      throw config_error("samples file '" + cfg.samples_file + "': expected two columns at line " +
                         std::to_string(lineno));
    }
  }
  double origin = 0.0;
  return WeightFunction::sampled(ts, vs, &origin);
}

Nonlinearity make_nonlinearity(const ProblemConfig& cfg) {
  switch (cfg.kind) {
    case NonlinearityKind::power: return Nonlinearity::power(cfg.p);
    case NonlinearityKind::exp_power: return Nonlinearity::exp_power(cfg.p);
    case NonlinearityKind::power_exp: return Nonlinearity::power_exp(cfg.p, cfg.kappa);
    default: throw config_error("custom nonlinearities cannot be built from a config");
  }
}

Problem make_problem(const ProblemConfig& cfg) {
  Problem p{make_weight(cfg), make_nonlinearity(cfg), cfg.lambda,
            Tolerances{cfg.rel_tol, cfg.abs_tol}};
  return p;
}

ScanRange make_scan_range(const ProblemConfig& cfg) {
  ProblemConfig c = cfg;
  if (c.scan_max <= 0.0 || c.scan_points <= 0) resolve_scan_defaults(c);
  return ScanRange{c.scan_min, c.scan_max, c.scan_points};
}

}  // namespace minkbvp
