#include "randers/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "randers/errors.hpp"
#include "randers/numeric_text.hpp"

namespace randers {

namespace {

// ---------------------------------------------------------------------------
// Lexing of one `key = value [unit] # comment` line
// ---------------------------------------------------------------------------

struct Token {
    enum Kind { string, number, word, lparen, rparen, comma, unit, end } kind;
    std::string text;
    int column;
};

bool word_char(char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-'; }

std::vector<Token> lex_value(const std::string& line, std::size_t start, int line_no) {
    std::vector<Token> out;
    std::size_t i = start;
    auto col = [](std::size_t p) { return static_cast<int>(p) + 1; };
    while (true) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size() || line[i] == '#' || line[i] == ';') break;
        const char ch = line[i];
        if (ch == '"') {
            const std::size_t close = line.find('"', i + 1);
            if (close == std::string::npos) throw ParseError("unterminated string", line_no, col(i));
            out.push_back({Token::string, line.substr(i + 1, close - i - 1), col(i)});
            i = close + 1;
        } else if (ch == '(' || ch == ')' || ch == ',') {
            out.push_back({ch == '(' ? Token::lparen : ch == ')' ? Token::rparen : Token::comma, std::string(1, ch), col(i)});
            ++i;
        } else if (ch == '[') {
            const std::size_t close = line.find(']', i + 1);
            if (close == std::string::npos) throw ParseError("unterminated unit annotation", line_no, col(i));
            std::string unit = line.substr(i + 1, close - i - 1);
            unit.erase(0, unit.find_first_not_of(" \t"));
            unit.erase(unit.find_last_not_of(" \t") + 1);
            out.push_back({Token::unit, unit, col(i)});
            i = close + 1;
        } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' || ch == '+' || ch == '-') {
            const std::size_t begin = i;
            ++i;
            while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '.' ||
                                       ((line[i] == '+' || line[i] == '-') && (line[i - 1] == 'e' || line[i - 1] == 'E'))))
                ++i;
            out.push_back({Token::number, line.substr(begin, i - begin), col(begin)});
        } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            const std::size_t begin = i;
            while (i < line.size() && word_char(line[i])) ++i;
            out.push_back({Token::word, line.substr(begin, i - begin), col(begin)});
        } else {
            throw ParseError("unexpected character '" + std::string(1, ch) + "'", line_no, col(i));
        }
    }
    out.push_back({Token::end, "", col(i)});
    return out;
}

struct Item {
    enum Kind { string, number, word, call } kind;
    std::string text;
    int column;
    std::vector<Token> args;
};

struct Value {
    std::vector<Item> items;
    std::optional<Token> unit;
    int line;
    int column;
};

Value parse_value(const std::vector<Token>& tokens, int line_no) {
    Value v{{}, std::nullopt, line_no, tokens.front().column};
    std::size_t k = 0;
    auto fail = [&](const std::string& what) -> void { throw ParseError(what, line_no, tokens[k].column); };
    if (tokens[k].kind == Token::end || tokens[k].kind == Token::unit) fail("missing value");
    while (true) {
        const Token& t = tokens[k];
        if (t.kind == Token::string) {
            v.items.push_back({Item::string, t.text, t.column, {}});
            ++k;
        } else if (t.kind == Token::number) {
            v.items.push_back({Item::number, t.text, t.column, {}});
            ++k;
        } else if (t.kind == Token::word) {
            ++k;
            if (tokens[k].kind == Token::lparen) {
                Item item{Item::call, t.text, t.column, {}};
                ++k;
                if (tokens[k].kind != Token::rparen) {
                    while (true) {
                        if (tokens[k].kind != Token::string && tokens[k].kind != Token::number)
                            fail("expected a number or a quoted expression");
                        item.args.push_back(tokens[k]);
                        ++k;
                        if (tokens[k].kind == Token::comma) {
                            ++k;
                            continue;
                        }
                        break;
                    }
                }
                if (tokens[k].kind != Token::rparen) fail("expected ')'");
                ++k;
                v.items.push_back(std::move(item));
            } else {
                v.items.push_back({Item::word, t.text, t.column, {}});
            }
        } else {
            fail("unexpected '" + t.text + "'");
        }
        if (tokens[k].kind == Token::comma) {
            ++k;
            continue;
        }
        break;
    }
    if (tokens[k].kind == Token::unit) {
        v.unit = tokens[k];
        ++k;
    }
    if (tokens[k].kind != Token::end) fail("unexpected '" + tokens[k].text + "'");
    return v;
}

// ---------------------------------------------------------------------------
// Units
// ---------------------------------------------------------------------------

const std::map<std::string, std::string>& unit_aliases() {
    static const std::map<std::string, std::string> aliases{
        {"length", "length"}, {"m", "length"},        {"time", "time"},     {"s", "time"},
        {"speed", "speed"},   {"m/s", "speed"},       {"slowness", "slowness"}, {"s/m", "slowness"},
        {"angle", "angle"},   {"rad", "angle"},       {"count", "count"},   {"1", "1"},
        {"dimensionless", "1"}};
    return aliases;
}

void check_unit(const Value& v, const std::string& key, const char* expected) {
    if (!v.unit) return;
    if (!expected) throw UnitError("key '" + key + "' takes no unit", v.line, v.unit->column);
    const auto it = unit_aliases().find(v.unit->text);
    if (it == unit_aliases().end()) throw UnitError("unknown unit '" + v.unit->text + "'", v.line, v.unit->column);
    if (it->second != expected)
        throw UnitError("key '" + key + "' is measured in " + expected + ", not " + v.unit->text, v.line,
                        v.unit->column);
}

// ---------------------------------------------------------------------------
// Typed readers
// ---------------------------------------------------------------------------

const Item& single(const Value& v, const std::string& key) {
    if (v.items.size() != 1) throw ParseError("key '" + key + "' takes a single value", v.line, v.items[1].column);
    return v.items.front();
}

double number_of(const Token& t, int line) {
    const auto x = parse_double(t.text);
    if (!x || !std::isfinite(*x)) throw ParseError("malformed number '" + t.text + "'", line, t.column);
    return *x;
}

double read_number(const Value& v, const std::string& key, const char* unit) {
    check_unit(v, key, unit);
    const Item& item = single(v, key);
    if (item.kind != Item::number) throw ParseError("key '" + key + "' expects a number", v.line, item.column);
    return number_of(Token{Token::number, item.text, item.column}, v.line);
}

double read_positive(const Value& v, const std::string& key, const char* unit) {
    const double x = read_number(v, key, unit);
    if (!(x > 0.0)) throw ParseError("key '" + key + "' must be positive", v.line, v.items[0].column);
    return x;
}

std::uint64_t read_count(const Value& v, const std::string& key) {
    check_unit(v, key, "count");
    const Item& item = single(v, key);
    std::uint64_t out = 0;
    const char* first = item.text.data();
    const char* last = first + item.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (item.kind != Item::number || ec != std::errc() || ptr != last)
        throw ParseError("key '" + key + "' expects a non-negative integer", v.line, item.column);
    return out;
}

std::string read_word(const Value& v, const std::string& key, std::initializer_list<const char*> allowed) {
    check_unit(v, key, nullptr);
    const Item& item = single(v, key);
    if (item.kind == Item::word) {
        for (const char* a : allowed)
            if (item.text == a) return item.text;
    }
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : " | ") + std::string(a);
    throw ParseError("key '" + key + "' expects one of " + list, v.line, item.column);
}

struct Preset {
    const char* name;
    std::size_t numbers;
    std::size_t expressions;
};

FieldChoice read_field(const Value& v, const std::string& key, const char* unit, bool allow_expression,
                       std::initializer_list<Preset> presets) {
    check_unit(v, key, unit);
    const Item& item = single(v, key);
    if (item.kind == Item::string) {
        if (!allow_expression)
            throw ParseError("key '" + key + "' does not take a bare expression", v.line, item.column);
        Expression::parse(item.text, static_cast<std::size_t>(v.line), static_cast<std::size_t>(item.column) + 1);
        return {"expr", {}, {item.text}};
    }
    if (item.kind == Item::number) throw ParseError("key '" + key + "' expects a preset or a quoted expression", v.line, item.column);
    for (const Preset& p : presets) {
        if (item.text != p.name) continue;
        FieldChoice out{item.text, {}, {}};
        if (item.args.size() != p.numbers + p.expressions)
            throw ParseError(std::string("preset '") + p.name + "' takes " + std::to_string(p.numbers + p.expressions) +
                                 " argument(s)",
                             v.line, item.column);
        for (const Token& a : item.args) {
            if (p.numbers > 0) {
                if (a.kind != Token::number)
                    throw ParseError(std::string("preset '") + p.name + "' expects numbers", v.line, a.column);
                out.numbers.push_back(number_of(a, v.line));
            } else {
                if (a.kind != Token::string)
                    throw ParseError(std::string("preset '") + p.name + "' expects quoted expressions", v.line, a.column);
                Expression::parse(a.text, static_cast<std::size_t>(v.line), static_cast<std::size_t>(a.column) + 1);
                out.expressions.push_back(a.text);
            }
        }
        return out;
    }
    throw ParseError("unknown preset '" + item.text + "' for key '" + key + "'", v.line, item.column);
}

const std::initializer_list<Preset> speed_presets{{"const", 1, 0}, {"linear", 2, 0}, {"quadratic", 2, 0}};
const std::initializer_list<Preset> wind_presets{
    {"zero", 0, 0}, {"const", 2, 0}, {"vortex", 1, 0}, {"grad", 0, 1}, {"field", 0, 2}};
const std::initializer_list<Preset> beta_presets{
    {"zero", 0, 0}, {"const", 2, 0}, {"rotational", 1, 0}, {"grad", 0, 1}, {"field", 0, 2}};
const std::initializer_list<Preset> potential_presets{{"zero", 0, 0}, {"bump", 1, 0}};

const std::set<std::string> known_stages{"simulate", "decompose", "invert"};

// ---------------------------------------------------------------------------
// Canonical emission
// ---------------------------------------------------------------------------

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string emit_field(const FieldChoice& f) {
    if (f.kind == "expr") return quoted(f.expressions.at(0));
    if (f.numbers.empty() && f.expressions.empty()) return f.kind;
    std::string out = f.kind + "(";
    bool first = true;
    for (double x : f.numbers) {
        out += (first ? "" : ", ") + shortest(x);
        first = false;
    }
    for (const std::string& e : f.expressions) {
        out += (first ? "" : ", ") + quoted(e);
        first = false;
    }
    return out + ")";
}

}  // namespace

bool PipelineConfig::has(const std::string& stage) const {
    return std::find(stages.begin(), stages.end(), stage) != stages.end();
}

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::set<std::string> seen_sections{""};
    std::set<std::string> seen_keys;
    std::map<std::string, int> key_line;
    int line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#' || line[first] == ';') continue;

        if (line[first] == '[') {
            const std::size_t close = line.find(']', first);
            if (close == std::string::npos) throw ParseError("unterminated section header", line_no, static_cast<int>(first) + 1);
            std::string name = line.substr(first + 1, close - first - 1);
            name.erase(0, name.find_first_not_of(" \t"));
            name.erase(name.find_last_not_of(" \t") + 1);
            const std::size_t rest = line.find_first_not_of(" \t", close + 1);
            if (rest != std::string::npos && line[rest] != '#' && line[rest] != ';')
                throw ParseError("unexpected text after section header", line_no, static_cast<int>(rest) + 1);
            if (name != "domain" && name != "medium" && name != "solver" && name != "pipeline")
                throw ParseError("unknown section [" + name + "]", line_no, static_cast<int>(first) + 2);
            if (!seen_sections.insert(name).second)
                throw ParseError("duplicate section [" + name + "]", line_no, static_cast<int>(first) + 2);
            section = name;
            continue;
        }

        std::size_t k = first;
        while (k < line.size() && (std::isalnum(static_cast<unsigned char>(line[k])) || line[k] == '_')) ++k;
        const std::string key = line.substr(first, k - first);
        const int key_col = static_cast<int>(first) + 1;
        if (key.empty()) throw ParseError("expected a key", line_no, key_col);
        std::size_t eq = line.find_first_not_of(" \t", k);
        if (eq == std::string::npos || line[eq] != '=')
            throw ParseError("expected '=' after key '" + key + "'", line_no, static_cast<int>(eq == std::string::npos ? k : eq) + 1);
        const std::string qualified = section + "." + key;
        if (!seen_keys.insert(qualified).second) throw ParseError("duplicate key '" + key + "'", line_no, key_col);
        key_line[qualified] = line_no;

        const Value v = parse_value(lex_value(line, eq + 1, line_no), line_no);
        auto unknown = [&]() -> void {
            throw ParseError("unknown key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"), line_no,
                             key_col);
        };

        if (section.empty()) {
            if (key == "name") {
                check_unit(v, key, nullptr);
                const Item& item = single(v, key);
                if (item.kind != Item::string && item.kind != Item::word)
                    throw ParseError("key 'name' expects a word or a quoted string", line_no, item.column);
                cfg.name = item.text;
            } else if (key == "seed") {
                cfg.seed = read_count(v, key);
            } else {
                unknown();
            }
        } else if (section == "domain") {
            if (key == "R") cfg.domain.R = read_positive(v, key, "length");
            else if (key == "n") {
                cfg.domain.n = read_count(v, key);
                if (cfg.domain.n < 2) throw ParseError("key 'n' must be at least 2", line_no, v.items[0].column);
            } else if (key == "hole_radius") {
                cfg.domain.hole_radius = read_number(v, key, "length");
                if (cfg.domain.hole_radius < 0.0)
                    throw ParseError("key 'hole_radius' must be non-negative", line_no, v.items[0].column);
            } else unknown();
        } else if (section == "medium") {
            if (key == "model") cfg.medium.model = read_word(v, key, {"zermelo", "linearized", "direct"});
            else if (key == "c") cfg.medium.c = read_field(v, key, "speed", true, speed_presets);
            else if (key == "W") cfg.medium.W = read_field(v, key, "speed", false, wind_presets);
            else if (key == "metric") cfg.medium.metric = read_word(v, key, {"conformal", "euclidean"});
            else if (key == "beta") cfg.medium.beta = read_field(v, key, "slowness", false, beta_presets);
            else if (key == "phi") cfg.medium.phi = read_field(v, key, "time", true, potential_presets);
            else unknown();
        } else if (section == "solver") {
            SolverOptions& s = cfg.solver;
            if (key == "rtol") s.rtol = read_positive(v, key, "1");
            else if (key == "atol") s.atol = read_positive(v, key, "1");
            else if (key == "fan_rtol") s.fan_rtol = read_positive(v, key, "1");
            else if (key == "miss_tol") s.miss_tol = read_positive(v, key, "1");
            else if (key == "refine_tol") s.refine_tol = read_positive(v, key, "1");
            else if (key == "exit_tol") s.exit_tol = read_positive(v, key, "1");
            else if (key == "h_max") s.h_max = read_positive(v, key, "1");
            else if (key == "min_separation") s.min_separation = read_number(v, key, "angle");
            else if (key == "sweep") {
                s.sweep = read_count(v, key);
                if (s.sweep < 2) throw ParseError("key 'sweep' must be at least 2", line_no, v.items[0].column);
            } else if (key == "max_steps") {
                s.max_steps = read_count(v, key);
                if (s.max_steps == 0) throw ParseError("key 'max_steps' must be positive", line_no, v.items[0].column);
            } else unknown();
        } else {
            if (key == "stages") {
                check_unit(v, key, nullptr);
                cfg.pipeline.stages.clear();
                for (const Item& item : v.items) {
                    if (item.kind != Item::word || !known_stages.count(item.text))
                        throw ParseError("unknown stage '" + item.text + "' (simulate | decompose | invert)", line_no,
                                         item.column);
                    cfg.pipeline.stages.push_back(item.text);
                }
            } else if (key == "noise") {
                cfg.pipeline.noise = read_number(v, key, "time");
                if (cfg.pipeline.noise < 0.0)
                    throw ParseError("key 'noise' must be non-negative", line_no, v.items[0].column);
            } else unknown();
        }
    }

    auto line_of = [&](const std::string& a, const std::string& b) {
        if (key_line.count(a)) return key_line[a];
        return key_line.count(b) ? key_line[b] : 0;
    };
    if (cfg.domain.hole_radius >= cfg.domain.R)
        throw ParseError("hole_radius must be smaller than R", line_of("domain.hole_radius", "domain.R"));
    if (cfg.medium.metric == "euclidean" && !(cfg.medium.c == FieldChoice{"const", {1.0}, {}}))
        throw ParseError("metric = euclidean requires c = const(1)", line_of("medium.c", "medium.metric"));
    if (cfg.medium.model != "direct" && cfg.medium.beta.kind != "zero")
        throw ParseError("beta is only used with model = direct", line_of("medium.beta", "medium.model"));
    if (cfg.medium.model == "direct" && cfg.medium.W.kind != "zero")
        throw ParseError("W is not used with model = direct", line_of("medium.W", "medium.model"));
    return cfg;
}

ScenarioConfig load_config(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + file + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string emit_config(const ScenarioConfig& cfg) {
    if (cfg.name.find('"') != std::string::npos) throw PreconditionError("scenario name contains a quote");
    std::ostringstream out;
    const SolverOptions& s = cfg.solver;
    out << "name = " << quoted(cfg.name) << "\n"
        << "seed = " << cfg.seed << "\n\n"
        << "[domain]\n"
        << "R = " << shortest(cfg.domain.R) << " [length]\n"
        << "n = " << cfg.domain.n << " [count]\n"
        << "hole_radius = " << shortest(cfg.domain.hole_radius) << " [length]\n\n"
        << "[medium]\n"
        << "model = " << cfg.medium.model << "\n"
        << "c = " << emit_field(cfg.medium.c) << " [speed]\n"
        << "W = " << emit_field(cfg.medium.W) << " [speed]\n"
        << "metric = " << cfg.medium.metric << "\n"
        << "beta = " << emit_field(cfg.medium.beta) << " [slowness]\n"
        << "phi = " << emit_field(cfg.medium.phi) << " [time]\n\n"
        << "[solver]\n"
        << "rtol = " << shortest(s.rtol) << "\n"
        << "atol = " << shortest(s.atol) << "\n"
        << "fan_rtol = " << shortest(s.fan_rtol) << "\n"
        << "miss_tol = " << shortest(s.miss_tol) << "\n"
        << "refine_tol = " << shortest(s.refine_tol) << "\n"
        << "exit_tol = " << shortest(s.exit_tol) << "\n"
        << "h_max = " << shortest(s.h_max) << "\n"
        << "min_separation = " << shortest(s.min_separation) << " [angle]\n"
        << "sweep = " << s.sweep << " [count]\n"
        << "max_steps = " << s.max_steps << " [count]\n\n"
        << "[pipeline]\n"
        << "stages = ";
    for (std::size_t i = 0; i < cfg.pipeline.stages.size(); ++i) out << (i ? ", " : "") << cfg.pipeline.stages[i];
    out << "\nnoise = " << shortest(cfg.pipeline.noise) << " [time]\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Scenario construction
// ---------------------------------------------------------------------------

ScalarField make_speed(const FieldChoice& f) {
    if (f.kind == "expr") return Expression::parse(f.expressions.at(0)).field();
    if (f.kind == "const") return catalog::constant(f.numbers.at(0));
    if (f.kind == "linear") return catalog::linear_radial(f.numbers.at(0), f.numbers.at(1));
    if (f.kind == "quadratic") return catalog::quadratic_radial(f.numbers.at(0), f.numbers.at(1));
    throw PreconditionError("unknown speed preset '" + f.kind + "'");
}

OneFormField make_form(const FieldChoice& f) {
    if (f.kind == "zero") return catalog::zero_form();
    if (f.kind == "const") return catalog::constant_form({f.numbers.at(0), f.numbers.at(1)});
    if (f.kind == "vortex" || f.kind == "rotational") return catalog::rotational_form(f.numbers.at(0));
    if (f.kind == "grad") return catalog::exact_form(Expression::parse(f.expressions.at(0)).field());
    if (f.kind == "field")
        return expression_form(Expression::parse(f.expressions.at(0)), Expression::parse(f.expressions.at(1)));
    throw PreconditionError("unknown field preset '" + f.kind + "'");
}

std::optional<ScalarField> make_potential(const FieldChoice& f, double R) {
    if (f.kind == "zero") return std::nullopt;
    if (f.kind == "bump") return catalog::potential_bump(f.numbers.at(0), R);
    if (f.kind == "expr") return Expression::parse(f.expressions.at(0)).field();
    throw PreconditionError("unknown potential preset '" + f.kind + "'");
}

Scenario BuiltScenario::scenario() const { return Scenario{config.name, spec, phi, profile}; }

BuiltScenario build_scenario(const ScenarioConfig& cfg) {
    const Domain domain(cfg.domain.R, 2, cfg.domain.hole_radius);
    const MediumConfig& m = cfg.medium;
    const bool euclidean = m.metric == "euclidean";
    ScalarField c = make_speed(m.c);
    const bool radial = m.c.kind != "expr" || Expression::parse(m.c.expressions.at(0)).radial();

    std::optional<MediumModel> medium;
    auto base = [&]() {
        if (m.model == "direct") {
            return RandersSpec(euclidean ? catalog::euclidean() : catalog::conformal(c, radial), make_form(m.beta),
                               domain);
        }
        const VectorField W = make_form(m.W);
        medium = euclidean ? general_medium(domain, catalog::euclidean(), W) : conformal_medium(domain, c, W, radial);
        if (m.model == "linearized") return linearize(c, W, domain, radial).spec;
        return zermelo_construct(*medium);
    }();

    std::optional<ScalarField> phi = make_potential(m.phi, cfg.domain.R);
    std::optional<RandersSpec> spec;
    if (phi) {
        spec.emplace(base.riemannian(), base.oneform() + catalog::exact_form(*phi), domain,
                     base.description() + " + d" + phi->description());
    } else {
        spec.emplace(std::move(base));
    }
    std::optional<RadialProfile> profile;
    if (radial) profile.emplace(c);
    return BuiltScenario{cfg, domain, std::move(c), radial, std::move(medium), std::move(*spec), std::move(phi),
                         std::move(profile)};
}

}  // namespace randers
