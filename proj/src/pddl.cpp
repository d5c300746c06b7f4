#include "relevance/pddl.hpp"

#include <cctype>
#include <map>
#include <sstream>

#include "relevance/error.hpp"

namespace relevance {

namespace {

std::string typed_list(const std::vector<TypedName>& items) {
  // Consecutive runs sharing a type are grouped: "a b - item c - place".
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += items[i].name;
    if (i + 1 == items.size() || items[i + 1].type != items[i].type) out += " - " + items[i].type;
  }
  return out;
}

std::string conjunction(const std::vector<Atom>& positive, const std::vector<Atom>& negative,
                        const std::string& indent) {
  std::string out = "(and";
  for (const auto& a : positive) out += "\n" + indent + to_string(a);
  for (const auto& a : negative) out += "\n" + indent + "(not " + to_string(a) + ")";
  return out + ")";
}

// ---------------------------------------------------------------------------
// S-expressions

struct Sexp {
  std::string atom;
  std::vector<Sexp> list;
  bool is_list = false;
};

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  Sexp read() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (text_[pos_] == ')') fail("unexpected ')'");
    if (text_[pos_] == '(') {
      ++pos_;
      Sexp s;
      s.is_list = true;
      while (true) {
        skip();
        if (pos_ >= text_.size()) fail("unterminated list");
        if (text_[pos_] == ')') {
          ++pos_;
          return s;
        }
        s.list.push_back(read());
      }
    }
    Sexp s;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')' && text_[pos_] != ';')
      s.atom += static_cast<char>(std::tolower(static_cast<unsigned char>(text_[pos_++])));
    return s;
  }

  void expect_end() {
    skip();
    if (pos_ != text_.size()) fail("trailing input");
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_[pos_] == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::ParseError, "PDDL: " + msg + " at offset " + std::to_string(pos_));
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

[[noreturn]] void parse_fail(const std::string& msg) { throw Error(ErrorKind::ParseError, "PDDL: " + msg); }

const std::string& symbol(const Sexp& s) {
  if (s.is_list) parse_fail("expected a symbol");
  return s.atom;
}

std::vector<TypedName> parse_typed(const std::vector<Sexp>& items, std::size_t from) {
  std::vector<TypedName> out;
  std::size_t pending = 0;
  for (std::size_t i = from; i < items.size(); ++i) {
    const auto& tok = symbol(items[i]);
    if (tok == "-") {
      if (i + 1 >= items.size()) parse_fail("dangling '-' in typed list");
      const auto& type = symbol(items[++i]);
      for (std::size_t k = out.size() - pending; k < out.size(); ++k) out[k].type = type;
      pending = 0;
    } else {
      out.push_back({tok, "object"});
      ++pending;
    }
  }
  return out;
}

Atom parse_atom(const Sexp& s) {
  if (!s.is_list || s.list.empty()) parse_fail("expected an atom");
  Atom a{symbol(s.list[0]), {}};
  for (std::size_t i = 1; i < s.list.size(); ++i) a.args.push_back(symbol(s.list[i]));
  return a;
}

void parse_literals(const Sexp& s, std::vector<Atom>& positive, std::vector<Atom>* negative) {
  if (!s.is_list) parse_fail("expected a formula");
  if (s.list.empty()) return;  // "()" is the empty conjunction
  const auto& head = s.list[0].is_list ? std::string() : s.list[0].atom;
  if (head == "and") {
    for (std::size_t i = 1; i < s.list.size(); ++i) parse_literals(s.list[i], positive, negative);
  } else if (head == "not") {
    if (!negative || s.list.size() != 2) parse_fail("negation is only allowed in effects");
    negative->push_back(parse_atom(s.list[1]));
  } else {
    positive.push_back(parse_atom(s));
  }
}

const Sexp& section(const Sexp& def, const std::string& key) {
  for (std::size_t i = 2; i < def.list.size(); ++i)
    if (def.list[i].is_list && !def.list[i].list.empty() && !def.list[i].list[0].is_list &&
        def.list[i].list[0].atom == key)
      return def.list[i];
  parse_fail("missing section " + key);
}

const Sexp* find_section(const Sexp& def, const std::string& key) {
  for (std::size_t i = 2; i < def.list.size(); ++i)
    if (def.list[i].is_list && !def.list[i].list.empty() && !def.list[i].list[0].is_list &&
        def.list[i].list[0].atom == key)
      return &def.list[i];
  return nullptr;
}

std::string define_name(const Sexp& def, const std::string& kind) {
  if (!def.is_list || def.list.size() < 2 || symbol(def.list[0]) != "define")
    parse_fail("expected (define (" + kind + " ...) ...)");
  const auto& head = def.list[1];
  if (!head.is_list || head.list.size() != 2 || symbol(head.list[0]) != kind) parse_fail("expected (" + kind + " name)");
  return symbol(head.list[1]);
}

ActionSchema parse_action(const Sexp& s) {
  if (s.list.size() < 2) parse_fail("action without a name");
  ActionSchema a;
  a.name = symbol(s.list[1]);
  for (std::size_t i = 2; i + 1 < s.list.size(); i += 2) {
    const auto& key = symbol(s.list[i]);
    const auto& value = s.list[i + 1];
    if (key == ":parameters") {
      if (!value.is_list) parse_fail("parameters must be a list");
      a.parameters = parse_typed(value.list, 0);
    } else if (key == ":precondition") {
      parse_literals(value, a.preconditions, nullptr);
    } else if (key == ":effect") {
      parse_literals(value, a.add_effects, &a.del_effects);
    } else {
      parse_fail("unsupported action key " + key);
    }
  }
  return a;
}

}  // namespace

PddlText export_pddl(const PlanningProblem& problem) {
  const auto& d = problem.domain;
  std::ostringstream dom;
  dom << "(define (domain " << d.name << ")\n";
  dom << "  (:requirements :strips :typing)\n";
  dom << "  (:types " << typed_list(d.types) << ")\n";
  dom << "  (:predicates";
  for (const auto& [name, params] : d.predicates) {
    dom << "\n    (" << name;
    if (!params.empty()) dom << " " << typed_list(params);
    dom << ")";
  }
  dom << ")\n";
  for (const auto& a : d.actions) {
    dom << "  (:action " << a.name << "\n";
    dom << "    :parameters (" << typed_list(a.parameters) << ")\n";
    dom << "    :precondition " << conjunction(a.preconditions, {}, "      ") << "\n";
    dom << "    :effect " << conjunction(a.add_effects, a.del_effects, "      ") << ")\n";
  }
  dom << ")\n";

  std::ostringstream prob;
  prob << "(define (problem " << problem.name << ")\n";
  prob << "  (:domain " << d.name << ")\n";
  prob << "  (:objects " << typed_list(problem.objects) << ")\n";
  prob << "  (:init";
  for (const auto& a : problem.init) prob << "\n    " << to_string(a);
  prob << ")\n";
  prob << "  (:goal " << conjunction(problem.goal, {}, "    ") << "))\n";
  return {dom.str(), prob.str()};
}

PlanningProblem import_pddl(const std::string& domain_text, const std::string& problem_text) {
  PlanningProblem p;

  Reader dr(domain_text);
  const Sexp dom = dr.read();
  dr.expect_end();
  p.domain.name = define_name(dom, "domain");
  if (const auto* types = find_section(dom, ":types")) p.domain.types = parse_typed(types->list, 1);
  for (std::size_t i = 1; i < section(dom, ":predicates").list.size(); ++i) {
    const auto& pred = section(dom, ":predicates").list[i];
    if (!pred.is_list || pred.list.empty()) parse_fail("malformed predicate declaration");
    p.domain.predicates.emplace_back(symbol(pred.list[0]), parse_typed(pred.list, 1));
  }
  for (std::size_t i = 2; i < dom.list.size(); ++i) {
    const auto& s = dom.list[i];
    if (s.is_list && !s.list.empty() && !s.list[0].is_list && s.list[0].atom == ":action")
      p.domain.actions.push_back(parse_action(s));
  }

  Reader pr(problem_text);
  const Sexp prob = pr.read();
  pr.expect_end();
  p.name = define_name(prob, "problem");
  const auto& dom_ref = section(prob, ":domain");
  if (dom_ref.list.size() != 2 || symbol(dom_ref.list[1]) != p.domain.name)
    parse_fail("problem refers to a different domain");
  if (const auto* objects = find_section(prob, ":objects")) p.objects = parse_typed(objects->list, 1);
  const auto& init = section(prob, ":init");
  for (std::size_t i = 1; i < init.list.size(); ++i) p.init.insert(parse_atom(init.list[i]));
  const auto& goal = section(prob, ":goal");
  if (goal.list.size() != 2) parse_fail("goal must hold one formula");
  parse_literals(goal.list[1], p.goal, nullptr);
  return p;
}

}  // namespace relevance
