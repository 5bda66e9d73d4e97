#include <sstream>

#include "sessionlr/syntax.hpp"

namespace slr {
namespace {

std::string sec_str(const SecPtr& t) {
  if (t->kind != SecTerm::Kind::kJoin) return t->name;
  std::string rhs = sec_str(t->rhs);
  if (t->rhs->kind == SecTerm::Kind::kJoin) rhs = "(" + rhs + ")";
  return sec_str(t->lhs) + " | " + rhs;
}

std::string bracket_sec(const SecPtr& t) {
  std::string s = sec_str(t);
  return t->kind == SecTerm::Kind::kJoin ? "(" + s + ")" : s;
}

std::string chan_str(const Chan& c) {
  std::string s = to_string(c);
  if (c.annot) s += "^" + bracket_sec(c.annot);
  return s;
}

std::string subst_str(const SecSubst& s) {
  if (s.empty()) return "";
  std::string out = "[";
  bool first = true;
  for (const auto& [v, t] : s) {
    if (!first) out += ", ";
    first = false;
    out += v + " -> " + sec_str(t);
  }
  return out + "]";
}

std::string args_str(const std::vector<Chan>& as) {
  std::string out = "(";
  for (size_t i = 0; i < as.size(); ++i) {
    if (i) out += ", ";
    out += chan_str(as[i]);
  }
  return out + ")";
}

void term_rec(const TermPtr& t, int ind, std::ostringstream& os) {
  std::string pad(ind, ' ');
  os << pad;
  switch (t->kind) {
    case Term::Kind::kSendLabel:
      os << chan_str(t->chan) << "." << t->label << ";\n";
      return term_rec(t->cont, ind, os);
    case Term::Kind::kCase:
      os << "case " << chan_str(t->chan) << " {\n";
      for (size_t i = 0; i < t->branches.size(); ++i) {
        std::ostringstream arm;
        term_rec(t->branches[i].second, ind + 4, arm);
        std::string body = arm.str();
        body.pop_back();
        os << pad << "  " << t->branches[i].first << " =>\n"
           << body << (i + 1 < t->branches.size() ? ",\n" : "\n");
      }
      os << pad << "}\n";
      return;
    case Term::Kind::kSendChan:
      os << "send " << chan_str(t->sent) << " " << chan_str(t->chan) << ";\n";
      return term_rec(t->cont, ind, os);
    case Term::Kind::kRecvChan:
      os << t->binder << " <- recv " << chan_str(t->chan) << ";\n";
      return term_rec(t->cont, ind, os);
    case Term::Kind::kClose:
      os << "close " << chan_str(t->chan) << "\n";
      return;
    case Term::Kind::kWait:
      os << "wait " << chan_str(t->chan) << ";\n";
      return term_rec(t->cont, ind, os);
    case Term::Kind::kSpawn:
      os << t->binder << " <- " << t->proc << subst_str(t->subst) << " <- "
         << args_str(t->args) << ";\n";
      return term_rec(t->cont, ind, os);
    case Term::Kind::kFwd:
      os << "fwd " << chan_str(t->chan) << " " << chan_str(t->sent) << "\n";
      return;
    case Term::Kind::kTailCall:
      os << chan_str(t->chan) << " <- " << t->proc << subst_str(t->subst)
         << " <- " << args_str(t->args) << "\n";
      return;
  }
}

std::string type_str(const TypePtr& t);

std::string type_operand(const TypePtr& t, bool wrap_tensor) {
  bool wrap = t->kind == Type::Kind::kLolli ||
              (wrap_tensor && t->kind == Type::Kind::kTensor);
  return wrap ? "(" + type_str(t) + ")" : type_str(t);
}

std::string type_str(const TypePtr& t) {
  switch (t->kind) {
    case Type::Kind::kOne:
      return "1";
    case Type::Kind::kVar:
      return t->name;
    case Type::Kind::kPlus:
    case Type::Kind::kWith: {
      std::string s = t->kind == Type::Kind::kPlus ? "+{" : "&{";
      for (size_t i = 0; i < t->choices.size(); ++i) {
        if (i) s += ", ";
        s += t->choices[i].first + ": " + type_str(t->choices[i].second);
      }
      return s + "}";
    }
    case Type::Kind::kTensor:
      // right operand of * may be another *, never a bare -o
      return type_operand(t->left, true) + " * " + type_operand(t->right, false);
    case Type::Kind::kLolli:
      return type_operand(t->left, false) + " -o " + type_str(t->right);
  }
  return "?";
}

}  // namespace

std::string print_type(const TypePtr& t) { return t ? type_str(t) : "<none>"; }

std::string print_term(const TermPtr& t, int indent) {
  std::ostringstream os;
  term_rec(t, indent, os);
  return os.str();
}

std::string print_proc(const ProcDef& p) {
  std::ostringstream os;
  os << "proc";
  if (!p.theory.name.empty()) os << "[" << p.theory.name << "]";
  os << " " << p.name << " (";
  for (size_t i = 0; i < p.context.size(); ++i) {
    const auto& e = p.context[i];
    if (i) os << ", ";
    os << e.var << ": " << print_type(e.type);
    if (e.sec) os << "[" << sec_str(e.sec) << "]";
  }
  os << ")";
  if (p.running) os << " @" << bracket_sec(p.running);
  os << " :: (" << p.offered << ": " << print_type(p.offered_type);
  if (p.offered_sec) os << "[" << sec_str(p.offered_sec) << "]";
  os << ") = {\n" << print_term(p.body, 2) << "}\n";
  return os.str();
}

std::string print_signature(const Signature& sig) {
  std::ostringstream os;
  if (sig.has_lattice) {
    os << "secrecy {";
    for (size_t r = 0; r < sig.lattice.rows.size(); ++r) {
      os << (r ? "; " : " ");
      for (size_t i = 0; i < sig.lattice.rows[r].size(); ++i)
        os << (i ? " " : "") << sig.lattice.rows[r][i];
    }
    os << " }\n\n";
  }
  for (const auto& th : sig.theories) {
    os << "theory " << th.name << "(";
    for (size_t i = 0; i < th.vars.size(); ++i) os << (i ? ", " : "") << th.vars[i];
    os << ") {";
    for (size_t i = 0; i < th.hyps.size(); ++i)
      os << (i ? "; " : " ") << sec_str(th.hyps[i].lo) << " <= " << sec_str(th.hyps[i].hi);
    os << " }\n";
  }
  if (!sig.theories.empty()) os << "\n";
  for (const auto& d : sig.types) os << "type " << d.name << " = " << print_type(d.body) << "\n";
  if (!sig.types.empty()) os << "\n";
  for (const auto& p : sig.procs) os << print_proc(p) << "\n";
  return os.str();
}

}  // namespace slr
