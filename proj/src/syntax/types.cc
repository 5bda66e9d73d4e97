#include <set>

#include "sessionlr/syntax.hpp"

namespace slr {
namespace {

void undefined_vars(const TypePtr& t, const Signature& sig, std::vector<Diagnostic>& out) {
  switch (t->kind) {
    case Type::Kind::kOne:
      return;
    case Type::Kind::kVar:
      if (!sig.find_type(t->name))
        out.push_back({t->span, "TVar", "undefined type " + t->name, ""});
      return;
    case Type::Kind::kPlus:
    case Type::Kind::kWith:
      for (const auto& [l, b] : t->choices) undefined_vars(b, sig, out);
      return;
    case Type::Kind::kTensor:
    case Type::Kind::kLolli:
      undefined_vars(t->left, sig, out);
      undefined_vars(t->right, sig, out);
      return;
  }
}

}  // namespace

std::vector<Diagnostic> check_contractive(const TypeDef& def, const Signature& sig) {
  std::vector<Diagnostic> out;
  undefined_vars(def.body, sig, out);
  if (!out.empty()) return out;
  // Follow constructor-free edges Y = Z from def; a revisit is a cycle.
  std::set<std::string> seen{def.name};
  TypePtr cur = def.body;
  while (cur->kind == Type::Kind::kVar) {
    if (!seen.insert(cur->name).second) {
      out.push_back({def.span, "Sig2",
                     "type " + def.name + " is not contractive (" + cur->name +
                         " recurs without a message exchange)",
                     ""});
      return out;
    }
    const TypeDef* next = sig.find_type(cur->name);
    if (!next) {
      out.push_back({def.span, "TVar", "undefined type " + cur->name, ""});
      return out;
    }
    cur = next->body;
  }
  return out;
}

TypePtr unfold(const TypePtr& t, const Signature& sig) {
  TypePtr cur = t;
  size_t hops = 0;
  while (cur->kind == Type::Kind::kVar) {
    const TypeDef* d = sig.find_type(cur->name);
    if (!d) throw Error("undefined type " + cur->name);
    if (++hops > sig.types.size()) throw Error("type " + t->name + " is not contractive");
    cur = d->body;
  }
  return cur;
}

bool type_equal(const TypePtr& a, const TypePtr& b, const Signature& sig) {
  std::set<std::pair<const Type*, const Type*>> assumed;
  std::vector<std::pair<TypePtr, TypePtr>> work{{a, b}};
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    if (x == y) continue;
    if (!assumed.insert({x.get(), y.get()}).second) continue;
    TypePtr ux = unfold(x, sig), uy = unfold(y, sig);
    if (ux->kind != uy->kind) return false;
    switch (ux->kind) {
      case Type::Kind::kOne:
        break;
      case Type::Kind::kPlus:
      case Type::Kind::kWith:
        if (ux->choices.size() != uy->choices.size()) return false;
        for (const auto& [l, tx] : ux->choices) {
          TypePtr ty = uy->branch(l);
          if (!ty) return false;
          work.push_back({tx, ty});
        }
        break;
      case Type::Kind::kTensor:
      case Type::Kind::kLolli:
        work.push_back({ux->left, uy->left});
        work.push_back({ux->right, uy->right});
        break;
      case Type::Kind::kVar:
        return false;  // unreachable after unfold
    }
  }
  return true;
}

}  // namespace slr
