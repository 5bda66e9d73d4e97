#include <algorithm>
#include <set>
#include <string>

#include "internal.hpp"

namespace slr {
namespace {

std::set<std::string> bases(const Configuration& c) {
  std::set<std::string> out;
  map_chans(c, [&](const Chan& ch) {
    out.insert(ch.name);
    return ch;
  });
  return out;
}

std::set<std::string> free_bases(const Configuration& c) {
  std::set<std::string> out;
  for (const auto& d : c.clients) out.insert(d.chan.name);
  for (const auto& d : offered(c)) out.insert(d.chan.name);
  return out;
}

}  // namespace

Configuration rename_base(const Configuration& c, const std::string& from, const std::string& to) {
  return map_chans(c, [&](const Chan& ch) { return ch.name == from ? Chan(to, ch.gen) : ch; });
}

Configuration link(const Configuration& provider, const Configuration& client,
                   const Signature& sig) {
  auto offers = interface_of(provider).offered;
  if (offers.size() != 1) throw Error("link: provider must offer exactly one channel");
  const ChanDecl x = offers[0];
  const ChanDecl* use = find_client(client, x.chan);
  if (!use) throw Error("link: " + to_string(x.chan) + " is not a client channel");
  if (!type_equal(use->type, x.type, sig))
    throw Error("link: " + to_string(x.chan) + " offered as " + print_type(x.type) +
                " but used as " + print_type(use->type));

  std::set<std::string> taken = bases(client);
  std::set<std::string> pfree = free_bases(provider);
  for (const auto& d : provider.clients)
    if (find_client(client, d.chan) || provider_of(client, d.chan) >= 0)
      throw Error("link: free channel " + to_string(d.chan) + " on both sides");

  Configuration p = provider;
  std::set<std::string> pb = bases(provider);
  taken.insert(pb.begin(), pb.end());
  for (const auto& b : pb) {
    if (pfree.count(b) || !bases(client).count(b)) continue;
    std::string fresh = b;
    while (taken.count(fresh)) fresh += "'";
    taken.insert(fresh);
    p = rename_base(p, b, fresh);
  }

  Configuration out = client;
  out.clients.erase(std::remove_if(out.clients.begin(), out.clients.end(),
                                   [&](const ChanDecl& d) { return d.chan == x.chan; }),
                    out.clients.end());
  out.clients.insert(out.clients.end(), p.clients.begin(), p.clients.end());
  out.nodes.insert(out.nodes.begin(), p.nodes.begin(), p.nodes.end());
  out.next_fresh = std::max(client.next_fresh, provider.next_fresh);
  return out;
}

Interface project_context(const SecInterface& s, const Semilattice& lat) {
  Interface out;
  for (const auto& e : s.ctx)
    if (lat.leq(e.level, s.observer)) out.clients.push_back({e.chan, e.type, nullptr});
  if (lat.leq(s.offered.level, s.observer))
    out.offered.push_back({s.offered.chan, s.offered.type, nullptr});
  else
    out.offered.push_back({Chan(kHole, 0), Type::One(), nullptr});
  return out;
}

}  // namespace slr
