#include "testing.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace slr::testing {

std::string corpus_path(const std::string& file) {
  return std::string(SESSIONLR_CORPUS_DIR) + "/" + file;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot read " << path << "\n";
    std::abort();
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> corpus_files() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(SESSIONLR_CORPUS_DIR))
    if (e.path().extension() == ".sill") out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

Signature load(const std::string& file) {
  auto r = parse_signature(read_file(corpus_path(file)));
  if (!r.ok()) {
    for (const auto& d : r.errors) std::cerr << file << ": " << to_string(d) << "\n";
    std::abort();
  }
  Signature sig = *r;
  install_forwarders(sig);
  return sig;
}

Signature load_plain(const std::string& file) {
  Signature sig = erase(load(file));
  install_forwarders(sig);
  return sig;
}

Semilattice lattice(const Signature& sig) {
  auto r = validate_semilattice(sig.lattice);
  if (!r.ok()) {
    std::cerr << "invalid lattice\n";
    std::abort();
  }
  return *r;
}

Configuration closed(const Signature& plain, const std::string& name) {
  return init_config(name, RunContext{&plain, nullptr, true});
}

}  // namespace slr::testing
