#pragma once

#include <string>
#include <vector>

#include "sessionlr/equiv.hpp"
#include "sessionlr/lattice.hpp"
#include "sessionlr/runtime.hpp"
#include "sessionlr/syntax.hpp"
#include "sessionlr/typecheck.hpp"

namespace slr::testing {

std::string corpus_path(const std::string& file);
std::string read_file(const std::string& path);
std::vector<std::string> corpus_files();  // *.sill, sorted

// Parsed corpus file with forwarders installed; aborts the test binary on
// a syntax error since every later check depends on it.
Signature load(const std::string& file);
// Secrecy erased, forwarders installed.
Signature load_plain(const std::string& file);
Semilattice lattice(const Signature& sig);

// Closed process `name` of a plain signature, tail calls run in place.
Configuration closed(const Signature& plain, const std::string& name);

}  // namespace slr::testing
