#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "satf/instance.hpp"

namespace satf {

// DIMACS CNF: "p cnf <n> <m>" header, 1-indexed signed literals, each clause
// terminated by 0. Comment lines start with 'c'. The writer emits
// "c satf k <k>" and, when known, "c satf seed <seed>"; the reader honours
// them so a round trip reproduces the instance exactly.
//
// Parse failures throw Error(parse_error) with a 1-based line number.
KSatInstance read_dimacs(std::string_view text);
std::string write_dimacs(const KSatInstance& instance);

KSatInstance load_dimacs(const std::filesystem::path& path);
void save_dimacs(const KSatInstance& instance, const std::filesystem::path& path);

}  // namespace satf
