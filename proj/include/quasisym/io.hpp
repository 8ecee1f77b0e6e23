#pragma once

#include "quasisym/convexity.hpp"
#include "quasisym/nonlin.hpp"
#include "quasisym/planar.hpp"
#include "quasisym/radial.hpp"

#include <string>

namespace quasisym::io {

/// 12 significant digits, lowercase scientific notation. Every floating
/// value written by the tools goes through this so outputs are
/// byte-deterministic across runs.
std::string fmt12(double x);

/// Whole-file write through a temporary sibling plus rename, so readers never
/// observe a half-written file. Throws io_error on any failure.
void write_text_atomic(const std::string &path, const std::string &content);

std::string read_text(const std::string &path);

void write_profile_csv(const std::string &path, const ProfileTable &table);

void write_g_table_csv(const std::string &path, const GFunction &g);

void write_solution_csv(const std::string &path, const RadialSolution &sol);
RadialSolution read_solution_csv(const std::string &path);

void write_field_csv(const std::string &path, const PlanarField &field);
PlanarField read_field_csv(const std::string &path);

} // namespace quasisym::io
