#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "whorl/field.hpp"
#include "whorl/portrait.hpp"

namespace whorl::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kFieldError = 2, kNumericalError = 3 };

// Preset class name -> theta: concentric 0, spiral-ur-ll 0.2, spiral-lr-ul -0.2, composite-s 0.9.
double preset_theta(const std::string& name);

Window parse_window(const std::string& text);
std::vector<SeedStrategy> parse_seeds(const std::string& text);

// Writes through a temporary file in the same directory and renames it into
// place, so a failed run never leaves a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

// args excludes the program name. `styled` enables ANSI colour in tables.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool styled = false);

}  // namespace whorl::cli
