#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gaitmind/error.hpp"
#include "gaitmind/evaluation.hpp"

namespace gaitmind::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kConfigError = 2,
  kDataError = 3,
  kIoError = 4,
};

int exit_code_for(ErrorKind kind);

/// Runs one command line (args exclude the program name). Progress goes to
/// `out`, diagnostics to `err`. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Static SVG figures: error bars by protocol per sensor setup, and transfer
/// error against training fraction.
std::string svg_error_bars(std::span<const AggregateRow> rows);
std::string svg_transfer_curve(std::span<const AggregateRow> rows);

}  // namespace gaitmind::cli
