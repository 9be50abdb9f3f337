#pragma once

#include "CLI11.hpp"
#include "cli_support.hpp"

namespace artic::cli {

/// Adds every subcommand to `app`. A subcommand's callback stores its exit status in
/// `exit_code`; errors propagate as exceptions.
void register_commands(CLI::App& app, const CommonOptions& common, int& exit_code);

}  // namespace artic::cli
