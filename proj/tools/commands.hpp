#pragma once

#include <CLI11.hpp>

namespace vithsd::cli {

void add_stream_commands(CLI::App& app);
void add_serve_command(CLI::App& app);

}  // namespace vithsd::cli
