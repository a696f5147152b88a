#pragma once

#include <string>

#include "run_config.hpp"

namespace cli {

// defaults for one subcommand's block (and any shared block it changes)
json command_defaults(const std::string& cmd);

// results and invariants go into the report; its exit_code() is the verdict
void cmd_eigen(const json& cfg, Report& rep, int threads);
void cmd_kernel(const json& cfg, Report& rep, int threads);
void cmd_besov(const json& cfg, Report& rep, int threads);
void cmd_decay(const json& cfg, Report& rep, int threads);
void cmd_sizes(const json& cfg, Report& rep, int threads);
void cmd_hormander(const json& cfg, Report& rep, int threads);
void cmd_multiplier(const json& cfg, Report& rep, int threads);
void cmd_evolve(const json& cfg, Report& rep, int threads);

void run_command(const std::string& cmd, const json& cfg, Report& rep, int threads);

} // namespace cli
