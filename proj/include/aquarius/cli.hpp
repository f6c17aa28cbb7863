/**
 * @file cli.hpp
 * @brief The `aquarius` operator command line
 *
 * Subcommands: ingest, simulate, fixture, queue, adjudicate, metrics, serve,
 * replay. Exit codes: 0 success, 1 validation or data errors, 2 usage errors.
 * The event log comes from --log, else $AQUARIUS_LOG, else the config file.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aquarius::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 1;
inline constexpr int exit_usage = 2;

[[nodiscard]] auto run_cli(const std::vector<std::string>& args, std::ostream& out,
                           std::ostream& err) -> int;

[[nodiscard]] auto run_cli(int argc, const char* const* argv, std::ostream& out,
                           std::ostream& err) -> int;

}  // namespace aquarius::cli
