#pragma once

#include <CLI11.hpp>

#include "context.hpp"

namespace goba::cli {

void register_inject(CLI::App& app, Context& ctx);
void register_eval(CLI::App& app, Context& ctx);
void register_verify(CLI::App& app, Context& ctx);
void register_audit(CLI::App& app, Context& ctx);
void register_synth(CLI::App& app, Context& ctx);
void register_report(CLI::App& app, Context& ctx);

} // namespace goba::cli
