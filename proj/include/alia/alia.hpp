// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header: the whole pipeline from attack-description source to
// execution report.
//
//   parse()  ->  check()  ->  compile()  ->  execute()
//   parser       analyzer     compiler       executor + sim::Simulator

#pragma once

#include "alia/adapter.hpp"
#include "alia/analyzer.hpp"
#include "alia/assertions.hpp"
#include "alia/ast.hpp"
#include "alia/can_frame.hpp"
#include "alia/clock.hpp"
#include "alia/compiled_script.hpp"
#include "alia/compiler.hpp"
#include "alia/diagnostics.hpp"
#include "alia/errors.hpp"
#include "alia/executor.hpp"
#include "alia/knowledge_base.hpp"
#include "alia/lexer.hpp"
#include "alia/parser.hpp"
#include "alia/report.hpp"
#include "alia/service.hpp"
#include "alia/sim/bus.hpp"
#include "alia/sim/config.hpp"
#include "alia/sim/shell.hpp"
#include "alia/sim/simulator.hpp"
#include "alia/tool_mapping.hpp"
#include "alia/value.hpp"
