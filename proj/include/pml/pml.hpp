#pragma once

#include "pml/term.hpp"
#include "pml/constraints.hpp"
#include "pml/core.hpp"
#include "pml/dsl/lexer.hpp"
#include "pml/dsl/parser.hpp"
#include "pml/dsl/printer.hpp"
#include "pml/dsl/resolver.hpp"
#include "pml/analysis/signature.hpp"
#include "pml/analysis/roles.hpp"
#include "pml/analysis/inheritance.hpp"
#include "pml/analysis/dispatch.hpp"
#include "pml/analysis/conflicts.hpp"
#include "pml/analysis/hierarchy.hpp"
#include "pml/report.hpp"
