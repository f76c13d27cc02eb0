#pragma once

// Umbrella header.

#include "ca/ced/graph.hpp"
#include "ca/ced/model.hpp"
#include "ca/ced/parser.hpp"
#include "ca/derive.hpp"
#include "ca/diagnostic.hpp"
#include "ca/lint.hpp"
#include "ca/msl.hpp"
#include "ca/partition/check.hpp"
#include "ca/partition/merge.hpp"
#include "ca/render.hpp"
#include "ca/templates.hpp"
#include "ca/workspace.hpp"
