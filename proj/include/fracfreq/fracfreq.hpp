#pragma once

#include "fracfreq/model.hpp"
#include "fracfreq/response.hpp"
#include "fracfreq/stability.hpp"
#include "fracfreq/identify.hpp"
#include "fracfreq/parse.hpp"
#include "fracfreq/io.hpp"
#include "fracfreq/svg.hpp"
