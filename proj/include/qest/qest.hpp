#pragma once

#include "qest/catalog.hpp"
#include "qest/channel.hpp"
#include "qest/core.hpp"
#include "qest/errors.hpp"
#include "qest/estimation.hpp"
#include "qest/lownoise.hpp"
#include "qest/unitary.hpp"
