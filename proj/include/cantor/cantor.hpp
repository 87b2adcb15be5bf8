#pragma once

#include "cantor/error.hpp"
#include "cantor/bitcore.hpp"
#include "cantor/streams.hpp"
#include "cantor/enumeration.hpp"
#include "cantor/constructions.hpp"
#include "cantor/inversion.hpp"
#include "cantor/spec.hpp"
