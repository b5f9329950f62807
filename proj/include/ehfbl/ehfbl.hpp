#pragma once

// Convenience umbrella for the whole library.

#include "ehfbl/errors.hpp"
#include "ehfbl/numerics.hpp"
#include "ehfbl/ehmodel.hpp"
#include "ehfbl/bounds.hpp"
#include "ehfbl/codec.hpp"
#include "ehfbl/harness.hpp"
