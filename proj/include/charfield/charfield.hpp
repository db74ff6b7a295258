#pragma once

#include "charfield/error.hpp"
#include "charfield/numutil.hpp"
#include "charfield/ff_core.hpp"
#include "charfield/polyring.hpp"
#include "charfield/characters.hpp"
#include "charfield/freeness.hpp"
#include "charfield/charsum.hpp"
#include "charfield/lineprops.hpp"
#include "charfield/funcfield.hpp"
#include "charfield/parallel.hpp"
